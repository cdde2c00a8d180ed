"""Exact arithmetic substrate.

Everything in this module is exact: arbitrary-precision rationals
(``fractions.Fraction``), sparse multivariate polynomials over the three
formal variables Q, X, Y, rational functions built from them, dense
univariate polynomials in q, and truncated formal power series in q.

The three-variable layer exists to make shift operators rational: with
X standing for q**n and Y standing for q**k, the shift n -> n+1 is the
substitution X -> Q*X and k -> k+1 is Y -> Q*Y.  Monomials are exponent
triples (eQ, eX, eY).

All containers here are immutable in practice (no method mutates ``self``),
so values can be shared freely across threads; the only module-level state
is memoization of already-computed immutable values.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Union

from .errors import DomainError, InexactDivisionError, NotInvertibleError, PoleError

BigRat = Fraction

Monomial = tuple[int, int, int]
Scalar = Union[int, Fraction]

_VAR_INDEX = {"Q": 0, "X": 1, "Y": 2}


def _as_fraction(value: Scalar) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected int or Fraction, got {type(value).__name__}")


def _grlex_key(mono: Monomial) -> tuple[int, Monomial]:
    return (mono[0] + mono[1] + mono[2], mono)


class MultiPoly:
    """Sparse polynomial in Q, X, Y with Fraction coefficients.

    Terms are stored as a dict mapping exponent triples to nonzero
    coefficients.  Supports ring arithmetic, exact evaluation, and the two
    shift substitutions X -> Q*X and Y -> Q*Y.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Monomial, Scalar]] = None):
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for mono, coeff in terms.items():
                c = _as_fraction(coeff)
                if c:
                    eq, ex, ey = mono
                    if eq < 0 or ex < 0 or ey < 0:
                        raise DomainError(f"negative exponent in monomial {mono}")
                    clean[(eq, ex, ey)] = c
        self.terms = clean

    # -- constructors -------------------------------------------------

    @classmethod
    def constant(cls, value: Scalar) -> "MultiPoly":
        c = _as_fraction(value)
        return cls({(0, 0, 0): c} if c else {})

    @classmethod
    def variable(cls, name: str) -> "MultiPoly":
        if name not in _VAR_INDEX:
            raise DomainError(f"unknown variable {name!r}; expected Q, X or Y")
        mono = [0, 0, 0]
        mono[_VAR_INDEX[name]] = 1
        return cls({tuple(mono): Fraction(1)})

    # -- basic queries -------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def leading_term(self) -> tuple[Monomial, Fraction]:
        """Largest term in graded-lexicographic order; errors on the zero polynomial."""
        if not self.terms:
            raise DomainError("zero polynomial has no leading term")
        mono = max(self.terms, key=_grlex_key)
        return mono, self.terms[mono]

    # -- ring arithmetic -----------------------------------------------

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.constant(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for mono, coeff in other.terms.items():
            s = out.get(mono, Fraction(0)) + coeff
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        result = MultiPoly.__new__(MultiPoly)
        result.terms = out
        return result

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        result = MultiPoly.__new__(MultiPoly)
        result.terms = {mono: -coeff for mono, coeff in self.terms.items()}
        return result

    def __sub__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "MultiPoly":
        return (-self) + other

    def __mul__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out: dict[Monomial, Fraction] = {}
        for (aq, ax, ay), ca in self.terms.items():
            for (bq, bx, by), cb in other.terms.items():
                mono = (aq + bq, ax + bx, ay + by)
                s = out.get(mono, Fraction(0)) + ca * cb
                if s:
                    out[mono] = s
                else:
                    out.pop(mono, None)
        result = MultiPoly.__new__(MultiPoly)
        result.terms = out
        return result

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "MultiPoly":
        if not isinstance(exponent, int) or exponent < 0:
            raise DomainError("polynomial powers must be nonnegative integers")
        result = MultiPoly.constant(1)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.constant(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- substitution and evaluation ------------------------------------

    def step_n(self) -> "MultiPoly":
        """Substitute X -> Q*X, the image of the shift n -> n+1."""
        result = MultiPoly.__new__(MultiPoly)
        result.terms = {(eq + ex, ex, ey): c for (eq, ex, ey), c in self.terms.items()}
        return result

    def step_k(self) -> "MultiPoly":
        """Substitute Y -> Q*Y, the image of the shift k -> k+1."""
        result = MultiPoly.__new__(MultiPoly)
        result.terms = {(eq + ey, ex, ey): c for (eq, ex, ey), c in self.terms.items()}
        return result

    def eval(self, qv: Scalar, xv: Scalar, yv: Scalar) -> Fraction:
        """Exact evaluation at rational Q=qv, X=xv, Y=yv."""
        qv, xv, yv = _as_fraction(qv), _as_fraction(xv), _as_fraction(yv)
        total = Fraction(0)
        for (eq, ex, ey), coeff in self.terms.items():
            total += coeff * qv**eq * xv**ex * yv**ey
        return total

    def __repr__(self) -> str:
        if not self.terms:
            return "MultiPoly(0)"
        parts = []
        for mono in sorted(self.terms, key=_grlex_key, reverse=True):
            coeff = self.terms[mono]
            body = "".join(
                f"*{name}^{e}" if e > 1 else (f"*{name}" if e == 1 else "")
                for name, e in zip("QXY", mono)
            )
            parts.append(f"{coeff}{body}")
        return "MultiPoly(" + " + ".join(parts) + ")"


POLY_ONE = MultiPoly.constant(1)
Q = MultiPoly.variable("Q")
X = MultiPoly.variable("X")
Y = MultiPoly.variable("Y")


class RatFunc:
    """Quotient of two MultiPoly values; the denominator must be nonzero.

    No gcd is taken: equality of quotients is decided by cross-multiplication
    (see :func:`ratfunc_equal`).  To keep coefficient growth in check, both
    parts are rescaled so the denominator's graded-lex leading coefficient
    is one; this changes nothing mathematically.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=POLY_ONE):
        if isinstance(num, (int, Fraction)):
            num = MultiPoly.constant(num)
        if isinstance(den, (int, Fraction)):
            den = MultiPoly.constant(den)
        if den.is_zero():
            raise DomainError("rational function with zero denominator")
        _, lead = den.leading_term()
        if lead != 1:
            inv = 1 / lead
            num = num * inv
            den = den * inv
        self.num = num
        self.den = den

    def _coerce(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, (int, Fraction, MultiPoly)):
            return RatFunc(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other) -> "RatFunc":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den)

    def __sub__(self, other) -> "RatFunc":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "RatFunc":
        return (-self) + other

    def __mul__(self, other) -> "RatFunc":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RatFunc":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.num.is_zero():
            raise DomainError("division of rational functions by zero")
        return RatFunc(self.num * other.den, self.den * other.num)

    def step_n(self) -> "RatFunc":
        return RatFunc(self.num.step_n(), self.den.step_n())

    def step_k(self) -> "RatFunc":
        return RatFunc(self.num.step_k(), self.den.step_k())

    def eval(self, qv: Scalar, xv: Scalar, yv: Scalar) -> Fraction:
        dv = self.den.eval(qv, xv, yv)
        if dv == 0:
            raise PoleError(f"denominator vanishes at Q={qv}, X={xv}, Y={yv}")
        return self.num.eval(qv, xv, yv) / dv

    def __repr__(self) -> str:
        return f"RatFunc({self.num!r} / {self.den!r})"


class EqualityResult:
    """Outcome of a rational-function equality test.

    ``equal`` is the verdict; when False, ``witness`` holds the leading
    (graded-lex) monomial and coefficient of the cross-multiplied
    difference, a concrete certificate of inequality.
    """

    __slots__ = ("equal", "witness")

    def __init__(self, equal: bool, witness: Optional[tuple[Monomial, Fraction]] = None):
        self.equal = equal
        self.witness = witness

    def __bool__(self) -> bool:
        return self.equal

    def __repr__(self) -> str:
        return f"EqualityResult(equal={self.equal}, witness={self.witness})"


def ratfunc_equal(left: RatFunc, right: RatFunc) -> EqualityResult:
    """Decide left == right by cross-multiplication.

    Returns an EqualityResult; no gcd computation is involved, so the cost
    is two polynomial products and a subtraction.
    """
    if not isinstance(left, RatFunc) or not isinstance(right, RatFunc):
        raise DomainError("ratfunc_equal expects two RatFunc values")
    diff = left.num * right.den - right.num * left.den
    if diff.is_zero():
        return EqualityResult(True)
    return EqualityResult(False, diff.leading_term())


# ---------------------------------------------------------------------------
# Dense univariate polynomials in q
# ---------------------------------------------------------------------------


class UniPoly:
    """Dense univariate polynomial in q with Fraction coefficients.

    Coefficients are stored little-endian (index = exponent) with the
    trailing zeros trimmed; the zero polynomial is the empty tuple and has
    degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        buf = [_as_fraction(c) for c in coeffs]
        while buf and not buf[-1]:
            buf.pop()
        self.coeffs = tuple(buf)

    @classmethod
    def one(cls) -> "UniPoly":
        return cls((1,))

    @classmethod
    def monomial(cls, coeff: Scalar, exponent: int) -> "UniPoly":
        if exponent < 0:
            raise DomainError("monomial exponent must be nonnegative")
        return cls([0] * exponent + [coeff])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, exponent: int) -> Fraction:
        if 0 <= exponent < len(self.coeffs):
            return self.coeffs[exponent]
        return Fraction(0)

    def __add__(self, other) -> "UniPoly":
        if isinstance(other, (int, Fraction)):
            other = UniPoly((other,))
        if not isinstance(other, UniPoly):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly(
            [self[i] + other[i] for i in range(n)]
        )

    __radd__ = __add__

    def __neg__(self) -> "UniPoly":
        return UniPoly([-c for c in self.coeffs])

    def __sub__(self, other) -> "UniPoly":
        if isinstance(other, (int, Fraction)):
            other = UniPoly((other,))
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "UniPoly":
        return (-self) + other

    def __mul__(self, other) -> "UniPoly":
        if isinstance(other, (int, Fraction)):
            return UniPoly([c * other for c in self.coeffs])
        if not isinstance(other, UniPoly):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "UniPoly":
        if not isinstance(exponent, int) or exponent < 0:
            raise DomainError("polynomial powers must be nonnegative integers")
        result = UniPoly.one()
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __divmod__(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if not isinstance(other, UniPoly):
            return NotImplemented
        if other.is_zero():
            raise DomainError("polynomial division by zero")
        rem = list(self.coeffs)
        dlead = other.coeffs[-1]
        dn = other.degree
        quot = [Fraction(0)] * max(0, len(rem) - dn)
        for top in range(len(rem) - 1, dn - 1, -1):
            c = rem[top]
            if not c:
                continue
            factor = c / dlead
            quot[top - dn] = factor
            for j in range(dn + 1):
                rem[top - dn + j] -= factor * other.coeffs[j]
        return UniPoly(quot), UniPoly(rem)

    def exact_div(self, other: "UniPoly") -> "UniPoly":
        """Division that raises InexactDivisionError on a nonzero remainder."""
        quot, rem = divmod(self, other)
        if not rem.is_zero():
            raise InexactDivisionError(
                f"polynomial division left remainder of degree {rem.degree}"
            )
        return quot

    def eval(self, point: Scalar) -> Fraction:
        """Exact Horner evaluation at a rational point."""
        point = _as_fraction(point)
        total = Fraction(0)
        for c in reversed(self.coeffs):
            total = total * point + c
        return total

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = UniPoly((other,))
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self) -> str:
        if self.is_zero():
            return "UniPoly(0)"
        parts = []
        for e, c in enumerate(self.coeffs):
            if c:
                parts.append(f"{c}*q^{e}" if e else f"{c}")
        return "UniPoly(" + " + ".join(parts) + ")"


# -- integer coefficient cores ----------------------------------------------
#
# (q;q)_m and the Gaussian binomials have integer coefficients, so the hot
# paths below work on plain int lists and only wrap into Fraction-based
# UniPoly at the public boundary.


def _int_mul_binom(coeffs: list[int], sign: int, j: int) -> list[int]:
    """Multiply an int coefficient list by (1 + sign*q^j), sign in {+1,-1}."""
    out = coeffs + [0] * j
    for i, c in enumerate(coeffs):
        if c:
            out[i + j] += sign * c
    return out

def _int_div_one_minus_qj(coeffs: list[int], j: int) -> list[int]:
    """Exactly divide an int coefficient list by (1 - q^j).

    With S = T*(1-q^j) one has S_i = T_i - T_{i-j}, so T_i = S_i + T_{i-j}
    running upward from i = 0.  Exactness requires the reconstructed T to
    vanish above degree deg(S) - j; anything else raises.
    """
    n = len(coeffs) - 1
    if n < j:
        if any(coeffs):
            raise InexactDivisionError("degree too small for exact division")
        return [0]
    t = [0] * (n + 1)
    for i in range(n + 1):
        t[i] = coeffs[i] + (t[i - j] if i >= j else 0)
    for i in range(n - j + 1, n + 1):
        if t[i]:
            raise InexactDivisionError(f"nonzero remainder dividing by 1-q^{j}")
    return t[: n - j + 1]


@lru_cache(maxsize=None)
def _qq_int(m: int) -> tuple[int, ...]:
    """Integer coefficients of (q;q)_m = prod_{j=1..m} (1 - q^j)."""
    if m == 0:
        return (1,)
    prev = list(_qq_int(m - 1))
    return tuple(_int_mul_binom(prev, -1, m))


@lru_cache(maxsize=None)
def _gaussian_int(n: int, k: int) -> tuple[int, ...]:
    """Integer coefficients of the Gaussian binomial [n choose k]_q.

    Computed as (q;q)_n divided exactly by every factor of (q;q)_k and
    (q;q)_{n-k}; each synthetic division step checks its remainder, which
    doubles as a structural self-test of the product/quotient identity.
    """
    work = list(_qq_int(n))
    for j in range(1, k + 1):
        work = _int_div_one_minus_qj(work, j)
    for j in range(1, n - k + 1):
        work = _int_div_one_minus_qj(work, j)
    if len(work) - 1 != k * (n - k):
        raise InexactDivisionError("gaussian binomial degree check failed")
    return tuple(work)


def gaussian_binomial(n: int, k: int) -> UniPoly:
    """Gaussian binomial coefficient [n choose k]_q as a polynomial in q.

    Zero when k < 0 or k > n; otherwise a degree k*(n-k) polynomial with
    nonnegative integer coefficients.
    """
    if not isinstance(n, int) or not isinstance(k, int) or n < 0:
        raise DomainError("gaussian_binomial expects integers with n >= 0")
    if k < 0 or k > n:
        return UniPoly()
    return UniPoly(_gaussian_int(n, k))


def qpoch_finite_poly(e: int, m: int) -> UniPoly:
    """(q^e; q)_m = prod_{j=0..m-1} (1 - q^{e+j}) as a polynomial, e >= 1."""
    if not isinstance(e, int) or not isinstance(m, int) or e < 1 or m < 0:
        raise DomainError("qpoch_finite_poly expects integer e >= 1 and m >= 0")
    work = [1]
    for j in range(m):
        work = _int_mul_binom(work, -1, e + j)
    return UniPoly(work)


# ---------------------------------------------------------------------------
# Truncated formal power series in q
# ---------------------------------------------------------------------------


class QSeries:
    """Truncated power series sum_{i<=N} c_i q^i, exact Fraction coefficients.

    ``order`` is the truncation order N: coefficients are known and trusted
    through q^N inclusive.  Binary operations truncate eagerly to the
    smaller participating order, so a result never pretends to know more
    than its inputs.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Iterable[Scalar] = ()):
        if not isinstance(order, int) or order < 0:
            raise DomainError("series order must be a nonnegative integer")
        buf = [_as_fraction(c) for c in coeffs][: order + 1]
        buf.extend([Fraction(0)] * (order + 1 - len(buf)))
        self.order = order
        self.coeffs = tuple(buf)

    @classmethod
    def from_unipoly(cls, poly: UniPoly, order: int) -> "QSeries":
        return cls(order, poly.coeffs)

    @classmethod
    def constant(cls, value: Scalar, order: int) -> "QSeries":
        return cls(order, (value,))

    def __getitem__(self, exponent: int) -> Fraction:
        if not 0 <= exponent <= self.order:
            raise DomainError(
                f"coefficient of q^{exponent} is outside truncation order {self.order}"
            )
        return self.coeffs[exponent]

    def truncate(self, order: int) -> "QSeries":
        if order > self.order:
            raise DomainError("cannot extend a truncated series")
        return QSeries(order, self.coeffs[: order + 1])

    def _coerce(self, other) -> "QSeries":
        if isinstance(other, QSeries):
            return other
        if isinstance(other, (int, Fraction)):
            return QSeries.constant(other, self.order)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other) -> "QSeries":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        n = min(self.order, other.order)
        return QSeries(n, [self.coeffs[i] + other.coeffs[i] for i in range(n + 1)])

    __radd__ = __add__

    def __neg__(self) -> "QSeries":
        return QSeries(self.order, [-c for c in self.coeffs])

    def __sub__(self, other) -> "QSeries":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "QSeries":
        return (-self) + other

    def __mul__(self, other) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            return QSeries(self.order, [c * other for c in self.coeffs])
        if not isinstance(other, QSeries):
            return NotImplemented
        n = min(self.order, other.order)
        out = [Fraction(0)] * (n + 1)
        for i, a in enumerate(self.coeffs[: n + 1]):
            if not a:
                continue
            for j in range(n + 1 - i):
                b = other.coeffs[j]
                if b:
                    out[i + j] += a * b
        return QSeries(n, out)

    __rmul__ = __mul__

    def shift(self, m: int) -> "QSeries":
        """Multiply by q^m (m >= 0): coefficients move up, the top m drop off."""
        if m < 0:
            raise DomainError("shift exponent must be nonnegative")
        if m > self.order:
            return QSeries(self.order)
        return QSeries(self.order, [Fraction(0)] * m + list(self.coeffs))

    def mul_binom(self, coeff: Scalar, j: int) -> "QSeries":
        """Multiply by (1 + coeff*q^j) in a single O(order) pass, j >= 1."""
        if j < 1:
            raise DomainError("binomial exponent must be >= 1")
        coeff = _as_fraction(coeff)
        out = list(self.coeffs)
        for i in range(self.order - j + 1):
            if self.coeffs[i]:
                out[i + j] += coeff * self.coeffs[i]
        return QSeries(self.order, out)

    def div_binom(self, coeff: Scalar, j: int) -> "QSeries":
        """Divide by (1 + coeff*q^j) in a single O(order) pass, j >= 1.

        Uses T_i = S_i - coeff*T_{i-j}, the inversion of mul_binom.
        """
        if j < 1:
            raise DomainError("binomial exponent must be >= 1")
        coeff = _as_fraction(coeff)
        out = list(self.coeffs)
        for i in range(j, self.order + 1):
            if out[i - j]:
                out[i] -= coeff * out[i - j]
        return QSeries(self.order, out)

    def eval(self, point: Scalar) -> Fraction:
        """Exact Horner evaluation of the truncated polynomial at a rational point."""
        point = _as_fraction(point)
        total = Fraction(0)
        for c in reversed(self.coeffs):
            total = total * point + c
        return total

    def valuation(self) -> Optional[int]:
        """Exponent of the first nonzero coefficient, or None if all are zero."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return None

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = QSeries.constant(other, self.order)
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, self.coeffs))

    def __repr__(self) -> str:
        head = ", ".join(str(c) for c in self.coeffs[:8])
        tail = ", ..." if self.order >= 8 else ""
        return f"QSeries(order={self.order}, [{head}{tail}])"


def series_invert(series: QSeries) -> QSeries:
    """Multiplicative inverse of a truncated series; needs a nonzero constant term.

    Standard recurrence: with s*t = 1, t_0 = 1/s_0 and
    t_i = -(sum_{j=1..i} s_j t_{i-j}) / s_0.
    """
    if not isinstance(series, QSeries):
        raise DomainError("series_invert expects a QSeries")
    s = series.coeffs
    if not s[0]:
        raise NotInvertibleError("series with zero constant term has no inverse")
    n = series.order
    inv0 = 1 / s[0]
    t = [Fraction(0)] * (n + 1)
    t[0] = inv0
    for i in range(1, n + 1):
        acc = Fraction(0)
        for j in range(1, i + 1):
            if s[j] and t[i - j]:
                acc += s[j] * t[i - j]
        t[i] = -acc * inv0
    return QSeries(n, t)


def series_eval(series: QSeries, point: Scalar) -> Fraction:
    """Exact evaluation of the truncated series at a rational point."""
    if not isinstance(series, QSeries):
        raise DomainError("series_eval expects a QSeries")
    return series.eval(point)


def qpoch_inf_series(e: int, order: int, step: int = 1) -> QSeries:
    """(q^e; q^step)_inf truncated at the given order, for integers e >= 1.

    Only factors (1 - q^{e + j*step}) with exponent <= order can touch the
    retained coefficients, so the product is finite.
    """
    if not isinstance(e, int) or e < 1:
        raise DomainError("qpoch_inf_series expects integer e >= 1")
    if not isinstance(step, int) or step < 1:
        raise DomainError("qpoch_inf_series expects integer step >= 1")
    out = QSeries.constant(1, order)
    j = e
    while j <= order:
        out = out.mul_binom(Fraction(-1), j)
        j += step
    return out
