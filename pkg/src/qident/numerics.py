"""High-precision numeric evaluation on top of the stdlib ``decimal`` module.

Precision is measured in decimal digits throughout.  An :class:`EvalContext`
fixes a target accuracy D plus guard digits g; internal work happens at
W = D + g digits with explicit ``decimal.Context`` objects (never the
thread-local default context), and summation loops stop against the
threshold 10**-(D + g/2) so that accumulated rounding stays safely inside
the guard zone.

:class:`HPReal` tags a ``Decimal`` with the precision it was computed at;
binary operations between tagged values round at the smaller precision, so
a result never claims more accuracy than its least accurate input.

All functions are pure (module-level caches hold only immutable finished
values keyed by precision), so concurrent use is safe.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from decimal import Context, Decimal, ROUND_HALF_EVEN
from fractions import Fraction
from functools import lru_cache
from math import ceil
from typing import Callable, Iterable, Union

from .errors import (
    DomainError,
    InsufficientDecayError,
    PoleError,
    PrecisionBudgetError,
)

NumberLike = Union[int, Fraction, Decimal, "HPReal"]

_EXP_LIMIT = 10**9


@lru_cache(maxsize=None)
def dec_context(prec: int) -> Context:
    """A decimal context with the given precision and wide exponent range."""
    if prec < 1:
        raise DomainError("context precision must be >= 1")
    return Context(prec=prec, rounding=ROUND_HALF_EVEN, Emax=_EXP_LIMIT, Emin=-_EXP_LIMIT)


def dec_from_fraction(fr: Fraction, prec: int) -> Decimal:
    """Round an exact rational to a Decimal with ``prec`` significant digits."""
    c = dec_context(prec)
    return c.divide(Decimal(fr.numerator), Decimal(fr.denominator))


@dataclass(frozen=True)
class EvalContext:
    """Accuracy request: ``target_digits`` of trusted output, plus guards.

    ``work`` is the number of digits actually carried internally.
    """

    target_digits: int
    guard_digits: int = 20

    def __post_init__(self):
        if self.target_digits < 1:
            raise DomainError("target_digits must be >= 1")
        if self.guard_digits < 4:
            raise DomainError("guard_digits must be >= 4")

    @property
    def work(self) -> int:
        return self.target_digits + self.guard_digits

    def context(self) -> Context:
        return dec_context(self.work)

    def stop_threshold(self) -> Decimal:
        """Summation cutoff 10**-(D + g/2): well below the target accuracy,
        but coarse enough that the remaining guard digits absorb roundoff."""
        return Decimal(1).scaleb(-(self.target_digits + self.guard_digits // 2))


class HPReal:
    """A Decimal value bundled with the precision (digits) it carries."""

    __slots__ = ("value", "precision")

    def __init__(self, value: Decimal, precision: int):
        if precision < 1:
            raise DomainError("HPReal precision must be >= 1")
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "precision", precision)

    def __setattr__(self, name, _value):
        raise AttributeError(f"HPReal is immutable (tried to set {name!r})")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_number(cls, x: NumberLike, precision: int) -> "HPReal":
        if isinstance(x, HPReal):
            return cls(dec_context(precision).plus(x.value), precision)
        if isinstance(x, Decimal):
            return cls(dec_context(precision).plus(x), precision)
        if isinstance(x, int):
            return cls(dec_context(precision).plus(Decimal(x)), precision)
        if isinstance(x, Fraction):
            return cls(dec_from_fraction(x, precision), precision)
        raise DomainError(f"cannot build HPReal from {type(x).__name__}")

    # -- arithmetic ---------------------------------------------------------

    def _pair(self, other) -> tuple["HPReal", "HPReal", Context]:
        if isinstance(other, HPReal):
            pass
        elif isinstance(other, (int, Fraction, Decimal)):
            other = HPReal.from_number(other, self.precision)
        else:
            return NotImplemented  # type: ignore[return-value]
        prec = min(self.precision, other.precision)
        return self, other, dec_context(prec)

    def __add__(self, other):
        got = self._pair(other)
        if got is NotImplemented:
            return NotImplemented
        a, b, c = got
        return HPReal(c.add(a.value, b.value), c.prec)

    __radd__ = __add__

    def __neg__(self):
        return HPReal(-self.value, self.precision)

    def __sub__(self, other):
        got = self._pair(other)
        if got is NotImplemented:
            return NotImplemented
        a, b, c = got
        return HPReal(c.subtract(a.value, b.value), c.prec)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        got = self._pair(other)
        if got is NotImplemented:
            return NotImplemented
        a, b, c = got
        return HPReal(c.multiply(a.value, b.value), c.prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        got = self._pair(other)
        if got is NotImplemented:
            return NotImplemented
        a, b, c = got
        if b.value == 0:
            raise PoleError("division of HPReal by zero")
        return HPReal(c.divide(a.value, b.value), c.prec)

    def __rtruediv__(self, other):
        got = self._pair(other)
        if got is NotImplemented:
            return NotImplemented
        a, b, c = got
        if a.value == 0:
            raise PoleError("division of HPReal by zero")
        return HPReal(c.divide(b.value, a.value), c.prec)

    def __abs__(self):
        return HPReal(abs(self.value), self.precision)

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        c = dec_context(self.precision)
        if exponent < 0 and self.value == 0:
            raise PoleError("zero cannot be raised to a negative power")
        return HPReal(c.power(self.value, Decimal(exponent)), self.precision)

    # -- comparisons (on the underlying Decimal values) ----------------------

    def __eq__(self, other):
        if isinstance(other, HPReal):
            return self.value == other.value
        if isinstance(other, (int, Decimal)):
            return self.value == Decimal(other)
        return NotImplemented

    def __lt__(self, other):
        other_v = other.value if isinstance(other, HPReal) else Decimal(other)
        return self.value < other_v

    def __le__(self, other):
        other_v = other.value if isinstance(other, HPReal) else Decimal(other)
        return self.value <= other_v

    def __gt__(self, other):
        other_v = other.value if isinstance(other, HPReal) else Decimal(other)
        return self.value > other_v

    def __ge__(self, other):
        other_v = other.value if isinstance(other, HPReal) else Decimal(other)
        return self.value >= other_v

    def __hash__(self):
        return hash(self.value)

    # -- presentation ------------------------------------------------------

    def round_to(self, digits: int) -> Decimal:
        """The value rounded to ``digits`` significant digits."""
        return dec_context(digits).plus(self.value)

    def to_digits_str(self, digits: int) -> str:
        return str(self.round_to(digits))

    def __repr__(self):
        return f"HPReal({self.value}, precision={self.precision})"


def hp(x: NumberLike, precision: int) -> HPReal:
    """Convenience constructor for :class:`HPReal`."""
    return HPReal.from_number(x, precision)


# ---------------------------------------------------------------------------
# Constants and elementary transcendental functions
# ---------------------------------------------------------------------------


def _arccot_scaled(m: int, scale: int) -> int:
    """floor-ish of scale * arctan(1/m) via the alternating power series."""
    power = scale // m
    total = power
    m2 = m * m
    n = 3
    sign = -1
    while True:
        power //= m2
        if power == 0:
            break
        total += sign * (power // n)
        sign = -sign
        n += 2
    return total


@lru_cache(maxsize=None)
def _pi_dec(prec: int) -> Decimal:
    """pi at ``prec`` digits: 16*arctan(1/5) - 4*arctan(1/239) in integer
    arithmetic with ten digits of slack before the final rounding."""
    scale = 10 ** (prec + 10)
    raw = 4 * (4 * _arccot_scaled(5, scale) - _arccot_scaled(239, scale))
    return dec_context(prec).divide(Decimal(raw), Decimal(scale))


def hp_constant_pi(ctx: EvalContext) -> HPReal:
    """pi at the context's working precision."""
    return HPReal(_pi_dec(ctx.work), ctx.work)


def _sin_dec(x: Decimal, prec: int) -> Decimal:
    inner = dec_context(prec + 10)
    two_pi = inner.multiply(Decimal(2), _pi_dec(prec + 20))
    turns = inner.divide(x, two_pi).to_integral_value(rounding=ROUND_HALF_EVEN)
    r = inner.subtract(x, inner.multiply(turns, two_pi))
    # Taylor series on |r| <= pi
    term = r
    total = r
    r2 = inner.multiply(r, r)
    tiny = Decimal(1).scaleb(-(prec + 8))
    k = 1
    while abs(term) > tiny:
        term = inner.multiply(term, r2)
        term = inner.divide(term, Decimal(-(2 * k) * (2 * k + 1)))
        total = inner.add(total, term)
        k += 1
    return dec_context(prec).plus(total)


def hp_transcendental(fn: str, x: NumberLike, ctx: EvalContext) -> HPReal:
    """exp, ln or sin of a real argument, at working precision."""
    w = ctx.work
    xv = HPReal.from_number(x, w).value
    c = dec_context(w)
    if fn == "exp":
        return HPReal(c.exp(xv), w)
    if fn == "ln":
        if xv <= 0:
            raise DomainError("ln requires a positive argument")
        return HPReal(c.ln(xv), w)
    if fn == "sin":
        return HPReal(_sin_dec(xv, w), w)
    raise DomainError(f"unknown transcendental function {fn!r}")


def pow_frac(base: Decimal, exponent: Fraction, prec: int) -> Decimal:
    """base**exponent for rational exponents, base > 0 (or integer exponent).

    Integral exponents go through the context power; everything else is
    exp(exponent * ln(base)).
    """
    c = dec_context(prec + 5)
    if exponent.denominator == 1:
        return dec_context(prec).plus(c.power(base, Decimal(exponent.numerator)))
    if base <= 0:
        raise DomainError("fractional powers need a positive base")
    e = dec_from_fraction(exponent, prec + 5)
    return dec_context(prec).plus(c.exp(c.multiply(e, c.ln(base))))


# ---------------------------------------------------------------------------
# q-Pochhammer numerics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Finite:
    """Subscript n: the finite product (a;q)_n."""

    n: int


@dataclass(frozen=True)
class Infinite:
    """Subscript infinity: the convergent infinite product (a;q)_inf."""


@dataclass(frozen=True)
class General:
    """Real subscript x: (a;q)_x = (a;q)_inf / (a*q^x;q)_inf."""

    x: Fraction


Subscript = Union[Finite, Infinite, General]

DEFAULT_MAX_FACTORS = 2_000_000


def qpoch_inf_dec(a: Decimal, q: Decimal, prec: int, max_factors: int = DEFAULT_MAX_FACTORS) -> Decimal:
    """(a;q)_inf as a Decimal at ``prec`` digits, 0 < q < 1.

    Factors are multiplied until |a*q^j| < 10**-prec; the neglected tail
    perturbs the product by a relative ~10**-prec/(1-q), which the caller's
    guard digits absorb.  Exceeding ``max_factors`` raises
    PrecisionBudgetError (the caller may report "inconclusive").
    """
    c = dec_context(prec)
    eps = Decimal(1).scaleb(-prec)
    product = Decimal(1)
    aq = c.plus(a)
    count = 0
    while abs(aq) >= eps:
        product = c.multiply(product, c.subtract(Decimal(1), aq))
        aq = c.multiply(aq, q)
        count += 1
        if count > max_factors:
            raise PrecisionBudgetError(
                f"infinite q-Pochhammer needed more than {max_factors} factors"
            )
    return product


def qpoch_num(
    a: NumberLike,
    q: NumberLike,
    sub: Subscript,
    ctx: EvalContext,
    *,
    max_factors: int = DEFAULT_MAX_FACTORS,
) -> HPReal:
    """q-Pochhammer symbol (a;q)_sub at working precision.

    Requires 0 < q < 1.  Finite subscripts evaluate the literal product;
    the infinite subscript truncates when factors stop mattering; a general
    real subscript x uses the quotient (a;q)_inf / (a*q^x;q)_inf, raising
    PoleError if the denominator vanishes.
    """
    w = ctx.work
    c = dec_context(w)
    av = HPReal.from_number(a, w).value
    qv = HPReal.from_number(q, w).value
    if not (0 < qv < 1):
        raise DomainError("qpoch_num requires 0 < q < 1")

    if isinstance(sub, Finite):
        if sub.n < 0:
            raise DomainError("Finite subscript must be >= 0; use General for negatives")
        product = Decimal(1)
        aq = av
        for _ in range(sub.n):
            product = c.multiply(product, c.subtract(Decimal(1), aq))
            aq = c.multiply(aq, qv)
        return HPReal(product, w)

    if isinstance(sub, Infinite):
        return HPReal(qpoch_inf_dec(av, qv, w, max_factors), w)

    if isinstance(sub, General):
        x = sub.x if isinstance(sub.x, Fraction) else Fraction(sub.x)
        if x.denominator == 1:
            n = x.numerator
            if n >= 0:
                return qpoch_num(av, qv, Finite(n), ctx, max_factors=max_factors)
            # (a;q)_{-m} = 1 / prod_{i=1..m} (1 - a*q^-i)
            product = Decimal(1)
            for i in range(1, -n + 1):
                factor = c.subtract(Decimal(1), c.divide(av, c.power(qv, Decimal(i))))
                if factor == 0:
                    raise PoleError("(a;q)_x hit a vanishing factor at a negative integer x")
                product = c.divide(product, factor)
            return HPReal(product, w)
        num = qpoch_inf_dec(av, qv, w, max_factors)
        shifted = c.multiply(av, pow_frac(qv, x, w))
        den = qpoch_inf_dec(shifted, qv, w, max_factors)
        if den == 0:
            raise PoleError("(a*q^x;q)_inf vanished in a general-subscript quotient")
        return HPReal(c.divide(num, den), w)

    raise DomainError(f"unknown subscript type {type(sub).__name__}")


def qq_recip_dec(
    x: Fraction,
    q: Decimal,
    prec: int,
    qq_inf: Decimal | None = None,
    max_factors: int = DEFAULT_MAX_FACTORS,
) -> Decimal:
    """1/(q;q)_x with the reciprocal convention at negative integers.

    For integer x >= 0 this is the reciprocal of a finite product; for
    integer x < 0 it is exactly 0 (the pole of the Pochhammer quotient is
    in the denominator position); otherwise (q^{1+x};q)_inf / (q;q)_inf.
    ``qq_inf`` optionally supplies a precomputed (q;q)_inf.
    """
    c = dec_context(prec)
    if x.denominator == 1:
        n = x.numerator
        if n < 0:
            return Decimal(0)
        product = Decimal(1)
        qj = q
        for _ in range(n):
            product = c.multiply(product, c.subtract(Decimal(1), qj))
            qj = c.multiply(qj, q)
        return c.divide(Decimal(1), product)
    if qq_inf is None:
        qq_inf = qpoch_inf_dec(q, q, prec, max_factors)
    a = pow_frac(q, Fraction(1) + x, prec)
    return c.divide(qpoch_inf_dec(a, q, prec, max_factors), qq_inf)


# ---------------------------------------------------------------------------
# Adaptive summation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SumResult:
    """Value of an adaptively truncated sum, its tail bound, and term count."""

    value: HPReal
    tail: HPReal
    nterms: int


_RATIO_WINDOW = 8
_SLOW_RATIO = Decimal("0.999")
_SLOW_LIMIT = 10_000


def sum_until(
    terms: Union[Iterable[NumberLike], Callable[[int], NumberLike]],
    ctx: EvalContext,
    *,
    max_terms: int = 500_000,
) -> SumResult:
    """Sum terms until the tail is provably below the stopping threshold.

    ``terms`` is an iterable (typically a generator) or an index function
    n -> t_n.  A sliding window of the last 8 successive term ratios gives
    an empirical decay rate r = max(window); once |t_n| and the geometric
    tail estimate |t_n|*r/(1-r) both fall under the context's stopping
    threshold, the sum stops and the estimate is reported as the tail bound.

    A finite iterable that ends naturally is a complete sum: tail 0.
    Terms whose ratios sit at or above 0.999 for 10000 consecutive steps
    raise InsufficientDecayError; running past ``max_terms`` raises
    PrecisionBudgetError.
    """
    if callable(terms):
        fn = terms
        terms = (fn(n) for n in itertools.count())
    w = ctx.work
    c = dec_context(w)
    rc = dec_context(12)
    threshold = ctx.stop_threshold()
    window: deque[Decimal] = deque(maxlen=_RATIO_WINDOW)
    total = Decimal(0)
    prev_abs: Decimal | None = None
    slow = 0
    nterms = 0
    for raw in terms:
        t = HPReal.from_number(raw, w).value
        total = c.add(total, t)
        nterms += 1
        at = abs(t)
        if prev_abs is not None:
            if prev_abs != 0:
                ratio = rc.divide(at, prev_abs)
                window.append(ratio)
                if ratio >= _SLOW_RATIO:
                    slow += 1
                    if slow >= _SLOW_LIMIT:
                        raise InsufficientDecayError(
                            f"term ratio stayed >= {_SLOW_RATIO} for {slow} terms "
                            f"(n={nterms - 1}, |t|={at})"
                        )
                else:
                    slow = 0
            elif at == 0:
                window.append(Decimal(0))
            else:
                window.clear()  # decay regime unknown again after an interior zero
        prev_abs = at
        if at < threshold and len(window) == _RATIO_WINDOW:
            r = max(window)
            if r < 1:
                tail = c.divide(c.multiply(at, r), c.subtract(Decimal(1), r))
                if tail < threshold:
                    return SumResult(HPReal(total, w), HPReal(tail, w), nterms)
        if nterms >= max_terms:
            raise PrecisionBudgetError(f"sum did not converge within {max_terms} terms")
    return SumResult(HPReal(total, w), HPReal(Decimal(0), w), nterms)


# ---------------------------------------------------------------------------
# Special values: trigamma and zeta(3)
# ---------------------------------------------------------------------------


def _bernoulli_list(count: int) -> list[Fraction]:
    """B_0 .. B_{count-1} via the defining recurrence
    sum_{j=0..m} C(m+1, j) B_j = 0 for m >= 1."""
    from math import comb

    values: list[Fraction] = [Fraction(1)]
    for m in range(1, count):
        acc = Fraction(0)
        for j in range(m):
            acc += comb(m + 1, j) * values[j]
        values.append(-acc / (m + 1))
    return values


_BERNOULLI_CACHE: list[Fraction] = []


def _bernoulli_upto(count: int) -> list[Fraction]:
    global _BERNOULLI_CACHE
    if len(_BERNOULLI_CACHE) < count:
        _BERNOULLI_CACHE = _bernoulli_list(max(count, 2 * len(_BERNOULLI_CACHE), 32))
    return _BERNOULLI_CACHE


def trigamma_num(k: NumberLike, ctx: EvalContext) -> HPReal:
    """psi'(k) for k > 0: recurrence shift plus Bernoulli asymptotics.

    psi'(k) = psi'(k+1) + 1/k**2 lifts the argument to z >= max(10, 0.4*W)
    where the asymptotic series
        psi'(z) ~ 1/z + 1/(2 z**2) + sum_j B_{2j} / z**{2j+1}
    reaches its minimum term below 10**-1.09W; the first omitted term
    bounds the truncation error and stays inside the guard digits.
    """
    w = ctx.work
    inner = dec_context(w + 5)
    kd = HPReal.from_number(k, w + 5).value
    if kd <= 0:
        raise DomainError("trigamma_num requires k > 0")
    lift_target = max(10, (2 * w + 4) // 5)
    shift = max(0, int(ceil(lift_target - float(kd))))
    acc = Decimal(0)
    for j in range(shift):
        base = inner.add(kd, Decimal(j))
        acc = inner.add(acc, inner.divide(Decimal(1), inner.multiply(base, base)))
    z = inner.add(kd, Decimal(shift))
    inv = inner.divide(Decimal(1), z)
    inv2 = inner.multiply(inv, inv)
    total = inner.add(inv, inner.divide(inv2, Decimal(2)))
    zpow = inner.multiply(inv, inv2)  # z**-3
    tiny = Decimal(1).scaleb(-(w + 4))
    prev_mag = None
    bernoullis = _bernoulli_upto(200)
    for j in range(1, 90):
        b = bernoullis[2 * j]
        term = inner.multiply(zpow, dec_from_fraction(b, w + 5))
        mag = abs(term)
        if prev_mag is not None and mag >= prev_mag:
            raise PrecisionBudgetError(
                "trigamma asymptotic series started diverging before reaching target"
            )
        total = inner.add(total, term)
        if mag < tiny:
            break
        prev_mag = mag
        zpow = inner.multiply(zpow, inv2)
    else:
        raise PrecisionBudgetError("trigamma asymptotic series did not terminate")
    result = dec_context(w).add(acc, total)
    return HPReal(result, w)


def zeta3_num(ctx: EvalContext) -> HPReal:
    """zeta(3) from the fast central-binomial series
    zeta(3) = (5/2) * sum_{n>=1} (-1)**(n-1) / (n**3 * C(2n, n)),
    an alternating sum with |t_{n+1}/t_n| < 1/4, so the first omitted term
    bounds the tail."""
    w = ctx.work
    c = dec_context(w + 5)
    tiny = Decimal(1).scaleb(-(w + 3))
    total = Decimal(0)
    central = 2  # C(2n, n) at n = 1
    n = 1
    sign = 1
    while True:
        term = c.divide(Decimal(sign), Decimal(n**3 * central))
        total = c.add(total, term)
        if abs(term) < tiny:
            break
        central = central * (2 * n + 1) * (2 * n + 2) // ((n + 1) * (n + 1))
        n += 1
        sign = -sign
    result = dec_context(w).multiply(total, dec_from_fraction(Fraction(5, 2), w))
    return HPReal(result, w)
