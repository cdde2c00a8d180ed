"""WZ-style telescoping machinery for the central q-binomial summand.

The objects here are built around the bivariate term

    F(n, k) = q**(k^2) * [n choose k]_q^2 / [2n choose n]_q

and its telescoping partner G = R * F, where the certificate R(n, k) is a
fixed rational function of (q, q^n, q^k).  The pair satisfies the
difference equation

    q^2 * (F(n+1, k) - F(n, k)) = G(n, k+1) - G(n, k),

which this module checks three independent ways: exactly as an identity of
rational functions, exactly on truncated power series in q, and numerically
at high precision.

Rationalization: with Q = q, X = q**n, Y = q**k every shift becomes a
polynomial substitution -- n -> n+1 is X -> Q*X and k -> k+1 is Y -> Q*Y --
so the difference equation is decidable by cross-multiplication.

For evaluation at real k the binomials use the general-subscript Pochhammer
quotient, and G is evaluated in a regularized closed form in which the
apparent double pole of R at q^k = q^{n+1} has been cancelled against the
matching zero of F:

    G(n, k) = q**(n+3+k^2-2k) * (1-q^k)^2 * (q^{n+1} + q^{2n+2} - 2 q^k)
              * (q;q)_n^2 / [ (q;q)_k^2 * (q;q)_{n+1-k}^2
              * (1+q^{n+1}) * (1-q^{2n+1}) * [2n choose n]_q ],

with 1/(q;q)_m = 0 at negative integers m.  This makes every summand of a
telescoped range finite, including the degenerate integer-k rows, while
:func:`eval_pair` still reports the k = n+1 pole of the raw certificate.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Iterator, Optional, Union

from .errors import DomainError, PoleError
from .exact import (
    MultiPoly,
    QSeries,
    RatFunc,
    UniPoly,
    _gaussian_int,
    _int_div_one_minus_qj,
    _int_mul_binom,
    gaussian_binomial,
    qpoch_finite_poly,
    ratfunc_equal,
    series_invert,
)
from .numerics import (
    EvalContext,
    HPReal,
    dec_context,
    pow_frac,
    qpoch_inf_dec,
    qq_recip_dec,
)

_Q = MultiPoly.variable("Q")
_X = MultiPoly.variable("X")
_Y = MultiPoly.variable("Y")


def _f_ratio_n() -> RatFunc:
    """F(n+1,k)/F(n,k) as a rational function of (Q, X, Y)."""
    num = (1 - _Q * _X) ** 4 * _Y**2
    den = (_Y - _Q * _X) ** 2 * (1 - _Q * _X**2) * (1 - _Q**2 * _X**2)
    return RatFunc(num, den)


def _f_ratio_k() -> RatFunc:
    """F(n,k+1)/F(n,k) as a rational function of (Q, X, Y)."""
    num = _Q * (_Y - _X) ** 2
    den = (1 - _Q * _Y) ** 2
    return RatFunc(num, den)


def standard_certificate() -> RatFunc:
    """The telescoping certificate R(n,k) in rationalized coordinates."""
    num = _Q**3 * _X * (1 - _Y) ** 2 * (_Q * _X + _Q**2 * _X**2 - 2 * _Y)
    den = (_Y - _Q * _X) ** 2 * (1 + _Q * _X) * (1 - _Q * _X**2)
    return RatFunc(num, den)


@dataclass(frozen=True)
class WZPair:
    """A summand/certificate pair; G is R*F by definition.

    The F-side structure is fixed (its two shift ratios are a property of
    the bivariate term); the certificate is a datum so deliberately altered
    certificates can be run through the same checks.
    """

    certificate: RatFunc

    @classmethod
    def standard(cls) -> "WZPair":
        return cls(standard_certificate())

    def f_ratio_n(self) -> RatFunc:
        return _f_ratio_n()

    def f_ratio_k(self) -> RatFunc:
        return _f_ratio_k()


@dataclass(frozen=True)
class CheckOutcome:
    """Result of a structural check: verdict, the mode used, and evidence."""

    passed: bool
    mode: str
    detail: str = ""
    witness: Optional[str] = None

    def __bool__(self) -> bool:
        return self.passed


def _difference_equation_sides(pair: WZPair) -> tuple[RatFunc, RatFunc]:
    lhs = RatFunc(_Q**2) * (pair.f_ratio_n() - 1)
    rhs = pair.certificate.step_k() * pair.f_ratio_k() - pair.certificate
    return lhs, rhs


def certificate_identity_check(pair: Optional[WZPair] = None) -> CheckOutcome:
    """Decide the difference equation exactly by cross-multiplication.

    Both sides are divided by F(n,k) first, which turns them into rational
    functions of (Q, X, Y); equality of those is exact and certificate-style:
    on failure the witness is the leading surviving monomial.
    """
    if pair is None:
        pair = WZPair.standard()
    lhs, rhs = _difference_equation_sides(pair)
    verdict = ratfunc_equal(lhs, rhs)
    if verdict.equal:
        return CheckOutcome(True, "exact", "difference equation holds identically")
    mono, coeff = verdict.witness
    witness = f"coefficient {coeff} on Q^{mono[0]} X^{mono[1]} Y^{mono[2]}"
    return CheckOutcome(False, "exact", "difference equation violated", witness)


def certificate_spot_check(
    trials: int = 100, seed: int = 0, pair: Optional[WZPair] = None
) -> CheckOutcome:
    """Exact rational evaluation of both sides at random non-pole points."""
    if pair is None:
        pair = WZPair.standard()
    lhs, rhs = _difference_equation_sides(pair)
    rng = random.Random(seed)
    done = 0
    while done < trials:
        qv = Fraction(rng.randint(1, 19), rng.randint(20, 40))
        xv = Fraction(rng.randint(1, 19), rng.randint(20, 40))
        yv = Fraction(rng.randint(1, 19), rng.randint(20, 40))
        try:
            lv = lhs.eval(qv, xv, yv)
            rv = rhs.eval(qv, xv, yv)
        except PoleError:
            continue
        if lv != rv:
            return CheckOutcome(
                False,
                "exact-spot",
                f"sides differ at Q={qv}, X={xv}, Y={yv}",
                witness=f"{lv} != {rv}",
            )
        done += 1
    return CheckOutcome(True, "exact-spot", f"{trials} random rational points agree (seed {seed})")


# ---------------------------------------------------------------------------
# Numeric evaluation of F and G at integer n, real k
# ---------------------------------------------------------------------------


def _is_integer(x: Fraction) -> bool:
    return x.denominator == 1


def f_sequence(k: Fraction, q: Decimal, prec: int) -> Iterator[Decimal]:
    """Yield F(0,k), F(1,k), ... at fixed real k, as Decimals.

    Running products keep each step O(1) in decimal operations.
    """
    c = dec_context(prec)
    one = Decimal(1)
    k = Fraction(k)
    int_k = _is_integer(k)
    if int_k and k < 0:
        while True:
            yield Decimal(0)
    qq_inf = None if int_k else qpoch_inf_dec(q, q, prec)
    qk2 = pow_frac(q, k * k, prec)
    recip_k = qq_recip_dec(k, q, prec, qq_inf)
    # 1/(q;q)_{n-k} and the factor q^{n+1-k} used to advance it
    if int_k:
        kn = int(k)
        recip_nk: Optional[Decimal] = None  # inactive until n == k
        qnk = None
    else:
        recip_nk = qq_recip_dec(-k, q, prec, qq_inf)
        qnk = pow_frac(q, 1 - k, prec)
    b2n = one  # [2n choose n]_q
    qq_n = one  # (q;q)_n
    qn1 = q  # q^{n+1}
    q2n1 = q  # q^{2n+1}
    q2n2 = c.multiply(q, q)  # q^{2n+2}
    n = 0
    while True:
        if int_k and recip_nk is None and n == kn:
            recip_nk = one
            qnk = q
        if recip_nk is None:
            yield Decimal(0)
        else:
            binom = c.multiply(c.multiply(qq_n, recip_k), recip_nk)
            val = c.divide(c.multiply(qk2, c.multiply(binom, binom)), b2n)
            yield val
        # advance n -> n+1
        if recip_nk is not None:
            recip_nk = c.divide(recip_nk, c.subtract(one, qnk))
            qnk = c.multiply(qnk, q)
        qq_n = c.multiply(qq_n, c.subtract(one, qn1))
        num = c.multiply(c.subtract(one, q2n1), c.subtract(one, q2n2))
        den = c.multiply(c.subtract(one, qn1), c.subtract(one, qn1))
        b2n = c.multiply(b2n, c.divide(num, den))
        qn1 = c.multiply(qn1, q)
        q2n1 = c.multiply(q2n1, c.multiply(q, q))
        q2n2 = c.multiply(q2n2, c.multiply(q, q))
        n += 1


def g_sequence(k: Fraction, q: Decimal, prec: int) -> Iterator[Decimal]:
    """Yield G(0,k), G(1,k), ... at fixed real k via the regularized form."""
    c = dec_context(prec)
    one = Decimal(1)
    k = Fraction(k)
    int_k = _is_integer(k)
    if int_k and k < 0:
        while True:
            yield Decimal(0)
    qq_inf = None if int_k else qpoch_inf_dec(q, q, prec)
    qk = pow_frac(q, k, prec)
    zero_sq = c.multiply(c.subtract(one, qk), c.subtract(one, qk))  # (1-q^k)^2
    recip_k = qq_recip_dec(k, q, prec, qq_inf)
    recip_k2 = c.multiply(recip_k, recip_k)
    pref = pow_frac(q, 3 + k * k - 2 * k, prec)  # q^{n+3+k^2-2k} at n=0
    # 1/(q;q)_{n+1-k} and its advancing factor q^{n+2-k}
    if int_k and k >= 1:
        kn = int(k)
        recip_nk: Optional[Decimal] = None  # inactive until n == k-1
        qnk = None
    else:
        recip_nk = qq_recip_dec(1 - k, q, prec, qq_inf)
        qnk = pow_frac(q, 2 - k, prec)
    b2n = one
    qq_n = one
    qn1 = q
    q2n1 = q
    q2n2 = c.multiply(q, q)
    n = 0
    while True:
        if int_k and recip_nk is None and n == kn - 1:
            recip_nk = one
            qnk = q
        if recip_nk is None or zero_sq == 0:
            yield Decimal(0)
        else:
            bracket = c.subtract(c.add(qn1, q2n2), c.multiply(Decimal(2), qk))
            num = c.multiply(pref, zero_sq)
            num = c.multiply(num, bracket)
            num = c.multiply(num, c.multiply(qq_n, qq_n))
            num = c.multiply(num, recip_k2)
            num = c.multiply(num, c.multiply(recip_nk, recip_nk))
            den = c.multiply(c.add(one, qn1), c.subtract(one, q2n1))
            den = c.multiply(den, b2n)
            yield c.divide(num, den)
        if recip_nk is not None:
            recip_nk = c.divide(recip_nk, c.subtract(one, qnk))
            qnk = c.multiply(qnk, q)
        qq_n = c.multiply(qq_n, c.subtract(one, qn1))
        num = c.multiply(c.subtract(one, q2n1), c.subtract(one, q2n2))
        den = c.multiply(c.subtract(one, qn1), c.subtract(one, qn1))
        b2n = c.multiply(b2n, c.divide(num, den))
        pref = c.multiply(pref, q)
        qn1 = c.multiply(qn1, q)
        q2n1 = c.multiply(q2n1, c.multiply(q, q))
        q2n2 = c.multiply(q2n2, c.multiply(q, q))
        n += 1


def _as_fraction_param(x: Union[int, Fraction]) -> Fraction:
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, Fraction):
        return x
    raise DomainError(f"expected an exact rational parameter, got {type(x).__name__}")


def _q_decimal(q: Union[Fraction, HPReal], prec: int) -> Decimal:
    qd = HPReal.from_number(q, prec).value
    if not (0 < qd < 1):
        raise DomainError("q must satisfy 0 < q < 1")
    return qd


def eval_pair(
    n: int,
    k: Union[int, Fraction],
    q: Union[Fraction, HPReal],
    ctx: EvalContext,
) -> tuple[HPReal, HPReal]:
    """Numerically evaluate (F(n,k), G(n,k)) at integer n >= 0 and real k.

    The raw certificate R(n,k) carries a double pole at k = n+1, so that
    point is rejected with PoleError even though the regularized G used
    internally stays finite there.
    """
    if not isinstance(n, int) or n < 0:
        raise DomainError("eval_pair requires integer n >= 0")
    k = _as_fraction_param(k)
    if k == n + 1:
        raise PoleError(f"certificate has a pole at k = n+1 (n={n})")
    w = ctx.work
    qd = _q_decimal(q, w)
    fval = next(itertools.islice(f_sequence(k, qd, w), n, None))
    gval = next(itertools.islice(g_sequence(k, qd, w), n, None))
    return HPReal(fval, w), HPReal(gval, w)


# ---------------------------------------------------------------------------
# Exact series forms of F and G
# ---------------------------------------------------------------------------


def f_series(n: int, k: int, order: int) -> QSeries:
    """F(n,k) as a truncated power series in q (integer parameters)."""
    if n < 0:
        raise DomainError("f_series needs n >= 0")
    if k < 0 or k > n:
        return QSeries(order)
    binom = gaussian_binomial(n, k)
    num = QSeries.from_unipoly(binom * binom, order).shift(min(k * k, order + 1))
    den = QSeries.from_unipoly(gaussian_binomial(2 * n, n), order)
    return num * series_invert(den)


def g_series(n: int, k: int, order: int) -> QSeries:
    """G(n,k) as a truncated power series in q via the regularized form."""
    if n < 0:
        raise DomainError("g_series needs n >= 0")
    if k <= 0 or k > n + 1:
        # (1-q^k)^2 kills k=0 and 1/(q;q)_{n+1-k} kills k > n+1
        return QSeries(order)
    shift_exp = n + 3 + k * k - 2 * k
    if shift_exp > order:
        return QSeries(order)
    one = UniPoly.one()
    qq_n = qpoch_finite_poly(1, n) if n else one
    zero_sq = (one - UniPoly.monomial(1, k)) ** 2
    bracket = (
        UniPoly.monomial(1, n + 1)
        + UniPoly.monomial(1, 2 * n + 2)
        - UniPoly.monomial(2, k)
    )
    num_poly = zero_sq * bracket * qq_n * qq_n
    den_poly = (
        (qpoch_finite_poly(1, k) ** 2)
        * (qpoch_finite_poly(1, n + 1 - k) ** 2)
        * (one + UniPoly.monomial(1, n + 1))
        * (one - UniPoly.monomial(1, 2 * n + 1))
        * gaussian_binomial(2 * n, n)
    )
    num = QSeries.from_unipoly(num_poly, order).shift(shift_exp)
    den = QSeries.from_unipoly(den_poly, order)
    return num * series_invert(den)


# ---------------------------------------------------------------------------
# Structural checks
# ---------------------------------------------------------------------------


def qbinomial_sum_check(n: int) -> CheckOutcome:
    """Exactly verify sum_k q^{k^2} [n choose k]_q^2 = [2n choose n]_q.

    Pure integer-coefficient polynomial arithmetic; the summand advances
    along k by the two-factor ratio
    [n choose k+1]/[n choose k] = (1-q^{n-k})/(1-q^{k+1}).
    """
    if not isinstance(n, int) or n < 0:
        raise DomainError("qbinomial_sum_check requires integer n >= 0")
    target = _gaussian_int(2 * n, n)
    acc = [0] * (n * n + 1)
    summand = [1]  # [n choose k]_q^2 at k = 0
    for k in range(n + 1):
        offset = k * k
        for i, coeff in enumerate(summand):
            if coeff:
                acc[offset + i] += coeff
        if k < n:
            summand = _int_mul_binom(summand, -1, n - k)
            summand = _int_mul_binom(summand, -1, n - k)
            summand = _int_div_one_minus_qj(summand, k + 1)
            summand = _int_div_one_minus_qj(summand, k + 1)
    if tuple(acc) == target:
        return CheckOutcome(True, "exact", f"central q-binomial sum holds at n={n}")
    first_bad = next(i for i in range(len(acc)) if acc[i] != (target[i] if i < len(target) else 0))
    return CheckOutcome(
        False,
        "exact",
        f"coefficient mismatch at n={n}",
        witness=f"first differing exponent {first_bad}",
    )


def telescoping_check(
    m: int,
    k: Union[int, Fraction],
    mode: str,
    *,
    order: Optional[int] = None,
    q: Union[Fraction, HPReal, None] = None,
    ctx: Optional[EvalContext] = None,
) -> CheckOutcome:
    """Check sum_{n=0..m} (G(n,k+1) - G(n,k)) = q^2 (F(m+1,k) - F(0,k)).

    mode "exact-series" (integer k) compares truncated power series
    coefficientwise; mode "numeric" (real k) compares high-precision values.
    Degenerate rows -- terms with n below the integer k, where F or G
    vanish identically -- participate exactly.
    """
    if not isinstance(m, int) or m < 0:
        raise DomainError("telescoping_check requires integer m >= 0")
    if mode == "exact-series":
        if order is None:
            raise DomainError("exact-series mode requires an order")
        kk = _as_fraction_param(k)
        if kk.denominator != 1 or kk < 0:
            raise DomainError("exact-series mode requires integer k >= 0")
        ki = int(kk)
        lhs = QSeries(order)
        for n in range(m + 1):
            lhs = lhs + (g_series(n, ki + 1, order) - g_series(n, ki, order))
        rhs = (f_series(m + 1, ki, order) - f_series(0, ki, order)).shift(2)
        if lhs == rhs:
            return CheckOutcome(
                True, mode, f"series telescoping holds at m={m}, k={ki}, order {order}"
            )
        bad = next(i for i in range(order + 1) if lhs.coeffs[i] != rhs.coeffs[i])
        return CheckOutcome(
            False, mode, f"series telescoping fails at m={m}, k={ki}",
            witness=f"first differing exponent {bad}",
        )
    if mode == "numeric":
        if q is None or ctx is None:
            raise DomainError("numeric mode requires q and an EvalContext")
        kk = _as_fraction_param(k)
        if kk <= 0:
            raise DomainError("numeric telescoping expects k > 0")
        w = ctx.work
        c = dec_context(w)
        qd = _q_decimal(q, w)
        gen_up = g_sequence(kk + 1, qd, w)
        gen_lo = g_sequence(kk, qd, w)
        lhs = Decimal(0)
        for _ in range(m + 1):
            lhs = c.add(lhs, c.subtract(next(gen_up), next(gen_lo)))
        fs = list(itertools.islice(f_sequence(kk, qd, w), m + 2))
        rhs = c.multiply(c.multiply(qd, qd), c.subtract(fs[m + 1], fs[0]))
        diff = abs(c.subtract(lhs, rhs))
        tol = Decimal(1).scaleb(-ctx.target_digits)
        if diff < tol:
            return CheckOutcome(
                True, mode,
                f"numeric telescoping holds at m={m}, k={kk}: |diff| = {diff:.3E} < 1E-{ctx.target_digits}",
            )
        return CheckOutcome(
            False, mode, f"numeric telescoping fails at m={m}, k={kk}",
            witness=f"|{lhs} - {rhs}| = {diff:.3E}",
        )
    raise DomainError(f"unknown telescoping mode {mode!r}")


def h_identity_check(
    k: Union[int, Fraction],
    q: Union[Fraction, HPReal],
    ctx: EvalContext,
) -> CheckOutcome:
    """Check the fully telescoped column sum against its closed product form.

    H(k) = sum_{n>=0} (G(n,k+1) - G(n,k))
         = q^{k^2+2} ((q;q)_inf^3 - (q^{1-k};q)_inf^2) (q^{k+1};q)_inf^2 / (q;q)_inf^4,

    where for integer k >= 1 the (q^{1-k};q)_inf factor is exactly zero.
    Valid for k in (0,1) or integer k >= 1.
    """
    from .numerics import sum_until

    kk = _as_fraction_param(k)
    int_k = kk.denominator == 1
    if not ((0 < kk < 1) or (int_k and kk >= 1)):
        raise DomainError("h_identity_check supports k in (0,1) or integer k >= 1")
    w = ctx.work
    c = dec_context(w)
    qd = _q_decimal(q, w)

    def differences() -> Iterator[Decimal]:
        gen_up = g_sequence(kk + 1, qd, w)
        gen_lo = g_sequence(kk, qd, w)
        while True:
            yield c.subtract(next(gen_up), next(gen_lo))

    series_side = sum_until(differences(), ctx)

    qq_inf = qpoch_inf_dec(qd, qd, w)
    if int_k:
        gap = Decimal(0)  # (q^{1-k};q)_inf vanishes: 1-k <= 0 is an integer
    else:
        a = pow_frac(qd, 1 - kk, w)
        gap = qpoch_inf_dec(a, qd, w)
    qk1 = qpoch_inf_dec(pow_frac(qd, kk + 1, w), qd, w)
    pref = pow_frac(qd, kk * kk + 2, w)
    cube = c.multiply(qq_inf, c.multiply(qq_inf, qq_inf))
    num = c.multiply(pref, c.subtract(cube, c.multiply(gap, gap)))
    num = c.multiply(num, c.multiply(qk1, qk1))
    den = c.multiply(c.multiply(qq_inf, qq_inf), c.multiply(qq_inf, qq_inf))
    closed = c.divide(num, den)

    diff = abs(c.subtract(series_side.value.value, closed))
    tol = c.add(Decimal(1).scaleb(-ctx.target_digits), series_side.tail.value)
    if diff < tol:
        return CheckOutcome(
            True,
            "numeric",
            f"H(k) matches closed form at k={kk}: |diff| = {diff:.3E} "
            f"({series_side.nterms} terms)",
        )
    return CheckOutcome(
        False,
        "numeric",
        f"H(k) mismatch at k={kk}",
        witness=f"series {series_side.value.value} vs closed {closed}",
    )
