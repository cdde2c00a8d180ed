"""Registry of verifiable identities and their evaluation modes.

Each identity binds two *independently implemented* evaluators for its two
sides.  Depending on the identity the sides can be compared

* numerically -- both sides evaluated to an accuracy target in decimal
  digits, with explicit tail bounds for truncated sums;
* as exact truncated power series in q, compared coefficientwise;
* as a trend -- a one-parameter family of values that must approach a
  classical constant as q -> 1^-, with strictly shrinking error.

Left and right evaluators never share intermediate state: deleting either
one cannot change what the other computes.  The only shared machinery is
the generic numeric substrate (pi, summation, Pochhammer products).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence, Union

from .errors import (
    DomainError,
    InsufficientDecayError,
    PrecisionBudgetError,
)
from .exact import QSeries, UniPoly, qpoch_finite_poly, qpoch_inf_series, series_invert
from .numerics import (
    EvalContext,
    HPReal,
    SumResult,
    dec_context,
    dec_from_fraction,
    hp_constant_pi,
    hp_transcendental,
    pow_frac,
    qpoch_inf_dec,
    qq_recip_dec,
    sum_until,
    trigamma_num,
    zeta3_num,
)

ParamValue = Union[Fraction, int]


# ---------------------------------------------------------------------------
# Report and descriptor types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParamSpec:
    name: str
    domain: str
    default: Optional[ParamValue] = None


@dataclass(frozen=True)
class IdentityDescriptor:
    """What an identity is called, what it needs, and how it can be checked."""

    id: str
    description: str
    modes: tuple[str, ...]
    numeric_params: tuple[ParamSpec, ...] = ()
    series_params: tuple[ParamSpec, ...] = ()


@dataclass
class VerificationReport:
    """Outcome of one verification run, JSON-friendly.

    ``abs_diff_or_first_mismatch`` carries the absolute difference in
    numeric/trend modes and the first mismatching power of q (or the
    agreement range) in series mode.
    """

    id: str
    mode: str
    params: dict[str, str]
    digits_or_order: int
    lhs: str
    rhs: str
    abs_diff_or_first_mismatch: str
    bound: str
    status: str
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "mode": self.mode,
            "params": self.params,
            "digits_or_order": self.digits_or_order,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "abs_diff_or_first_mismatch": self.abs_diff_or_first_mismatch,
            "bound": self.bound,
            "status": self.status,
            "detail": self.detail,
        }

    @property
    def passed(self) -> bool:
        return self.status == "pass"


# ---------------------------------------------------------------------------
# Shared small helpers
# ---------------------------------------------------------------------------


def _ratio_driven_terms(
    t0: Decimal, ratio: Callable[[int], Fraction], prec: int
) -> Iterator[Decimal]:
    """Yield t0, t1, ... where t_{n+1} = t_n * ratio(n), exact integer ratios."""
    c = dec_context(prec)
    t = t0
    n = 0
    while True:
        yield t
        r = ratio(n)
        t = c.divide(c.multiply(t, Decimal(r.numerator)), Decimal(r.denominator))
        n += 1


def _q_decimal(q: Fraction, prec: int) -> Decimal:
    if not (0 < q < 1):
        raise DomainError("q must satisfy 0 < q < 1")
    return dec_from_fraction(q, prec)


def _sin_pi_frac(x: Fraction, ctx: EvalContext) -> Decimal:
    """sin(pi*x) at working precision."""
    w = ctx.work
    c = dec_context(w)
    pi = hp_constant_pi(ctx).value
    arg = c.multiply(pi, dec_from_fraction(x, w))
    return hp_transcendental("sin", HPReal(arg, w), ctx).value


Side = tuple[HPReal, HPReal]  # (value, tail bound)


def _exact_side(value: Decimal, prec: int) -> Side:
    return HPReal(value, prec), HPReal(Decimal(0), prec)


def _summed_side(result: SumResult) -> Side:
    return result.value, result.tail


# ---------------------------------------------------------------------------
# guillera_pi2 and ramanujan_4pi
# ---------------------------------------------------------------------------


def _guillera_lhs(params: dict, ctx: EvalContext) -> Side:
    # sum over n of (1/4)^n * ((1)_n / (3/2)_n)^3 * (3n+2)
    def ratio(n: int) -> Fraction:
        return Fraction((2 * n + 2) ** 3 * (3 * n + 5), 4 * (2 * n + 3) ** 3 * (3 * n + 2))

    return _summed_side(sum_until(_ratio_driven_terms(Decimal(2), ratio, ctx.work), ctx))


def _guillera_rhs(params: dict, ctx: EvalContext) -> Side:
    w = ctx.work
    c = dec_context(w)
    pi = hp_constant_pi(ctx).value
    return _exact_side(c.divide(c.multiply(pi, pi), Decimal(4)), w)


def _ramanujan_lhs(params: dict, ctx: EvalContext) -> Side:
    # sum over n of (1/4)^n * ((1/2)_n / (1)_n)^3 * (6n+1)
    def ratio(n: int) -> Fraction:
        return Fraction((2 * n + 1) ** 3 * (6 * n + 7), 4 * (2 * n + 2) ** 3 * (6 * n + 1))

    return _summed_side(sum_until(_ratio_driven_terms(Decimal(1), ratio, ctx.work), ctx))


def _ramanujan_rhs(params: dict, ctx: EvalContext) -> Side:
    w = ctx.work
    c = dec_context(w)
    return _exact_side(c.divide(Decimal(4), hp_constant_pi(ctx).value), w)


# ---------------------------------------------------------------------------
# hks1: q-hypergeometric sum = Lambert-type series
# ---------------------------------------------------------------------------


def _hks1_lhs_terms(qd: Decimal, prec: int) -> Iterator[Decimal]:
    c = dec_context(prec)
    one = Decimal(1)
    two = Decimal(2)
    q2 = c.multiply(qd, qd)
    a = one  # (q^2;q^2)_n
    b = c.subtract(one, qd)  # (q;q^2)_{n+1}
    v = c.multiply(two, c.multiply(c.add(one, qd), c.add(one, q2)))  # (-1;q)_{2n+3}
    pw = one  # q^{2n(n+1)}
    step = c.multiply(q2, q2)  # q^{4n+4}
    q2n2 = q2  # q^{2n+2}
    q4n3 = c.multiply(q2, qd)  # q^{4n+3}
    n = 0
    while True:
        bracket = c.subtract(c.add(one, q2n2), c.multiply(two, q4n3))
        a3 = c.multiply(c.multiply(a, a), a)
        b3 = c.multiply(c.multiply(b, b), b)
        num = c.multiply(c.multiply(pw, bracket), a3)
        yield c.divide(num, c.multiply(b3, v))
        # advance to n+1
        a = c.multiply(a, c.subtract(one, q2n2))
        b = c.multiply(b, c.subtract(one, c.multiply(q4n3, qd)))  # 1 - q^{2n+3}
        v = c.multiply(
            v,
            c.multiply(
                c.add(one, c.multiply(q4n3, qd)),  # 1 + q^{2n+3}
                c.add(one, c.multiply(q2n2, q2)),  # 1 + q^{2n+4}
            ),
        )
        pw = c.multiply(pw, step)
        step = c.multiply(step, c.multiply(q2, q2))
        q2n2 = c.multiply(q2n2, q2)
        q4n3 = c.multiply(q4n3, c.multiply(q2, q2))
        n += 1


def _hks1_lhs(params: dict, ctx: EvalContext) -> Side:
    qd = _q_decimal(params["q"], ctx.work)
    return _summed_side(sum_until(_hks1_lhs_terms(qd, ctx.work), ctx))


def _hks1_rhs(params: dict, ctx: EvalContext) -> Side:
    qd = _q_decimal(params["q"], ctx.work)
    w = ctx.work
    c = dec_context(w)
    one = Decimal(1)
    q2 = c.multiply(qd, qd)

    def terms() -> Iterator[Decimal]:
        p2n = one  # q^{2n}
        p2n1 = qd  # q^{2n+1}
        while True:
            d = c.subtract(one, p2n1)
            yield c.divide(p2n, c.multiply(c.multiply(d, d), Decimal(2)))
            p2n = c.multiply(p2n, q2)
            p2n1 = c.multiply(p2n1, q2)

    return _summed_side(sum_until(terms(), ctx))


def _hks1_lhs_series(params: dict, order: int) -> QSeries:
    total = QSeries(order)
    n = 0
    e_poly = QSeries.constant(1, order)  # (q^2;q^2)_n
    f_poly = qpoch_inf_series(1, order, step=2).truncate(order)  # placeholder, rebuilt below
    # (q;q^2)_{n+1} and prod_{j=1..2n+2} (1+q^j), maintained incrementally
    fo = QSeries.constant(1, order).mul_binom(Fraction(-1), 1)
    v = QSeries.constant(2, order).mul_binom(Fraction(1), 1).mul_binom(Fraction(1), 2)
    while 2 * n * (n + 1) <= order:
        cube_e = e_poly * e_poly * e_poly
        cube_f = fo * fo * fo
        base = cube_e * series_invert(cube_f * v)
        base = base.shift(2 * n * (n + 1))
        term = base + base.shift(2 * n + 2) - (base.shift(4 * n + 3) * 2)
        total = total + term
        e_poly = e_poly.mul_binom(Fraction(-1), 2 * n + 2)
        fo = fo.mul_binom(Fraction(-1), 2 * n + 3)
        v = v.mul_binom(Fraction(1), 2 * n + 3).mul_binom(Fraction(1), 2 * n + 4)
        n += 1
    return total


def _hks1_rhs_series(params: dict, order: int) -> QSeries:
    out = [Fraction(0)] * (order + 1)
    n = 0
    while 2 * n <= order:
        j = 0
        while 2 * n + (2 * n + 1) * j <= order:
            out[2 * n + (2 * n + 1) * j] += Fraction(j + 1, 2)
            j += 1
        n += 1
    return QSeries(order, out)


# ---------------------------------------------------------------------------
# hks2: q-hypergeometric sum = infinite-product square
# ---------------------------------------------------------------------------


def _hks2_lhs_terms(qd: Decimal, prec: int) -> Iterator[Decimal]:
    c = dec_context(prec)
    one = Decimal(1)
    a = one  # (q;q)_n
    m = one  # (-q;q)_n
    o = one  # (q^3;q^2)_n
    pw = one  # q^{n(n+1)/2}
    pstep = qd  # q^{n+1}
    q3n2 = c.multiply(qd, qd)  # q^{3n+2}
    q3 = c.multiply(q3n2, qd)
    q2n3 = q3  # q^{2n+3}
    q2 = c.multiply(qd, qd)
    inv_1mq = c.divide(one, c.subtract(one, qd))
    while True:
        a3 = c.multiply(c.multiply(a, a), a)
        o3 = c.multiply(c.multiply(o, o), o)
        num = c.multiply(pw, c.subtract(one, q3n2))
        num = c.multiply(num, c.multiply(a3, m))
        yield c.multiply(inv_1mq, c.divide(num, o3))
        a = c.multiply(a, c.subtract(one, pstep))
        m = c.multiply(m, c.add(one, pstep))
        o = c.multiply(o, c.subtract(one, q2n3))
        pw = c.multiply(pw, pstep)
        pstep = c.multiply(pstep, qd)
        q3n2 = c.multiply(q3n2, q3)
        q2n3 = c.multiply(q2n3, q2)


def _hks2_lhs(params: dict, ctx: EvalContext) -> Side:
    qd = _q_decimal(params["q"], ctx.work)
    return _summed_side(sum_until(_hks2_lhs_terms(qd, ctx.work), ctx))


def _hks2_rhs(params: dict, ctx: EvalContext) -> Side:
    w = ctx.work
    c = dec_context(w)
    qd = _q_decimal(params["q"], w)
    one = Decimal(1)
    q2 = c.multiply(qd, qd)
    even = qpoch_inf_dec(q2, q2, w)  # (q^2;q^2)_inf
    odd = qpoch_inf_dec(qd, q2, w)  # (q;q^2)_inf
    ratio = c.divide(even, odd)
    r4 = c.power(ratio, Decimal(4))
    omq = c.subtract(one, qd)
    return _exact_side(c.multiply(c.multiply(omq, omq), r4), w)


def _hks2_lhs_series(params: dict, order: int) -> QSeries:
    total = QSeries(order)
    n = 0
    a = QSeries.constant(1, order)  # (q;q)_n
    m = QSeries.constant(1, order)  # (-q;q)_n
    o = QSeries.constant(1, order)  # (q^3;q^2)_n
    while n * (n + 1) // 2 <= order:
        a3 = a * a * a
        o3 = o * o * o
        base = (a3 * m) * series_invert(o3)
        u = base.shift(n * (n + 1) // 2)
        u = u - u.shift(3 * n + 2)
        term = u.div_binom(Fraction(-1), 1)  # divide by (1 - q)
        total = total + term
        a = a.mul_binom(Fraction(-1), n + 1)
        m = m.mul_binom(Fraction(1), n + 1)
        o = o.mul_binom(Fraction(-1), 2 * n + 3)
        n += 1
    return total


def _hks2_rhs_series(params: dict, order: int) -> QSeries:
    even = qpoch_inf_series(2, order, step=2)
    odd = qpoch_inf_series(1, order, step=2)
    even4 = (even * even) * (even * even)
    odd4 = (odd * odd) * (odd * odd)
    out = even4 * series_invert(odd4)
    return out.mul_binom(Fraction(-1), 1).mul_binom(Fraction(-1), 1)


# ---------------------------------------------------------------------------
# main_theorem: two-parameter q-identity from the telescoped certificate sum
# ---------------------------------------------------------------------------


def _main_lhs_terms(k: Fraction, qd: Decimal, prec: int) -> Iterator[Decimal]:
    c = dec_context(prec)
    one = Decimal(1)
    two = Decimal(2)
    qq_inf = qpoch_inf_dec(qd, qd, prec) if k.denominator != 1 else None
    qk = pow_frac(qd, k, prec)
    rk = qq_recip_dec(k - 1, qd, prec, qq_inf)  # 1/(q;q)_{k-1}
    rk2 = c.multiply(rk, rk)
    qq_n = one  # (q;q)_n
    b = c.subtract(one, qd)  # (q;q)_{2n+1}
    rnk = qq_recip_dec(1 - k, qd, prec, qq_inf)  # 1/(q;q)_{n+1-k}
    qnk = pow_frac(qd, 2 - k, prec)  # q^{n+2-k}
    pref = pow_frac(qd, k * k - 2 * k + 1, prec)  # q^{n-2k+k^2} * q (outer factor)
    qn1 = qd
    q2n2 = c.multiply(qd, qd)
    while True:
        bracket = c.subtract(c.multiply(two, qk), c.add(qn1, q2n2))
        q4 = c.multiply(qq_n, qq_n)
        q4 = c.multiply(q4, q4)
        num = c.multiply(c.multiply(pref, bracket), q4)
        num = c.multiply(num, c.multiply(rk2, c.multiply(rnk, rnk)))
        den = c.multiply(c.add(one, qn1), b)
        yield c.divide(num, den)
        qq_n = c.multiply(qq_n, c.subtract(one, qn1))
        b = c.multiply(b, c.multiply(
            c.subtract(one, c.multiply(qn1, qd)),       # 1 - q^{2n+2} via q^{n+1}*q^{n+1}
            one,
        ))
        # the (q;q)_{2n+1} update needs both 1-q^{2n+2} and 1-q^{2n+3}
        b = c.multiply(b, c.subtract(one, c.multiply(q2n2, qd)))
        rnk = c.divide(rnk, c.subtract(one, qnk))
        qnk = c.multiply(qnk, qd)
        pref = c.multiply(pref, qd)
        qn1 = c.multiply(qn1, qd)
        q2n2 = c.multiply(q2n2, c.multiply(qd, qd))


def _main_lhs(params: dict, ctx: EvalContext) -> Side:
    k = params["k"]
    qd = _q_decimal(params["q"], ctx.work)
    return _summed_side(sum_until(_main_lhs_terms(k, qd, ctx.work), ctx))


def _main_rhs_terms(k: Fraction, qd: Decimal, prec: int) -> Iterator[Decimal]:
    c = dec_context(prec)
    one = Decimal(1)
    qq_inf = qpoch_inf_dec(qd, qd, prec)
    cube = c.multiply(qq_inf, c.multiply(qq_inf, qq_inf))
    p = qpoch_inf_dec(pow_frac(qd, 1 + k, prec), qd, prec)  # (q^{1+n+k};q)_inf
    ppow = pow_frac(qd, 1 + k, prec)  # q^{1+n+k}
    if k.denominator == 1:
        wprod: Optional[Decimal] = None  # (q^{1-n-k};q)_inf is identically 0
    else:
        wprod = qpoch_inf_dec(pow_frac(qd, 1 - k, prec), qd, prec)
        negpow = c.divide(one, pow_frac(qd, k, prec))  # q^{-n-k}
    gpow = pow_frac(qd, k * k, prec)  # q^{(k+n)^2}
    gstep = pow_frac(qd, 2 * k + 1, prec)  # q^{2(k+n)+1}
    q2 = c.multiply(qd, qd)
    while True:
        if wprod is None:
            gap = Decimal(0)
        else:
            gap = c.multiply(wprod, wprod)
        term = c.multiply(gpow, c.subtract(cube, gap))
        term = c.multiply(term, c.multiply(p, p))
        yield term
        p = c.divide(p, c.subtract(one, ppow))
        ppow = c.multiply(ppow, qd)
        if wprod is not None:
            wprod = c.multiply(wprod, c.subtract(one, negpow))
            negpow = c.divide(negpow, qd)
        gpow = c.multiply(gpow, gstep)
        gstep = c.multiply(gstep, q2)


def _main_rhs(params: dict, ctx: EvalContext) -> Side:
    k = params["k"]
    w = ctx.work
    c = dec_context(w)
    qd = _q_decimal(params["q"], w)
    qq_inf = qpoch_inf_dec(qd, qd, w)
    quart = c.power(qq_inf, Decimal(4))
    summed = sum_until(_main_rhs_terms(k, qd, w), ctx)
    value = HPReal(c.divide(summed.value.value, quart), w)
    tail = HPReal(c.divide(summed.tail.value, quart), w)
    return value, tail


def _main_lhs_series(params: dict, order: int) -> QSeries:
    k = int(params["k"])
    total = QSeries(order)
    # base_n = q^{1+n-2k+k^2} (q;q)_n^4 / ((q;q)_{k-1}^2 (q;q)_{2n+1}
    #          (q;q)_{n+1-k}^2 (1+q^{n+1})); summand is base_n * bracket
    n = k - 1
    start_exp = k * k - k  # valuation of base at n = k-1
    if start_exp > order:
        return total
    head = qpoch_finite_poly(1, k - 1) if k > 1 else UniPoly.one()
    base = QSeries.from_unipoly(head * head, order).shift(start_exp)
    base = base.div_binom(Fraction(1), k)  # 1/(1+q^k)
    for j in range(1, 2 * k):
        base = base.div_binom(Fraction(-1), j)  # 1/(q;q)_{2k-1}
    while True:
        term = (
            base.shift(k) * 2
            - base.shift(n + 1)
            - base.shift(2 * n + 2)
        )
        total = total + term
        n += 1
        if 1 + n - 2 * k + k * k + k > order:
            break
        base = base.shift(1)
        for _ in range(4):
            base = base.mul_binom(Fraction(-1), n)  # (1-q^n)^4 for the new n
        base = base.mul_binom(Fraction(1), n)  # * (1+q^n)
        base = base.div_binom(Fraction(1), n + 1)  # / (1+q^{n+1})
        base = base.div_binom(Fraction(-1), 2 * n)  # / (1-q^{2n})
        base = base.div_binom(Fraction(-1), 2 * n + 1)  # / (1-q^{2n+1})
        base = base.div_binom(Fraction(-1), n + 1 - k)
        base = base.div_binom(Fraction(-1), n + 1 - k)
    return total


def _main_rhs_series(params: dict, order: int) -> QSeries:
    k = int(params["k"])
    total = QSeries(order)
    inv_qq = series_invert(qpoch_inf_series(1, order))
    p = qpoch_inf_series(k + 1, order) if k + 1 <= order else QSeries.constant(1, order)
    t = p * p * inv_qq
    n = 0
    while (k + n) ** 2 <= order:
        total = total + t.shift((k + n) ** 2)
        t = t.div_binom(Fraction(-1), 1 + n + k).div_binom(Fraction(-1), 1 + n + k)
        n += 1
    return total


# ---------------------------------------------------------------------------
# partition_gf: Euler product inverse vs Durfee-square decomposition
# ---------------------------------------------------------------------------


def _partition_lhs_series(params: dict, order: int) -> QSeries:
    return series_invert(qpoch_inf_series(1, order))


def _partition_rhs_series(params: dict, order: int) -> QSeries:
    total = QSeries(order)
    recip = QSeries.constant(1, order)  # 1/(q;q)_n
    n = 0
    while n * n <= order:
        if n:
            recip = recip.div_binom(Fraction(-1), n)
        total = total + (recip * recip).shift(n * n)
        n += 1
    return total


def _partition_lhs(params: dict, ctx: EvalContext) -> Side:
    w = ctx.work
    c = dec_context(w)
    qd = _q_decimal(params["q"], w)
    return _exact_side(c.divide(Decimal(1), qpoch_inf_dec(qd, qd, w)), w)


def _partition_rhs(params: dict, ctx: EvalContext) -> Side:
    w = ctx.work
    c = dec_context(w)
    qd = _q_decimal(params["q"], w)
    one = Decimal(1)

    def terms() -> Iterator[Decimal]:
        recip = one
        gpow = one  # q^{n^2}
        gstep = qd  # q^{2n+1}
        qn = qd  # q^n for the recip update
        n = 0
        while True:
            yield c.multiply(gpow, c.multiply(recip, recip))
            n += 1
            recip = c.divide(recip, c.subtract(one, qn))
            qn = c.multiply(qn, qd)
            gpow = c.multiply(gpow, gstep)
            gstep = c.multiply(gstep, c.multiply(qd, qd))

    return _summed_side(sum_until(terms(), ctx))


# ---------------------------------------------------------------------------
# classical_limit_trigamma, pi_k_half, zeta3_harmonic
# ---------------------------------------------------------------------------


def _trigamma_series_seed(k: Fraction, ctx: EvalContext) -> Decimal:
    """First term (3-2k) sin^2(pi k) / (2 (1-k)^2 pi^2) of the ratio sum."""
    w = ctx.work
    c = dec_context(w)
    s = _sin_pi_frac(k, ctx)
    pi = hp_constant_pi(ctx).value
    num = c.multiply(dec_from_fraction(Fraction(3) - 2 * k, w), c.multiply(s, s))
    den = c.multiply(dec_from_fraction(2 * (1 - k) ** 2, w), c.multiply(pi, pi))
    return c.divide(num, den)


def _trigamma_lhs(params: dict, ctx: EvalContext) -> Side:
    k = params["k"]
    w = ctx.work
    c = dec_context(w)
    t0 = _trigamma_series_seed(k, ctx)

    def terms() -> Iterator[Decimal]:
        t = t0
        n = 0
        while True:
            yield t
            r = ((n + 1) ** 4 * (3 * n + 6 - 2 * k)) / (
                Fraction((2 * n + 2) * (2 * n + 3)) * (n + 2 - k) ** 2 * (3 * n + 3 - 2 * k)
            )
            t = c.multiply(t, dec_from_fraction(r, w))
            n += 1

    return _summed_side(sum_until(terms(), ctx))


def _trigamma_mid(params: dict, ctx: EvalContext) -> Side:
    """1 - (sin^2(pi k)/pi^2) * (sum_{n<50} 1/(k+n)^2 + psi'(k+50)).

    Independent route from the closed form: the reflection-reduced termwise
    sum for the first 50 terms plus a trigamma tail at the shifted argument.
    """
    k = params["k"]
    w = ctx.work
    c = dec_context(w)
    partial = Decimal(0)
    for n in range(50):
        partial = c.add(partial, dec_from_fraction(1 / (k + n) ** 2, w))
    tail = trigamma_num(k + 50, ctx).value
    s = _sin_pi_frac(k, ctx)
    pi = hp_constant_pi(ctx).value
    factor = c.divide(c.multiply(s, s), c.multiply(pi, pi))
    value = c.subtract(Decimal(1), c.multiply(factor, c.add(partial, tail)))
    return _exact_side(value, w)


def _trigamma_rhs(params: dict, ctx: EvalContext) -> Side:
    k = params["k"]
    w = ctx.work
    c = dec_context(w)
    s = _sin_pi_frac(k, ctx)
    pi = hp_constant_pi(ctx).value
    factor = c.divide(c.multiply(s, s), c.multiply(pi, pi))
    value = c.subtract(Decimal(1), c.multiply(factor, trigamma_num(k, ctx).value))
    return _exact_side(value, w)


def trigamma_termwise_check(
    k: Fraction, nmax: int, ctx: EvalContext
) -> list[tuple[int, Decimal, Decimal]]:
    """Compare the two routes to the reflected summand for n = 0..nmax.

    Route A advances m_0 = sin^2(pi k)/(pi k)^2 by the exact recurrence
    m_{n+1} = m_n (k+n)^2/(k+n+1)^2; route B computes
    sin^2(pi k) / (pi (k+n))^2 directly.  Returns a list of
    (n, route_a, route_b) triples for the caller to compare.
    """
    w = ctx.work
    c = dec_context(w)
    s = _sin_pi_frac(k, ctx)
    pi = hp_constant_pi(ctx).value
    s2 = c.multiply(s, s)
    pi2 = c.multiply(pi, pi)
    m = c.divide(s2, c.multiply(pi2, dec_from_fraction(k * k, w)))
    rows: list[tuple[int, Decimal, Decimal]] = []
    for n in range(nmax + 1):
        direct = c.divide(
            s2, c.multiply(pi2, dec_from_fraction((k + n) ** 2, w))
        )
        rows.append((n, m, direct))
        m = c.multiply(m, dec_from_fraction((k + n) ** 2 / (k + n + 1) ** 2, w))
    return rows


def _trigamma_cross_checks(params: dict, ctx: EvalContext) -> list[tuple[str, bool, str]]:
    k = params["k"]
    tol = Decimal(1).scaleb(-ctx.target_digits)
    mid, _ = _trigamma_mid(params, ctx)
    rhs, _ = _trigamma_rhs(params, ctx)
    checks: list[tuple[str, bool, str]] = []
    diff = abs(mid.value - rhs.value)
    checks.append(
        (
            "middle-vs-closed",
            diff < tol,
            f"partial-sum-plus-shifted-tail route differs by {diff:.3E}",
        )
    )
    rows = trigamma_termwise_check(k, 50, ctx)
    worst = max(abs(a - b) for _, a, b in rows)
    checks.append(
        (
            "termwise-n<=50",
            worst < tol,
            f"worst termwise gap {worst:.3E} across {len(rows)} terms",
        )
    )
    return checks


def _pi_k_half_lhs(params: dict, ctx: EvalContext) -> Side:
    w = ctx.work
    c = dec_context(w)
    t0 = c.divide(Decimal(8), hp_constant_pi(ctx).value)

    def ratio(n: int) -> Fraction:
        return Fraction(
            4 * (n + 1) ** 4 * (3 * n + 5),
            (2 * n + 2) * (2 * n + 3) ** 3 * (3 * n + 2),
        )

    return _summed_side(sum_until(_ratio_driven_terms(t0, ratio, w), ctx))


def _pi_k_half_rhs(params: dict, ctx: EvalContext) -> Side:
    return _exact_side(hp_constant_pi(ctx).value, ctx.work)


def _zeta3_lhs(params: dict, ctx: EvalContext) -> Side:
    w = ctx.work

    def terms() -> Iterator[Decimal]:
        coeff = Fraction(1)  # (1/4)^n ((1)_n/(3/2)_n)^3
        odd_harm = Fraction(1)  # O_{n+1}
        n = 0
        while True:
            yield dec_from_fraction(coeff * ((6 * n + 4) * odd_harm - 1), w)
            coeff *= Fraction((2 * n + 2) ** 3, 4 * (2 * n + 3) ** 3)
            odd_harm += Fraction(1, 2 * n + 3)
            n += 1

    return _summed_side(sum_until(terms(), ctx))


def _zeta3_rhs(params: dict, ctx: EvalContext) -> Side:
    w = ctx.work
    c = dec_context(w)
    z3 = zeta3_num(ctx).value
    return _exact_side(c.divide(c.multiply(Decimal(7), z3), Decimal(2)), w)


# ---------------------------------------------------------------------------
# Trend identities: q -> 1^- limits
# ---------------------------------------------------------------------------


def _qgamma_value(q: Fraction, ctx: EvalContext) -> HPReal:
    w = ctx.work
    c = dec_context(w)
    qd = _q_decimal(q, w)
    q2 = c.multiply(qd, qd)
    even = qpoch_inf_dec(q2, q2, w)
    odd = qpoch_inf_dec(qd, q2, w)
    ratio = c.divide(even, odd)
    value = c.multiply(c.subtract(Decimal(1), qd), c.multiply(ratio, ratio))
    return HPReal(value, w)


def _qgamma_target(ctx: EvalContext) -> HPReal:
    w = ctx.work
    c = dec_context(w)
    return HPReal(c.divide(hp_constant_pi(ctx).value, Decimal(2)), w)


def _hks1_scaled_value(q: Fraction, ctx: EvalContext) -> HPReal:
    w = ctx.work
    c = dec_context(w)
    qd = _q_decimal(q, w)
    summed = sum_until(_hks1_lhs_terms(qd, w), ctx)
    q2 = c.multiply(qd, qd)
    scale = c.subtract(Decimal(1), q2)
    scale = c.multiply(scale, scale)
    return HPReal(c.multiply(scale, summed.value.value), w)


def _hks1_scaled_target(ctx: EvalContext) -> HPReal:
    w = ctx.work
    c = dec_context(w)
    pi = hp_constant_pi(ctx).value
    return HPReal(c.divide(c.multiply(pi, pi), Decimal(4)), w)


# ---------------------------------------------------------------------------
# Parameter validation
# ---------------------------------------------------------------------------


def _need_q(params: dict) -> dict:
    q = params.get("q")
    if q is None:
        raise DomainError("this identity requires a parameter q")
    q = Fraction(q)
    if not (0 < q < 1):
        raise DomainError("q must lie strictly between 0 and 1")
    return {"q": q}


def _need_k_unit(params: dict) -> dict:
    k = params.get("k")
    if k is None:
        raise DomainError("this identity requires a parameter k")
    k = Fraction(k)
    if not (0 < k < 1):
        raise DomainError("k must lie strictly in (0, 1)")
    return {"k": k}


def _need_qk(params: dict) -> dict:
    out = _need_q(params)
    out.update(_need_k_unit(params))
    return out


def _need_int_k(params: dict) -> dict:
    k = params.get("k")
    if k is None:
        raise DomainError("series mode requires an integer parameter k")
    kf = Fraction(k)
    if kf.denominator != 1 or kf < 1:
        raise DomainError("series mode requires integer k >= 1")
    return {"k": int(kf)}


def _no_params(params: dict) -> dict:
    return {}


# ---------------------------------------------------------------------------
# The registry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Record:
    descriptor: IdentityDescriptor
    numeric_lhs: Optional[Callable[[dict, EvalContext], Side]] = None
    numeric_rhs: Optional[Callable[[dict, EvalContext], Side]] = None
    validate_numeric: Callable[[dict], dict] = _no_params
    series_lhs: Optional[Callable[[dict, int], QSeries]] = None
    series_rhs: Optional[Callable[[dict, int], QSeries]] = None
    validate_series: Callable[[dict], dict] = _no_params
    trend_value: Optional[Callable[[Fraction, EvalContext], HPReal]] = None
    trend_target: Optional[Callable[[EvalContext], HPReal]] = None
    cross_checks: Optional[Callable[[dict, EvalContext], list[tuple[str, bool, str]]]] = None


_Q_SPEC = ParamSpec("q", "0 < q < 1", Fraction(1, 2))
_K_UNIT_SPEC = ParamSpec("k", "0 < k < 1", Fraction(1, 2))
_K_QUARTER_SPEC = ParamSpec("k", "0 < k < 1", Fraction(1, 4))
_K_INT_SPEC = ParamSpec("k", "integer k >= 1", 1)


def _records() -> dict[str, _Record]:
    recs = [
        _Record(
            IdentityDescriptor(
                "guillera_pi2",
                "Guillera's hypergeometric series summing to pi^2/4",
                ("numeric",),
            ),
            numeric_lhs=_guillera_lhs,
            numeric_rhs=_guillera_rhs,
        ),
        _Record(
            IdentityDescriptor(
                "ramanujan_4pi",
                "Ramanujan's series of the same convergence rate summing to 4/pi",
                ("numeric",),
            ),
            numeric_lhs=_ramanujan_lhs,
            numeric_rhs=_ramanujan_rhs,
        ),
        _Record(
            IdentityDescriptor(
                "hks1",
                "Hou-Krattenthaler-Sun first q-analogue: quartic-exponent "
                "q-series equals a Lambert-type series",
                ("numeric", "series"),
                numeric_params=(_Q_SPEC,),
            ),
            numeric_lhs=_hks1_lhs,
            numeric_rhs=_hks1_rhs,
            validate_numeric=_need_q,
            series_lhs=_hks1_lhs_series,
            series_rhs=_hks1_rhs_series,
        ),
        _Record(
            IdentityDescriptor(
                "hks2",
                "Hou-Krattenthaler-Sun second q-analogue: triangular-exponent "
                "q-series equals an infinite-product fourth power",
                ("numeric", "series"),
                numeric_params=(_Q_SPEC,),
            ),
            numeric_lhs=_hks2_lhs,
            numeric_rhs=_hks2_rhs,
            validate_numeric=_need_q,
            series_lhs=_hks2_lhs_series,
            series_rhs=_hks2_rhs_series,
        ),
        _Record(
            IdentityDescriptor(
                "main_theorem",
                "two-parameter q-identity: certificate-telescoped central "
                "q-binomial sum equals an infinite-product series",
                ("numeric", "series"),
                numeric_params=(_Q_SPEC, _K_QUARTER_SPEC),
                series_params=(_K_INT_SPEC,),
            ),
            numeric_lhs=_main_lhs,
            numeric_rhs=_main_rhs,
            validate_numeric=_need_qk,
            series_lhs=_main_lhs_series,
            series_rhs=_main_rhs_series,
            validate_series=_need_int_k,
        ),
        _Record(
            IdentityDescriptor(
                "partition_gf",
                "partition generating function: Euler product inverse equals "
                "the Durfee-square sum q^{n^2}/(q;q)_n^2",
                ("numeric", "series"),
                numeric_params=(_Q_SPEC,),
            ),
            numeric_lhs=_partition_lhs,
            numeric_rhs=_partition_rhs,
            validate_numeric=_need_q,
            series_lhs=_partition_lhs_series,
            series_rhs=_partition_rhs_series,
        ),
        _Record(
            IdentityDescriptor(
                "classical_limit_trigamma",
                "q -> 1 limit of the two-parameter identity: a ratio-driven "
                "series equals 1 - psi'(k) sin^2(pi k)/pi^2",
                ("numeric",),
                numeric_params=(_K_UNIT_SPEC,),
            ),
            numeric_lhs=_trigamma_lhs,
            numeric_rhs=_trigamma_rhs,
            validate_numeric=_need_k_unit,
            cross_checks=_trigamma_cross_checks,
        ),
        _Record(
            IdentityDescriptor(
                "pi_k_half",
                "the k = 1/2 specialization: a central-factorial series "
                "summing to pi",
                ("numeric",),
            ),
            numeric_lhs=_pi_k_half_lhs,
            numeric_rhs=_pi_k_half_rhs,
        ),
        _Record(
            IdentityDescriptor(
                "zeta3_harmonic",
                "odd-harmonic-number companion series summing to 7 zeta(3)/2",
                ("numeric",),
            ),
            numeric_lhs=_zeta3_lhs,
            numeric_rhs=_zeta3_rhs,
        ),
        _Record(
            IdentityDescriptor(
                "qgamma_limit",
                "(1-q) (q^2;q^2)_inf^2 / (q;q^2)_inf^2 -> pi/2 as q -> 1^-",
                ("trend",),
            ),
            trend_value=_qgamma_value,
            trend_target=_qgamma_target,
        ),
        _Record(
            IdentityDescriptor(
                "hks1_scaled",
                "(1-q^2)^2 times the hks1 q-series -> pi^2/4 as q -> 1^-",
                ("trend",),
            ),
            trend_value=_hks1_scaled_value,
            trend_target=_hks1_scaled_target,
        ),
    ]
    return {r.descriptor.id: r for r in recs}


_REGISTRY = _records()

TREND_REL_TOL = Fraction(1, 100)
DEFAULT_TREND_QS = (Fraction(9, 10), Fraction(99, 100), Fraction(999, 1000))


def registry_list() -> list[IdentityDescriptor]:
    """All identity descriptors, in registry order."""
    return [rec.descriptor for rec in _REGISTRY.values()]


def _get(identity_id: str) -> _Record:
    rec = _REGISTRY.get(identity_id)
    if rec is None:
        known = ", ".join(_REGISTRY)
        raise DomainError(f"unknown identity {identity_id!r}; known ids: {known}")
    return rec


def default_params(identity_id: str, mode: str) -> dict[str, ParamValue]:
    """Default parameter values for an identity in a given mode."""
    rec = _get(identity_id)
    specs = rec.descriptor.numeric_params if mode == "numeric" else rec.descriptor.series_params
    return {s.name: s.default for s in specs if s.default is not None}


def _fmt_params(params: dict) -> dict[str, str]:
    return {name: str(value) for name, value in params.items()}


def verify_numeric(identity_id: str, params: dict, ctx: EvalContext) -> VerificationReport:
    """Evaluate both sides numerically and compare against 10**-D plus tails."""
    rec = _get(identity_id)
    if "numeric" not in rec.descriptor.modes:
        raise DomainError(f"identity {identity_id!r} has no numeric mode")
    merged = dict(default_params(identity_id, "numeric"))
    merged.update(params)
    clean = rec.validate_numeric(merged)
    d = ctx.target_digits
    c = dec_context(ctx.work)
    try:
        lhs, lhs_tail = rec.numeric_lhs(clean, ctx)
        rhs, rhs_tail = rec.numeric_rhs(clean, ctx)
        extra: list[tuple[str, bool, str]] = (
            rec.cross_checks(clean, ctx) if rec.cross_checks else []
        )
    except (InsufficientDecayError, PrecisionBudgetError) as exc:
        return VerificationReport(
            id=identity_id,
            mode="numeric",
            params=_fmt_params(clean),
            digits_or_order=d,
            lhs="",
            rhs="",
            abs_diff_or_first_mismatch="",
            bound="",
            status="inconclusive",
            detail=f"{type(exc).__name__}: {exc}",
        )
    diff = abs(c.subtract(lhs.value, rhs.value))
    bound = c.add(
        Decimal(1).scaleb(-d), c.add(lhs_tail.value, rhs_tail.value)
    )
    ok = diff < bound and all(passed for _, passed, _ in extra)
    details = [msg for name, passed, msg in extra if not passed] or [
        f"{name}: {msg}" for name, _, msg in extra
    ]
    return VerificationReport(
        id=identity_id,
        mode="numeric",
        params=_fmt_params(clean),
        digits_or_order=d,
        lhs=lhs.to_digits_str(d),
        rhs=rhs.to_digits_str(d),
        abs_diff_or_first_mismatch=str(dec_context(6).plus(diff)),
        bound=str(dec_context(6).plus(bound)),
        status="pass" if ok else "fail",
        detail="; ".join(details),
    )


def verify_series(identity_id: str, params: dict, order: int) -> VerificationReport:
    """Expand both sides as truncated q-series and compare coefficientwise."""
    rec = _get(identity_id)
    if "series" not in rec.descriptor.modes:
        raise DomainError(f"identity {identity_id!r} has no series mode")
    if not isinstance(order, int) or order < 1:
        raise DomainError("series order must be a positive integer")
    merged = dict(default_params(identity_id, "series"))
    merged.update(params)
    clean = rec.validate_series(merged)
    lhs = rec.series_lhs(clean, order)
    rhs = rec.series_rhs(clean, order)
    mismatch = next(
        (i for i in range(order + 1) if lhs.coeffs[i] != rhs.coeffs[i]), None
    )
    if mismatch is None:
        note = f"all coefficients agree through q^{order}"
    else:
        note = (
            f"first mismatch at q^{mismatch}: "
            f"{lhs.coeffs[mismatch]} vs {rhs.coeffs[mismatch]}"
        )
    head = 8
    return VerificationReport(
        id=identity_id,
        mode="series",
        params=_fmt_params(clean),
        digits_or_order=order,
        lhs=", ".join(str(x) for x in lhs.coeffs[: head + 1]) + ", ...",
        rhs=", ".join(str(x) for x in rhs.coeffs[: head + 1]) + ", ...",
        abs_diff_or_first_mismatch=note,
        bound=f"exact through q^{order}",
        status="pass" if mismatch is None else "fail",
    )


def trend_check(
    identity_id: str,
    q_values: Sequence[Fraction] = DEFAULT_TREND_QS,
    ctx: EvalContext = EvalContext(20),
) -> VerificationReport:
    """Check a q -> 1^- limit: errors must shrink strictly along q_values
    and the last error must be within 1% of the target in relative terms."""
    rec = _get(identity_id)
    if "trend" not in rec.descriptor.modes:
        raise DomainError(f"identity {identity_id!r} has no trend mode")
    qs = [Fraction(q) for q in q_values]
    if len(qs) < 2:
        raise DomainError("trend_check needs at least two q values")
    if any(not (0 < q < 1) for q in qs) or any(b <= a for a, b in zip(qs, qs[1:])):
        raise DomainError("trend q values must increase strictly inside (0, 1)")
    c = dec_context(ctx.work)
    target = rec.trend_target(ctx).value
    errors: list[Decimal] = []
    values: list[Decimal] = []
    try:
        for q in qs:
            v = rec.trend_value(q, ctx).value
            values.append(v)
            errors.append(abs(c.subtract(v, target)))
    except (InsufficientDecayError, PrecisionBudgetError) as exc:
        return VerificationReport(
            id=identity_id,
            mode="trend",
            params={"q_values": ",".join(str(q) for q in qs)},
            digits_or_order=ctx.target_digits,
            lhs="",
            rhs="",
            abs_diff_or_first_mismatch="",
            bound="",
            status="inconclusive",
            detail=f"{type(exc).__name__}: {exc}",
        )
    shrinking = all(b < a for a, b in zip(errors, errors[1:]))
    rel_bound = c.multiply(abs(target), dec_from_fraction(TREND_REL_TOL, ctx.work))
    close = errors[-1] < rel_bound
    detail = "errors: " + ", ".join(str(dec_context(4).plus(e)) for e in errors)
    if not shrinking:
        detail += " (not strictly decreasing)"
    return VerificationReport(
        id=identity_id,
        mode="trend",
        params={"q_values": ",".join(str(q) for q in qs)},
        digits_or_order=ctx.target_digits,
        lhs=str(dec_context(ctx.target_digits).plus(values[-1])),
        rhs=str(dec_context(ctx.target_digits).plus(target)),
        abs_diff_or_first_mismatch=str(dec_context(6).plus(errors[-1])),
        bound=str(dec_context(6).plus(rel_bound)) + " (1% of target)",
        status="pass" if (shrinking and close) else "fail",
        detail=detail,
    )
