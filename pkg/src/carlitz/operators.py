"""The operator calculus on F_q-linear functions.

Monomial-basis actions of tau (Frobenius), Delta (u(xt) - x u(t)), the
derivative d = (q-th root) o Delta and the higher diagonal operators; the
induced actions on Carlitz-basis expansions; coefficient recovery; smoothness
and analyticity window diagnostics; the antiderivative S with its
Volkenborn-type integral; hyperdifferentiations; and the fractional operator
Delta^(alpha).

Monomial actions (u = sum a_n t^(q^n)):
    tau:   b_{n+1} = a_n^q
    Delta: b_n = [n] a_n                  ([0] = 0, so Delta t = 0)
    d:     b_{n-1} = ([n] a_n)^(1/q)
    higher level l: diagonal factor [n][n-1]^q ... [n-l+1]^(q^(l-1)), zero for n < l
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .carlitz import CarlitzExpansion, linear_to_carlitz
from .errors import CarlitzError, TruncationError
from .linear import LinearSeries
from .series import INF, RamifiedSeries


# -- monomial-basis operators -------------------------------------------------

def op_tau(u: LinearSeries, k: int = 1) -> LinearSeries:
    """Frobenius: u -> u^(q^k); raises the t-order bound by k."""
    return u.frobenius(k)


def op_delta(u: LinearSeries) -> LinearSeries:
    """Difference operator u(xt) - x u(t): diagonal with eigenvalues [n]."""
    quant = u.ctx.quantities()
    return u.map_coefficients_indexed(lambda n, c: c * quant.bracket(n))


def op_d(u: LinearSeries) -> LinearSeries:
    """Carlitz derivative: q-th root of Delta u; lowers the t-order bound by 1."""
    quant = u.ctx.quantities()
    ctx = u.ctx
    out = []
    for n in range(1, len(u.coeffs)):
        out.append((u.coeffs[n] * quant.bracket(n)).qth_root())
    order = None if u.order is None else u.order - 1
    return LinearSeries(ctx, out, order)


def diagonal_factor(ctx, level: int, n: int) -> RamifiedSeries:
    """Eigenvalue of the level-l diagonal operator on t^(q^n): vanishes for n < l,
    equals [n][n-1]^q ... [n-l+1]^(q^(l-1)) = D_n / D_{n-l}^(q^l) otherwise."""
    quant = ctx.quantities()
    if n < level:
        return RamifiedSeries.zero(ctx)
    acc = RamifiedSeries.one(ctx)
    for k in range(level):
        acc = acc * quant.bracket(n - k).q_power(k)
    return acc


def op_delta_level(u: LinearSeries, level: int) -> LinearSeries:
    """The level-l higher difference operator (level 0 is the identity)."""
    if level == 0:
        return u
    ctx = u.ctx
    return u.map_coefficients_indexed(lambda n, c: c * diagonal_factor(ctx, level, n))


def apply_operator(tag, u: LinearSeries) -> LinearSeries:
    """Dispatch on a tag: 'tau', 'delta', 'd', ('delta_n', l), ('frac', alpha)."""
    if tag == "tau":
        return op_tau(u)
    if tag == "delta":
        return op_delta(u)
    if tag == "d":
        return op_d(u)
    if isinstance(tag, tuple) and tag[0] == "delta_n":
        return op_delta_level(u, tag[1])
    raise CarlitzError(f"unknown operator tag {tag!r}")


# -- Carlitz-basis actions ----------------------------------------------------

def act_d(c: CarlitzExpansion) -> CarlitzExpansion:
    """d on an expansion: index i picks up c_{i+1}^(1/q) (d f_i = f_{i-1})."""
    if c.truncation < 1:
        raise TruncationError("act_d needs truncation index >= 1")
    coeffs = [c.coeffs[i + 1].qth_root() for i in range(c.truncation)]
    return CarlitzExpansion(c.ctx, coeffs)


def act_q_power(c: CarlitzExpansion) -> CarlitzExpansion:
    """u -> u^q on expansions, using f_i^q = f_i + [i+1] f_{i+1}."""
    quant = c.ctx.quantities()
    n = c.truncation
    out = []
    for j in range(n + 1):
        v = c.coeffs[j].q_power()
        if j >= 1:
            v = v + quant.bracket(j) * c.coeffs[j - 1].q_power()
        out.append(v)
    return CarlitzExpansion(c.ctx, out)


def act_delta(c: CarlitzExpansion) -> CarlitzExpansion:
    """Delta = tau o d on expansions: output_j = [j] c_j + c_{j+1}."""
    if c.truncation < 1:
        raise TruncationError("act_delta needs truncation index >= 1")
    quant = c.ctx.quantities()
    coeffs = [quant.bracket(j) * c.coeffs[j] + c.coeffs[j + 1]
              for j in range(c.truncation)]
    return CarlitzExpansion(c.ctx, coeffs)


def carlitz_action(kind: str, c: CarlitzExpansion) -> CarlitzExpansion:
    if kind == "d":
        return act_d(c)
    if kind == "q_power":
        return act_q_power(c)
    if kind in ("tau_d", "delta"):
        return act_delta(c)
    raise CarlitzError(f"unknown Carlitz-basis action {kind!r}")


# -- coefficient recovery and window diagnostics ------------------------------

def recover_coefficient(u: LinearSeries, n: int) -> RamifiedSeries:
    """Divided coefficient a_n of u = sum a_m t^(q^m) / D_m.

    The limit of (level-n diagonal u)(t) / t^(q^n) as t -> 0 is the monomial
    coefficient at index n after the diagonal action, exactly.
    """
    if u.known_order() != INF and n > u.order:
        raise TruncationError(f"series order {u.order} too low to recover index {n}")
    return op_delta_level(u, n).coefficient(n)


@dataclass
class SmoothnessReport:
    level: int
    window_norm_log_q: object      # log_q of sup over the window, or -inf
    log_values: list               # log_q of q^(n q^k) |c_n| over the window
    decaying: bool                 # finite-window decay indicator, not a limit claim


def smoothness_profile(c: CarlitzExpansion, k: int) -> SmoothnessReport:
    """Window diagnostic for k-th order smoothness of sum c_n f_n.

    Computes sup_{k <= n <= N} q^((n-k) q^k) |c_n| (reported as a log_q value)
    and whether q^(n q^k) |c_n| decays over the tail of the window.
    """
    q = c.ctx.q
    qk = q ** k
    norm = -INF
    logs = []
    for n in range(c.truncation + 1):
        lv = c.coeffs[n].abs_log_q()  # log_q |c_n|, -inf for zero
        logs.append(n * qk + lv if lv != -INF else -INF)
        if n >= k:
            val = (n - k) * qk + lv if lv != -INF else -INF
            if val > norm:
                norm = val
    tail = [v for v in logs[max(k, c.truncation // 2):] if v != -INF]
    decaying = all(b < a for a, b in zip(tail, tail[1:])) if len(tail) > 1 else True
    if not tail:
        decaying = True
    return SmoothnessReport(k, norm, logs, decaying)


@dataclass
class AnalyticityReport:
    gamma_window: object   # min over the tail window of v(c_n)/q^n (Fraction or INF)
    ball_level: int        # l = max(0, floor(-(log(q-1) + log gamma)/log q) + 1)
    entire_window: bool


def analyticity_radius(c: CarlitzExpansion) -> AnalyticityReport:
    """Window estimate of the local-analyticity parameter and ball radius q^(-l)."""
    if c.truncation < 4:
        raise TruncationError("analyticity diagnostic needs truncation >= 4")
    q = c.ctx.q
    gamma = INF
    for n in range(max(1, c.truncation // 2), c.truncation + 1):
        v = c.coeffs[n].effective_valuation()
        if v == INF:
            continue
        g = Fraction(v, q ** n)
        if g < gamma:
            gamma = g
    if gamma == INF:
        return AnalyticityReport(INF, 0, True)
    if gamma <= 0:
        return AnalyticityReport(gamma, -1, False)  # window says: not locally analytic
    val = -(math.log(q - 1) + math.log(gamma)) / math.log(q)
    level = max(0, math.floor(val) + 1)
    return AnalyticityReport(gamma, level, False)


# -- antiderivative and the Volkenborn-type integral ---------------------------

def antiderivative(f: CarlitzExpansion) -> CarlitzExpansion:
    """u with du = f and u(1) = 0: u_{i+1} = f_i^q, u_0 = 0 (since f_i(1) = 0, i >= 1)."""
    ctx = f.ctx
    out = [RamifiedSeries.zero(ctx)]
    out.extend(c.q_power() for c in f.coeffs)
    return CarlitzExpansion(ctx, out)


def volkenborn_integral(f: CarlitzExpansion) -> RamifiedSeries:
    """Integral over O: (S f)'(0) = sum_{i>=1} f_{i-1}-coefficient^q * kappa_i,
    where kappa_i = (-1)^i / L_i is the t-coefficient of f_i (certified against
    the limit oracle S f(x^n)/x^n in the tests)."""
    quant = f.ctx.quantities()
    acc = RamifiedSeries.zero(f.ctx)
    for i in range(1, f.truncation + 2):
        ci = f.coeffs[i - 1]
        if ci.is_exact_zero():
            continue
        acc = acc + ci.q_power() * quant.f_linear_coefficient(i)
    return acc


def volkenborn_limit_samples(f: CarlitzExpansion, n_max: int) -> list:
    """S f(x^n)/x^n for n = 1..n_max: the defining limit of the integral."""
    ctx = f.ctx
    sf = antiderivative(f)
    out = []
    for n in range(1, n_max + 1):
        pt = RamifiedSeries.x(ctx, n)
        out.append(sf.evaluate(pt) / pt)
    return out


def integral_of_monomial(ctx, n: int) -> RamifiedSeries:
    """Integral of t^(q^n) over O, via basis conversion (equals -1/[n+1])."""
    return volkenborn_integral(linear_to_carlitz(LinearSeries.monomial(ctx, n)))


def volkenborn_integral_parametric(slices: list) -> LinearSeries:
    """Integrate sum_m A_m(t) s^(q^m) ds over the s-variable.

    slices[m] is the t-series coefficient A_m(t). The scalar-twist rule
    (integral of c f equals c^q times the integral of f) turns each cofactor
    A_m into A_m^q, so the result is sum_m A_m(t)^q * integral(s^(q^m)).
    """
    if not slices:
        raise CarlitzError("empty parametric integrand")
    ctx = slices[0].ctx
    acc = LinearSeries.zero(ctx)
    for m, am in enumerate(slices):
        if am.is_zero() and am.order is None:
            continue
        acc = acc + am.frobenius().scale(integral_of_monomial(ctx, m))
    return acc


# -- hyperdifferentiations and the fractional operator -------------------------

def hyperdiff(k: int, a: RamifiedSeries) -> RamifiedSeries:
    """Termwise x^n -> binom(n, k) x^(n-k) with binomials reduced mod p.

    Needs an unramified integral argument (v(a) >= 0, e = 0).
    """
    ctx = a.ctx
    if a.e != 0:
        raise CarlitzError("hyperdiff needs an unramified argument")
    if a.terms and min(a.terms) < 0:
        raise CarlitzError("hyperdiff needs an integral argument")
    if k == 0:
        return a
    terms = {}
    for n, c in a.terms.items():
        if n < k:
            continue
        b = math.comb(n, k) % ctx.p
        if b:
            terms[n - k] = c.scale(b)
    prec = a.prec if a.prec == INF else a.prec - k
    return RamifiedSeries.make(ctx, terms, prec)


def digit_alternate(alpha: RamifiedSeries) -> RamifiedSeries:
    """alpha with digit signs alternated: sum (-1)^n alpha_n x^n."""
    ctx = alpha.ctx
    if alpha.e != 0:
        raise CarlitzError("digit twist needs an unramified argument")
    terms = {n: (c if n % 2 == 0 else -c) for n, c in alpha.terms.items()}
    return RamifiedSeries.make(ctx, terms, alpha.prec)


def fractional_delta(alpha: RamifiedSeries, u, t_point: RamifiedSeries,
                     prec=None) -> RamifiedSeries:
    """(Delta^(alpha) u)(t) = sum_k (-1)^k D_k(alpha-hat) u(x^k t).

    alpha must lie in O with digits in F_q; u is an F_q-linear polynomial or a
    Carlitz-basis expansion (anything with .evaluate). Terms gain x-valuation
    at least k, so the series is truncated once the tail clears the precision.
    """
    ctx = alpha.ctx
    if alpha.effective_valuation() < 0:
        raise CarlitzError("fractional operator needs alpha in O")
    if alpha.e != 0:
        raise CarlitzError("fractional operator needs unramified alpha")
    if not all(c.in_fq() for c in alpha.terms.values()):
        raise CarlitzError("fractional operator needs digits in F_q")
    if prec is None:
        prec = ctx.prec
    ahat = digit_alternate(alpha)
    # valuation gain of u(x^k t) in k: v >= k + v(t) + min_n v(coeff_n)
    base = _evaluation_valuation_floor(u) + t_point.effective_valuation()
    acc = RamifiedSeries.zero(ctx, prec)
    k = 0
    while base + k < prec:
        dk = hyperdiff(k, ahat)
        if not dk.is_zero_to_prec() or not dk.is_exact():
            pt = t_point.shift(k)
            term = dk * u.evaluate(pt)
            if k % 2 == 1:
                term = -term
            acc = acc + term.truncate(prec)
        if dk.prec != INF and dk.prec <= 0:
            break
        k += 1
    return acc


def _evaluation_valuation_floor(u):
    """Lower bound for v(u(s)) - v(s) over integral s, from monomial coefficients."""
    if isinstance(u, CarlitzExpansion):
        u = u.to_linear()
    floor = Fraction(0)
    for c in u.coeffs:
        v = c.effective_valuation()
        if v != INF and v < floor:
            floor = v  # v(c s^(q^n)) - v(s) >= v(c) for integral s
    return floor
