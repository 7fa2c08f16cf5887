"""Solvers for differential equations in the Carlitz derivative d.

Covers: regular first-order systems dy = P(tau) y + f in divided-monomial
coordinates; formal solutions of higher-order scalar equations
sum_j A_j(tau) d^j u = f with a convergence-window report; the power-function
family solving tau d u = lambda u; regular-singular systems
tau d u = P(tau) u via a substitution u = W(g); and the order-two singular
recursion with its q-fold branch choices and strong-singularity window test.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .carlitz import CarlitzExpansion, from_divided
from .errors import CarlitzError, ResonanceError, TruncationError
from .linalg import solve_linear
from .linear import LinearSeries
from .operators import act_delta, act_q_power, op_d
from .series import INF, RamifiedSeries, artin_schreier_small


# -- small dense matrices over RamifiedSeries ---------------------------------

def mat_identity(ctx, m):
    one, zero = RamifiedSeries.one(ctx), RamifiedSeries.zero(ctx)
    return tuple(tuple(one if i == j else zero for j in range(m)) for i in range(m))


def mat_zero(ctx, m):
    zero = RamifiedSeries.zero(ctx)
    return tuple(tuple(zero for _ in range(m)) for _ in range(m))


def mat_add(a, b):
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_sub(a, b):
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_mul(a, b):
    m, n = len(a), len(b[0])
    k = len(b)
    return tuple(tuple(
        _dot([a[i][l] for l in range(k)], [b[l][j] for l in range(k)])
        for j in range(n)) for i in range(m))


def _dot(u, v):
    acc = u[0] * v[0]
    for x, y in zip(u[1:], v[1:]):
        acc = acc + x * y
    return acc


def mat_scale(a, c):
    return tuple(tuple(c * x for x in row) for row in a)


def mat_vec(a, v):
    return tuple(_dot(list(row), list(v)) for row in a)


def vec_add(u, v):
    return tuple(x + y for x, y in zip(u, v))


def vec_scale(v, c):
    return tuple(c * x for x in v)


def mat_q_power(a, k=1):
    return tuple(tuple(x.q_power(k) for x in row) for row in a)


def vec_q_power(v, k=1):
    return tuple(x.q_power(k) for x in v)


def is_upper_triangular(a):
    return all(a[i][j].is_exact_zero() for i in range(len(a)) for j in range(i))


# -- regular systems -----------------------------------------------------------

@dataclass
class RegularSystem:
    """dy = P(tau) y + f with P(tau) z = sum pi_k z^(q^k), f = sum phi_j t^(q^j)/D_j."""
    ctx: object
    pis: list          # list of m x m matrices (tuples of tuples of RamifiedSeries)
    phis: list = field(default_factory=list)   # list of m-vectors
    y0: tuple = ()

    @property
    def dim(self):
        return len(self.pis[0]) if self.pis else len(self.y0)

    def pi(self, k):
        return self.pis[k] if k < len(self.pis) else None

    def phi(self, j):
        if j < len(self.phis):
            return self.phis[j]
        zero = RamifiedSeries.zero(self.ctx)
        return tuple(zero for _ in range(self.dim))


def _tau_ladder(ctx, l, k):
    """The divided-basis factor [l-k+1]^(q^(k-1)) [l-k+2]^(q^(k-2)) ... [l]."""
    quant = ctx.quantities()
    acc = RamifiedSeries.one(ctx)
    for i in range(1, k + 1):
        acc = acc * quant.bracket(l - k + i).q_power(k - i)
    return acc


def solve_regular(sys: RegularSystem, order: int) -> list:
    """Divided coefficients y_0..y_order of the unique solution with t^1-limit y0.

    Matching coefficients of t^(q^l)/D_l: the d-side contributes y_{l+1}^(1/q),
    so y_{l+1} = (phi_l + sum_{k<=l} pi_k * ladder(l,k) * y_{l-k}^(q^k))^q.
    """
    ctx = sys.ctx
    ys = [tuple(sys.y0)]
    for l in range(order):
        acc = sys.phi(l)
        for k in range(min(l, len(sys.pis) - 1) + 1):
            pik = sys.pi(k)
            if pik is None:
                continue
            term = mat_vec(pik, vec_q_power(ys[l - k], k))
            if k:
                term = vec_scale(term, _tau_ladder(ctx, l, k))
            acc = vec_add(acc, term)
        ys.append(vec_q_power(acc, 1))
    return ys


def solution_components(sys: RegularSystem, ys: list) -> list:
    """Per-component F_q-linear series (monomial basis) from divided coefficients."""
    order = len(ys) - 1
    return [from_divided(sys.ctx, [y[c] for y in ys], order) for c in range(sys.dim)]


def regular_residual(sys: RegularSystem, ys: list) -> list:
    """Residual series dy - P(tau)y - f per component (the mandated oracle)."""
    comps = solution_components(sys, ys)
    m = sys.dim
    dy = [op_d(u) for u in comps]
    out_order = len(ys) - 2
    res = []
    for i in range(m):
        acc = dy[i]
        for k, pik in enumerate(sys.pis):
            for j in range(m):
                entry = pik[i][j]
                if entry.is_exact_zero():
                    continue
                acc = acc - comps[j].frobenius(k).truncate(out_order).scale(entry)
        phi_series = from_divided(sys.ctx, [sys.phi(l)[i] for l in range(out_order + 1)],
                                  out_order)
        res.append(acc - phi_series)
    return res


# -- formal solutions of higher-order scalar equations -------------------------

@dataclass
class FormalSolution:
    divided: list            # u_n, divided coefficients
    valuation_ratios: list   # v(u_n)/q^n per index (None for zero coefficients)
    window_bound: object     # min ratio over the last half of the range


def formal_solve_singular(ctx, a_coeffs: list, f_divided: list, u_init: list,
                          order: int) -> FormalSolution:
    """Formal divided-coefficient solution of sum_j A_j(tau) d^j u = f.

    a_coeffs[j][k] is the tau^k coefficient of A_j; u_init supplies
    u_0..u_{J-1}. Fails when the leading structure A_J(0) vanishes (no
    nondegenerate step). Negative Frobenius powers of coefficients can raise
    ramification; the context cap applies.
    """
    J = len(a_coeffs) - 1
    if J < 0:
        raise CarlitzError("empty operator list")
    lead = a_coeffs[J][0] if a_coeffs[J] else None
    if lead is None or lead.is_zero_to_prec():
        raise CarlitzError("degenerate leading coefficient: A_J(0) vanishes")
    if len(u_init) != J:
        raise CarlitzError(f"need exactly {J} initial coefficients")
    us = list(u_init)
    q = ctx.q
    for l in range(order - J + 1):
        phi = f_divided[l] if l < len(f_divided) else RamifiedSeries.zero(ctx)
        acc = phi
        for j, ajs in enumerate(a_coeffs):
            for k, ajk in enumerate(ajs):
                if k > l or ajk.is_exact_zero():
                    continue
                if j == J and k == 0:
                    continue  # the unknown u_{l+J}
                idx = l - k + j
                if idx < 0 or us[idx].is_exact_zero():
                    continue
                term = ajk * us[idx].q_power(k - j)
                if k:
                    term = term * _tau_ladder(ctx, l, k)
                acc = acc - term
        us.append((acc / lead).q_power(J))
    ratios = []
    for n, u in enumerate(us):
        v = u.effective_valuation()
        ratios.append(None if v == INF else Fraction(v, q ** n))
    tail = [r for r in ratios[len(ratios) // 2:] if r is not None]
    bound = min(tail) if tail else INF
    return FormalSolution(us, ratios, bound)


# -- the power function ---------------------------------------------------------

def power_function(lam: RamifiedSeries, order: int, exact: bool = False) -> CarlitzExpansion:
    """Expansion of the continuous solution of tau d u = lambda u, u(1) = 1.

    Coefficients c_n = prod_{j<n} (lambda - [j]); requires |lambda| < 1
    (no continuous solution otherwise). The exact products have degree ~ q^n,
    so unless `exact` is set they are capped at the working precision.
    """
    ctx = lam.ctx
    if lam.effective_valuation() <= 0:
        raise CarlitzError("no continuous solution for |lambda| >= 1")
    quant = ctx.quantities()
    coeffs = [RamifiedSeries.one(ctx)]
    for n in range(order):
        c = coeffs[-1] * (lam - quant.bracket(n))
        coeffs.append(c if exact else c.truncate(ctx.prec))
    return CarlitzExpansion(ctx, coeffs)


def power_function_matrix(lam: tuple, order: int) -> list:
    """Matrix coefficients c_i = prod_{j<i} (lambda - [j] I); |lambda| = max norm < 1."""
    if not lam:
        raise CarlitzError("empty matrix")
    ctx = lam[0][0].ctx
    for row in lam:
        for entry in row:
            if not entry.is_zero_to_prec() and entry.effective_valuation() <= 0:
                raise CarlitzError("no continuous solution for |lambda| >= 1 (max norm)")
    quant = ctx.quantities()
    m = len(lam)
    coeffs = [mat_identity(ctx, m)]
    for n in range(order):
        shifted = mat_sub(lam, mat_scale(mat_identity(ctx, m), quant.bracket(n)))
        nxt = mat_mul(shifted, coeffs[-1])
        coeffs.append(tuple(tuple(x.truncate(ctx.prec) for x in row) for row in nxt))
    return coeffs


# -- regular singularity ---------------------------------------------------------

def _scalar_resonances(ctx, pi0, upto):
    quant = ctx.quantities()
    out = []
    for k in range(1, upto + 1):
        den = quant.bracket(k) + pi0.q_power(k) - pi0
        if den.is_zero_to_prec():
            out.append((1, 1, k))
    return out


def solve_regular_singular(pis: list, order: int):
    """Solve tau d u = P(tau) u, normalized by the index-0 coefficient 1.

    Returns (w_list, u_expansion): u from the direct Carlitz-coefficient
    recursion c_{j+1} = sum_k pi_k (u^(q^k))_j - [j] c_j (residual vanishes to
    truncation, checked by the oracle); and the substitution coefficients
    w_k of u = W(g), g the power function of pi_0, from
    w_k = (sum_{j=1..k} pi_j w_{k-j}^(q^j)) / ([k] + pi_0^(q^k) - pi_0).
    A vanishing denominator is exactly a violation of the eigenvalue
    separation condition (lambda_i - lambda_j^(q^k) != [k]) and is reported;
    W(g(t)) = u(t) holds pointwise on |t| <= 1/q, where the sum converges.
    """
    if isinstance(pis[0], RamifiedSeries):
        return _solve_rs_scalar(pis, order)
    return _solve_rs_matrix(pis, order)


def _rs_frobenius_table(pis, coeffs, table, quant):
    """Extend per-power coefficient rows A[k][j] of u^(q^k) to the new index."""
    prec = quant.ctx.prec
    j = len(coeffs) - 1
    table[0].append(coeffs[j])
    for k in range(1, len(table)):
        prev = table[k - 1]
        if isinstance(prev[j], tuple):
            entry = mat_q_power(prev[j])
            if j >= 1:
                entry = mat_add(entry, mat_scale(mat_q_power(prev[j - 1]), quant.bracket(j)))
            entry = tuple(tuple(v.truncate(prec) for v in row) for row in entry)
        else:
            entry = prev[j].q_power()
            if j >= 1:
                entry = entry + quant.bracket(j) * prev[j - 1].q_power()
            entry = entry.truncate(prec)
        table[k].append(entry)


def _solve_rs_scalar(pis, order):
    pi0 = pis[0]
    ctx = pi0.ctx
    if pi0.effective_valuation() <= 0:
        raise CarlitzError("need |pi_0| < 1")
    res = _scalar_resonances(ctx, pi0, order)
    if res:
        raise ResonanceError(
            "eigenvalue separation violated: pi_0 - pi_0^(q^k) = [k] at "
            + ", ".join(f"k={k}" for (_, _, k) in res), res)
    quant = ctx.quantities()
    # substitution coefficients of u = W(g)
    ws = [RamifiedSeries.one(ctx)]
    for k in range(1, order + 1):
        rhs = RamifiedSeries.zero(ctx)
        for j in range(1, min(k, len(pis) - 1) + 1):
            if pis[j].is_exact_zero():
                continue
            rhs = rhs + pis[j] * ws[k - j].q_power(j)
        den = quant.bracket(k) + pi0.q_power(k) - pi0
        ws.append(rhs / den)
    # direct Carlitz-coefficient solution, c_0 = 1
    coeffs = [RamifiedSeries.one(ctx)]
    table = [[] for _ in range(len(pis))]
    _rs_frobenius_table(pis, coeffs, table, quant)
    for j in range(order):
        rhs = RamifiedSeries.zero(ctx)
        for k, pik in enumerate(pis):
            if not pik.is_exact_zero():
                rhs = rhs + pik * table[k][j]
        coeffs.append((rhs - quant.bracket(j) * coeffs[j]).truncate(ctx.prec))
        _rs_frobenius_table(pis, coeffs, table, quant)
    return ws, CarlitzExpansion(ctx, coeffs)


def substitution_value(ws, pi0, t: RamifiedSeries, order: int | None = None) -> RamifiedSeries:
    """Pointwise value of W(g(t)) = sum w_k g(t)^(q^k) (needs |t| < 1)."""
    ctx = pi0.ctx
    if t.effective_valuation() <= 0:
        raise CarlitzError("substitution sum converges only for |t| < 1")
    n = len(ws) - 1 if order is None else order
    g = power_function(pi0, n)
    gt = g.evaluate(t)
    acc = RamifiedSeries.zero(ctx, ctx.prec)
    pw = gt
    for k, w in enumerate(ws[: n + 1]):
        if k:
            pw = pw.q_power()
        if pw.effective_valuation() >= ctx.prec:
            break
        acc = acc + (w * pw).truncate(ctx.prec)
    return acc


def _solve_rs_matrix(pis, order):
    pi0 = pis[0]
    ctx = pi0[0][0].ctx
    m = len(pi0)
    if not is_upper_triangular(pi0):
        raise CarlitzError("matrix pi_0 must be scalar or upper-triangular "
                           "(eigenvalues read off the diagonal)")
    lams = [pi0[i][i] for i in range(m)]
    for lam in lams:
        if not lam.is_zero_to_prec() and lam.effective_valuation() <= 0:
            raise CarlitzError("need |pi_0| < 1")
    quant = ctx.quantities()
    res = []
    for k in range(1, order + 1):
        for i in range(m):
            for j in range(m):
                den = quant.bracket(k) + lams[j].q_power(k) - lams[i]
                if den.is_zero_to_prec():
                    res.append((i + 1, j + 1, k))
    if res:
        raise ResonanceError(
            "eigenvalue separation violated at " +
            ", ".join(f"(i={i}, j={j}, k={k})" for i, j, k in res), res)
    ws = [mat_identity(ctx, m)]
    for k in range(1, order + 1):
        rhs = mat_zero(ctx, m)
        for j in range(1, min(k, len(pis) - 1) + 1):
            rhs = mat_add(rhs, mat_mul(pis[j], mat_q_power(ws[k - j], j)))
        ws.append(_solve_sylvester(ctx, pi0, mat_q_power(pi0, k),
                                   quant.bracket(k), rhs))
    # direct matrix-coefficient solution, C_0 = I
    coeffs = [mat_identity(ctx, m)]
    table = [[] for _ in range(len(pis))]
    _rs_frobenius_table(pis, coeffs, table, quant)
    for j in range(order):
        rhs = mat_zero(ctx, m)
        for k, pik in enumerate(pis):
            rhs = mat_add(rhs, mat_mul(pik, table[k][j]))
        nxt = mat_sub(rhs, mat_scale(coeffs[j], quant.bracket(j)))
        coeffs.append(tuple(tuple(v.truncate(ctx.prec) for v in row) for row in nxt))
        _rs_frobenius_table(pis, coeffs, table, quant)
    return ws, coeffs


def _solve_sylvester(ctx, b, a, bracket_k, rhs):
    """Solve w a - b w + [k] w = rhs for the m x m matrix w (flattened system)."""
    m = len(b)
    n = m * m
    rows = []
    vec = []
    zero = RamifiedSeries.zero(ctx)
    for i in range(m):
        for j in range(m):
            row = [zero] * n
            # (w a)_{ij} = sum_l w_{il} a_{lj}; (b w)_{ij} = sum_l b_{il} w_{lj}
            for l in range(m):
                row[i * m + l] = row[i * m + l] + a[l][j]
                row[l * m + j] = row[l * m + j] - b[i][l]
            row[i * m + j] = row[i * m + j] + bracket_k
            rows.append(row)
            vec.append(rhs[i][j])
    flat = solve_linear(rows, vec)
    return tuple(tuple(flat[i * m + j] for j in range(m)) for i in range(m))


def regular_singular_residual(pis, u, upto: int):
    """Residual of tau d u = P(tau) u in Carlitz coefficient space (scalar case)."""
    ctx = u.ctx
    lhs = act_delta(u)
    acc = lhs
    cur = u
    for k, pik in enumerate(pis):
        if k:
            cur = act_q_power(cur).cap_precision(ctx.prec)
        if pik.is_exact_zero():
            continue
        acc = acc - cur.truncate(acc.truncation).scale(pik)
    return acc.truncate(min(upto, acc.truncation))


# -- the order-two singular recursion -------------------------------------------

@dataclass
class SingularityReport:
    min_abs_log_from_2: object    # max over i >= 2 of -v(c_i) ... reported as min |c_i| exponent
    bounded_below: bool           # window test: |c_i| >= rho > 0 for all 2 <= i <= N
    coefficient_valuations: list


def zero_policy(ctx):
    return lambda i: ctx.zero


def constant_policy(c):
    return lambda i: c


def recursion_48(ctx, c0: RamifiedSeries, c1: RamifiedSeries, policy,
                 order: int, a: int = 0, b: int = 0):
    """Run the singular second-order recursion with a branch policy.

    At each step the new coefficient solves z^(1/q) - z = v, whose solutions
    are z0 + c with c in F_q and z0 the small root; policy(i) picks c for the
    coefficient at index i. Returns (CarlitzExpansion, SingularityReport).
    """
    quant = ctx.quantities()
    if c0.effective_valuation() < 0 or c1.effective_valuation() < 0:
        raise CarlitzError("seed coefficients must satisfy |c| <= 1")
    br_a = quant.bracket(-a)
    br_b = quant.bracket(-b)
    coeffs = [c0, c1]
    for i in range(order - 1):
        ci, cip1 = coeffs[i], coeffs[i + 1]
        bi, bip1 = quant.bracket(i), quant.bracket(i + 1)
        v = (cip1 * (bi + bip1 - br_a - br_b)
             + ci * (bi - br_a) * (bi - br_b)
             - cip1.qth_root() * bip1.qth_root())
        vv = v.effective_valuation()
        if vv != INF and vv <= 0:
            raise CarlitzError(f"|v| >= 1 at step {i}: small-solution premise violated")
        z0 = artin_schreier_small(v, cap=ctx.prec)
        branch = policy(i + 2)
        coeffs.append(z0 + RamifiedSeries.constant(ctx, branch).truncate(z0.prec))
    vals = [c.effective_valuation() for c in coeffs]
    window = vals[2:]
    bounded = bool(window) and all(v != INF and v <= 0 for v in window)
    worst = max((v for v in window if v != INF), default=INF)
    return CarlitzExpansion(ctx, coeffs), SingularityReport(worst, bounded, vals)
