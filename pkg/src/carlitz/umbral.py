"""Umbral calculus for F_q-linear polynomials: K-binomial coefficients, delta
operators and their basic sequences, the generalized Taylor formula, invariant
operator expansion, and orthonormal-basis construction.

Linear invariant operators (commuting with all multiplicative shifts) are
represented diagonally on the monomials t^(q^j); this representation is
certified against the literal pointwise definitions in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CarlitzError
from .linear import LinearSeries
from .series import INF, RamifiedSeries, exact_div


# -- K-binomial coefficients -----------------------------------------------------

def kbinom(ctx, i: int, n: int) -> RamifiedSeries:
    """D_i / (D_n * D_{i-n}^(q^n)); exact (the quotient is a polynomial in x)."""
    if not 0 <= n <= i:
        raise CarlitzError("need 0 <= n <= i")
    quant = ctx.quantities()
    den = quant.D(n) * quant.D(i - n).q_power(n)
    return exact_div(quant.D(i), den)


def pascal_check(ctx, i: int) -> bool:
    """The Pascal-type identity for all m <= k = i, with the usual boundary zeros:
    binom(k,m) = binom(k-1,m-1)^q + binom(k-1,m)^q * D_m^(q-1)."""
    quant = ctx.quantities()
    zero = RamifiedSeries.zero(ctx)
    for k in range(1, i + 1):
        for m in range(0, k + 1):
            left = kbinom(ctx, k, m)
            a = kbinom(ctx, k - 1, m - 1).q_power() if m >= 1 else zero
            b = kbinom(ctx, k - 1, m).q_power() if m <= k - 1 else zero
            rhs = a + b * quant.D(m) ** (ctx.q - 1)
            if not (left - rhs).is_exact_zero():
                return False
    return True


# -- delta operators ---------------------------------------------------------------

class DeltaOperator:
    """A delta operator, represented by the eigenvalues mu_j of its linear part
    delta_0 on the monomials t^(q^j) (mu_0 = 0, mu_j != 0 for j >= 1)."""

    def __init__(self, ctx, eigenvalues, sigma=None, name=""):
        self.ctx = ctx
        self._mu = list(eigenvalues)
        self.sigma = None if sigma is None else list(sigma)
        self.name = name
        if self._mu and not self._mu[0].is_zero_to_prec():
            raise CarlitzError("a delta operator must kill t (mu_0 = 0)")

    def mu(self, j: int) -> RamifiedSeries:
        if j >= len(self._mu):
            raise CarlitzError(f"eigenvalues known up to index {len(self._mu) - 1}")
        return self._mu[j]

    @property
    def depth(self):
        return len(self._mu) - 1

    def apply_linear_part(self, u: LinearSeries) -> LinearSeries:
        return u.map_coefficients_indexed(lambda n, c: c * self.mu(n))

    def apply(self, u: LinearSeries) -> LinearSeries:
        """delta = tau^(-1) delta_0: q-th root after the diagonal action."""
        out = self.apply_linear_part(u)
        coeffs = [c.qth_root() for c in out.coeffs[1:]]
        order = None if u.order is None else u.order - 1
        return LinearSeries(self.ctx, coeffs, order)

    def level_eigenvalue(self, j: int, level: int) -> RamifiedSeries:
        """Eigenvalue of delta_0^(level) = tau^level delta^level on t^(q^j):
        mu_j mu_{j-1}^q ... mu_{j-level+1}^(q^(level-1)); zero for j < level."""
        if level == 0:
            return RamifiedSeries.one(self.ctx)
        if j < level:
            return RamifiedSeries.zero(self.ctx)
        acc = RamifiedSeries.one(self.ctx)
        for k in range(level):
            acc = acc * self.mu(j - k).q_power(k)
        return acc


def derivative_operator(ctx, depth: int) -> DeltaOperator:
    """The Carlitz derivative d as a delta operator: mu_j = [j]."""
    quant = ctx.quantities()
    sigma = [RamifiedSeries.one(ctx)] + [RamifiedSeries.zero(ctx)] * (depth - 1)
    return DeltaOperator(ctx, [quant.bracket(j) for j in range(depth + 1)],
                         sigma=sigma, name="d")


def delta_from_sigma(ctx, sigma: list, depth: int) -> DeltaOperator:
    """Operator with linear part sum_l sigma_l Delta^(l) (sigma list is 1-based:
    sigma[0] is the coefficient of Delta^(1)).

    Eigenvalues mu_n = D_n * S_n with S_n = sum_{l<=n} sigma_l / D_{n-l}^(q^l);
    raises when some S_n vanishes (not a delta operator).
    """
    if len(sigma) < depth:
        raise CarlitzError("sigma list shorter than requested depth")
    quant = ctx.quantities()
    mus = [RamifiedSeries.zero(ctx)]
    for n in range(1, depth + 1):
        sn = partial_sum_S(ctx, sigma, n)
        if sn.is_zero_to_prec():
            raise CarlitzError(f"S_{n} = 0: the series is not a delta operator")
        mus.append(quant.D(n) * sn)
    return DeltaOperator(ctx, mus, sigma=sigma[:depth])


def partial_sum_S(ctx, sigma: list, n: int) -> RamifiedSeries:
    """S_n = sum_{l=1}^n sigma_l / D_{n-l}^(q^l)."""
    quant = ctx.quantities()
    acc = RamifiedSeries.zero(ctx)
    for l in range(1, n + 1):
        sl = sigma[l - 1]
        if sl.is_exact_zero():
            continue
        acc = acc + sl / quant.D(n - l).q_power(l)
    return acc


# -- basic sequences -----------------------------------------------------------------

@dataclass
class BasicSequence:
    """Triangle b_{n,j}: P_n = sum_j b_{n,j} t^(q^j), with P_n(1) = 0 for n >= 1."""
    ctx: object
    operator: DeltaOperator
    rows: list   # rows[n][j] = b_{n,j}

    def poly(self, n: int) -> LinearSeries:
        return LinearSeries(self.ctx, self.rows[n])

    def normalized(self, n: int) -> LinearSeries:
        quant = self.ctx.quantities()
        d = quant.D(n)
        return LinearSeries(self.ctx, [c / d for c in self.rows[n]])

    @property
    def depth(self):
        return len(self.rows) - 1


def basic_sequence(delta: DeltaOperator, depth: int) -> BasicSequence:
    """The unique basic sequence of a delta operator.

    Triangle recursion from delta_0 P_n = [n] P_{n-1}^q:
    b_{n,j} = [n] b_{n-1,j-1}^q / mu_j for 1 <= j <= n, and b_{n,0} fixed by
    P_n(1) = 0.
    """
    ctx = delta.ctx
    quant = ctx.quantities()
    if delta.depth < depth:
        raise CarlitzError("operator eigenvalues too shallow for requested depth")
    rows = [[RamifiedSeries.one(ctx)]]
    for n in range(1, depth + 1):
        prev = rows[n - 1]
        row = [None] * (n + 1)
        bn = quant.bracket(n)
        for j in range(1, n + 1):
            row[j] = bn * prev[j - 1].q_power() / delta.mu(j)
        head = RamifiedSeries.zero(ctx)
        for j in range(1, n + 1):
            head = head - row[j]
        row[0] = head
        rows.append(row)
    return BasicSequence(ctx, delta, rows)


def kbinomial_identity_check(seq: BasicSequence, i: int) -> bool:
    """P_i(st) = sum_n binom(i,n)_K P_n(t) {P_{i-n}(s)}^(q^n) as an exact
    bivariate polynomial identity in (s, t)."""
    ctx = seq.ctx
    lhs = {}
    for j, b in enumerate(seq.rows[i]):
        if not b.is_zero_to_prec():
            lhs[(j, j)] = b  # (st)^(q^j) = s^(q^j) t^(q^j)
    rhs = {}
    for n in range(i + 1):
        kb = kbinom(ctx, i, n)
        pt = seq.rows[n]
        ps = seq.rows[i - n]
        for jt, bt in enumerate(pt):
            if bt.is_zero_to_prec():
                continue
            for js, bs in enumerate(ps):
                if bs.is_zero_to_prec():
                    continue
                key = (js + n, jt)
                term = kb * bt * bs.q_power(n)
                rhs[key] = rhs[key] + term if key in rhs else term
    keys = set(lhs) | set(rhs)
    zero = RamifiedSeries.zero(ctx)
    return all((lhs.get(k, zero) - rhs.get(k, zero)).is_zero_to_prec() for k in keys)


def normalized_identity_check(seq: BasicSequence, i: int) -> bool:
    """Q_i(st) = sum_n Q_n(t) {Q_{i-n}(s)}^(q^n) for the normalized sequence."""
    ctx = seq.ctx
    quant = ctx.quantities()
    lhs = {}
    di = quant.D(i)
    for j, b in enumerate(seq.rows[i]):
        if not b.is_zero_to_prec():
            lhs[(j, j)] = b / di
    rhs = {}
    for n in range(i + 1):
        qt_row = [c / quant.D(n) for c in seq.rows[n]]
        qs_row = [c / quant.D(i - n) for c in seq.rows[i - n]]
        for jt, bt in enumerate(qt_row):
            if bt.is_zero_to_prec():
                continue
            for js, bs in enumerate(qs_row):
                if bs.is_zero_to_prec():
                    continue
                key = (js + n, jt)
                term = bt * bs.q_power(n)
                rhs[key] = rhs[key] + term if key in rhs else term
    keys = set(lhs) | set(rhs)
    zero = RamifiedSeries.zero(ctx)
    return all((lhs.get(k, zero) - rhs.get(k, zero)).is_zero_to_prec() for k in keys)


# -- Taylor expansion and operator expansion ------------------------------------------

def taylor_coefficients(f: LinearSeries, delta: DeltaOperator) -> list:
    """The functionals (delta_0^(l) f)/D_l appearing in the two-variable
    Taylor formula, returned as polynomials in the shift variable."""
    ctx = f.ctx
    quant = ctx.quantities()
    n = f.degree_index()
    out = []
    for l in range(n + 1):
        g = f.map_coefficients_indexed(lambda j, c: c * delta.level_eigenvalue(j, l))
        out.append(g.map_coefficients(lambda c: c / quant.D(l)) if l else g)
    return out


def taylor_identity_check(f: LinearSeries, seq: BasicSequence) -> bool:
    """f(st) = sum_l (delta_0^(l) f)(s)/D_l * P_l(t) as a bivariate identity."""
    ctx = f.ctx
    parts = taylor_coefficients(f, seq.operator)
    lhs = {}
    for j, c in enumerate(f.coeffs):
        if not c.is_zero_to_prec():
            lhs[(j, j)] = c
    rhs = {}
    zero = RamifiedSeries.zero(ctx)
    for l, g in enumerate(parts):
        if l > seq.depth:
            raise CarlitzError("basic sequence too shallow for the Taylor identity")
        row = seq.rows[l]
        for js, cs in enumerate(g.coeffs):
            if cs.is_zero_to_prec():
                continue
            for jt, bt in enumerate(row):
                if bt.is_zero_to_prec():
                    continue
                key = (js, jt)
                term = cs * bt
                rhs[key] = rhs[key] + term if key in rhs else term
    keys = set(lhs) | set(rhs)
    return all((lhs.get(k, zero) - rhs.get(k, zero)).is_zero_to_prec() for k in keys)


def operator_expand(eigenvalues: list, seq: BasicSequence) -> list:
    """Coefficients sigma_l = (T P_l)(1) / D_l of a diagonal invariant operator T
    against the level operators of the basic sequence's delta operator."""
    ctx = seq.ctx
    quant = ctx.quantities()
    out = []
    for l in range(min(len(eigenvalues) - 1, seq.depth) + 1):
        row = seq.rows[l]
        val = RamifiedSeries.zero(ctx)
        for j, b in enumerate(row):
            if not b.is_zero_to_prec():
                val = val + b * eigenvalues[j]
        out.append(val / quant.D(l) if l else val)
    return out


def operator_resynth(sigma: list, delta: DeltaOperator, j: int) -> RamifiedSeries:
    """Eigenvalue at t^(q^j) of sum_l sigma_l delta_0^(l)."""
    acc = RamifiedSeries.zero(delta.ctx)
    for l, s in enumerate(sigma):
        if s.is_exact_zero():
            continue
        acc = acc + s * delta.level_eigenvalue(j, l)
    return acc


# -- orthonormal expansion --------------------------------------------------------------

@dataclass
class OrthonormalReport:
    psi: list
    reconstruction_ok: bool
    max_psi_log_q: object        # log_q max |psi_n|
    sampled_sup_log_q: object    # log_q of the sampled sup of |f| on test points
    basis_condition_ok: bool     # |sigma_1| = 1 and |sigma_l| <= 1


def orthonormal_expand(f: LinearSeries, seq: BasicSequence, sample_points) -> OrthonormalReport:
    """Expansion psi_n = (delta_0^(n) f)(1) against the normalized sequence Q_n.

    Reconstruction sum psi_n Q_n = f is checked exactly for polynomials; the
    norm identity sup |f| = max |psi_n| is reported from sampled points, not
    asserted (samples only bound the sup from below).
    """
    ctx = f.ctx
    delta = seq.operator
    cond = True
    if delta.sigma is not None and delta.sigma:
        cond = delta.sigma[0].abs_log_q() == 0 and all(
            s.abs_log_q() <= 0 for s in delta.sigma)
    n = f.degree_index()
    psi = []
    for l in range(n + 1):
        g = f.map_coefficients_indexed(lambda j, c: c * delta.level_eigenvalue(j, l))
        psi.append(sum((c for c in g.coeffs), RamifiedSeries.zero(ctx)))
    acc = LinearSeries.zero(ctx)
    for l, p in enumerate(psi):
        if p.is_zero_to_prec():
            continue
        acc = acc + seq.normalized(l).scale(p)
    recon = (acc - f).is_zero()
    max_psi = max((p.abs_log_q() for p in psi), default=-INF)
    sup = -INF
    for t in sample_points:
        val = f.evaluate(t).abs_log_q()
        if val > sup:
            sup = val
    return OrthonormalReport(psi, recon, max_psi, sup, cond)