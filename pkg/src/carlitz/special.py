"""Special functions: the hypergeometric family, the logarithm analog l_1 and
its q branches, polylogarithms, characteristic-p zeta values, and the
connection coefficients A_{n,r}.

The hypergeometric Pochhammer symbols are kept as exact numerator/denominator
pairs so that identity checks can cross-multiply instead of comparing
truncated quotients.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .carlitz import CarlitzExpansion
from .errors import CarlitzError, TruncationError, UndefinedTermError
from .ffield import constant_artin_schreier
from .linear import LinearSeries
from .operators import act_d, act_delta, act_q_power, fractional_delta, op_d, op_delta
from .series import INF, RamifiedSeries, artin_schreier_small


# -- Pochhammer symbols ---------------------------------------------------------

def pochhammer_pair(ctx, a: int, n: int):
    """(numerator, denominator) of the n-th Pochhammer value for integer a,
    both exact; None when the value is zero (a <= 0, n > -a).

    a >= 1: D_{n+a-1}^(1/q^(a-1)) (ramified root chain);
    a <= 0, n <= -a: 1 / L_{-a-n}^(q^n).
    """
    quant = ctx.quantities()
    if a >= 1:
        return quant.D(n + a - 1).qth_root(a - 1), RamifiedSeries.one(ctx)
    if n <= -a:
        return RamifiedSeries.one(ctx), quant.L(-a - n).q_power(n)
    return None


def pochhammer(ctx, a: int, n: int) -> RamifiedSeries:
    pair = pochhammer_pair(ctx, a, n)
    if pair is None:
        return RamifiedSeries.zero(ctx)
    num, den = pair
    return num / den


# -- hypergeometric series -------------------------------------------------------

def hypergeometric_terms(ctx, a_list, b_list, order: int,
                         polynomial_case: bool = False):
    """Exact fraction pairs (num, den) of the coefficients at z^(q^n).

    Stops early when a numerator symbol vanishes (series terminates). A
    vanishing denominator symbol raises unless polynomial_case is set, in
    which case the term range is capped at min(-parameters) as the
    polynomial identities require.
    """
    quant = ctx.quantities()
    out = []
    for n in range(order + 1):
        num = RamifiedSeries.one(ctx)
        den = quant.D(n)
        dead = False
        for a in a_list:
            pair = pochhammer_pair(ctx, a, n)
            if pair is None:
                dead = True
                break
            num = num * pair[0]
            den = den * pair[1]
        if dead:
            break
        undefined = False
        for b in b_list:
            pair = pochhammer_pair(ctx, b, n)
            if pair is None:
                undefined = True
                break
            den = den * pair[0]
            num = num * pair[1]
        if undefined:
            if polynomial_case:
                break
            raise UndefinedTermError(
                f"denominator symbol vanishes at term {n} with nonzero numerator")
        out.append((num, den))
    return out


def hypergeometric_series(ctx, a_list, b_list, order: int,
                          polynomial_case: bool = False) -> LinearSeries:
    """The F_q-linear hypergeometric series with integer parameters.

    Coefficient at z^(q^n): prod (a_i)_n / (prod (b_j)_n * D_n). When the
    series terminates it is returned as an exact polynomial.
    """
    terms = hypergeometric_terms(ctx, a_list, b_list, order, polynomial_case)
    coeffs = [num / den for num, den in terms]
    terminated = len(terms) <= order
    return LinearSeries(ctx, coeffs, None if terminated else order)


def hypergeom_equation_residual(ctx, a: int, b: int, c: int, order: int) -> LinearSeries:
    """Residual of the second-order hypergeometric equation on its solution:
    (Delta - [-a])(Delta - [-b]) y - d (Delta - [1-c]) y for y the (a,b;c) series."""
    quant = ctx.quantities()
    y = hypergeometric_series(ctx, [a, b], [c], order)

    def shifted_delta(u, bracket_index):
        return op_delta(u) - u.scale(quant.bracket(bracket_index))

    lhs = shifted_delta(shifted_delta(y, -b), -a)
    rhs = op_d(shifted_delta(y, 1 - c))
    return lhs - rhs


def contiguous_shift_check(ctx, k_list, nu_list, order: int | None = None) -> bool:
    """Exact check of the derivative shift for polynomial parameters.

    d applied to the series with parameters (-k_i; -nu_j) equals the series
    with all parameters shifted up by one when every parameter is nonzero,
    and zero when any parameter vanishes. Verified by cross-multiplied exact
    fraction comparison, no truncated division involved.
    """
    if any(k < 0 for k in k_list) or any(v < 0 for v in nu_list):
        raise CarlitzError("parameters must be nonnegative integers")
    quant = ctx.quantities()
    if order is None:
        order = min(k_list + nu_list) + 1
    src = hypergeometric_terms(ctx, [-k for k in k_list],
                               [-v for v in nu_list], order, polynomial_case=True)
    if any(k == 0 for k in k_list) or any(v == 0 for v in nu_list):
        # left side must vanish identically: d kills the single surviving term
        return len(src) <= 1
    dst = hypergeometric_terms(ctx, [-(k - 1) for k in k_list],
                               [-(v - 1) for v in nu_list], order, polynomial_case=True)
    # d maps coefficient c_{m+1} to ([m+1] c_{m+1})^(1/q) at index m
    n_out = len(src) - 1
    if n_out != len(dst):
        return False
    for m in range(n_out):
        num_s, den_s = src[m + 1]
        lhs_num = (quant.bracket(m + 1) * num_s).qth_root()
        lhs_den = den_s.qth_root()
        rhs_num, rhs_den = dst[m]
        if not (lhs_num * rhs_den - rhs_num * lhs_den).is_exact_zero():
            return False
    return True


# -- the logarithm analog and its branches ---------------------------------------

def l1_branches(ctx, order: int) -> list:
    """All q continuous extensions of the logarithm-analog solution of
    (1 - tau) d u = t, as Carlitz expansions truncated at `order`.

    The index-1 coefficient runs over the roots of c^q - c + 1 = 0 in the
    constant field (raises when m is too small to contain them); higher
    coefficients follow the convergent sums c_n = sum_j (c_{n-1}[n-1])^(q^(j+1)),
    and c_0 = sum_i (-1)^(i+1) c_i / L_i.
    """
    roots = constant_artin_schreier(ctx, -ctx.one)
    if not roots:
        raise CarlitzError(
            f"constant field F_{ctx.p}^{ctx.m} has no root of c^q - c + 1 = 0; "
            "increase m")
    roots = sorted(roots, key=lambda r: r.vec)
    return [_l1_from_root(ctx, RamifiedSeries.constant(ctx, r), order) for r in roots]


def _l1_from_root(ctx, c1: RamifiedSeries, order: int) -> CarlitzExpansion:
    quant = ctx.quantities()
    coeffs = [None, c1]
    for n in range(2, order + 1):
        coeffs.append(artin_schreier_small(
            coeffs[n - 1] * quant.bracket(n - 1), cap=ctx.prec))
    coeffs[0] = _head_coefficient(ctx, coeffs)
    return CarlitzExpansion(ctx, coeffs)


def _head_coefficient(ctx, coeffs) -> RamifiedSeries:
    """c_0 = sum_{i>=1} (-1)^(i+1) c_i / L_i, truncated where the tail clears."""
    quant = ctx.quantities()
    acc = RamifiedSeries.zero(ctx, ctx.prec)
    for i in range(1, len(coeffs)):
        ci = coeffs[i]
        if ci.is_zero_to_prec():
            continue
        term = ci * quant.L_inv(i)
        if i % 2 == 0:
            term = -term
        acc = acc + term.truncate(ctx.prec)
    # tail estimate: v(c_{N+1}) = q (v(c_N) + 1), minus the L-valuation
    last = coeffs[-1].effective_valuation()
    if last != INF:
        tail = ctx.q * (last + 1) - len(coeffs)
        acc = acc.truncate(min(ctx.prec, Fraction(tail)))
    return acc


def homogeneous_log_residual(c: CarlitzExpansion) -> CarlitzExpansion:
    """(1 - tau) d u - t in Carlitz coefficient space (target of the l_1 equation)."""
    ctx = c.ctx
    a = act_d(c)
    b = act_q_power(a)
    coeffs = []
    for j in range(a.truncation + 1):
        r = a.coeffs[j] - b.coeffs[j]
        if j == 0:
            r = r - RamifiedSeries.one(ctx)
        coeffs.append(r)
    return CarlitzExpansion(ctx, coeffs)


def analytic_log_series(ctx, n: int, order: int) -> LinearSeries:
    """The analytic part sum_{j>=1} t^(q^j) / [j]^n (converges on |t| <= 1/q)."""
    quant = ctx.quantities()
    coeffs = [RamifiedSeries.zero(ctx)]
    for j in range(1, order + 1):
        coeffs.append(quant.bracket(j).inverse() ** n if n > 1
                      else quant.bracket(j).inverse())
    return LinearSeries(ctx, coeffs, order)


def polylog(ctx, n: int, lower: CarlitzExpansion) -> CarlitzExpansion:
    """The continuous extension at level n >= 2 from the level n-1 expansion.

    Coefficients satisfy [j] c_j + c_{j+1} = v_j (the level-(n-1)
    coefficients); c_0 closes with the same head formula as l_1.
    """
    if n < 2:
        raise CarlitzError("polylog chaining starts at level 2")
    quant = ctx.quantities()
    v = lower.coeffs
    order = lower.truncation
    coeffs = [None] * (order + 1)
    coeffs[1] = v[0]
    for j in range(1, order):
        coeffs[j + 1] = (v[j] - quant.bracket(j) * coeffs[j]).truncate(ctx.prec)
    coeffs[0] = _head_coefficient(ctx, coeffs)
    return CarlitzExpansion(ctx, coeffs)


def polylog_chain(ctx, n_max: int, branch: CarlitzExpansion) -> dict:
    """Expansions of levels 1..n_max, starting from an l_1 branch."""
    out = {1: branch}
    for n in range(2, n_max + 1):
        out[n] = polylog(ctx, n, out[n - 1])
    return out


def polylog_decay_constant(c: CarlitzExpansion):
    """Smallest integer s with |c_i| <= q^s * q^(-q^(i-1)) over the window i >= 1."""
    best = None
    for i in range(1, c.truncation + 1):
        if c.coeffs[i].is_zero_to_prec():
            continue  # no witnessed digits: cannot violate the bound
        v = c.coeffs[i].valuation()
        need = c.ctx.q ** (i - 1) - v  # log_q C_n needed at index i
        if best is None or need > best:
            best = need
    return best


def coefficient_sum_check(ctx, c: CarlitzExpansion, i: int) -> bool:
    """Reproduce c_i as z_i + AS-sum(z_i) with z_i = (c_{i-1}[i-1])^q."""
    quant = ctx.quantities()
    z = (c.coeffs[i - 1] * quant.bracket(i - 1)).q_power()
    total = z + artin_schreier_small(z, cap=ctx.prec)
    return (total - c.coeffs[i]).is_zero_to_prec()


# -- zeta values ------------------------------------------------------------------

@dataclass
class ZetaTable:
    ctx: object
    branch_index: int        # which l_1 branch the table is built on
    levels: dict             # n -> expansion of level n
    negative: dict           # n -> zeta(x^-n) for n >= 1
    nonnegative: dict        # m -> zeta(x^m) for m >= 0

    def value(self, exponent: int) -> RamifiedSeries:
        if exponent < 0:
            return self.negative[-exponent]
        return self.nonnegative[exponent]


def zeta_table(ctx, branch: CarlitzExpansion, branch_index: int,
               neg_max: int, pos_max: int) -> ZetaTable:
    """Tabulate zeta at x^-n (n <= neg_max) and x^m (m <= pos_max).

    Negative points read the head coefficient of the level-n expansion
    (evaluation at 1 sees only the index-0 coefficient); nonnegative points
    iterate the Delta action on the l_1 branch, consuming truncation indices.
    """
    levels = polylog_chain(ctx, max(neg_max, 1), branch)
    negative = {n: levels[n].coeffs[0] for n in range(1, neg_max + 1)}
    nonnegative = {}
    cur = branch
    for m in range(pos_max + 1):
        cur = act_delta(cur)  # after m+1 applications: level -m
        if cur.truncation < 0:
            raise TruncationError("l_1 truncation exhausted by Delta iterations")
        nonnegative[m] = cur.coeffs[0]
    return ZetaTable(ctx, branch_index, levels, negative, nonnegative)


def zeta_at(table: ZetaTable, t: RamifiedSeries) -> RamifiedSeries:
    """Zeta at a general point t = x^-n (theta_0 + theta_1 x + ...) via the
    fractional operator applied to the level-n expansion, evaluated at 1."""
    ctx = table.ctx
    if t.is_zero_to_prec():
        return RamifiedSeries.zero(ctx)
    v = t.valuation()
    if v.denominator != 1:
        raise CarlitzError("zeta needs an unramified point")
    n = max(1, -int(v))
    if n not in table.levels:
        raise TruncationError(f"zeta table holds levels up to {max(table.levels)}, need {n}")
    alpha = t.shift(n)
    return fractional_delta(alpha, table.levels[n], RamifiedSeries.one(ctx))


# -- the connection coefficients A_{n,r} ------------------------------------------

def coefficients_A(ctx, n: int, r: int) -> RamifiedSeries:
    """A_{n,1} = (-1)^(n-1) L_{n-1}; for r >= 2 the signed L_{n-1}-multiple of
    the elementary symmetric sum of 1/[i_1]...1/[i_{r-1}], 0 < i_1 < ... < n."""
    if not (1 <= r <= n):
        raise CarlitzError("need 1 <= r <= n")
    quant = ctx.quantities()
    ln1 = quant.L(n - 1)
    if r == 1:
        return ln1 if (n - 1) % 2 == 0 else -ln1
    sym = _elementary_symmetric(
        [quant.bracket(i).inverse() for i in range(1, n)], r - 1)
    out = ln1 * sym
    return out if (n + r) % 2 == 0 else -out


def _elementary_symmetric(values, k):
    ctx = values[0].ctx
    table = [RamifiedSeries.one(ctx)] + [RamifiedSeries.zero(ctx)] * k
    for v in values:
        for j in range(min(k, len(table) - 1), 0, -1):
            table[j] = table[j] + table[j - 1] * v
    return table[k]


@dataclass
class ZetaIdentityReport:
    coefficient_floor: object      # worst agreement in c_i = sum_r A_{i,r} zeta(x^(r-1))
    functional_floor: object       # worst agreement in the functional-equation identity
    coefficient_ok: bool
    functional_ok: bool


def zeta_identity_checks(table: ZetaTable, i_max: int = 4, n_max: int = 4) -> ZetaIdentityReport:
    """Both connection identities on a zeta table, reported as agreement floors."""
    ctx = table.ctx
    branch = table.levels[1]
    quant = ctx.quantities()
    cfloor, cok = INF, True
    for i in range(1, i_max + 1):
        acc = RamifiedSeries.zero(ctx)
        for r in range(1, i + 1):
            acc = acc + coefficients_A(ctx, i, r) * table.value(r - 1)
        v = acc.agreement_valuation(branch.coeffs[i])
        cok = cok and (acc - branch.coeffs[i]).is_zero_to_prec()
        if v < cfloor:
            cfloor = v
    ffloor, fok = INF, True
    top = branch.truncation
    for n in range(1, n_max + 1):
        acc = RamifiedSeries.zero(ctx, ctx.prec)
        for i in range(1, top + 1):
            if ctx.q ** (i - 1) - i > ctx.prec + 5:
                break  # the inner sum is the level-n coefficient; tail cleared
            inner = RamifiedSeries.zero(ctx)
            for r in range(1, i + 1):
                inner = inner + coefficients_A(ctx, i, r) * table.value(r - n)
            term = quant.L_inv(i) * inner
            if i % 2 == 0:
                term = -term
            acc = acc + term.truncate(ctx.prec)
        v = acc.agreement_valuation(table.value(-n))
        fok = fok and (acc - table.value(-n)).is_zero_to_prec()
        if v < ffloor:
            ffloor = v
    return ZetaIdentityReport(cfloor, ffloor, cok, fok)