"""Carlitz quantities [i], D_i, L_i, the Carlitz polynomials e_i / f_i,
expansions in the normalized Carlitz basis, and the exponential/logarithm/
module functions.

The normalized Carlitz polynomials f_i form an orthonormal basis of the
continuous F_q-linear functions on the integers O of F_q((x)); expansions
against that basis are the representation for continuous non-analytic
functions throughout the package.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import CarlitzError, TruncationError
from .linear import LinearSeries
from .series import INF, RamifiedSeries


class Quantities:
    """Memoized tables of [i] = x^(q^i) - x, D_i = [i] D_{i-1}^q, L_i = [i] L_{i-1}.

    Negative bracket indices are allowed and land in the ramified grid:
    [-a] = x^(1/q^a) - x.
    """

    def __init__(self, ctx):
        self.ctx = ctx
        self._bracket = {}
        self._d = {0: RamifiedSeries.one(ctx)}
        self._l = {0: RamifiedSeries.one(ctx)}
        self._d_inv = {}
        self._l_inv = {}
        self._e = {}
        self._f = {}
        self._f_coeff = {}
        self._e_at_xi = {}

    def bracket(self, n: int) -> RamifiedSeries:
        ctx = self.ctx
        out = self._bracket.get(n)
        if out is None:
            if n == 0:
                out = RamifiedSeries.zero(ctx)
            else:
                exp = Fraction(ctx.q) ** n
                out = RamifiedSeries.monomial(ctx, ctx.one, exp) - RamifiedSeries.x(ctx)
            self._bracket[n] = out
        return out

    def D(self, n: int) -> RamifiedSeries:
        if n < 0:
            raise CarlitzError("D_n needs n >= 0")
        out = self._d.get(n)
        if out is None:
            out = self.bracket(n) * self.D(n - 1).q_power()
            self._d[n] = out
        return out

    def L(self, n: int) -> RamifiedSeries:
        if n < 0:
            raise CarlitzError("L_n needs n >= 0")
        out = self._l.get(n)
        if out is None:
            out = self.bracket(n) * self.L(n - 1)
            self._l[n] = out
        return out

    def D_inv(self, n: int) -> RamifiedSeries:
        out = self._d_inv.get(n)
        if out is None:
            out = self.D(n).inverse()
            self._d_inv[n] = out
        return out

    def L_inv(self, n: int) -> RamifiedSeries:
        out = self._l_inv.get(n)
        if out is None:
            out = self.L(n).inverse()
            self._l_inv[n] = out
        return out

    # -- Carlitz polynomials --------------------------------------------------

    def e_poly(self, i: int) -> LinearSeries:
        """Monic Carlitz polynomial e_i of degree q^i.

        Built by e_{i+1}(t) = e_i(t)^q - e_i(x^i)^(q-1) e_i(t), which expands
        the defining product over the q^i polynomials of degree < i; the
        recursion is certified against the literal product in the tests.
        """
        out = self._e.get(i)
        if out is None:
            if i < 0:
                raise CarlitzError("e_i needs i >= 0")
            if i == 0:
                out = LinearSeries.identity(self.ctx)
            else:
                prev = self.e_poly(i - 1)
                beta = prev.evaluate(RamifiedSeries.x(self.ctx, i - 1))
                self._e_at_xi[i - 1] = beta
                out = prev.frobenius() - prev.scale(beta ** (self.ctx.q - 1))
            self._e[i] = out
        return out

    def f_poly(self, i: int) -> LinearSeries:
        """Normalized Carlitz polynomial f_i = e_i / D_i."""
        out = self._f.get(i)
        if out is None:
            if i == 0:
                out = self.e_poly(0)
            else:
                d = self.D(i)
                out = self.e_poly(i).map_coefficients(lambda c: c / d)
            self._f[i] = out
        return out

    def f_coefficient(self, k: int, j: int) -> RamifiedSeries:
        """Monomial coefficient of t^(q^j) in f_k: (-1)^(k-j) / (D_j L_{k-j}^(q^j)).

        Closed form (truncated at working precision); certified against the
        product-built polynomials for small k in the tests. Needed where the
        exact e_k coefficients (degree ~ q^k) would be astronomically large.
        """
        if not 0 <= j <= k:
            return RamifiedSeries.zero(self.ctx)
        key = (k, j)
        out = self._f_coeff.get(key)
        if out is None:
            den = self.D(j) * self.L(k - j).q_power(j)
            out = den.inverse()
            if (k - j) % 2 == 1:
                out = -out
            self._f_coeff[key] = out
        return out

    def f_values(self, point: RamifiedSeries, upto: int) -> list:
        """Values f_0(point)..f_upto(point) by the pointwise ladder
        f_{i+1}(pt) = (f_i(pt)^q - f_i(pt)) / [i+1].

        The ladder divides the e-recursion e_{i+1} = e_i^q - e_i(x^i)^(q-1) e_i
        by D_{i+1} = [i+1] D_i^q, using e_i(x^i) = D_i (certified in tests).
        Values stay bounded by max(|point|, 1), so no precision blowup; on
        F_q[x] points the chain reaches an exact zero at index deg + 1.
        """
        vals = [point]
        cur = point
        zero = RamifiedSeries.zero(self.ctx)
        for i in range(upto):
            if cur.is_exact_zero():
                vals.append(zero)
                continue
            cur = (cur.q_power() - cur) / self.bracket(i + 1)
            vals.append(cur)
        return vals

    def f_linear_coefficient(self, i: int) -> RamifiedSeries:
        """Derivative of f_i at 0, i.e. its coefficient on t; equals (-1)^i / L_i.

        The closed form is certified against the limit oracle f_i(x^n)/x^n
        in the tests before anything downstream relies on it.
        """
        sign = 1 if i % 2 == 0 else -1
        li = self.L_inv(i)
        return li if sign == 1 else -li


def carlitz_poly_product_oracle(ctx, i: int) -> list:
    """Coefficients of prod_{deg m < i} (t - m) as a dense polynomial in t.

    Literal product over all q^i polynomials m in F_q[x] of degree < i;
    the independent oracle for e_poly. Returns dense coefficients by t-degree.
    """
    points = _fq_polys_below_degree(ctx, i)
    one = RamifiedSeries.one(ctx)
    poly = [one]
    for mpt in points:
        # multiply by (t - m)
        nxt = [RamifiedSeries.zero(ctx)] * (len(poly) + 1)
        for d, c in enumerate(poly):
            nxt[d + 1] = nxt[d + 1] + c
            nxt[d] = nxt[d] - c * mpt
        poly = nxt
    return poly


def _fq_polys_below_degree(ctx, i: int):
    """All polynomials of F_q[x] with degree < i, as RamifiedSeries values."""
    points = [RamifiedSeries.zero(ctx)]
    fq = ctx.fq_elements()
    for d in range(i):
        xs = RamifiedSeries.x(ctx, d)
        points = [pt + xs.scale(a) for pt in points for a in fq]
    return points


def fq_poly_points(ctx, max_degree: int):
    """All F_q[x] points of degree <= max_degree (including 0)."""
    return _fq_polys_below_degree(ctx, max_degree + 1)


class CarlitzExpansion:
    """Coefficients c_0..c_N against the normalized Carlitz basis f_i."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx, coeffs):
        self.ctx = ctx
        self.coeffs = tuple(coeffs)
        if not self.coeffs:
            raise CarlitzError("expansion needs at least the index-0 coefficient")

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    @staticmethod
    def zero(ctx, n: int = 0):
        return CarlitzExpansion(ctx, [RamifiedSeries.zero(ctx)] * (n + 1))

    @staticmethod
    def unit(ctx, i: int, n: int | None = None):
        """The basis function f_i as an expansion truncated at max(i, n)."""
        n = i if n is None else max(i, n)
        coeffs = [RamifiedSeries.zero(ctx)] * (n + 1)
        coeffs[i] = RamifiedSeries.one(ctx)
        return CarlitzExpansion(ctx, coeffs)

    def coefficient(self, i: int) -> RamifiedSeries:
        if i > self.truncation:
            raise TruncationError(f"expansion truncated at {self.truncation}, asked for {i}")
        return self.coeffs[i]

    def __add__(self, other):
        n = min(self.truncation, other.truncation)
        return CarlitzExpansion(self.ctx,
                                [self.coeffs[i] + other.coeffs[i] for i in range(n + 1)])

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return CarlitzExpansion(self.ctx, [-c for c in self.coeffs])

    def scale(self, c: RamifiedSeries):
        return CarlitzExpansion(self.ctx, [c * a for a in self.coeffs])

    def truncate(self, n: int):
        if n > self.truncation:
            raise TruncationError(f"cannot extend truncation {self.truncation} to {n}")
        return CarlitzExpansion(self.ctx, self.coeffs[: n + 1])

    def cap_precision(self, prec):
        return CarlitzExpansion(self.ctx, [c.truncate(prec) for c in self.coeffs])

    def evaluate(self, point: RamifiedSeries) -> RamifiedSeries:
        """Pointwise value sum c_i f_i(point), via the pointwise basis ladder
        (exact zeros on F_q[x] points of degree < i, no cancellation blowup)."""
        quant = self.ctx.quantities()
        fvals = quant.f_values(point, self.truncation)
        acc = RamifiedSeries.zero(self.ctx)
        for c, fv in zip(self.coeffs, fvals):
            if c.is_exact_zero() or fv.is_exact_zero():
                continue
            acc = acc + c * fv
        return acc

    def evaluate_at_one(self) -> RamifiedSeries:
        """Value at t = 1: just c_0, since f_i(1) = 0 for i >= 1."""
        return self.coeffs[0]

    def to_linear(self) -> LinearSeries:
        """Expand sum c_i f_i into monomial coefficients.

        Uses c_i f_i = (c_i / D_i) e_i so that expansions whose coefficients
        are multiples of D_i (in particular anything produced by
        linear_to_carlitz) convert back exactly.
        """
        quant = self.ctx.quantities()
        acc = LinearSeries.zero(self.ctx)
        for i, c in enumerate(self.coeffs):
            if c.is_exact_zero():
                continue
            u = c / quant.D(i) if i else c
            acc = acc + quant.e_poly(i).scale(u)
        return LinearSeries(self.ctx, list(acc.coeffs[: self.truncation + 1]), None)

    def abs_profile(self):
        """log_q |c_i| for each i (diagnostic helper)."""
        return [c.abs_log_q() for c in self.coeffs]

    def agrees_with(self, other) -> bool:
        n = min(self.truncation, other.truncation)
        return all((self.coeffs[i] - other.coeffs[i]).is_zero_to_prec()
                   for i in range(n + 1))

    def agreement_floor(self, other):
        n = min(self.truncation, other.truncation)
        floor = INF
        for i in range(n + 1):
            v = self.coeffs[i].agreement_valuation(other.coeffs[i])
            if v < floor:
                floor = v
        return floor

    def __eq__(self, other):
        if not isinstance(other, CarlitzExpansion):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self):
        from .series import format_series
        inner = ", ".join(format_series(c, 3) for c in self.coeffs[:5])
        tail = ", ..." if len(self.coeffs) > 5 else ""
        return f"CarlitzExpansion[{inner}{tail}; N={self.truncation}]"


def linear_to_carlitz(u: LinearSeries) -> CarlitzExpansion:
    """Exact triangular basis change from monomials t^(q^n) to the f_i.

    Requires an exact polynomial input (no t-truncation ambiguity: the change
    of basis is triangular, so index-i output needs indices >= i of input).
    """
    ctx = u.ctx
    quant = ctx.quantities()
    # For truncated input, c_i for i <= order are still fully determined by
    # a_n, n <= order: e_i is monic of degree q^i, so the change is triangular.
    work = list(u.coeffs)
    n = len(work) - 1
    out = [RamifiedSeries.zero(ctx)] * (n + 1)
    for i in range(n, -1, -1):
        ai = work[i]
        out[i] = ai * quant.D(i)
        if not ai.is_exact_zero():
            # subtract c_i f_i = a_i e_i, keeping the elimination exact
            ei = quant.e_poly(i)
            for j in range(i + 1):
                work[j] = work[j] - ai * ei.coefficient(j)
    if not out:
        out = [RamifiedSeries.zero(ctx)]
    return CarlitzExpansion(ctx, out)


def carlitz_to_linear(c: CarlitzExpansion) -> LinearSeries:
    return c.to_linear()


def basis_convert(value):
    """Round-trippable change of basis between monomial and Carlitz forms."""
    if isinstance(value, LinearSeries):
        return linear_to_carlitz(value)
    if isinstance(value, CarlitzExpansion):
        return carlitz_to_linear(value)
    raise CarlitzError("basis_convert expects a LinearSeries or CarlitzExpansion")


# -- divided monomial views ---------------------------------------------------

def from_divided(ctx, divided, order=None) -> LinearSeries:
    """Series sum a_n t^(q^n) / D_n from its divided coefficients a_n."""
    quant = ctx.quantities()
    coeffs = [a * quant.D_inv(n) if n else a for n, a in enumerate(divided)]
    return LinearSeries(ctx, coeffs, order)


def to_divided(u: LinearSeries) -> list:
    """Divided coefficients a_n = c_n * D_n of u = sum c_n t^(q^n)."""
    quant = u.ctx.quantities()
    return [c * quant.D(n) for n, c in enumerate(u.coeffs)]


# -- the classical special series --------------------------------------------

def carlitz_exp(ctx, order: int) -> LinearSeries:
    """Coefficients 1/D_n up to t-order `order`."""
    quant = ctx.quantities()
    return LinearSeries(ctx, [quant.D_inv(n) for n in range(order + 1)], order)


def carlitz_log(ctx, order: int) -> LinearSeries:
    """Coefficients (-1)^n / L_n up to t-order `order`."""
    quant = ctx.quantities()
    coeffs = []
    for n in range(order + 1):
        c = quant.L_inv(n)
        coeffs.append(c if n % 2 == 0 else -c)
    return LinearSeries(ctx, coeffs, order)


def carlitz_module(ctx, s: RamifiedSeries, order: int | None = None) -> LinearSeries:
    """The module function C_s(z) = sum f_i(s) z^(q^i) as a series in z.

    For s in F_q[x] only indices i <= deg s survive and the result is exact;
    other integral s need an explicit z-order.
    """
    if s.effective_valuation() != INF and s.effective_valuation() < 0:
        raise CarlitzError("carlitz_module needs |s| <= 1")
    quant = ctx.quantities()
    exact_poly = s.is_exact() and s.e == 0 and all(
        c.in_fq() for c in s.terms.values())
    if exact_poly:
        top = int(max((k for k in s.terms), default=0))
        return LinearSeries(ctx, quant.f_values(s, top), None)
    if order is None:
        raise CarlitzError("carlitz_module needs a z-order for non-polynomial s")
    return LinearSeries(ctx, quant.f_values(s, order), order)
