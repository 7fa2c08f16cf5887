"""The noncommutative operator ring generated by tau, the s-derivative d, the
difference operators Delta_j (one per extra variable), and scalars, acting on
multivariate F_q-linear series sum a_{m,k} s^(q^m) t_1^(q^k_1)...t_n^(q^k_n).

Rewriting rules to the normal form  scalar * tau^l d^mu Delta_1^i_1...Delta_n^i_n:
    d tau     -> tau d + [1]^(1/q)
    Delta tau -> tau Delta + [1] tau
    Delta d   -> d Delta - [1]^(1/q) d
    tau c     -> c^q tau,   d c -> c^(1/q) d,   Delta c -> c Delta
Distinct Delta_i, Delta_j commute (they act in independent variables; the
tests certify this against the series action).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import CarlitzError, PrecisionLossError, TruncationError
from .linalg import Eliminator
from .series import INF, RamifiedSeries


# -- ring elements ------------------------------------------------------------

class WeylElement:
    """Finite scalar combination of normal-form words, for n >= 0 Delta slots.

    Words are tuples (l, mu, (i_1, ..., i_n)).
    """

    __slots__ = ("ctx", "nvars", "terms")

    def __init__(self, ctx, nvars, terms):
        self.ctx = ctx
        self.nvars = nvars
        self.terms = {w: c for w, c in terms.items() if not c.is_exact_zero()}

    @staticmethod
    def from_word(ctx, nvars, l=0, mu=0, deltas=None, coeff=None):
        deltas = tuple(deltas or (0,) * nvars)
        if len(deltas) != nvars:
            raise CarlitzError("delta exponent tuple has wrong length")
        c = RamifiedSeries.one(ctx) if coeff is None else coeff
        return WeylElement(ctx, nvars, {(l, mu, deltas): c})

    @staticmethod
    def scalar(ctx, nvars, c):
        return WeylElement.from_word(ctx, nvars, coeff=c)

    @staticmethod
    def gen_tau(ctx, nvars):
        return WeylElement.from_word(ctx, nvars, l=1)

    @staticmethod
    def gen_d(ctx, nvars):
        return WeylElement.from_word(ctx, nvars, mu=1)

    @staticmethod
    def gen_delta(ctx, nvars, j):
        deltas = [0] * nvars
        deltas[j] = 1
        return WeylElement.from_word(ctx, nvars, deltas=deltas)

    def __add__(self, other):
        out = dict(self.terms)
        for w, c in other.terms.items():
            cur = out.get(w)
            out[w] = c if cur is None else cur + c
        return WeylElement(self.ctx, self.nvars, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return WeylElement(self.ctx, self.nvars,
                           {w: -c for w, c in self.terms.items()})

    def scale(self, c: RamifiedSeries):
        """Left multiplication by a scalar."""
        return WeylElement(self.ctx, self.nvars,
                           {w: c * v for w, v in self.terms.items()})

    def __mul__(self, other):
        if self.nvars != other.nvars:
            raise CarlitzError("variable counts differ")
        acc = {}
        for w2, c2 in other.terms.items():
            part = self._mul_scalar_right(c2)
            part = part._mul_word_right(w2)
            for w, c in part.terms.items():
                cur = acc.get(w)
                acc[w] = c if cur is None else cur + c
        return WeylElement(self.ctx, self.nvars, acc)

    def _mul_scalar_right(self, c: RamifiedSeries):
        """self * c: push the scalar left through each word."""
        out = {}
        for (l, mu, deltas), v in self.terms.items():
            moved = c.q_power(l - mu)  # through d^mu then tau^l
            cur = out.get((l, mu, deltas))
            add = v * moved
            out[(l, mu, deltas)] = add if cur is None else cur + add
        return WeylElement(self.ctx, self.nvars, out)

    def _mul_word_right(self, word):
        l2, mu2, deltas2 = word
        acc = self
        for _ in range(l2):
            acc = acc._mul_gen_tau()
        for _ in range(mu2):
            acc = acc._mul_gen_d()
        for j, ij in enumerate(deltas2):
            if ij:
                acc = acc._mul_gen_delta(j, ij)
        return acc

    def _mul_gen_delta(self, j, power=1):
        out = {}
        for (l, mu, deltas), c in self.terms.items():
            nd = list(deltas)
            nd[j] += power
            key = (l, mu, tuple(nd))
            cur = out.get(key)
            out[key] = c if cur is None else cur + c
        return WeylElement(self.ctx, self.nvars, out)

    def _mul_gen_d(self):
        """Right-multiply by d: move it left through the Delta block.

        Delta_j^i d = sum_k C(i,k) (-[1]^(1/q))^(i-k) d Delta_j^k, per variable;
        then d passes the d-block freely and twists scalars through tau^l.
        """
        ctx = self.ctx
        quant = ctx.quantities()
        root1 = quant.bracket(1).qth_root()
        out = {}
        for (l, mu, deltas), c in self.terms.items():
            for factors, word_deltas in _delta_pass(ctx, deltas, -root1):
                # d lands after d^mu: scalar factor moves through d^mu, tau^l
                scal = factors.q_power(l - mu) * c
                key = (l, mu + 1, word_deltas)
                cur = out.get(key)
                out[key] = scal if cur is None else cur + scal
        return WeylElement(ctx, self.nvars, out)

    def _mul_gen_tau(self):
        """Right-multiply by tau: through Delta block, then the d block."""
        ctx = self.ctx
        quant = ctx.quantities()
        one1 = quant.bracket(1)
        out = {}
        for (l, mu, deltas), c in self.terms.items():
            for factors, word_deltas in _delta_pass(ctx, deltas, one1):
                # tau now sits right of d^mu: d^mu tau = sum over how many
                # commutators fire: d^mu tau = tau d^mu + [mu]^(1/q^mu) d^(mu-1)
                # (derived by induction from d tau = tau d + [1]^(1/q))
                for coeff2, dl, dmu in _d_pass_tau(ctx, mu):
                    scal = (factors.q_power(-mu) * coeff2).q_power(l) * c
                    key = (l + dl, dmu, word_deltas)
                    cur = out.get(key)
                    out[key] = scal if cur is None else cur + scal
        return WeylElement(ctx, self.nvars, out)

    def __eq__(self, other):
        if not isinstance(other, WeylElement):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def agrees_with(self, other) -> bool:
        d = self - other
        return all(c.is_zero_to_prec() for c in d.terms.values())

    def __repr__(self):
        from .series import format_series
        parts = []
        for (l, mu, deltas), c in sorted(self.terms.items()):
            gens = []
            if l:
                gens.append(f"tau^{l}" if l > 1 else "tau")
            if mu:
                gens.append(f"d^{mu}" if mu > 1 else "d")
            for j, ij in enumerate(deltas):
                if ij:
                    gens.append(f"D{j}^{ij}" if ij > 1 else f"D{j}")
            word = "*".join(gens) if gens else "1"
            parts.append(f"({format_series(c, 3)})*{word}")
        return "Weyl[" + " + ".join(parts or ["0"]) + "]"


def _delta_pass(ctx, deltas, correction):
    """Move a generator left through Delta_1^i_1...Delta_n^i_n.

    Delta^i g = sum_k C(i,k) correction^(i-k) g Delta^k for a generator g with
    Delta g = g Delta + correction * g. Yields (scalar factor, new exponents).
    """
    outs = [(RamifiedSeries.one(ctx), ())]
    p = ctx.p
    import math
    for i in deltas:
        new = []
        for fac, exps in outs:
            for k in range(i + 1):
                cmod = math.comb(i, k) % p
                if cmod == 0:
                    continue
                f = fac * (correction ** (i - k)) if i != k else fac
                f = f.scale(cmod) if cmod != 1 else f
                new.append((f, exps + (k,)))
        outs = new
    return outs


def _d_pass_tau(ctx, mu):
    """d^mu tau = tau d^mu + [mu]^(1/q^mu) d^(mu-1) (empty correction at mu=0).

    Derived by induction from d tau = tau d + [1]^(1/q): each pass adds one
    d^(mu-1) term whose scalars collapse into the single bracket value.
    """
    quant = ctx.quantities()
    if mu == 0:
        yield RamifiedSeries.one(ctx), 1, 0
        return
    yield RamifiedSeries.one(ctx), 1, mu
    yield quant.bracket(mu).qth_root(mu), 0, mu - 1


# -- exact fraction coefficients ---------------------------------------------

class ExactFraction:
    """num/den with both parts exact; closed under the monomial-to-monomial
    operations of word application (products with exact scalars, Frobenius
    powers, q-th roots), so no precision is lost before the final division.

    Used by the filtration estimator: q-th roots of truncated values divide
    their relative precision by q, which after d^mu leaves too few digits;
    exact pairs defer all truncation to one division per matrix entry.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: RamifiedSeries, den: RamifiedSeries):
        self.num = num
        self.den = den

    def __mul__(self, other):
        if isinstance(other, ExactFraction):
            return ExactFraction(self.num * other.num, self.den * other.den)
        return ExactFraction(self.num * other, self.den)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __neg__(self):
        return ExactFraction(-self.num, self.den)

    def qth_root(self, k: int = 1):
        return ExactFraction(self.num.qth_root(k), self.den.qth_root(k))

    def q_power(self, k: int = 1):
        if k < 0:
            return self.qth_root(-k)
        return ExactFraction(self.num.q_power(k), self.den.q_power(k))

    def is_exact_zero(self):
        return self.num.is_exact_zero()

    def is_zero_to_prec(self):
        return self.num.is_zero_to_prec()

    def valuation(self):
        nv = self.num.effective_valuation()
        if nv == INF:
            return INF
        return nv - self.den.valuation()

    def to_series(self, rel_prec) -> RamifiedSeries:
        """One truncated division; correct to `rel_prec` relative digits."""
        margin = rel_prec + 8
        num = self.num.truncate(self.num.effective_valuation() + margin
                                if self.num.terms else INF)
        den = self.den.truncate(self.den.valuation() + margin)
        out = num / den
        return out.truncate(out.effective_valuation() + rel_prec
                            if out.terms else out.prec)


# -- multivariate series --------------------------------------------------------

class MultiSeries:
    """Finite truncation of sum a_{m,k} s^(q^m) prod t_j^(q^k_j).

    Terms are keyed by (m, k_1, ..., k_n); the structural support condition
    m <= min(k_j) holds for everything built by the sequence transform.
    `bounds` = (s_bound, t_bounds...) marks the known index window.
    """

    __slots__ = ("ctx", "nvars", "terms", "bounds")

    def __init__(self, ctx, nvars, terms, bounds):
        self.ctx = ctx
        self.nvars = nvars
        self.terms = {k: v for k, v in terms.items() if not v.is_exact_zero()}
        self.bounds = tuple(bounds)

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            cur = out.get(k)
            out[k] = v if cur is None else cur + v
        bounds = tuple(min(a, b) for a, b in zip(self.bounds, other.bounds))
        return MultiSeries(self.ctx, self.nvars, out, bounds)

    def __sub__(self, other):
        return self + other.scale(-RamifiedSeries.one(self.ctx))

    def scale(self, c: RamifiedSeries):
        return MultiSeries(self.ctx, self.nvars,
                           {k: c * v for k, v in self.terms.items()}, self.bounds)

    def known(self, key) -> bool:
        return all(k <= b for k, b in zip(key, self.bounds))

    def is_zero_on_window(self) -> bool:
        return all(v.is_zero_to_prec() for k, v in self.terms.items() if self.known(k))

    def restrict(self, window_bounds) -> dict:
        """Known terms inside the window, as a sparse dict."""
        if any(w > b for w, b in zip(window_bounds, self.bounds)):
            raise TruncationError("window exceeds known bounds")
        return {k: v for k, v in self.terms.items()
                if all(i <= w for i, w in zip(k, window_bounds))}

    def apply_tau(self):
        terms = {tuple(i + 1 for i in k): v.q_power() for k, v in self.terms.items()}
        bounds = tuple(b + 1 for b in self.bounds)
        return MultiSeries(self.ctx, self.nvars, terms, bounds)

    def apply_d(self):
        """d in the s-slot; t-monomial cofactors are scalars, so the q-th root
        shifts every t-exponent down one q-power as well."""
        quant = self.ctx.quantities()
        terms = {}
        for key, v in self.terms.items():
            m = key[0]
            if m == 0:
                continue  # [0] = 0
            if min(key[1:], default=1) < 1:
                raise TruncationError("t-exponent hit the floor under d")
            nk = tuple(i - 1 for i in key)
            terms[nk] = (v * quant.bracket(m)).qth_root()
        bounds = tuple(b - 1 for b in self.bounds)
        if any(b < 0 for b in bounds):
            raise TruncationError("truncation exhausted under d")
        return MultiSeries(self.ctx, self.nvars, terms, bounds)

    def apply_delta(self, j):
        """Delta in the j-th t-slot: multiply by [k_j]."""
        quant = self.ctx.quantities()
        terms = {}
        for key, v in self.terms.items():
            kj = key[1 + j]
            if kj == 0:
                continue
            terms[key] = v * quant.bracket(kj)
        return MultiSeries(self.ctx, self.nvars, terms, self.bounds)

    def __repr__(self):
        return f"MultiSeries[n={self.nvars}, {len(self.terms)} terms, bounds={self.bounds}]"


def weyl_apply(a: WeylElement, f: MultiSeries) -> MultiSeries:
    """Action of a ring element: words act right-to-left (Deltas, then d^mu,
    then tau^l, then the scalar)."""
    if a.nvars != f.nvars:
        raise CarlitzError("variable counts differ")
    out = None
    for (l, mu, deltas), c in a.terms.items():
        g = f
        for j, ij in enumerate(deltas):
            for _ in range(ij):
                g = g.apply_delta(j)
        for _ in range(mu):
            g = g.apply_d()
        for _ in range(l):
            g = g.apply_tau()
        g = g.scale(c)
        out = g if out is None else out + g
    if out is None:
        bounds = f.bounds
        return MultiSeries(f.ctx, f.nvars, {}, bounds)
    return out


def annihilator_check(a: WeylElement, f: MultiSeries):
    """(is the window-restricted image zero, the residual MultiSeries)."""
    res = weyl_apply(a, f)
    return res.is_zero_on_window(), res


# -- the standard generating functions -------------------------------------------

def carlitz_module_series(ctx, depth: int) -> MultiSeries:
    """sum_k f_k(s) t^(q^k): the sequence transform of the Carlitz basis.

    Coefficients come from the closed form for the f_k monomial coefficients
    (the exact product construction is infeasible at this depth)."""
    quant = ctx.quantities()
    terms = {}
    for k in range(depth + 1):
        for m in range(k + 1):
            terms[(m, k)] = quant.f_coefficient(k, m)
    return MultiSeries(ctx, 1, terms, (depth, depth))


def carlitz_module_series_exact(ctx, depth: int) -> MultiSeries:
    """carlitz_module_series with ExactFraction coefficients
    (+-1 over D_m L_{k-m}^(q^m)), for the filtration estimator."""
    quant = ctx.quantities()
    one = RamifiedSeries.one(ctx)
    terms = {}
    for k in range(depth + 1):
        for m in range(k + 1):
            den = quant.D(m) * quant.L(k - m).q_power(m)
            num = one if (k - m) % 2 == 0 else -one
            terms[(m, k)] = ExactFraction(num, den)
    return MultiSeries(ctx, 1, terms, (depth, depth))


def diagonal_series(ctx, g_coeffs: list) -> MultiSeries:
    """f(s, t) = g(st) for g = sum g_k z^(q^k): the degenerate (sparse) example."""
    terms = {}
    n = len(g_coeffs) - 1
    for k, c in enumerate(g_coeffs):
        if not c.is_zero_to_prec():
            terms[(k, k)] = c
    return MultiSeries(ctx, 1, terms, (n, n))


def hypergeometric_generating(ctx, l: int, lam: int, depth: int) -> MultiSeries:
    """sum over k-, nu-tuples of the terminating hypergeometric polynomial in s
    times t- and u-monomials (l upper and lam lower parameter slots)."""
    from .special import hypergeometric_terms
    nvars = l + lam
    terms = {}
    for multi in _tuples(depth, nvars):
        ks = multi[:l]
        nus = multi[l:]
        pairs = hypergeometric_terms(ctx, [-k for k in ks], [-v for v in nus],
                                     min(multi), polynomial_case=True)
        for m, (num, den) in enumerate(pairs):
            c = num / den
            if not c.is_zero_to_prec():
                terms[(m,) + multi] = c
    return MultiSeries(ctx, nvars, terms, (depth,) * (nvars + 1))


def _tuples(depth, n):
    if n == 0:
        yield ()
        return
    for rest in _tuples(depth, n - 1):
        for k in range(depth + 1):
            yield (k,) + rest


def kbinom_generating(ctx, depth: int) -> MultiSeries:
    """sum_{k} sum_{m<=k} binom(k,m)_K s^(q^m) t^(q^k)."""
    from .umbral import kbinom
    terms = {}
    for k in range(depth + 1):
        for m in range(k + 1):
            terms[(m, k)] = kbinom(ctx, k, m)
    return MultiSeries(ctx, 1, terms, (depth, depth))


# -- non-sparseness and the filtration estimator ----------------------------------

def nonsparse_check(f: MultiSeries, window: int) -> bool:
    """Window form of non-sparseness: for every threshold m0 <= window there
    are at least two known index arrays k (componentwise >= m0, within bounds)
    with a nonzero coefficient a_{m0, k}."""
    if not f.terms:
        return False
    for m0 in range(window + 1):
        hits = set()
        for key, v in f.terms.items():
            if key[0] != m0 or not f.known(key) or v.is_zero_to_prec():
                continue
            if all(k >= m0 for k in key[1:]):
                hits.add(key[1:])
        if len(hits) < 2:
            return False
    return True


def filtration_words(nu: int, nvars: int):
    """All normal-form words with l + mu + sum i_j <= nu, in level order."""
    out = []
    for total in range(nu + 1):
        for l in range(total + 1):
            for mu in range(total - l + 1):
                rest = total - l - mu
                for deltas in _compositions(rest, nvars):
                    out.append((l, mu, deltas))
    return out


def _compositions(total, slots):
    if slots == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, slots - 1):
            yield (first,) + rest


@dataclass
class FiltrationReport:
    dims: list               # rank of the word-image span per level nu
    growth_exponent: float   # least-squares slope of log dim vs log nu (tail half)
    window: tuple            # column window used
    min_zero_prec: object    # weakest precision treated as zero during elimination


def filtration_dimension_estimate(f: MultiSeries, nu_max: int,
                                  pivot_margin: int = 5,
                                  rel_digits: int | None = None) -> FiltrationReport:
    """Empirical growth of dim Gamma_nu . f, by valuation-aware rank of the
    window-restricted images of all filtration words.

    The window keeps only monomials known for every word image (d lowers the
    known bounds, tau raises indices), so the matrix is honest; precision
    exhaustion during elimination raises instead of rounding.
    """
    ctx = f.ctx
    window = tuple(b - nu_max for b in f.bounds)
    if any(w < 0 for w in window):
        raise TruncationError("truncation too shallow for the requested level")
    elim = Eliminator(pivot_margin=pivot_margin)
    dims = []
    words = filtration_words(nu_max, f.nvars)

    def level_of(w):
        return w[0] + w[1] + sum(w[2])

    words.sort(key=level_of)
    # elimination cancellations eat into absolute precision; entries start
    # with enough relative digits that the pivot margin survives ~rank steps
    rel = rel_digits if rel_digits is not None else max(int(ctx.prec), 10 * nu_max)
    cur = 0
    for w in words:
        lvl = level_of(w)
        while len(dims) < lvl:
            dims.append(cur)
        try:
            img = weyl_apply(WeylElement.from_word(ctx, f.nvars, *w), f)
        except TruncationError:
            continue
        row = {}
        for k, v in img.terms.items():
            if all(i <= b for i, b in zip(k, window)):
                row[k] = v.to_series(rel) if isinstance(v, ExactFraction) else v
        if elim.add_row(row):
            cur += 1
    while len(dims) <= nu_max:
        dims.append(cur)
    # least-squares slope of log dim against log nu over the tail half
    pts = [(nu, d) for nu, d in enumerate(dims) if nu >= 1 and d > 0]
    tail = pts[len(pts) // 2:]
    slope = _log_slope(tail)
    return FiltrationReport(dims, slope, window, elim.min_zero_prec)


def _log_slope(points):
    import math
    if len(points) < 2:
        return float("nan")
    xs = [math.log(nu) for nu, _ in points]
    ys = [math.log(d) for _, d in points]
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    den = sum((xv - mx) ** 2 for xv in xs)
    if den == 0:
        return float("nan")
    return sum((xv - mx) * (yv - my) for xv, yv in zip(xs, ys)) / den