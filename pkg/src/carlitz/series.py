"""Truncated ramified Laurent series over F_{p^m}.

Values model elements of the completion of an algebraic closure of F_q((x)),
restricted to a constant-field extension plus bounded ramification: exponents
lie in (1/q^e) * Z with e <= ctx.e_max, and a value is known for all exponents
below its precision cutoff `prec` (INF for exact values).

Exponents are stored as integers scaled by q^e. Absolute value is
|t| = q^{-v} with v the least stored exponent, so valuations are tracked as
exact Fractions and never floated.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import PrecisionLossError, RamificationError, CarlitzError, InputError

INF = float("inf")


def _min_prec(a, b):
    return a if a <= b else b


class RamifiedSeries:
    __slots__ = ("ctx", "e", "terms", "prec")

    def __init__(self, ctx, e, terms, prec):
        # internal constructor; use the factory functions / methods below
        self.ctx = ctx
        self.e = e
        self.terms = terms
        self.prec = prec

    # -- construction --------------------------------------------------------

    @staticmethod
    def make(ctx, terms=None, prec=INF, e=0):
        """Build and normalize: terms maps scaled exponent -> coefficient.

        Scaled exponent k at ramification e denotes x^(k / q^e).
        """
        return _normalize(ctx, e, dict(terms or {}), prec)

    @staticmethod
    def zero(ctx, prec=INF):
        return _normalize(ctx, 0, {}, prec)

    @staticmethod
    def one(ctx):
        return _normalize(ctx, 0, {0: ctx.one}, INF)

    @staticmethod
    def x(ctx, exponent=1):
        return _normalize(ctx, 0, {int(exponent): ctx.one}, INF)

    @staticmethod
    def constant(ctx, c):
        c = ctx.el(c)
        return _normalize(ctx, 0, {0: c} if c else {}, INF)

    @staticmethod
    def monomial(ctx, coeff, exponent):
        """coeff * x^exponent for a rational exponent."""
        coeff = ctx.el(coeff)
        exponent = Fraction(exponent)
        e = 0
        den = exponent.denominator
        scale = 1
        while scale < den:
            scale *= ctx.q
            e += 1
        if den > 1 and (scale % den != 0 or e > ctx.e_max):
            raise RamificationError(f"exponent {exponent} outside the (1/q^{ctx.e_max})Z grid")
        k = int(exponent * scale)
        return _normalize(ctx, e, {k: coeff} if coeff else {}, INF)

    @staticmethod
    def from_poly(ctx, coeffs):
        """Polynomial sum coeffs[i] * x^i from an int/element list."""
        terms = {}
        for i, c in enumerate(coeffs):
            c = ctx.el(c)
            if c:
                terms[i] = c
        return _normalize(ctx, 0, terms, INF)

    # -- inspection ----------------------------------------------------------

    def valuation(self):
        """Least known exponent; INF when no terms are known (zero to prec)."""
        if not self.terms:
            return INF
        return Fraction(min(self.terms), self.ctx.q ** self.e)

    def effective_valuation(self):
        """Valuation, with zero-to-precision values floored at their prec."""
        if not self.terms:
            return self.prec
        return Fraction(min(self.terms), self.ctx.q ** self.e)

    def abs_log_q(self):
        """log_q |self| = -valuation (|zero| treated via INF)."""
        v = self.valuation()
        return -v if v != INF else -INF

    def is_exact_zero(self):
        return not self.terms and self.prec == INF

    def is_zero_to_prec(self):
        return not self.terms

    def is_exact(self):
        return self.prec == INF

    def coefficient(self, exponent) -> object:
        exponent = Fraction(exponent)
        if self.prec != INF and exponent >= self.prec:
            raise PrecisionLossError(f"coefficient at {exponent} is beyond precision {self.prec}")
        scaled = exponent * self.ctx.q ** self.e
        if scaled.denominator != 1:
            return self.ctx.zero
        return self.terms.get(int(scaled), self.ctx.zero)

    def exponents(self):
        qe = self.ctx.q ** self.e
        return sorted(Fraction(k, qe) for k in self.terms)

    # -- arithmetic ----------------------------------------------------------

    def _aligned(self, other):
        if self.ctx is not other.ctx:
            raise CarlitzError("mixed field contexts")
        e = max(self.e, other.e)
        q = self.ctx.q
        sa = q ** (e - self.e)
        sb = q ** (e - other.e)
        ta = self.terms if sa == 1 else {k * sa: v for k, v in self.terms.items()}
        tb = other.terms if sb == 1 else {k * sb: v for k, v in other.terms.items()}
        return e, ta, tb

    def __add__(self, other):
        if not isinstance(other, RamifiedSeries):
            return NotImplemented
        e, ta, tb = self._aligned(other)
        ctx = self.ctx
        if ctx.p == 2 and ctx.m == 1:
            out = dict.fromkeys(set(ta).symmetric_difference(tb), ctx.one)
            return _normalize(ctx, e, out, _min_prec(self.prec, other.prec))
        out = dict(ta)
        for k, v in tb.items():
            cur = out.get(k)
            if cur is None:
                out[k] = v
            else:
                s = cur + v
                if s:
                    out[k] = s
                else:
                    del out[k]
        return _normalize(ctx, e, out, _min_prec(self.prec, other.prec))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        if self.ctx.p == 2:
            return self
        return _normalize(self.ctx, self.e, {k: -v for k, v in self.terms.items()}, self.prec)

    def __mul__(self, other):
        if not isinstance(other, RamifiedSeries):
            return NotImplemented
        e, ta, tb = self._aligned(other)
        ctx = self.ctx
        prec = _mul_prec(self, other)
        cutoff = None if prec == INF else prec * ctx.q ** e
        if len(ta) > len(tb):
            ta, tb = tb, ta
        if ctx.p == 2 and ctx.m == 1:
            # GF(2): every coefficient is 1, products are parity toggles
            acc = set()
            toggle = acc.symmetric_difference_update
            for ka in ta:
                if cutoff is None:
                    toggle(ka + kb for kb in tb)
                else:
                    toggle(k for kb in tb if (k := ka + kb) < cutoff)
            one = ctx.one
            return _normalize(ctx, e, dict.fromkeys(acc, one), prec)
        out = {}
        for ka, va in ta.items():
            for kb, vb in tb.items():
                k = ka + kb
                if cutoff is not None and k >= cutoff:
                    continue
                pr = va * vb
                cur = out.get(k)
                if cur is None:
                    if pr:
                        out[k] = pr
                else:
                    s = cur + pr
                    if s:
                        out[k] = s
                    else:
                        del out[k]
        return _normalize(ctx, e, out, prec)

    def scale(self, c):
        """Multiply by a constant field element."""
        c = self.ctx.el(c)
        if not c:
            return RamifiedSeries.zero(self.ctx, self.prec)
        return _normalize(self.ctx, self.e,
                          {k: v * c for k, v in self.terms.items()}, self.prec)

    def shift(self, exponent):
        """Multiply by x^exponent (rational exponent on the allowed grid)."""
        return self * RamifiedSeries.monomial(self.ctx, self.ctx.one, exponent)

    def __truediv__(self, other):
        return _divide(self, other)

    def inverse(self):
        return _divide(RamifiedSeries.one(self.ctx), self)

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        acc = RamifiedSeries.one(self.ctx)
        sq = self
        while n:
            if n & 1:
                acc = acc * sq
            n >>= 1
            if n:
                sq = sq * sq
        return acc

    def q_power(self, k: int = 1):
        """Frobenius power: exact on coefficients, exponents scaled by q^k."""
        if k < 0:
            return self.qth_root(-k)
        out = self
        for _ in range(k):
            q = out.ctx.q
            terms = {kk * q: v.q_power() for kk, v in out.terms.items()}
            prec = out.prec if out.prec == INF else out.prec * q
            out = _normalize(out.ctx, out.e, terms, prec)
        return out

    def qth_root(self, k: int = 1):
        """The unique series r with r^(q^k) = self; may raise the ramification e."""
        out = self
        for _ in range(k):
            out = _qth_root_once(out)
        return out

    # -- comparisons ---------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, RamifiedSeries):
            return NotImplemented
        e, ta, tb = self._aligned(other)
        return ta == tb and self.prec == other.prec

    def __hash__(self):
        return hash((self.e, frozenset(self.terms.items())))

    def agreement_valuation(self, other):
        """Valuation up to which self and other agree.

        Returns INF when the difference has no known nonzero digit and both
        are exact; otherwise the valuation of the first differing digit, or
        the joint precision when all known digits agree.
        """
        d = self - other
        if d.terms:
            return d.valuation()
        return d.prec

    def agrees_to(self, other, floor) -> bool:
        return self.agreement_valuation(other) >= floor

    # -- truncation ----------------------------------------------------------

    def truncate(self, prec):
        prec = prec if prec == INF else Fraction(prec)
        return _normalize(self.ctx, self.e, dict(self.terms), _min_prec(self.prec, prec))

    # -- display -------------------------------------------------------------

    def __repr__(self):
        return f"RamifiedSeries({format_series(self)})"


def _normalize(ctx, e, terms, prec):
    if prec != INF:
        prec = Fraction(prec)
        cutoff = prec * ctx.q ** e
        terms = {k: v for k, v in terms.items() if v and k < cutoff}
    else:
        terms = {k: v for k, v in terms.items() if v}
    q = ctx.q
    while e > 0 and all(k % q == 0 for k in terms):
        terms = {k // q: v for k, v in terms.items()}
        e -= 1
    if not terms:
        e = 0
    if e > ctx.e_max:
        raise RamificationError(f"ramification exponent {e} exceeds cap {ctx.e_max}")
    return RamifiedSeries(ctx, e, terms, prec)


def _mul_prec(a, b):
    if a.prec == INF and b.prec == INF:
        return INF
    va = a.effective_valuation()
    vb = b.effective_valuation()
    pa = INF if a.prec == INF else a.prec + vb
    pb = INF if b.prec == INF else b.prec + va
    return _min_prec(pa, pb)


def _divide(a: RamifiedSeries, b: RamifiedSeries, rel_prec=None):
    """Valuation-sorted long division; exact when it terminates on exact input."""
    ctx = a.ctx
    if not b.terms:
        if b.prec == INF:
            raise ZeroDivisionError("division by exact zero")
        raise PrecisionLossError("division by a value that is zero to precision")
    e, ta, tb = a._aligned(b)
    q = ctx.q
    qe = q ** e
    kb = min(tb)
    cb_inv = tb[kb].inverse()
    vb = Fraction(kb, qe)
    va = a.effective_valuation()
    # absolute output precision from input uncertainty
    pa = INF if a.prec == INF else a.prec - vb
    pb = INF if b.prec == INF else b.prec + va - 2 * vb
    prec = _min_prec(pa, pb)
    exact_inputs = prec == INF
    if exact_inputs:
        if rel_prec is None:
            rel_prec = ctx.prec
        prec = (va - vb) + rel_prec if va != INF else INF
    if not a.terms:
        return RamifiedSeries.zero(ctx, prec)
    if prec != INF and prec <= va - vb:
        raise PrecisionLossError("quotient known to no digits")
    cutoff = None if prec == INF else prec * qe
    if cutoff is not None and exact_inputs and ta:
        # an exact quotient has top exponent <= max(a) - v(b): run far enough
        # that polynomial divisions always terminate exactly
        cutoff = max(cutoff, max(ta) - kb + 1)
    rem = dict(ta)
    out = {}
    truncated = False
    if ctx.p == 2 and ctx.m == 1:
        rem = set(ta)
        tb_keys = sorted(tb)
        out_set = set()
        while rem:
            k = min(rem)
            ko = k - kb
            if cutoff is not None and ko >= cutoff:
                truncated = True
                break
            out_set.add(ko)
            for kbb in tb_keys:
                kk = ko + kbb
                if cutoff is not None and kk - kb >= cutoff:
                    truncated = True
                    continue
                if kk in rem:
                    rem.discard(kk)
                else:
                    rem.add(kk)
        if exact_inputs and not rem and not truncated:
            prec = INF
        return _normalize(ctx, e, dict.fromkeys(out_set, ctx.one), prec)
    tb_items = sorted(tb.items())
    while rem:
        k = min(rem)
        ko = k - kb
        if cutoff is not None and ko >= cutoff:
            truncated = True
            break
        c = rem[k] * cb_inv
        out[ko] = c
        for kbb, vbb in tb_items:
            kk = ko + kbb
            if cutoff is not None and kk - kb >= cutoff:
                truncated = True  # dropped: only feeds digits beyond the cutoff
                continue
            cur = rem.get(kk)
            pr = c * vbb
            if cur is None:
                rem[kk] = -pr
            else:
                s = cur - pr
                if s:
                    rem[kk] = s
                else:
                    del rem[kk]
    if exact_inputs and not rem and not truncated:
        prec = INF  # division terminated: quotient is exact
    return _normalize(ctx, e, out, prec)


def exact_div(a: RamifiedSeries, b: RamifiedSeries) -> RamifiedSeries:
    """Division that must terminate (used where the quotient is known integral)."""
    out = _divide(a, b)
    if out.prec != INF and a.prec == INF and b.prec == INF:
        raise CarlitzError("expected exact division")
    return out


def _qth_root_once(a: RamifiedSeries) -> RamifiedSeries:
    ctx = a.ctx
    q = ctx.q
    terms = {k: v.qth_root() for k, v in a.terms.items()}
    prec = a.prec if a.prec == INF else a.prec / q
    # exponent k/q^e divided by q: same scaled keys at ramification e+1
    return _normalize(ctx, a.e + 1, terms, prec)


def artin_schreier_small(v: RamifiedSeries, cap=None) -> RamifiedSeries:
    """The unique solution z0 of z^(1/q) - z = v with |z0| <= |v| (given |v| < 1).

    z0 = sum_{j>=1} v^(q^j); the series converges x-adically since v(v) > 0.
    The full solution set is {z0 + c : c in F_q}.
    """
    ctx = v.ctx
    vv = v.effective_valuation()
    if vv == INF:
        return RamifiedSeries.zero(ctx, v.prec if v.prec != INF else INF)
    if vv <= 0:
        raise CarlitzError(f"artin_schreier_small needs |v| < 1, got valuation {vv}")
    if cap is None:
        cap = v.prec * ctx.q if v.prec != INF else ctx.prec * ctx.q
    acc = RamifiedSeries.zero(ctx, cap)
    w = v
    while True:
        w = w.q_power()
        if w.effective_valuation() >= cap:
            break
        acc = acc + w.truncate(cap)
    return acc


# -- parsing / formatting ----------------------------------------------------

def format_series(s: RamifiedSeries, max_terms=None) -> str:
    ctx = s.ctx
    qe = ctx.q ** s.e
    items = sorted(s.terms.items())
    parts = []
    shown = items if max_terms is None else items[:max_terms]
    for k, c in shown:
        exp = Fraction(k, qe)
        cs = c.as_str()
        if exp == 0:
            parts.append(cs if c.in_prime_subfield() else f"({cs})")
            continue
        xs = "x" if exp == 1 else (f"x^{exp}" if exp.denominator == 1 else f"x^({exp})")
        if c == ctx.one:
            parts.append(xs)
        elif c.in_prime_subfield():
            parts.append(f"{cs}*{xs}")
        else:
            parts.append(f"({cs})*{xs}")
    if max_terms is not None and len(items) > max_terms:
        parts.append("...")
    body = " + ".join(parts) if parts else "0"
    if s.prec == INF:
        return body
    return f"{body} + O(x^{s.prec})" if parts else f"O(x^{s.prec})"


def parse_series(ctx, text: str) -> RamifiedSeries:
    """Parse simple expressions: integers, x^k, [k] brackets, products, sums.

    Examples: "x^2+x", "-x", "[1]", "2*x^3 + 1", "x*[2]".
    """
    text = text.strip()
    if not text:
        raise InputError("empty series expression")
    tokens = _tokenize(text)
    out, pos = _parse_sum(ctx, tokens, 0)
    if pos != len(tokens):
        raise InputError(f"trailing input in series expression at token {pos}")
    return out


def _tokenize(text):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "+-*()":
            tokens.append(ch)
            i += 1
        elif ch == "[":
            j = text.index("]", i)
            tokens.append(("bracket", int(text[i + 1:j])))
            i = j + 1
        elif ch == "x":
            if text[i:i + 2] == "x^":
                j = i + 2
                if j < len(text) and text[j] == "(":
                    k = text.index(")", j)
                    tokens.append(("xpow", Fraction(text[j + 1:k])))
                    i = k + 1
                else:
                    k = j
                    while k < len(text) and (text[k].isdigit() or text[k] in "/-"):
                        k += 1
                    tokens.append(("xpow", Fraction(text[j:k])))
                    i = k
            else:
                tokens.append(("xpow", Fraction(1)))
                i += 1
        elif ch.isdigit():
            k = i
            while k < len(text) and text[k].isdigit():
                k += 1
            tokens.append(("int", int(text[i:k])))
            i = k
        else:
            raise InputError(f"unexpected character {ch!r} in series expression")
    return tokens


def _parse_sum(ctx, tokens, pos):
    acc = RamifiedSeries.zero(ctx)
    sign = 1
    expect_term = True
    while pos < len(tokens):
        t = tokens[pos]
        if t == "+" and not expect_term:
            sign = 1
            expect_term = True
            pos += 1
        elif t == "-":
            sign = -sign if expect_term else -1
            expect_term = True
            pos += 1
        elif expect_term:
            term, pos = _parse_product(ctx, tokens, pos)
            acc = acc + (term if sign == 1 else -term)
            sign = 1
            expect_term = False
        else:
            break
    if expect_term:
        raise InputError("expected a term in series expression")
    return acc, pos


def _parse_product(ctx, tokens, pos):
    acc, pos = _parse_atom(ctx, tokens, pos)
    while pos < len(tokens):
        if tokens[pos] == "*":
            nxt, pos = _parse_atom(ctx, tokens, pos + 1)
            acc = acc * nxt
        elif isinstance(tokens[pos], tuple):
            nxt, pos = _parse_atom(ctx, tokens, pos)
            acc = acc * nxt
        else:
            break
    return acc, pos


def _parse_atom(ctx, tokens, pos):
    if pos >= len(tokens):
        raise InputError("unexpected end of series expression")
    t = tokens[pos]
    if t == "(":
        inner, pos = _parse_sum(ctx, tokens, pos + 1)
        if pos >= len(tokens) or tokens[pos] != ")":
            raise InputError("unbalanced parenthesis")
        return inner, pos + 1
    if isinstance(t, tuple):
        kind, val = t
        if kind == "int":
            return RamifiedSeries.constant(ctx, val), pos + 1
        if kind == "xpow":
            return RamifiedSeries.monomial(ctx, ctx.one, val), pos + 1
        if kind == "bracket":
            return ctx.quantities().bracket(val), pos + 1
    raise InputError(f"unexpected token {t!r} in series expression")
