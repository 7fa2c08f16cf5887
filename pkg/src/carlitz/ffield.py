"""Arithmetic in F_{p^m} = F_p[y]/(modulus) and the field context shared by all values.

The context fixes the prime p, the extension degree m, an irreducible modulus,
the F_q-linearity base q = p^upsilon (upsilon | m), the default working
precision for truncated expansions, and the ramification cap e_max.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import CarlitzError


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


# -- dense F_p[y] helpers (used only for modulus validation/search) --------

def _ptrim(a):
    while a and a[-1] == 0:
        a = a[:-1]
    return a


def _pmul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _ptrim(tuple(out))


def _pmod(a, f, p):
    a = list(a)
    df = len(f) - 1
    inv_lead = pow(f[-1], p - 2, p)
    while len(a) - 1 >= df and a:
        a = _ptrim(tuple(a))
        a = list(a)
        if len(a) - 1 < df or not a:
            break
        c = (a[-1] * inv_lead) % p
        shift = len(a) - 1 - df
        for i, fi in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fi) % p
        a = list(_ptrim(tuple(a)))
    return _ptrim(tuple(a))


def _ppowmod_frob(base, k, f, p):
    """base^(p^k) mod f, by k successive p-th powers."""
    t = _pmod(base, f, p)
    for _ in range(k):
        acc = (1,)
        sq = t
        e = p
        while e:
            if e & 1:
                acc = _pmod(_pmul(acc, sq, p), f, p)
            e >>= 1
            if e:
                sq = _pmod(_pmul(sq, sq, p), f, p)
        t = acc
    return t


def _pgcd(a, b, p):
    a, b = _ptrim(a), _ptrim(b)
    while b:
        # reduce a mod b
        a = _pmod(a, b, p)
        a, b = b, a
    return a


def is_irreducible(modulus, p: int) -> bool:
    """Rabin test for a monic polynomial over F_p."""
    f = _ptrim(tuple(c % p for c in modulus))
    m = len(f) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    y = (0, 1)
    # y^(p^m) == y mod f
    t = _ppowmod_frob(y, m, f, p)
    n = max(len(t), len(y))
    diff = _ptrim(tuple(((t[i] if i < len(t) else 0) - (y[i] if i < len(y) else 0)) % p
                        for i in range(n)))
    if diff:
        return False
    # gcd(y^(p^(m/r)) - y, f) == 1 for each prime r | m
    r = 2
    mm = m
    primes = set()
    while r * r <= mm:
        if mm % r == 0:
            primes.add(r)
            while mm % r == 0:
                mm //= r
        r += 1
    if mm > 1:
        primes.add(mm)
    for r in sorted(primes):
        t = _ppowmod_frob(y, m // r, f, p)
        n = max(len(t), len(y))
        diff = _ptrim(tuple(((t[i] if i < len(t) else 0) - (y[i] if i < len(y) else 0)) % p
                            for i in range(n)))
        if not diff:
            return False
        if len(_pgcd(f, diff, p)) - 1 != 0:
            return False
    return True


def default_modulus(p: int, m: int):
    """First monic irreducible of degree m over F_p in lexicographic order."""
    if m == 1:
        return (0, 1)
    # iterate over low-coefficient vectors (c_0, ..., c_{m-1})
    total = p ** m
    for code in range(total):
        c = []
        v = code
        for _ in range(m):
            c.append(v % p)
            v //= p
        cand = tuple(c) + (1,)
        if is_irreducible(cand, p):
            return cand
    raise CarlitzError(f"no irreducible modulus found for p={p}, m={m}")


class FFElement:
    """Element of F_{p^m}, stored as a length-m coefficient vector over F_p."""

    __slots__ = ("ctx", "vec")

    def __init__(self, ctx, vec):
        self.ctx = ctx
        self.vec = vec

    def __add__(self, other):
        p = self.ctx.p
        return self.ctx._ffe(tuple((a + b) % p for a, b in zip(self.vec, other.vec)))

    def __sub__(self, other):
        p = self.ctx.p
        return self.ctx._ffe(tuple((a - b) % p for a, b in zip(self.vec, other.vec)))

    def __neg__(self):
        p = self.ctx.p
        return self.ctx._ffe(tuple((-a) % p for a in self.vec))

    def __mul__(self, other):
        return self.ctx._ff_mul(self, other)

    def scale(self, k: int):
        p = self.ctx.p
        k %= p
        return self.ctx._ffe(tuple((a * k) % p for a in self.vec))

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        acc = self.ctx.one
        sq = self
        while n:
            if n & 1:
                acc = acc * sq
            n >>= 1
            if n:
                sq = sq * sq
        return acc

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        return self ** (self.ctx.p ** self.ctx.m - 2)

    def __truediv__(self, other):
        return self * other.inverse()

    def qth_root(self):
        """Unique element r with r^q = self (Frobenius is bijective)."""
        return self ** self.ctx._qroot_exp

    def pth_root(self):
        return self ** (self.ctx.p ** (self.ctx.m - 1))

    def q_power(self):
        return self ** self.ctx.q

    def is_zero(self):
        return not any(self.vec)

    def in_prime_subfield(self):
        return not any(self.vec[1:])

    def in_fq(self):
        return self.q_power() == self

    def __eq__(self, other):
        return isinstance(other, FFElement) and self.vec == other.vec and self.ctx is other.ctx

    def __hash__(self):
        return hash(self.vec)

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"FF({self.as_str()})"

    def as_str(self):
        if self.in_prime_subfield():
            return str(self.vec[0])
        parts = []
        for i in range(len(self.vec) - 1, -1, -1):
            c = self.vec[i]
            if not c:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                g = "g" if i == 1 else f"g^{i}"
                parts.append(g if c == 1 else f"{c}{g}")
        return "+".join(parts) if parts else "0"


class FieldContext:
    """Shared immutable context: constant field, linearity base, precision policy.

    q = p^upsilon with upsilon | m; Frobenius y -> y^p is bijective, so q-th
    roots of field elements always exist and are unique.
    """

    def __init__(self, p: int, m: int = 1, q: int | None = None, modulus=None,
                 prec=40, e_max: int = 4):
        if not is_prime(p):
            raise CarlitzError(f"p = {p} is not prime")
        if m < 1:
            raise CarlitzError("extension degree m must be >= 1")
        self.p = p
        self.m = m
        q = p if q is None else q
        upsilon = 0
        qq = 1
        while qq < q:
            qq *= p
            upsilon += 1
        if qq != q or upsilon == 0 or m % upsilon != 0:
            raise CarlitzError(f"q = {q} must be p^u with u | m (p={p}, m={m})")
        self.q = q
        self.upsilon = upsilon
        if modulus is None:
            modulus = default_modulus(p, m)
        modulus = tuple(c % p for c in modulus)
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise CarlitzError("modulus must be monic of degree m")
        if not is_irreducible(modulus, p):
            raise CarlitzError("modulus is not irreducible")
        self.modulus = modulus
        self.prec = Fraction(prec)
        if self.prec < 1:
            raise CarlitzError("working precision must be >= 1")
        self.e_max = int(e_max)
        self._qroot_exp = p ** (m - upsilon)
        # reduction of y^k mod modulus for k = m .. 2m-2
        red = []
        cur = tuple(-c % p for c in modulus[:-1])  # y^m
        red.append(cur)
        for _ in range(m - 2):
            cur = self._shift_reduce(cur)
            red.append(cur)
        self._red = red
        self._cache = {}
        self.zero = self._ffe((0,) * m)
        self.one = self._ffe((1,) + (0,) * (m - 1))
        self._fq_cache = None
        self._quant = None

    def _shift_reduce(self, vec):
        p, m = self.p, self.m
        top = vec[-1]
        shifted = (0,) + vec[:-1]
        if top:
            shifted = tuple((a - top * c) % p for a, c in zip(shifted, self.modulus[:-1]))
        return shifted

    def _ffe(self, vec):
        el = self._cache.get(vec)
        if el is None:
            el = FFElement(self, vec)
            if len(self._cache) < 1 << 16:
                self._cache[vec] = el
        return el

    def _ff_mul(self, a: FFElement, b: FFElement) -> FFElement:
        p, m = self.p, self.m
        if m == 1:
            return self._ffe(((a.vec[0] * b.vec[0]) % p,))
        out = [0] * (2 * m - 1)
        for i, ai in enumerate(a.vec):
            if ai:
                for j, bj in enumerate(b.vec):
                    out[i + j] = (out[i + j] + ai * bj) % p
        vec = out[:m]
        for k in range(m, 2 * m - 1):
            c = out[k]
            if c:
                row = self._red[k - m]
                vec = [(v + c * r) % p for v, r in zip(vec, row)]
        return self._ffe(tuple(vec))

    # -- constructors -------------------------------------------------------

    def el(self, value) -> FFElement:
        """Field element from an int (prime-subfield) or coefficient list."""
        if isinstance(value, FFElement):
            if value.ctx is not self:
                raise CarlitzError("field element from a different context")
            return value
        if isinstance(value, int):
            return self._ffe((value % self.p,) + (0,) * (self.m - 1))
        vec = tuple(int(c) % self.p for c in value)
        if len(vec) != self.m:
            vec = (vec + (0,) * self.m)[: self.m]
        return self._ffe(vec)

    def gen(self) -> FFElement:
        """Image of y, a generator of F_{p^m} over F_p (zero when m = 1)."""
        if self.m == 1:
            return self.zero
        return self._ffe((0, 1) + (0,) * (self.m - 2))

    # -- enumeration --------------------------------------------------------

    def elements(self):
        """All p^m field elements (guarded by a search budget)."""
        if self.p ** self.m > 1 << 20:
            raise CarlitzError("field too large for exhaustive enumeration")
        p, m = self.p, self.m
        for code in range(p ** m):
            vec = []
            v = code
            for _ in range(m):
                vec.append(v % p)
                v //= p
            yield self._ffe(tuple(vec))

    def fq_elements(self):
        """The q elements of the linearity base field F_q inside F_{p^m}."""
        if self._fq_cache is None:
            self._fq_cache = tuple(a for a in self.elements() if a.q_power() == a)
            assert len(self._fq_cache) == self.q
        return self._fq_cache

    def quantities(self):
        """Cached Carlitz quantity tables for this context (lazy import)."""
        if self._quant is None:
            from .carlitz import Quantities
            self._quant = Quantities(self)
        return self._quant

    def __repr__(self):
        return (f"FieldContext(p={self.p}, m={self.m}, q={self.q}, "
                f"prec={self.prec}, e_max={self.e_max})")


def constant_artin_schreier(ctx: FieldContext, a: FFElement):
    """All c in F_{p^m} with c^q - c = a; empty or exactly q solutions."""
    sols = [c for c in ctx.elements() if c.q_power() - c == a]
    assert len(sols) in (0, ctx.q)
    return sols
