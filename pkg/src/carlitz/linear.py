"""F_q-linear power series/polynomials: finite data for sum a_n t^(q^n).

`order = None` marks an exact polynomial; otherwise coefficients are known
for indices 0..order and unknown beyond (t-adic big-oh at index order + 1).
"""

from __future__ import annotations

from .errors import CarlitzError, TruncationError
from .series import RamifiedSeries, INF


class LinearSeries:
    __slots__ = ("ctx", "coeffs", "order")

    def __init__(self, ctx, coeffs, order=None):
        self.ctx = ctx
        coeffs = list(coeffs)
        if order is None:
            while coeffs and coeffs[-1].is_exact_zero():
                coeffs.pop()
        else:
            order = int(order)
            if order < -1:
                raise TruncationError("t-order bound exhausted")
            coeffs = coeffs[: order + 1]
            zero = RamifiedSeries.zero(ctx)
            while len(coeffs) < order + 1:
                coeffs.append(zero)
        self.coeffs = tuple(coeffs)
        self.order = order

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def zero(ctx, order=None):
        return LinearSeries(ctx, [], order)

    @staticmethod
    def identity(ctx):
        """The monomial t."""
        return LinearSeries(ctx, [RamifiedSeries.one(ctx)])

    @staticmethod
    def monomial(ctx, n, coeff=None):
        """coeff * t^(q^n)."""
        c = RamifiedSeries.one(ctx) if coeff is None else coeff
        zero = RamifiedSeries.zero(ctx)
        return LinearSeries(ctx, [zero] * n + [c])

    # -- inspection -----------------------------------------------------------

    def coefficient(self, n: int) -> RamifiedSeries:
        if self.order is not None and n > self.order:
            raise TruncationError(f"coefficient index {n} beyond t-order {self.order}")
        if n < 0 or n >= len(self.coeffs):
            return RamifiedSeries.zero(self.ctx)
        return self.coeffs[n]

    def degree_index(self):
        """Largest n with a (known-)nonzero coefficient, or -1."""
        for n in range(len(self.coeffs) - 1, -1, -1):
            if not self.coeffs[n].is_zero_to_prec():
                return n
        return -1

    def is_zero(self):
        return all(c.is_zero_to_prec() for c in self.coeffs)

    def known_order(self):
        return self.order if self.order is not None else INF

    # -- arithmetic -----------------------------------------------------------

    def _join_order(self, other):
        if self.order is None:
            return other.order
        if other.order is None:
            return self.order
        return min(self.order, other.order)

    def __add__(self, other):
        order = self._join_order(other)
        n = max(len(self.coeffs), len(other.coeffs))
        if order is not None:
            n = min(n, order + 1)
        out = []
        for i in range(n):
            a = self.coeffs[i] if i < len(self.coeffs) else RamifiedSeries.zero(self.ctx)
            b = other.coeffs[i] if i < len(other.coeffs) else RamifiedSeries.zero(self.ctx)
            out.append(a + b)
        return LinearSeries(self.ctx, out, order)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return LinearSeries(self.ctx, [-c for c in self.coeffs], self.order)

    def scale(self, c: RamifiedSeries):
        """Left multiplication by a scalar (as a function: (c*u)(t) = c*u(t))."""
        return LinearSeries(self.ctx, [c * a for a in self.coeffs], self.order)

    def frobenius(self, k: int = 1):
        """The function u^(q^k): coefficients to the q^k, indices shifted up k."""
        if k < 0:
            raise CarlitzError("negative Frobenius power on a linear series")
        zero = RamifiedSeries.zero(self.ctx)
        out = [zero] * k + [c.q_power(k) for c in self.coeffs]
        order = None if self.order is None else self.order + k
        return LinearSeries(self.ctx, out, order)

    def compose(self, other: "LinearSeries") -> "LinearSeries":
        """(self o other)(t) = self(other(t)); twisted convolution of coefficients."""
        if self.order is None and other.order is None:
            order = None
            top = (len(self.coeffs) - 1) + (len(other.coeffs) - 1)
            if not self.coeffs or not other.coeffs:
                return LinearSeries.zero(self.ctx)
        else:
            order = min(self.known_order(), other.known_order())
            top = order
        zero = RamifiedSeries.zero(self.ctx)
        out = [zero] * (top + 1)
        for n, a in enumerate(self.coeffs):
            if a.is_exact_zero():
                continue
            for m, b in enumerate(other.coeffs):
                k = n + m
                if k > top:
                    break
                out[k] = out[k] + a * b.q_power(n)
        return LinearSeries(self.ctx, out, order)

    def evaluate(self, point: RamifiedSeries) -> RamifiedSeries:
        """Value at a point; exact for polynomials."""
        acc = RamifiedSeries.zero(self.ctx)
        pw = point
        for n, c in enumerate(self.coeffs):
            if n > 0:
                pw = pw.q_power()
            if not c.is_zero_to_prec() or not c.is_exact():
                acc = acc + c * pw
        return acc

    def truncate(self, order: int) -> "LinearSeries":
        if self.order is not None and order > self.order:
            raise TruncationError(f"cannot extend known t-order {self.order} to {order}")
        return LinearSeries(self.ctx, self.coeffs[: order + 1], order)

    def map_coefficients(self, fn, order=None):
        return LinearSeries(self.ctx, [fn(c) for c in self.coeffs],
                            self.order if order is None else order)

    def map_coefficients_indexed(self, fn, order=None):
        return LinearSeries(self.ctx, [fn(n, c) for n, c in enumerate(self.coeffs)],
                            self.order if order is None else order)

    # -- comparisons ----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, LinearSeries):
            return NotImplemented
        if self.order != other.order:
            return False
        n = max(len(self.coeffs), len(other.coeffs))
        return all(self.coefficient(i) == other.coefficient(i) for i in range(n))

    def __hash__(self):
        return hash((self.coeffs, self.order))

    def agreement_floor(self, other) -> object:
        """Min over shared known indices of coefficient agreement valuations."""
        n = min(self.known_order(), other.known_order())
        if n == INF:
            n = max(len(self.coeffs), len(other.coeffs)) - 1
        floor = INF
        for i in range(int(n) + 1):
            v = self.coefficient(i).agreement_valuation(other.coefficient(i))
            if v < floor:
                floor = v
        return floor

    def agrees_with(self, other) -> bool:
        """True when no shared known digit differs (equality to precision)."""
        n = min(self.known_order(), other.known_order())
        if n == INF:
            n = max(len(self.coeffs), len(other.coeffs)) - 1
        return all((self.coefficient(i) - other.coefficient(i)).is_zero_to_prec()
                   for i in range(int(n) + 1))

    def __repr__(self):
        from .series import format_series
        parts = []
        for n, c in enumerate(self.coeffs):
            if c.is_zero_to_prec() and c.is_exact():
                continue
            parts.append(f"({format_series(c, 3)})*t^q^{n}")
        body = " + ".join(parts) if parts else "0"
        tail = "" if self.order is None else f" + O(t^q^{self.order + 1})"
        return f"LinearSeries[{body}{tail}]"
