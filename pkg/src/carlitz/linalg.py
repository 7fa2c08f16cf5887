"""Valuation-aware linear algebra over ramified series.

Digits of our series are exact, so an entry with stored terms is genuinely
nonzero; an entry with no stored terms is only zero *to its precision*. Rank
and solve routines therefore pivot on the entry of least valuation and treat
empty entries as zero, reporting (not rounding away) precision exhaustion:
a pivot is accepted only when its known digits clear its valuation by the
configured margin.
"""

from __future__ import annotations

from .errors import PrecisionLossError
from .series import INF, RamifiedSeries


class Eliminator:
    """Incremental row reduction over the series fraction field.

    Rows are sparse dicts mapping a hashable column key to a RamifiedSeries.
    """

    def __init__(self, pivot_margin=5, zero_floor=None):
        self.pivot_margin = pivot_margin
        self.zero_floor = zero_floor
        self.pivots = []          # list of (col, row) with row[col] == 1
        self.min_zero_prec = INF  # weakest precision accepted as zero

    @property
    def rank(self):
        return len(self.pivots)

    def reduce(self, row: dict) -> dict:
        row = {c: v for c, v in row.items() if not v.is_exact_zero()}
        for col, prow in self.pivots:
            coeff = row.get(col)
            if coeff is None or coeff.is_zero_to_prec():
                continue
            for c, v in prow.items():
                term = coeff * v
                cur = row.get(c)
                row[c] = -term if cur is None else cur - term
            row = {c: v for c, v in row.items() if not v.is_exact_zero()}
        return row

    def add_row(self, row: dict) -> bool:
        """Reduce a row against the pivots; install a new pivot when independent.

        Returns True when the row increased the rank.
        """
        row = self.reduce(row)
        pivot_col = None
        pivot_val = None
        for c, v in row.items():
            if v.is_zero_to_prec():
                if v.prec < self.min_zero_prec:
                    self.min_zero_prec = v.prec
                if self.zero_floor is not None and v.prec < self.zero_floor:
                    raise PrecisionLossError(
                        f"entry zero only to precision {v.prec} < floor {self.zero_floor}")
                continue
            val = v.valuation()
            if pivot_val is None or val < pivot_val:
                pivot_col, pivot_val = c, val
        if pivot_col is None:
            return False
        pv = row[pivot_col]
        if pv.prec != INF and pv.prec - pivot_val < self.pivot_margin:
            raise PrecisionLossError(
                f"pivot has only {pv.prec - pivot_val} digits, margin {self.pivot_margin}")
        inv = pv.inverse()
        # keep zero-to-precision entries: they still carry uncertainty that
        # must degrade rows reduced against this pivot later
        norm = {c: v * inv for c, v in row.items()}
        norm[pivot_col] = RamifiedSeries.one(pv.ctx)
        self.pivots.append((pivot_col, norm))
        return True


def rank_of_rows(rows, pivot_margin=5, zero_floor=None) -> int:
    elim = Eliminator(pivot_margin, zero_floor)
    for row in rows:
        elim.add_row(row)
    return elim.rank


def solve_linear(a_rows, b, pivot_margin=5):
    """Solve the square system A z = b (dense lists over RamifiedSeries).

    Gaussian elimination with valuation pivoting; raises PrecisionLossError
    when no pivot with enough known digits exists (singular to precision).
    """
    n = len(a_rows)
    aug = [list(r) + [b[i]] for i, r in enumerate(a_rows)]
    perm = list(range(n))
    for col in range(n):
        best, best_val = None, None
        for r in range(col, n):
            entry = aug[r][col]
            if entry.is_zero_to_prec():
                continue
            val = entry.valuation()
            if best_val is None or val < best_val:
                best, best_val = r, val
        if best is None:
            raise PrecisionLossError("singular (to precision) linear system")
        piv = aug[best][col]
        if piv.prec != INF and piv.prec - best_val < pivot_margin:
            raise PrecisionLossError("pivot below precision margin in linear solve")
        aug[col], aug[best] = aug[best], aug[col]
        inv = piv.inverse()
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r == col:
                continue
            factor = aug[r][col]
            if factor.is_exact_zero():
                continue
            aug[r] = [vr - factor * vc for vr, vc in zip(aug[r], aug[col])]
    return [aug[i][n] for i in range(n)]
