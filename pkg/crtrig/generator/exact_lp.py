"""有理数による単体法（Blandの規則）"""

import logging
from dataclasses import dataclass
from fractions import Fraction

logger = logging.getLogger(__name__)

STATUS_OPTIMAL = "optimal"
STATUS_UNBOUNDED = "unbounded"
STATUS_PIVOT_LIMIT = "pivot_limit"


@dataclass
class ExactSolution:
    status: str
    x: list[Fraction]
    objective: Fraction
    pivots: int


class ExactSimplex:
    """
    max c·x  s.t.  A x <= b, x >= 0, b >= 0 を厳密に解く

    原点が実行可能なのでフェーズ1は不要。
    """

    def __init__(self, A: list[list[Fraction]], b: list[Fraction], c: list[Fraction]):
        if any(v < 0 for v in b):
            raise ValueError("右辺が負の行があります")
        if any(len(row) != len(c) for row in A) or len(A) != len(b):
            raise ValueError("行列の大きさが一致しません")
        self.m = len(A)
        self.n = len(c)
        width = self.n + self.m + 1
        self.tableau: list[list[Fraction]] = []
        for i, row in enumerate(A):
            line = [Fraction(v) for v in row] + [Fraction(0)] * self.m + [Fraction(b[i])]
            line[self.n + i] = Fraction(1)
            self.tableau.append(line)
        self.objective = [-Fraction(v) for v in c] + [Fraction(0)] * (width - self.n)
        self.basis = [self.n + i for i in range(self.m)]

    def _entering(self) -> int | None:
        for j, v in enumerate(self.objective[:-1]):
            if v < 0:
                return j
        return None

    def _leaving(self, col: int) -> int | None:
        best = None
        best_ratio = None
        for i, row in enumerate(self.tableau):
            a = row[col]
            if a <= 0:
                continue
            ratio = row[-1] / a
            if (
                best is None
                or ratio < best_ratio
                or (ratio == best_ratio and self.basis[i] < self.basis[best])
            ):
                best, best_ratio = i, ratio
        return best

    def _pivot(self, r: int, col: int) -> None:
        pivot_row = self.tableau[r]
        p = pivot_row[col]
        pivot_row[:] = [v / p for v in pivot_row]
        for row in (*self.tableau[:r], *self.tableau[r + 1 :], self.objective):
            f = row[col]
            if f:
                row[:] = [a - f * b for a, b in zip(row, pivot_row)]
        self.basis[r] = col

    def solve(self, max_pivots: int = 10000) -> ExactSolution:
        pivots = 0
        status = STATUS_OPTIMAL
        while True:
            col = self._entering()
            if col is None:
                break
            r = self._leaving(col)
            if r is None:
                status = STATUS_UNBOUNDED
                break
            if pivots >= max_pivots:
                status = STATUS_PIVOT_LIMIT
                break
            self._pivot(r, col)
            pivots += 1

        x = [Fraction(0)] * self.n
        for i, var in enumerate(self.basis):
            if var < self.n:
                x[var] = self.tableau[i][-1]
        logger.debug("厳密単体法: %s (%s 回のピボット)", status, pivots)
        return ExactSolution(status, x, self.objective[-1], pivots)
