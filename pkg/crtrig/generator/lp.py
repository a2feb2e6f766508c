"""制約集合に対する係数のLP解法（サンプリング反復と厳密な再検査）"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from crtrig.generator.constraints import Constraint, LpProblem
from crtrig.generator.exact_lp import STATUS_OPTIMAL, ExactSimplex
from crtrig.models import LP_MAX_ROUNDS, LP_MAX_VIOLATORS, LP_SAMPLE_SIZE
from crtrig.poly import PolyPair, taylor_seed

logger = logging.getLogger(__name__)


class LpInfeasibleError(RuntimeError):
    """全ての制約を満たす係数が存在しない"""

    def __init__(self, problem: LpProblem, violators: list[Constraint]):
        self.problem = problem
        self.violators = violators
        self.suggestion = (
            f"次数を上げてください（現在 sin {problem.sin_degree}, cos {problem.cos_degree}）"
        )
        super().__init__(
            f"LPが実行不可能です: {problem.func.value}/{problem.domain} "
            f"違反 {len(violators)} 件。{self.suggestion}"
        )

    @property
    def inputs(self) -> list[int]:
        """違反した制約の元の入力パターン"""
        return sorted({c.input for c in self.violators if not c.is_anchor})


@dataclass
class GeneratorConfig:
    """生成の設定"""

    sample_size: int = LP_SAMPLE_SIZE
    max_violators: int = LP_MAX_VIOLATORS
    max_rounds: int = LP_MAX_ROUNDS
    exact_rows: int = 32  # 厳密解に使う余裕量の小さい制約数
    seed: int = 0


@dataclass
class LpResult:
    pp: PolyPair
    rounds: int
    active_count: int
    min_slack: float
    exact_check: bool
    exact_refined: bool = False
    failing: list[Constraint] = field(default_factory=list)


class _Scaled:
    """行を半幅で、列を典型的な大きさで正規化した制約行列"""

    def __init__(self, problem: LpProblem, seed: PolyPair):
        self.problem = problem
        self.seed = np.array(seed.coeffs, dtype=np.float64)
        rows = np.array(
            [c.row(problem.n_sin, problem.n_cos) for c in problem.constraints], dtype=np.float64
        )
        widths = np.array([c.scale for c in problem.constraints], dtype=np.float64)
        self.lo = np.array([c.lo for c in problem.constraints], dtype=np.float64)
        self.hi = np.array([c.hi for c in problem.constraints], dtype=np.float64)

        col_scale = np.ones(problem.n_vars)
        for j in range(problem.n_vars):
            nz = np.abs(rows[:, j]) > 0
            if nz.any():
                col_scale[j] = float(np.median(widths[nz] / np.abs(rows[nz, j])))
        self.col_scale = col_scale
        self.base = rows @ self.seed
        self.g = rows * col_scale / widths[:, None]
        self.widths = widths

    def coeffs(self, z: np.ndarray) -> np.ndarray:
        return self.seed + self.col_scale * z

    def solve(self, active: list[int]) -> tuple[np.ndarray, float]:
        """active の行だけで共通の余裕量 t を最大化"""
        n = self.problem.n_vars
        a_ub = []
        b_ub = []
        for i in active:
            g = self.g[i]
            if math.isfinite(self.hi[i]):
                a_ub.append(np.append(g, 1.0))
                b_ub.append((self.hi[i] - self.base[i]) / self.widths[i])
            if math.isfinite(self.lo[i]):
                a_ub.append(np.append(-g, 1.0))
                b_ub.append((self.base[i] - self.lo[i]) / self.widths[i])
        c = np.zeros(n + 1)
        c[-1] = -1.0
        res = linprog(
            c,
            A_ub=np.array(a_ub),
            b_ub=np.array(b_ub),
            bounds=[(None, None)] * n + [(None, 1.0)],
            method="highs",
        )
        if res.status != 0:
            raise RuntimeError(f"LPソルバーが失敗しました: {res.message}")
        return res.x[:n], float(res.x[-1])


def _rounded_slacks(constraints: list[Constraint], pp: PolyPair) -> np.ndarray:
    return np.array([c.slack(c.evaluate(pp)) for c in constraints])


def exact_check(constraints: list[Constraint], pp: PolyPair) -> bool:
    """binary64係数を有理数として全制約に代入して確かめる"""
    coeffs = [Fraction(v) for v in pp.coeffs]
    n_sin = len(pp.sin_coeffs)
    return all(c.exact_holds(coeffs, n_sin) for c in constraints)


def _exact_refine(
    constraints: list[Constraint], pp: PolyPair, col_scale: np.ndarray
) -> PolyPair | None:
    """
    浮動小数点解の周りで余裕量の小さい行だけを有理数単体法で解き直す

    変数は u = u+ - u- （係数 = pp + col_scale * u）と余裕量の増分 tau。
    """
    n_sin = len(pp.sin_coeffs)
    n = len(pp.coeffs)
    base = [Fraction(v) for v in pp.coeffs]
    scale = [Fraction(float(s)) for s in col_scale]

    lines: list[tuple[list[Fraction], Fraction]] = []
    for c in constraints:
        row = c.exact_row(n_sin, n - n_sin)
        w = Fraction(c.scale)
        value = sum(a * b for a, b in zip(row, base))
        g = [a * s / w for a, s in zip(row, scale)]
        if c.hi != math.inf:
            lines.append((g, (Fraction(c.hi) - value) / w))
        if c.lo != -math.inf:
            lines.append(([-v for v in g], (value - Fraction(c.lo)) / w))
    if not lines:
        return None
    t0 = min(b for _, b in lines)

    a_mat = []
    b_vec = []
    for g, b in lines:
        a_mat.append(g + [-v for v in g] + [Fraction(1)])
        b_vec.append(b - t0)
    objective = [Fraction(0)] * (2 * n) + [Fraction(1)]
    solution = ExactSimplex(a_mat, b_vec, objective).solve()
    if solution.status != STATUS_OPTIMAL:
        logger.debug("厳密解が得られませんでした: %s", solution.status)
        return None
    x = solution.x
    coeffs = [base[j] + scale[j] * (x[j] - x[n + j]) for j in range(n)]
    return pp.with_coeffs(float(v) for v in coeffs)


def solve_lp(
    problem: LpProblem,
    config: GeneratorConfig | None = None,
    seed: PolyPair | None = None,
    progress_callback: Callable[[int, int], None] | None = None,
) -> LpResult:
    """
    制約集合を満たす sin/cos 多項式の係数を求める

    サンプルした制約と全ての anchor 制約で解き、丸め込みの評価で全制約を検査し、最悪の違反を
    追加して解き直す。最後に余裕量の小さい行を有理数で解き直し、
    binary64係数を有理数演算で再検査する。

    Args:
        problem: 制約集合
        config: 生成の設定
        seed: 補正の基準となる係数（省略時はテイラー係数）
        progress_callback: 進捗コールバック(round, max_rounds)

    Returns:
        LpResult

    Raises:
        ValueError: 制約が空の場合
        LpInfeasibleError: 実行不可能な場合
    """
    config = config or GeneratorConfig()
    constraints = problem.constraints
    if not constraints:
        raise ValueError("制約が空です")
    seed = seed or taylor_seed(problem.sin_degree, problem.cos_degree, problem.func, problem.domain)
    if (seed.sin_degree, seed.cos_degree) != (problem.sin_degree, problem.cos_degree):
        raise ValueError("初期係数の次数が問題と一致しません")

    scaled = _Scaled(problem, seed)
    rng = np.random.default_rng(config.seed)
    total = len(constraints)
    size = min(total, config.sample_size)
    active = set(int(i) for i in rng.choice(total, size=size, replace=False))
    active.update(i for i, c in enumerate(constraints) if c.is_anchor)

    pp = seed
    t = -math.inf
    rounds = 0
    slacks = _rounded_slacks(constraints, pp)
    for rounds in range(1, config.max_rounds + 1):
        if progress_callback:
            progress_callback(rounds, config.max_rounds)
        ordered = sorted(active)
        z, t = scaled.solve(ordered)
        if t < 0:
            g = scaled.g[ordered] @ z
            up = (scaled.hi[ordered] - scaled.base[ordered]) / scaled.widths[ordered] - g
            low = (scaled.base[ordered] - scaled.lo[ordered]) / scaled.widths[ordered] + g
            tight = np.minimum(up, low) <= t + 1e-9 * max(1.0, abs(t))
            violators = [constraints[i] for i, hit in zip(ordered, tight) if hit]
            raise LpInfeasibleError(problem, violators)

        pp = seed.with_coeffs(scaled.coeffs(z))
        slacks = _rounded_slacks(constraints, pp)
        bad = [i for i in np.argsort(slacks) if slacks[i] < 0 and i not in active]
        logger.info(
            "LP %s 回目: t=%.3g 使用制約 %s 件、違反 %s 件",
            rounds,
            t,
            len(active),
            int((slacks < 0).sum()),
        )
        if not bad:
            break
        active.update(int(i) for i in bad[: config.max_violators])

    failing = [constraints[i] for i in range(total) if slacks[i] < 0]
    active_rows = [constraints[i] for i in sorted(active)]

    refined = False
    if not failing:
        order = sorted(active, key=lambda i: slacks[i])[: config.exact_rows]
        candidate = _exact_refine([constraints[i] for i in order], pp, scaled.col_scale)
        if candidate is not None:
            cand_slacks = _rounded_slacks(constraints, candidate)
            if (cand_slacks >= 0).all() and exact_check(active_rows, candidate):
                pp, slacks, refined = candidate, cand_slacks, True

    checked = exact_check(active_rows, pp)
    if not checked:
        logger.warning("有理数による再検査に失敗しました: %s/%s", problem.func.value, problem.domain)
    return LpResult(
        pp=pp,
        rounds=rounds,
        active_count=len(active),
        min_slack=float(slacks.min()),
        exact_check=checked,
        exact_refined=refined,
        failing=failing,
    )
