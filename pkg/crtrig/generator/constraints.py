"""丸め区間から縮小後の入力に対する線形制約を作る"""

import logging
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from fractions import Fraction

from mpmath import mp

from crtrig.fpcore import decode32
from crtrig.kernels import TrigKernel
from crtrig.models import (
    ANCHOR_POINTS,
    ANCHOR_TOLERANCE,
    DEFAULT_COS_DEGREE,
    DEFAULT_MARGIN_ULPS,
    DEFAULT_SIN_DEGREE,
    EMPTY_INTERVAL_RATIO,
    NO_REDUCTION_THRESHOLD,
    TAN_SIGN_MARGIN,
    TINY_THRESHOLD,
    Func,
    ReductionStrategy,
)
from crtrig.oracle import Oracle
from crtrig.poly import DOMAIN_REDUCED, DOMAIN_SMALL, PolyPair, eval_cos_poly, eval_sin_poly

logger = logging.getLogger(__name__)

_MAX_MARGIN_HALVINGS = 16

# 入力に由来しない制約の input
ANCHOR_INPUT = -1


@dataclass(frozen=True)
class Constraint:
    """lo <= a_sin * P_s(xp) + a_cos * P_c(xp) <= hi"""

    xp: float
    a_sin: float
    a_cos: float
    lo: float
    hi: float
    func: Func
    input: int
    domain: str = DOMAIN_REDUCED
    scale: float = 1.0  # 余裕量を測る単位（区間の半幅）

    @property
    def is_anchor(self) -> bool:
        return self.input == ANCHOR_INPUT

    def row(self, n_sin: int, n_cos: int) -> list[float]:
        """係数ベクトルに掛かる行（binary64）"""
        x2 = self.xp * self.xp
        sin_row = [self.a_sin * self.xp * x2**i for i in range(n_sin)]
        cos_row = [self.a_cos * x2**i for i in range(n_cos)]
        return sin_row + cos_row

    def exact_row(self, n_sin: int, n_cos: int) -> list[Fraction]:
        xp = Fraction(self.xp)
        a_sin = Fraction(self.a_sin)
        a_cos = Fraction(self.a_cos)
        x2 = xp * xp
        sin_row = [a_sin * xp * x2**i for i in range(n_sin)]
        cos_row = [a_cos * x2**i for i in range(n_cos)]
        return sin_row + cos_row

    def evaluate(self, pp: PolyPair) -> float:
        """実行時と同じ丸め順序での値"""
        return self.a_sin * eval_sin_poly(pp, self.xp) + self.a_cos * eval_cos_poly(pp, self.xp)

    def slack(self, value: float) -> float:
        """余裕量（scale単位、負なら違反）"""
        return min(value - self.lo, self.hi - value) / self.scale

    def exact_holds(self, coeffs: list[Fraction], n_sin: int) -> bool:
        row = self.exact_row(n_sin, len(coeffs) - n_sin)
        value = sum(a * c for a, c in zip(row, coeffs))
        return (self.lo == -math.inf or Fraction(self.lo) <= value) and (
            self.hi == math.inf or value <= Fraction(self.hi)
        )


@dataclass
class LpProblem:
    """1つの関数・定義域についての制約集合"""

    constraints: list[Constraint]
    func: Func
    domain: str = DOMAIN_REDUCED
    sin_degree: int = DEFAULT_SIN_DEGREE
    cos_degree: int = DEFAULT_COS_DEGREE

    @property
    def n_sin(self) -> int:
        return self.sin_degree // 2 + 1

    @property
    def n_cos(self) -> int:
        return self.cos_degree // 2 + 1

    @property
    def n_vars(self) -> int:
        return self.n_sin + self.n_cos


@dataclass
class ConstraintSet:
    """make_constraints の結果"""

    constraints: list[Constraint] = field(default_factory=list)
    hard_inputs: list[int] = field(default_factory=list)
    margin_ulps: float = DEFAULT_MARGIN_ULPS
    skipped: int = 0

    def __iter__(self):
        return iter(self.constraints)

    def __len__(self) -> int:
        return len(self.constraints)

    def problem(
        self,
        func: Func,
        domain: str,
        sin_degree: int = DEFAULT_SIN_DEGREE,
        cos_degree: int = DEFAULT_COS_DEGREE,
        anchors: bool = True,
    ) -> LpProblem:
        """
        domain の制約だけを集めたLP

        入力由来の制約があれば、多項式を sin, cos の近くに留める
        anchor_constraints を加える。
        """
        rows = [c for c in self.constraints if c.domain == domain]
        if rows and anchors:
            rows += anchor_constraints(func, domain)
        return LpProblem(
            rows,
            func,
            domain,
            sin_degree,
            cos_degree,
        )


@dataclass(frozen=True)
class _Sample:
    bits: int
    xp: float
    kp: int | None
    lo: float
    hi: float
    cos_sign: float = 1.0
    cos_mag: float = 1.0


def _shrink(lo: float, hi: float, margin_ulps: float) -> tuple[float, float]:
    mu = margin_ulps * math.ulp(max(abs(lo), abs(hi)))
    return lo + mu, hi - mu


def _multipliers(func: Func, kernel: TrigKernel, kp: int | None) -> tuple[float, float]:
    """出力補正の式から (a_sin, a_cos) を取り出す"""
    if kp is None:
        return (1.0, 0.0) if func is Func.SIN else (0.0, 1.0)
    table = kernel.artifacts.table
    if func is Func.SIN:
        return table.cos_entry(kp), table.sin_entry(kp)
    return -table.sin_entry(kp), table.cos_entry(kp)


def _emit(sample: _Sample, func: Func, kernel: TrigKernel, margin_ulps: float) -> list[Constraint]:
    domain = DOMAIN_SMALL if sample.kp is None else DOMAIN_REDUCED
    lo, hi = _shrink(sample.lo, sample.hi, margin_ulps)
    if lo > hi:
        return []

    if func is not Func.TAN:
        a_sin, a_cos = _multipliers(func, kernel, sample.kp)
        return [
            Constraint(sample.xp, a_sin, a_cos, lo, hi, func, sample.bits, domain, (hi - lo) / 2 or 1.0)
        ]

    # tan = S/C を cos の符号で分母を払って S - l*C, S - h*C の符号条件にする
    s_sin, s_cos = _multipliers(Func.SIN, kernel, sample.kp)
    c_sin, c_cos = _multipliers(Func.COS, kernel, sample.kp)
    scale = (hi - lo) / 2 * sample.cos_mag or 1.0
    rows = []
    for bound, lower_side in ((lo, True), (hi, False)):
        a_sin = s_sin - bound * c_sin
        a_cos = s_cos - bound * c_cos
        nonneg = lower_side == (sample.cos_sign > 0)
        # 丸め込み評価とのずれの分だけ符号条件を内側に寄せる
        margin = TAN_SIGN_MARGIN * scale
        lo_b, hi_b = (margin, math.inf) if nonneg else (-math.inf, -margin)
        rows.append(Constraint(sample.xp, a_sin, a_cos, lo_b, hi_b, func, sample.bits, domain, scale))
    return rows


def make_constraints(
    func: Func,
    inputs: Iterable[int],
    strategy: ReductionStrategy = ReductionStrategy.HYBRID,
    kernel: TrigKernel | None = None,
    oracle: Oracle | None = None,
    margin_ulps: float = DEFAULT_MARGIN_ULPS,
    progress_callback: Callable[[int, int], None] | None = None,
) -> ConstraintSet:
    """
    各入力の丸め区間を縮小後の入力に対する線形制約に変換

    空になる区間が0.1%を超える間は余裕量を半分にする。それでも空の入力は
    hard_inputs として報告し、制約には含めない。

    Args:
        func: 関数
        inputs: binary32ビットパターン
        strategy: 実行時と同じ範囲縮小の戦略
        kernel: テーブルと縮小器を持つカーネル
        oracle: 丸め区間を求めるオラクル
        margin_ulps: 区間の両端から削るbinary64 ulp数
        progress_callback: 進捗コールバック(current, total)

    Returns:
        ConstraintSet
    """
    kernel = kernel or TrigKernel()
    oracle = oracle or Oracle()
    reducer = kernel.reducer(strategy)
    inputs = list(inputs)

    samples: list[_Sample] = []
    skipped = 0
    for i, bits in enumerate(inputs):
        if progress_callback:
            progress_callback(i + 1, len(inputs))
        t = decode32(bits)
        x = t.value
        # 特殊値・ゼロ・極小入力はカーネルが直接処理する
        if not t.is_finite or t.is_zero or abs(x) < TINY_THRESHOLD:
            skipped += 1
            continue
        interval = oracle.rounding_interval(func, bits)
        if abs(x) < NO_REDUCTION_THRESHOLD:
            xp, kp = x, None
        else:
            reduced = reducer.reduce(x)
            xp, kp = reduced.xp, reduced.kp
        cos_sign = cos_mag = 1.0
        if func is Func.TAN:
            c = oracle.ro34(Func.COS, bits)
            cos_sign, cos_mag = math.copysign(1.0, c), abs(c)
        samples.append(_Sample(bits, xp, kp, interval.lo, interval.hi, cos_sign, cos_mag))

    for _ in range(_MAX_MARGIN_HALVINGS):
        empty = sum(1 for s in samples if _emptied(s, margin_ulps))
        if not samples or empty <= EMPTY_INTERVAL_RATIO * len(samples):
            break
        logger.info("空の区間が多いため余裕量を半分にします: %s ulp (%s件)", margin_ulps, empty)
        margin_ulps /= 2

    result = ConstraintSet(margin_ulps=margin_ulps, skipped=skipped)
    for s in samples:
        rows = _emit(s, func, kernel, margin_ulps)
        if rows:
            result.constraints.extend(rows)
        else:
            result.hard_inputs.append(s.bits)
    logger.info(
        "制約を作成しました: %s 件（難しい入力 %s 件、除外 %s 件）",
        len(result.constraints),
        len(result.hard_inputs),
        skipped,
    )
    return result


def _emptied(sample: _Sample, margin_ulps: float) -> bool:
    lo, hi = _shrink(sample.lo, sample.hi, margin_ulps)
    return lo > hi


def anchor_constraints(
    func: Func,
    domain: str,
    points: int = ANCHOR_POINTS,
    tolerance: float = ANCHOR_TOLERANCE,
) -> list[Constraint]:
    """
    定義域の等間隔の点で P_s, P_c を sin, cos の相対 tolerance 以内に保つ制約

    P_s は奇関数、P_c は偶関数なので正の側の点だけを使う。
    """
    width = math.pi / 512 if domain == DOMAIN_REDUCED else NO_REDUCTION_THRESHOLD
    rows = []
    with mp.workprec(128):
        for i in range(1, points + 1):
            xp = width * i / points
            for value, a_sin, a_cos in ((mp.sin(xp), 1.0, 0.0), (mp.cos(xp), 0.0, 1.0)):
                v = float(value)
                w = tolerance * v
                rows.append(Constraint(xp, a_sin, a_cos, v - w, v + w, func, ANCHOR_INPUT, domain, w))
    return rows
