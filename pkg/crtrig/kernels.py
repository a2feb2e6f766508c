"""sin, cos, tan の公開エントリーポイント"""

import logging
import math
from dataclasses import replace
from functools import lru_cache

from crtrig.artifact_loader import Artifacts, load_artifacts
from crtrig.fpcore import bits_to_f32, round_from_34, round_to_odd_34
from crtrig.models import (
    BINARY32,
    GUARD_EVAL_ERROR,
    GUARD_MAX_RELATIVE,
    GUARD_REDUCTION_ERROR,
    GUARD_SMALL_COS_ERROR,
    GUARD_SMALL_SIN_ERROR,
    NO_REDUCTION_THRESHOLD,
    TINY_OFFSET,
    TINY_THRESHOLD,
    FpFormat,
    Func,
    ReductionStrategy,
    RoundingMode,
)
from crtrig.oracle import Oracle, create_oracle
from crtrig.poly import (
    PolyPair,
    compensate_cos,
    compensate_sin,
    divide,
    eval_cos_poly,
    eval_sin_poly,
)
from crtrig.rangered import RangeReducer, create_reducer

logger = logging.getLogger(__name__)

# binary64 の最後の加算・除算の丸め
ROUNDING_ERROR = 2.0**-52


def _quotient_error(num: float, num_err: float, den: float, den_err: float) -> float:
    """num / den の誤差の上限（分母・分子の相対誤差が大きければ inf）"""
    if num == 0.0 or den == 0.0:
        return math.inf
    rel_num = num_err / abs(num)
    rel_den = den_err / abs(den)
    if max(rel_num, rel_den) > GUARD_MAX_RELATIVE:
        return math.inf
    return abs(num / den) * ((rel_num + rel_den) * 1.001 + ROUNDING_ERROR)


class TrigKernel:
    """
    成果物を保持し、34ビット round-to-odd 値と各フォーマットの結果を計算する

    guard が有効なときは binary64 の計算値に誤差幅を付け、幅の両端が同じ
    34ビット値に丸まらなければオラクルで求め直す。guard=None なら関数ごとに
    係数が未証明（テイラー初期値）のときだけ有効にする。
    """

    def __init__(
        self,
        artifacts: Artifacts | None = None,
        strategy: ReductionStrategy = ReductionStrategy.HYBRID,
        guard: bool | None = None,
    ):
        self.artifacts = artifacts or load_artifacts()
        self.strategy = ReductionStrategy(strategy)
        self.guard = guard
        self._reducers: dict[ReductionStrategy, RangeReducer] = {}
        self._oracle: Oracle | None = None
        self.fallbacks = 0

    def reducer(self, strategy: ReductionStrategy | None = None) -> RangeReducer:
        strategy = ReductionStrategy(strategy or self.strategy)
        reducer = self._reducers.get(strategy)
        if reducer is None:
            reducer = create_reducer(strategy, self.artifacts.constants)
            self._reducers[strategy] = reducer
        return reducer

    def guarded(self, func: Func) -> bool:
        """func の結果に誤差幅の検査を入れるか"""
        if self.guard is not None:
            return self.guard
        return not self.artifacts.polys[func].certified

    def with_poly(self, pp: PolyPair) -> "TrigKernel":
        """pp の関数・定義域の多項式だけを差し替えたカーネル（誤差幅の検査なし）"""
        polys = dict(self.artifacts.polys)
        polys[pp.func] = polys[pp.func].replaced(pp)
        return TrigKernel(replace(self.artifacts, polys=polys), self.strategy, guard=False)

    def _oracle_ro34(self, func: Func, bits: int) -> float:
        if self._oracle is None:
            self._oracle = create_oracle()
        self.fallbacks += 1
        logger.debug("オラクルで再計算します: %s 0x%08x", func.value, bits)
        return self._oracle.ro34(func, bits)

    def approx(
        self,
        func: Func,
        x: float,
        strategy: ReductionStrategy | None = None,
    ) -> tuple[float, float]:
        """
        |x| >= TINY_THRESHOLD の有限な x に対する binary64 の近似値と誤差の上限

        誤差の上限は係数がテイラー初期値程度の精度を持つ場合の見積もり。
        上限が求まらない場合は inf を返す。
        """
        polys = self.artifacts.polys[func]
        if abs(x) < NO_REDUCTION_THRESHOLD:
            pp = polys.small
            s = eval_sin_poly(pp, x)
            c = eval_cos_poly(pp, x)
            es = GUARD_SMALL_SIN_ERROR * abs(s)
            ec = GUARD_SMALL_COS_ERROR
            if func is Func.SIN:
                return s, es
            if func is Func.COS:
                return c, ec
            return divide(s, c), _quotient_error(s, es, c, ec)

        reduced = self.reducer(strategy).reduce(x)
        pp = polys.reduced
        s = eval_sin_poly(pp, reduced.xp)
        c = eval_cos_poly(pp, reduced.xp)
        table = self.artifacts.table
        ts = table.sin_entry(reduced.kp)
        tc = table.cos_entry(reduced.kp)
        # 積の丸めと多項式の誤差、縮小誤差による sin(x'), cos(x') のずれ
        term = GUARD_EVAL_ERROR * (abs(ts * c) + abs(tc * s))
        shift = (abs(ts) + abs(tc)) * GUARD_REDUCTION_ERROR
        if func is Func.SIN:
            y = compensate_sin(reduced.kp, s, c, table)
            return y, term + shift + ROUNDING_ERROR * abs(y)
        if func is Func.COS:
            y = compensate_cos(reduced.kp, s, c, table)
            return y, term + shift + ROUNDING_ERROR * abs(y)
        ys = compensate_sin(reduced.kp, s, c, table)
        yc = compensate_cos(reduced.kp, s, c, table)
        es = term + shift + ROUNDING_ERROR * abs(ys)
        ec = term + shift + ROUNDING_ERROR * abs(yc)
        return divide(ys, yc), _quotient_error(ys, es, yc, ec)

    def eval34(
        self,
        func: Func,
        bits: int,
        strategy: ReductionStrategy | None = None,
    ) -> float:
        """
        34ビット round-to-odd の結果

        Args:
            func: 関数
            bits: 入力のbinary32ビットパターン
            strategy: 範囲縮小の戦略（省略時はカーネルの既定）

        Returns:
            34ビットで表現可能なbinary64値（NaN・無限大の入力はNaN）
        """
        x = bits_to_f32(bits)
        if not math.isfinite(x):
            return math.nan
        if x == 0.0:
            return 1.0 if func is Func.COS else x

        if abs(x) < TINY_THRESHOLD:
            # 真値は x（cosは1）のすぐ内側にあるので奇数側の隣接値に丸まる
            if func is Func.SIN:
                return round_to_odd_34(x - x * TINY_OFFSET)
            if func is Func.TAN:
                return round_to_odd_34(x + x * TINY_OFFSET)
            return round_to_odd_34(1.0 - TINY_OFFSET)

        y, err = self.approx(func, x, strategy)
        if not self.guarded(func):
            return round_to_odd_34(y)
        lo = round_to_odd_34(y - err)
        hi = round_to_odd_34(y + err)
        if lo == hi and math.isfinite(lo):
            return lo
        return self._oracle_ro34(func, bits)

    def eval(
        self,
        func: Func,
        bits: int,
        fmt: FpFormat = BINARY32,
        mode: RoundingMode = RoundingMode.RNE,
    ) -> int:
        """
        fmt へ mode で正しく丸めた結果のビットパターン

        Args:
            func: 関数
            bits: 入力のbinary32ビットパターン（狭いフォーマットの値は拡張済みのもの）
            fmt: 32ビット以下の出力フォーマット
            mode: 丸めモード
        """
        return round_from_34(self.eval34(func, bits), fmt, mode)


@lru_cache(maxsize=1)
def default_kernel() -> TrigKernel:
    """既定の成果物によるハイブリッド戦略のカーネル（1回だけ作成）"""
    return TrigKernel(load_artifacts())


def sin(bits: int) -> int:
    """binary32の正しく丸めた sin（最近接偶数丸め）"""
    return default_kernel().eval(Func.SIN, bits)


def cos(bits: int) -> int:
    """binary32の正しく丸めた cos（最近接偶数丸め）"""
    return default_kernel().eval(Func.COS, bits)


def tan(bits: int) -> int:
    """binary32の正しく丸めた tan（最近接偶数丸め）"""
    return default_kernel().eval(Func.TAN, bits)
