"""範囲縮小の抽象ベースクラス"""

import math
from abc import ABC, abstractmethod

from crtrig.models import (
    NO_REDUCTION_THRESHOLD,
    SMALL_LARGE_THRESHOLD,
    TABLE_MASK,
    ReducedInput,
    ReductionStrategy,
)
from crtrig.rangered.constants import PiConstants, gen_pi_constants


def split_binary32(a: float) -> tuple[int, int]:
    """正のbinary32値を (24ビット整数仮数, 最下位ビットの指数) に分解"""
    m, e = math.frexp(a)
    return int(m * (1 << 24)), e - 24


def fold_sign(negative: bool, k: int, xp: float) -> ReducedInput:
    """|x| の縮小結果に符号を戻す"""
    if negative:
        return ReducedInput(-xp, (-k) & TABLE_MASK)
    return ReducedInput(xp, k & TABLE_MASK)


class RangeReducer(ABC):
    """小さい入力用と大きい入力用の2経路を持つ範囲縮小"""

    strategy: ReductionStrategy

    def __init__(self, constants: PiConstants | None = None):
        self.constants = constants or gen_pi_constants()

    @abstractmethod
    def reduce_small(self, a: float) -> tuple[int, float]:
        """
        π/128 <= a < 2**30 の正の入力を縮小

        Returns:
            (k, x') ただし k は512で割った余りでなくてもよい
        """
        pass

    @abstractmethod
    def reduce_large(self, a: float) -> tuple[int, float]:
        """a >= 2**30 の正の入力を縮小"""
        pass

    def reduce(self, x: float) -> ReducedInput:
        """
        入力を (x', k') に縮小

        Args:
            x: binary32値を保持するbinary64値

        Returns:
            ReducedInput（|x| < π/128 なら縮小なし）

        Raises:
            ValueError: NaNまたは無限大の場合
        """
        if not math.isfinite(x):
            raise ValueError(f"縮小できない入力です: {x}")
        a = abs(x)
        if a < NO_REDUCTION_THRESHOLD:
            return ReducedInput(x, 0, needs_reduction=False)
        if a < SMALL_LARGE_THRESHOLD:
            k, xp = self.reduce_small(a)
        else:
            k, xp = self.reduce_large(a)
        return fold_sign(x < 0, k, xp)
