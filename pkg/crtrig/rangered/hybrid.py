"""小さい入力は浮動小数点、大きい入力は整数で縮小するハイブリッド版"""

from crtrig.models import ReductionStrategy
from crtrig.rangered.base import RangeReducer
from crtrig.rangered.constants import PiConstants
from crtrig.rangered.fp import reduce_fp_small
from crtrig.rangered.integer import Mul64, mul64x64, reduce_int_large


class HybridReducer(RangeReducer):
    """|x| < 2**30 は浮動小数点版、それ以上は整数版"""

    strategy = ReductionStrategy.HYBRID

    def __init__(self, constants: PiConstants | None = None, mul: Mul64 = mul64x64):
        super().__init__(constants)
        self.mul = mul

    def reduce_small(self, a: float) -> tuple[int, float]:
        return reduce_fp_small(a, self.constants)

    def reduce_large(self, a: float) -> tuple[int, float]:
        return reduce_int_large(a, self.constants, self.mul)
