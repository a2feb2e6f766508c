"""浮動小数点演算による範囲縮小"""

import math

from crtrig.fpcore import fma
from crtrig.models import ReductionStrategy
from crtrig.rangered.base import RangeReducer, split_binary32
from crtrig.rangered.constants import PiConstants

# 部分積がこの指数より上のビットしか持たなければ512の倍数
_MAX_RELEVANT_LSB = 8
_PIECE53_SKIP_EXP = 55


def reduce_fp_small(a: float, c: PiConstants) -> tuple[int, float]:
    """
    π/128 <= a < 2**30 の縮小（28ビット片と53ビット残差の2項）

    Args:
        a: 正のbinary32値
        c: 256/π の定数

    Returns:
        (k, x')
    """
    p0 = c.pieces28[0] * a  # 28x24ビットなので誤差なし
    p1 = c.small_tail * a
    k = round(p0 + p1)
    r = (p0 - k) + p1
    # p1 の丸め誤差と small_tail の丸め誤差を足し戻す
    r += fma(c.small_tail, a, -p1) + c.small_tail_lo * a
    return k, r * c.pi_over_256


def _recenter(k: int, r: float) -> tuple[int, float]:
    n = round(r)
    return k + n, r - n


def reduce_fp28_large(a: float, c: PiConstants) -> tuple[int, float]:
    """
    a >= 2**30 の縮小（28ビット片、最大3つの部分積で k を求める）

    Returns:
        (k, x')
    """
    _, e = split_binary32(a)
    idx = 0
    while c.pieces28_exp[idx] + e > _MAX_RELEVANT_LSB:
        idx += 1

    k = 0
    frac = 0.0
    for j in range(idx, idx + 3):
        p = c.pieces28[j] * a
        pm = math.fmod(p, 512.0)
        ip = math.floor(pm)
        k += int(ip)
        frac += pm - ip

    ip = math.floor(frac)
    k += int(ip)
    frac -= ip
    frac += c.pieces28[idx + 3] * a
    ip = math.floor(frac)
    k += int(ip)
    frac -= ip
    k, r = _recenter(k, frac)
    return k, r * c.pi_over_256


def reduce_fp53_large(a: float, c: PiConstants) -> tuple[int, float]:
    """
    a >= 2**30 の縮小（53ビット片とFMA）

    最下位ビットの指数が55以上なら先頭の片は512の倍数にしか寄与しないため
    2番目の片から始める。

    Returns:
        (k, x')
    """
    _, e = split_binary32(a)
    idx = 1 if e >= _PIECE53_SKIP_EXP else 0
    pieces = c.pieces53

    k = 0
    f = 0.0
    for j in (idx, idx + 1):
        h = fma(pieces[j], a, f)
        big = float(round(h))
        k += int(math.fmod(big, 512.0))
        f = fma(pieces[j], a, f - big)

    r = fma(pieces[idx + 2], a, f)
    if idx + 3 < len(pieces):
        r = fma(pieces[idx + 3], a, r)
    k, r = _recenter(k, r)
    return k, r * c.pi_over_256


class FpV1Reducer(RangeReducer):
    """28ビット片による浮動小数点版"""

    strategy = ReductionStrategy.FPV1

    def reduce_small(self, a: float) -> tuple[int, float]:
        return reduce_fp_small(a, self.constants)

    def reduce_large(self, a: float) -> tuple[int, float]:
        return reduce_fp28_large(a, self.constants)


class FpV2Reducer(RangeReducer):
    """53ビット片とFMAによる浮動小数点版"""

    strategy = ReductionStrategy.FPV2

    def reduce_small(self, a: float) -> tuple[int, float]:
        return reduce_fp_small(a, self.constants)

    def reduce_large(self, a: float) -> tuple[int, float]:
        return reduce_fp53_large(a, self.constants)
