"""整数演算による範囲縮小"""

from collections.abc import Callable

from crtrig.models import ReductionStrategy
from crtrig.rangered.base import RangeReducer, split_binary32
from crtrig.rangered.constants import MASK64, PiConstants

MASK32 = (1 << 32) - 1
HALF64 = 1 << 63

# k' の最下位ビットが上位ワード積の bit 0 に来る入力指数
_ALIGNED_EXP = 57

Mul64 = Callable[[int, int], tuple[int, int]]


def mul64x64(a: int, b: int) -> tuple[int, int]:
    """64x64 -> 128ビット乗算を (上位64ビット, 下位64ビット) で返す"""
    p = a * b
    return p >> 64, p & MASK64


def mul64x64_limbs(a: int, b: int) -> tuple[int, int]:
    """32ビットリムの筆算による64x64乗算（mul64x64 とビット単位で一致）"""
    a_lo, a_hi = a & MASK32, a >> 32
    b_lo, b_hi = b & MASK32, b >> 32

    ll = a_lo * b_lo
    lh = a_lo * b_hi
    hl = a_hi * b_lo
    hh = a_hi * b_hi

    mid = (ll >> 32) + (lh & MASK32) + (hl & MASK32)
    lo = ((mid & MASK32) << 32) | (ll & MASK32)
    hi = hh + (lh >> 32) + (hl >> 32) + (mid >> 32)
    return hi & MASK64, lo


def _check_shift(s: int) -> None:
    assert 0 < s < 64, f"シフト量が範囲外です: {s}"


def _nearest(k: int, frac: int, c: PiConstants, tail: float = 0.0) -> tuple[int, float]:
    """64ビット小数ワードから最近接整数へ補正して x' を求める（tail は切り捨てた下位桁）"""
    if frac >= HALF64:
        k += 1
        frac -= 1 << 64
    r = float(frac) * c.two_pow_minus_64 + tail
    return k, r * c.pi_over_256


def reduce_int_small(a: float, c: PiConstants, mul: Mul64 = mul64x64) -> tuple[int, float]:
    """
    π/128 <= a < 2**30 の縮小（40ビットずつの P1, P0 との整数積）

    Args:
        a: 正のbinary32値
        c: 256/π の定数
        mul: 64x64 乗算の実装

    Returns:
        (k, x')
    """
    m, exp = split_binary32(a)
    _check_shift(33 - exp)
    assert 0 <= 31 + exp < 64, f"シフト量が範囲外です: {31 + exp}"

    h1, l1 = mul(c.p1, m)
    h0, l0 = mul(c.p0, m)
    p1m = (h1 << 64) | l1
    p0m = (h0 << 64) | l0

    # P1*m * 2**40 + P0*m を上位 hi と下位40ビット lo に分ける
    hi = p1m + (p0m >> 40)
    lo = (p0m << 24) & MASK64

    k = hi >> (33 - exp)
    frac = ((hi << (31 + exp)) & MASK64) | (lo >> (33 - exp))
    return _nearest(k, frac, c, c.int_small_tail * a)


def reduce_int_large(a: float, c: PiConstants, mul: Mul64 = mul64x64) -> tuple[int, float]:
    """
    a >= 2**30 の縮小（192ビットの 256/π との3つの128ビット部分積）

    Returns:
        (k, x')
    """
    m, exp = split_binary32(a)
    w_hi, w_mid, w_lo = c.words64

    h0, l0 = mul(m, w_lo)
    h1, l1 = mul(m, w_mid)
    h2, l2 = mul(m, w_hi)

    word0 = l0
    t = l1 + h0
    word1, carry = t & MASK64, t >> 64
    t = l2 + h1 + carry
    word2 = t & MASK64

    if exp < _ALIGNED_EXP:
        s = _ALIGNED_EXP - exp
        _check_shift(s)
        k = word2 >> s
        frac = ((word2 << (64 - s)) | (word1 >> s)) & MASK64
    elif exp == _ALIGNED_EXP:
        k = word2
        frac = word1
    else:
        s = exp - _ALIGNED_EXP
        _check_shift(s)
        k = ((word2 << s) | (word1 >> (64 - s))) & MASK64
        frac = ((word1 << s) | (word0 >> (64 - s))) & MASK64
    return _nearest(k, frac, c)


class IntReducer(RangeReducer):
    """整数演算版"""

    strategy = ReductionStrategy.INT

    def __init__(self, constants: PiConstants | None = None, mul: Mul64 = mul64x64):
        super().__init__(constants)
        self.mul = mul

    def reduce_small(self, a: float) -> tuple[int, float]:
        return reduce_int_small(a, self.constants, self.mul)

    def reduce_large(self, a: float) -> tuple[int, float]:
        return reduce_int_large(a, self.constants, self.mul)
