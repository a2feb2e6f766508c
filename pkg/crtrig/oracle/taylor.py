"""固定小数点整数演算による引数縮小付きテイラー級数評価"""

from fractions import Fraction
from functools import lru_cache

from crtrig.fpcore import float_parts
from crtrig.models import Func
from crtrig.oracle.base import HpValue, OracleBackend

_GUARD_BITS = 32
_EXTRA_BITS = 64


def _arctan_inv(n: int, one: int) -> int:
    """arctan(1/n) * one を級数で計算"""
    total = term = one // n
    n2 = n * n
    k = 1
    sign = 1
    while term:
        term //= n2
        k += 2
        sign = -sign
        total += sign * (term // k)
    return total


@lru_cache(maxsize=64)
def pi_fixed(frac_bits: int) -> int:
    """π * 2**frac_bits（誤差2単位以内）をMachinの公式で計算"""
    one = 1 << (frac_bits + _GUARD_BITS)
    pi = 4 * (4 * _arctan_inv(5, one) - _arctan_inv(239, one))
    return pi >> _GUARD_BITS


def _sin_cos_fixed(r: int, frac_bits: int) -> tuple[int, int, int]:
    """
    |r| <= π/4 の固定小数点値に対する sin, cos

    Returns:
        (sin, cos, 誤差上限) いずれも 2**-frac_bits 単位
    """
    one = 1 << frac_bits
    r2 = (r * r) >> frac_bits

    s = term = r
    n = 1
    while term:
        term = -((term * r2) >> frac_bits) // ((2 * n) * (2 * n + 1))
        s += term
        n += 1
    terms = n

    c = term = one
    n = 1
    while term:
        term = -((term * r2) >> frac_bits) // ((2 * n - 1) * (2 * n))
        c += term
        n += 1
    terms = max(terms, n)

    return s, c, 4 * terms + 8


class TaylorBackend(OracleBackend):
    """π/2 での正確な引数縮小とテイラー級数による専用評価"""

    name = "taylor"

    def evaluate(self, func: Func, x: float, bits: int) -> HpValue:
        negative, man, exp = float_parts(x)
        msb = exp + man.bit_length()
        frac_bits = max(bits + _EXTRA_BITS + max(0, -msb), -exp)
        xf = man << (exp + frac_bits)

        # 商 k のビット数だけ π/2 を余分に持つ
        k_bits = max(0, msb + 2)
        wide = frac_bits + k_bits + 8
        half_pi = pi_fixed(wide) >> 1
        xw = xf << (wide - frac_bits)
        k = (2 * xw + half_pi) // (2 * half_pi)
        r = (xw - k * half_pi) >> (wide - frac_bits)

        s, c, err = _sin_cos_fixed(r, frac_bits)
        quadrant = k & 3
        sin_v = (s, c, -s, -c)[quadrant]
        cos_v = (c, -s, -c, s)[quadrant]
        scale = 1 << frac_bits

        if func is Func.SIN:
            center = Fraction(-sin_v if negative else sin_v, scale)
            return HpValue(center, Fraction(err, scale), bits)
        if func is Func.COS:
            return HpValue(Fraction(cos_v, scale), Fraction(err, scale), bits)

        sv = Fraction(sin_v, scale)
        cv = Fraction(cos_v, scale)
        e = Fraction(err, scale)
        if abs(cv) <= e:
            # 分母の符号が確定しないので精度を上げさせる
            return HpValue(Fraction(0), Fraction(1 << 64), bits)
        center = sv / cv
        radius = (e + abs(center) * e) / (abs(cv) - e)
        return HpValue(-center if negative else center, radius, bits)
