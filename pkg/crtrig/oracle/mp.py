"""mpmath による汎用の多倍長評価"""

from fractions import Fraction

from mpmath import mp

from crtrig.models import Func
from crtrig.oracle.base import HpValue, OracleBackend

_FUNCS = {
    Func.SIN: mp.sin,
    Func.COS: mp.cos,
    Func.TAN: mp.tan,
}


def mpf_to_fraction(v) -> Fraction:
    """mpfを正確な有理数に変換"""
    man, exp = v.man_exp
    man, exp = int(man), int(exp)
    q = Fraction(man << exp) if exp >= 0 else Fraction(man, 1 << -exp)
    return -q if v < 0 else q


def mpf_to_float(v) -> float:
    """mpfを最近接偶数丸めでbinary64に変換"""
    return float(mpf_to_fraction(v))


class MpmathBackend(OracleBackend):
    """mpmath の sin/cos/tan（数ulpの誤差を区間幅として見込む）"""

    name = "mpmath"

    def evaluate(self, func: Func, x: float, bits: int) -> HpValue:
        with mp.workprec(bits):
            v = _FUNCS[func](mp.mpf(x))
        center = mpf_to_fraction(v)
        radius = abs(center) / (1 << (bits - 2))
        return HpValue(center, radius, bits)
