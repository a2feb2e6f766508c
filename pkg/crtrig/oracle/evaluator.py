"""Ziv方式の精度引き上げによる正しい丸めの参照値"""

import logging
import math

from mpmath import mp

from crtrig.fpcore import decode32, pattern_to_float, round_float, round_fraction
from crtrig.models import (
    ORACLE_MAX_BITS,
    ORACLE_START_BITS,
    REDUCTION_ORACLE_BITS,
    RO34,
    TABLE_SIZE,
    FpFormat,
    Func,
    ReducedInput,
    RoundingMode,
)
from crtrig.oracle.base import HpReduction, HpValue, OracleBackend, RoundingInterval
from crtrig.oracle.mp import MpmathBackend, mpf_to_fraction

logger = logging.getLogger(__name__)


class OraclePrecisionError(RuntimeError):
    """精度の上限まで上げても丸めが確定しない"""

    def __init__(self, func: Func, bits: int, max_bits: int):
        self.func = func
        self.bits = bits
        self.max_bits = max_bits
        super().__init__(
            f"{max_bits}ビットでも丸めが確定しません: {func.value}(0x{bits:08x})"
        )


class Oracle:
    """
    高精度評価エンジンを包み、34ビット round-to-odd 値・各フォーマットへの
    直接丸め・丸め区間・高精度縮小を提供する
    """

    def __init__(
        self,
        backend: OracleBackend | None = None,
        start_bits: int = ORACLE_START_BITS,
        max_bits: int = ORACLE_MAX_BITS,
    ):
        self.backend = backend or MpmathBackend()
        self.start_bits = start_bits
        self.max_bits = max_bits

    def hp_eval(self, func: Func, bits: int, prec: int | None = None) -> HpValue:
        """
        binary32パターン bits に対する f(x) を含む区間

        Args:
            func: 関数
            bits: 入力のbinary32ビットパターン
            prec: 作業精度（省略時は開始精度）

        Raises:
            ValueError: 入力がNaNまたは無限大、精度が128ビット未満の場合
        """
        prec = prec or self.start_bits
        if prec < ORACLE_START_BITS:
            raise ValueError(f"オラクル精度が不足しています: {prec}")
        t = decode32(bits)
        if not t.is_finite:
            raise ValueError(f"有限でない入力です: 0x{bits:08x}")
        if t.is_zero:
            return HpValue.exact(1 if func is Func.COS else 0, prec)
        return self.backend.evaluate(func, t.value, prec)

    def _resolve(self, func: Func, bits: int, fmt: FpFormat, mode: RoundingMode) -> int:
        t = decode32(bits)
        if not t.is_finite:
            return fmt.nan_pattern
        if t.is_zero:
            if func is Func.COS:
                return round_float(1.0, fmt, mode)
            return fmt.sign_mask if t.sign else 0

        prec = self.start_bits
        while prec <= self.max_bits:
            v = self.backend.evaluate(func, t.value, prec)
            lo = round_fraction(v.lo, fmt, mode)
            hi = round_fraction(v.hi, fmt, mode)
            if lo == hi:
                return lo
            logger.debug("精度を引き上げます: %s(0x%08x) %s bits", func.value, bits, prec)
            prec *= 2
        raise OraclePrecisionError(func, bits, self.max_bits)

    def ro34(self, func: Func, bits: int) -> float:
        """34ビット round-to-odd の正しい結果（binary64値）"""
        t = decode32(bits)
        if not t.is_finite:
            return math.nan
        return pattern_to_float(self._resolve(func, bits, RO34, RoundingMode.ODD), RO34)

    def correctly_rounded(self, func: Func, bits: int, fmt: FpFormat, mode: RoundingMode) -> int:
        """真値を fmt へ mode で直接丸めたビットパターン"""
        return self._resolve(func, bits, fmt, mode)

    def rounding_interval(self, func: Func, bits: int) -> RoundingInterval:
        """
        34ビット round-to-odd で正しい結果に丸まるbinary64値の区間

        結果が奇数なら両隣の偶数の34ビット値の間の開区間、34ビットで
        正確に表せる結果なら1点だけになる。
        """
        o = self.ro34(func, bits)
        if math.isnan(o):
            raise ValueError(f"有限でない入力です: 0x{bits:08x}")
        pattern = round_float(o, RO34, RoundingMode.RNE)
        if not pattern & 1:
            return RoundingInterval(o, o, func, bits)
        below = pattern_to_float(pattern - 1, RO34)
        above = pattern_to_float(pattern + 1, RO34)
        lo_end, hi_end = min(below, above), max(below, above)
        return RoundingInterval(
            math.nextafter(lo_end, math.inf),
            math.nextafter(hi_end, -math.inf),
            func,
            bits,
        )

    def hp_reduce(self, x: float, bits: int = REDUCTION_ORACLE_BITS) -> HpReduction:
        """
        256x/π を最近接整数 k と端数 r に分ける

        Raises:
            ValueError: 入力が有限でない、または精度が256ビット未満の場合
        """
        if not math.isfinite(x):
            raise ValueError(f"有限でない入力です: {x}")
        if bits < REDUCTION_ORACLE_BITS:
            raise ValueError(f"縮小の精度が不足しています: {bits}")
        _, e = math.frexp(x)
        with mp.workprec(bits + max(0, e) + 16):
            scaled = mp.mpf(256) * mp.mpf(x) / mp.pi
            k = int(mp.nint(scaled))
            r = mpf_to_fraction(scaled - k)
        return HpReduction(k % TABLE_SIZE, r, bits)


def reconstruction_error(
    x: float,
    reduced: ReducedInput,
    bits: int = REDUCTION_ORACLE_BITS,
) -> tuple[float, float]:
    """
    縮小結果 (x', k') を高精度で検算

    Returns:
        (256x/π - r と k' に合同な最寄り整数との距離, |r|)
        ただし r = x' * 256/π を高精度で再計算した値
    """
    _, e = math.frexp(x)
    with mp.workprec(bits + max(0, e) + 16):
        ratio = mp.mpf(256) / mp.pi
        scaled = mpf_to_fraction(mp.mpf(x) * ratio)
        r = mpf_to_fraction(mp.mpf(reduced.xp) * ratio)
    d = scaled - r
    m = round((d - reduced.kp) / TABLE_SIZE)
    dist = abs(d - (TABLE_SIZE * m + reduced.kp))
    return float(dist), float(abs(r))