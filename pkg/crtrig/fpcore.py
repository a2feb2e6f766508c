"""浮動小数点フォーマットのビット操作と丸め"""

import math
import struct
import sys
from fractions import Fraction

from crtrig.models import (
    BINARY32,
    RO34,
    FpFormat,
    FpTriple,
    RoundingMode,
)

if sys.version_info >= (3, 13):
    from math import fma
else:
    from pyfma import fma

__all__ = [
    "fma",
    "decode",
    "decode32",
    "encode",
    "round_scaled",
    "round_float",
    "round_to_odd_34",
    "round_from_34",
    "pattern_to_float",
    "widen",
    "f32_to_bits",
    "bits_to_f32",
    "f64_to_bits",
    "bits_to_f64",
    "float_parts",
    "format_hex",
    "round_fraction",
    "same_value",
]


def f32_to_bits(x: float) -> int:
    """binary32で表現可能な値をビットパターンに変換"""
    return struct.unpack("<I", struct.pack("<f", x))[0]


def bits_to_f32(bits: int) -> float:
    """binary32ビットパターンをPythonのfloatに変換"""
    return struct.unpack("<f", struct.pack("<I", bits & 0xFFFFFFFF))[0]


def f64_to_bits(x: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", x))[0]


def bits_to_f64(bits: int) -> float:
    return struct.unpack("<d", struct.pack("<Q", bits))[0]


def decode(bits: int, fmt: FpFormat) -> FpTriple:
    """
    任意フォーマットのビットパターンを分解

    Args:
        bits: ビットパターン（fmt.total_bits ビット）
        fmt: フォーマット

    Returns:
        符号・バイアス付き指数・仮数部フィールド
    """
    bits &= fmt.mask
    return FpTriple(
        sign=bits >> (fmt.total_bits - 1),
        biased_exp=(bits >> fmt.frac_bits) & 0xFF,
        significand=bits & ((1 << fmt.frac_bits) - 1),
        fmt=fmt,
    )


def decode32(bits: int) -> FpTriple:
    """binary32ビットパターンを分解"""
    return decode(bits, BINARY32)


def encode(triple: FpTriple) -> int:
    """分解した値をビットパターンに戻す"""
    fmt = triple.fmt
    return (
        (triple.sign << (fmt.total_bits - 1))
        | (triple.biased_exp << fmt.frac_bits)
        | triple.significand
    )


def _round_up(mode: RoundingMode, negative: bool, lsb: int, round_bit: int, sticky: bool) -> bool:
    if mode is RoundingMode.RNE:
        return bool(round_bit) and (sticky or bool(lsb))
    if mode is RoundingMode.RNA:
        return bool(round_bit)
    if mode is RoundingMode.RTP:
        return (bool(round_bit) or sticky) and not negative
    if mode is RoundingMode.RTN:
        return (bool(round_bit) or sticky) and negative
    return False


def _overflow(negative: bool, fmt: FpFormat, mode: RoundingMode) -> int:
    sign = fmt.sign_mask if negative else 0
    if mode in (RoundingMode.RNE, RoundingMode.RNA):
        to_inf = True
    elif mode is RoundingMode.RTP:
        to_inf = not negative
    elif mode is RoundingMode.RTN:
        to_inf = negative
    else:
        to_inf = False
    return sign | (fmt.inf_pattern if to_inf else fmt.max_finite_pattern)


def round_scaled(
    negative: bool,
    mantissa: int,
    exponent: int,
    fmt: FpFormat,
    mode: RoundingMode,
) -> int:
    """
    mantissa * 2**exponent の絶対値を持つ値をフォーマットに丸める

    切り捨て値・丸めビット・スティッキービットを取り出し、モードに従って
    繰り上げる。非正規化数も最小指数で同じ手順を使う。

    Args:
        negative: 負の値か
        mantissa: 非負整数の仮数
        exponent: 2の指数
        fmt: 丸め先のフォーマット
        mode: 丸めモード

    Returns:
        fmtのビットパターン
    """
    sign = fmt.sign_mask if negative else 0
    if mantissa == 0:
        return sign

    p = fmt.precision
    msb_exp = mantissa.bit_length() - 1 + exponent
    quantum = max(msb_exp - (p - 1), fmt.emin - (p - 1))
    shift = quantum - exponent

    if shift <= 0:
        truncated = mantissa << -shift
        round_bit = 0
        sticky = False
    else:
        truncated = mantissa >> shift
        round_bit = (mantissa >> (shift - 1)) & 1
        sticky = (mantissa & ((1 << (shift - 1)) - 1)) != 0

    if mode is RoundingMode.ODD:
        if round_bit or sticky:
            truncated |= 1
    elif _round_up(mode, negative, truncated & 1, round_bit, sticky):
        truncated += 1

    if truncated >> p:
        # 繰り上がりで桁があふれた
        truncated >>= 1
        quantum += 1

    hidden = 1 << (p - 1)
    if truncated >= hidden:
        biased = quantum + (p - 1) + fmt.bias
        if biased > fmt.emax + fmt.bias:
            return _overflow(negative, fmt, mode)
        return sign | (biased << fmt.frac_bits) | (truncated - hidden)
    return sign | truncated


def float_parts(v: float) -> tuple[bool, int, int]:
    """有限のbinary64値を (負か, 整数仮数, 指数) に分解"""
    m, e = math.frexp(abs(v))
    return math.copysign(1.0, v) < 0, int(m * (1 << 53)), e - 53


def round_float(v: float, fmt: FpFormat, mode: RoundingMode) -> int:
    """binary64値をフォーマットに丸めてビットパターンを返す"""
    if math.isnan(v):
        return fmt.nan_pattern
    negative = math.copysign(1.0, v) < 0
    if math.isinf(v):
        return (fmt.sign_mask if negative else 0) | fmt.inf_pattern
    _, mantissa, exponent = float_parts(v)
    return round_scaled(negative, mantissa, exponent, fmt, mode)


def pattern_to_float(bits: int, fmt: FpFormat) -> float:
    """ビットパターンを正確なbinary64値に変換"""
    return decode(bits, fmt).value


def round_to_odd_34(v: float) -> float:
    """
    34ビット形式への round-to-odd

    34ビットで表現可能ならそのまま、そうでなければ仮数の最下位ビットが1の
    隣接値を返す。特殊値はそのまま通す。
    """
    if not math.isfinite(v):
        return v
    return pattern_to_float(round_float(v, RO34, RoundingMode.ODD), RO34)


def round_from_34(v34: float, fmt: FpFormat, mode: RoundingMode) -> int:
    """
    34ビット round-to-odd 値を目的のフォーマットへ丸める

    Args:
        v34: 34ビットで表現可能なbinary64値
        fmt: 32ビット以下のフォーマット
        mode: 5つのIEEE丸めモードのいずれか

    Returns:
        fmtのビットパターン
    """
    if fmt.total_bits > 32:
        raise ValueError(f"丸め先のフォーマットが広すぎます: {fmt.total_bits}")
    if mode is RoundingMode.ODD:
        raise ValueError(f"ユーザー向けではない丸めモードです: {mode.value}")
    return round_float(v34, fmt, mode)


def widen(bits: int, fmt: FpFormat, to: FpFormat = BINARY32) -> int:
    """狭いフォーマットのパターンをより広いフォーマットへ正確に拡張"""
    t = decode(bits, fmt)
    if t.is_nan:
        return to.nan_pattern
    sign = to.sign_mask if t.sign else 0
    if t.is_inf:
        return sign | to.inf_pattern
    return round_scaled(bool(t.sign), t.integer_significand, t.lsb_exp, to, RoundingMode.RNE)


def format_hex(x: float) -> str:
    """末尾の0を除いたC99形式の16進浮動小数点リテラル"""
    text = x.hex()
    if "." not in text:
        return text
    head, tail = text.split(".", 1)
    frac, exp = tail.split("p", 1)
    frac = frac.rstrip("0")
    return f"{head}.{frac}p{exp}" if frac else f"{head}p{exp}"


def round_fraction(q: Fraction, fmt: FpFormat, mode: RoundingMode) -> int:
    """
    有理数をフォーマットに丸める

    下位に剰余の有無を表すビットを1つ付けて round_scaled に渡す。

    Args:
        q: 丸める値（0は正のゼロになる）
        fmt: 丸め先のフォーマット
        mode: 丸めモード

    Returns:
        fmtのビットパターン
    """
    if q == 0:
        return 0
    negative = q < 0
    n, d = abs(q.numerator), q.denominator
    msb_exp = n.bit_length() - d.bit_length()
    if (n << max(0, -msb_exp)) < (d << max(0, msb_exp)):
        msb_exp -= 1
    exponent = max(msb_exp, fmt.emin) - fmt.precision - 2
    if exponent >= 0:
        mantissa, rem = divmod(n, d << exponent)
    else:
        mantissa, rem = divmod(n << -exponent, d)
    return round_scaled(negative, (mantissa << 1) | (rem != 0), exponent - 1, fmt, mode)


def same_value(a: float, b: float) -> bool:
    """NaN同士は等しく、±0は区別する比較"""
    if math.isnan(a) or math.isnan(b):
        return math.isnan(a) and math.isnan(b)
    return f64_to_bits(a) == f64_to_bits(b)
