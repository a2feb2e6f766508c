"""256/π の分割定数の生成と入出力"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

from mpmath import mp

from crtrig.fpcore import float_parts, format_hex
from crtrig.models import REDUCTION_ORACLE_BITS

logger = logging.getLogger(__name__)

MIN_PI_BITS = 200
MSB_EXP = 6  # 256/π の最上位ビットの指数
PIECE28_BITS = 28
PIECE28_COUNT = 7
PIECE53_COUNT = 4
WORD_COUNT = 3
INT_SMALL_BITS = 40
MASK64 = (1 << 64) - 1
SCALAR_TAGS = (
    "small_tail",
    "small_tail_lo",
    "p1",
    "p0",
    "int_small_tail",
    "pi_over_256",
    "two_pow_minus_64",
)


@dataclass(frozen=True)
class PiConstants:
    """範囲縮小で使う 256/π の3種類の分割と π/256"""

    pieces28: tuple[float, ...]
    pieces28_exp: tuple[int, ...]
    small_tail: float
    small_tail_lo: float  # small_tail の丸め誤差
    pieces53: tuple[float, ...]
    pieces53_exp: tuple[int, ...]
    words64: tuple[int, ...]  # 上位ワードから順に格納
    p1: int
    p0: int
    int_small_tail: float  # P1, P0 より下の桁
    pi_over_256: float
    two_pow_minus_64: float = 2.0**-64

    def to_lines(self) -> list[str]:
        """タグ付きテキスト形式の行リスト"""
        lines = ["# 256/pi constants"]
        for i, (v, e) in enumerate(zip(self.pieces28, self.pieces28_exp)):
            lines.append(f"pieces28 {i} {format_hex(v)} {e}")
        lines.append(f"small_tail {format_hex(self.small_tail)}")
        lines.append(f"small_tail_lo {format_hex(self.small_tail_lo)}")
        for i, (v, e) in enumerate(zip(self.pieces53, self.pieces53_exp)):
            lines.append(f"pieces53 {i} {format_hex(v)} {e}")
        for i, w in enumerate(self.words64):
            lines.append(f"words64 {i} 0x{w:016x}")
        lines.append(f"p1 0x{self.p1:016x}")
        lines.append(f"p0 0x{self.p0:016x}")
        lines.append(f"int_small_tail {format_hex(self.int_small_tail)}")
        lines.append(f"pi_over_256 {format_hex(self.pi_over_256)}")
        lines.append(f"two_pow_minus_64 {format_hex(self.two_pow_minus_64)}")
        return lines


def _bits(n: int, frac_bits: int, hi_exp: int, lo_exp: int) -> int:
    """n * 2**-frac_bits から指数 hi_exp..lo_exp のビット列を取り出す"""
    width = hi_exp - lo_exp + 1
    return (n >> (lo_exp + frac_bits)) & ((1 << width) - 1)


def _scaled(value: float, frac_bits: int) -> int:
    """binary64値を 2**-frac_bits 単位の整数に変換（割り切れる値のみ）"""
    negative, mantissa, exponent = float_parts(value)
    shift = exponent + frac_bits
    if shift < 0:
        raise ValueError(f"定数の精度が不足しています: {format_hex(value)}")
    n = mantissa << shift
    return -n if negative else n


def scaled_256_over_pi(frac_bits: int) -> int:
    """floor(256/π * 2**frac_bits) を多倍長で計算"""
    with mp.workprec(frac_bits + 64):
        return int(mp.floor(mp.mpf(256) / mp.pi * mp.mpf(2) ** frac_bits))


@lru_cache(maxsize=None)
def gen_pi_constants(oracle_bits: int = REDUCTION_ORACLE_BITS) -> PiConstants:
    """
    256/π の高精度展開から全レイアウトを生成

    Args:
        oracle_bits: 展開に使う小数ビット数

    Returns:
        PiConstants

    Raises:
        ValueError: 精度が200ビット未満の場合
    """
    if oracle_bits < MIN_PI_BITS:
        raise ValueError(f"256/π の精度が不足しています: {oracle_bits}")

    f = oracle_bits
    n = scaled_256_over_pi(f)
    logger.debug("256/π を %s ビットで展開しました", f)

    pieces28 = []
    pieces28_exp = []
    for i in range(PIECE28_COUNT):
        hi = MSB_EXP - PIECE28_BITS * i
        lo = hi - PIECE28_BITS + 1
        chunk = _bits(n, f, hi, lo)
        pieces28.append(float(chunk) * 2.0**lo)
        pieces28_exp.append(lo)

    # 1番目の28ビットを除いた残りを最近接丸め
    first_lo = pieces28_exp[0]
    rest = Fraction(n & ((1 << (first_lo + f)) - 1), 1 << f)
    small_tail = float(rest)
    small_tail_lo = float(rest - Fraction(small_tail))

    pieces53 = []
    pieces53_exp = []
    residual = n
    for _ in range(PIECE53_COUNT):
        piece = float(Fraction(residual, 1 << f))
        pieces53.append(piece)
        pieces53_exp.append(float_parts(piece)[2])
        residual -= _scaled(piece, f)

    words = []
    for i in range(WORD_COUNT):
        hi = MSB_EXP - 64 * i
        words.append(_bits(n, f, hi, hi - 63))

    p1 = _bits(n, f, MSB_EXP, MSB_EXP - INT_SMALL_BITS + 1)
    p0 = _bits(n, f, MSB_EXP - INT_SMALL_BITS, MSB_EXP - 2 * INT_SMALL_BITS + 1)
    int_lsb = MSB_EXP - 2 * INT_SMALL_BITS + 1
    int_small_tail = float(Fraction(n & ((1 << (int_lsb + f)) - 1), 1 << f))

    with mp.workprec(f + 64):
        pi_scaled = int(mp.floor(mp.pi * mp.mpf(2) ** f))
    pi_over_256 = float(Fraction(pi_scaled, 1 << (f + 8)))

    return PiConstants(
        pieces28=tuple(pieces28),
        pieces28_exp=tuple(pieces28_exp),
        small_tail=small_tail,
        small_tail_lo=small_tail_lo,
        pieces53=tuple(pieces53),
        pieces53_exp=tuple(pieces53_exp),
        words64=tuple(words),
        p1=p1,
        p0=p0,
        int_small_tail=int_small_tail,
        pi_over_256=pi_over_256,
    )


def save_pi_constants(constants: PiConstants, path: str | Path) -> None:
    """定数をテキストファイルに保存"""
    path = Path(path)
    path.write_text("\n".join(constants.to_lines()) + "\n", encoding="utf-8")
    logger.info("定数を保存しました: %s", path)


def load_pi_constants(path: str | Path) -> PiConstants:
    """
    テキストファイルから定数を読み込む

    Raises:
        ValueError: 行の形式が不正、または必要なタグが欠けている場合
    """
    path = Path(path)
    fields: dict[str, dict[int, tuple]] = {}
    scalars: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        tag = parts[0]
        try:
            if tag in ("pieces28", "pieces53"):
                fields.setdefault(tag, {})[int(parts[1])] = (
                    float.fromhex(parts[2]),
                    int(parts[3]),
                )
            elif tag == "words64":
                fields.setdefault(tag, {})[int(parts[1])] = (int(parts[2], 16),)
            elif tag in SCALAR_TAGS:
                scalars[tag] = parts[1]
            else:
                raise ValueError(f"不明なタグ: {tag}")
        except (IndexError, ValueError) as e:
            raise ValueError(f"{path}:{lineno}: 定数ファイルの形式が不正です: {e}") from e

    try:
        p28 = [fields["pieces28"][i] for i in range(PIECE28_COUNT)]
        p53 = [fields["pieces53"][i] for i in range(PIECE53_COUNT)]
        words = [fields["words64"][i][0] for i in range(WORD_COUNT)]
        return PiConstants(
            pieces28=tuple(v for v, _ in p28),
            pieces28_exp=tuple(e for _, e in p28),
            small_tail=float.fromhex(scalars["small_tail"]),
            small_tail_lo=float.fromhex(scalars["small_tail_lo"]),
            pieces53=tuple(v for v, _ in p53),
            pieces53_exp=tuple(e for _, e in p53),
            words64=tuple(words),
            p1=int(scalars["p1"], 16),
            p0=int(scalars["p0"], 16),
            int_small_tail=float.fromhex(scalars["int_small_tail"]),
            pi_over_256=float.fromhex(scalars["pi_over_256"]),
            two_pow_minus_64=float.fromhex(scalars["two_pow_minus_64"]),
        )
    except KeyError as e:
        raise ValueError(f"{path}: 定数ファイルに {e} がありません") from e
