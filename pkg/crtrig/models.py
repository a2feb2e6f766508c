"""ドメインモデル（各モジュールで共有するデータクラスと定数）"""

import math
from dataclasses import dataclass
from enum import Enum

# 浮動小数点フォーマット
EXP_BITS: int = 8
EXP_BIAS: int = 127
EMIN: int = -126
EMAX: int = 127
MIN_TOTAL_BITS: int = 10
MAX_TOTAL_BITS: int = 34

# 範囲縮小（t = 8）
TABLE_BITS: int = 8
TABLE_SIZE: int = 512
TABLE_MASK: int = 0x1FF
SMALL_LARGE_THRESHOLD: float = 2.0**30
NO_REDUCTION_THRESHOLD: float = math.pi / 128
TINY_THRESHOLD: float = 2.0**-13
TINY_OFFSET: float = 2.0**-40

# 未証明の係数で使う誤差評価（binary64評価の相対誤差と縮小誤差 [rad]）
GUARD_EVAL_ERROR: float = 2.0**-48
GUARD_SMALL_SIN_ERROR: float = 2.0**-50
GUARD_SMALL_COS_ERROR: float = 2.0**-51
GUARD_REDUCTION_ERROR: float = 2.0**-51
GUARD_MAX_RELATIVE: float = 2.0**-20

# オラクル精度（Ziv方式で倍々に増やす）
ORACLE_START_BITS: int = 128
ORACLE_MAX_BITS: int = 1024
REDUCTION_ORACLE_BITS: int = 256

# LP生成
DEFAULT_SIN_DEGREE: int = 7
DEFAULT_COS_DEGREE: int = 6
LP_SAMPLE_SIZE: int = 5000
LP_MAX_VIOLATORS: int = 500
LP_MAX_ROUNDS: int = 50
DEFAULT_MARGIN_ULPS: int = 2
EMPTY_INTERVAL_RATIO: float = 0.001
ANCHOR_POINTS: int = 64
ANCHOR_TOLERANCE: float = 2.0**-40
TAN_SIGN_MARGIN: float = 2.0**-20
LP_HOLDOUT_SIZE: int = 5000
LP_HARD_NEIGHBORS: int = 1

# 検証レポート
MAX_REPORTED_FAILURES: int = 100
MIN_BENCH_REPEATS: int = 5


class Func(str, Enum):
    """対象となる三角関数"""

    SIN = "sin"
    COS = "cos"
    TAN = "tan"


class RoundingMode(str, Enum):
    """丸めモード（ODDは34ビット中間値専用）"""

    RNE = "rne"
    RNA = "rna"
    RTZ = "rtz"
    RTP = "rtp"
    RTN = "rtn"
    ODD = "odd"

    @classmethod
    def user_modes(cls) -> list["RoundingMode"]:
        """ユーザーが選択できる5つのIEEE丸めモード"""
        return [cls.RNE, cls.RNA, cls.RTZ, cls.RTP, cls.RTN]


class ReductionStrategy(str, Enum):
    """範囲縮小の戦略"""

    FPV1 = "fpv1"
    FPV2 = "fpv2"
    INT = "int"
    HYBRID = "hybrid"


@dataclass(frozen=True)
class FpFormat:
    """指数部8ビットの浮動小数点フォーマット"""

    total_bits: int

    def __post_init__(self):
        if not MIN_TOTAL_BITS <= self.total_bits <= MAX_TOTAL_BITS:
            raise ValueError(f"フォーマットのビット幅が範囲外です: {self.total_bits}")

    @property
    def exp_bits(self) -> int:
        return EXP_BITS

    @property
    def frac_bits(self) -> int:
        return self.total_bits - 1 - EXP_BITS

    @property
    def precision(self) -> int:
        """隠れビットを含む仮数部ビット数"""
        return self.frac_bits + 1

    @property
    def bias(self) -> int:
        return EXP_BIAS

    @property
    def emin(self) -> int:
        return EMIN

    @property
    def emax(self) -> int:
        return EMAX

    @property
    def mask(self) -> int:
        return (1 << self.total_bits) - 1

    @property
    def sign_mask(self) -> int:
        return 1 << (self.total_bits - 1)

    @property
    def nan_pattern(self) -> int:
        """正規化された quiet NaN"""
        return (0xFF << self.frac_bits) | (1 << (self.frac_bits - 1))

    @property
    def inf_pattern(self) -> int:
        return 0xFF << self.frac_bits

    @property
    def max_finite_pattern(self) -> int:
        return (0xFE << self.frac_bits) | ((1 << self.frac_bits) - 1)

    @property
    def name(self) -> str:
        if self.total_bits == 32:
            return "binary32"
        if self.total_bits == 16:
            return "bfloat16"
        return f"fp{self.total_bits}"


BINARY32 = FpFormat(32)
BFLOAT16 = FpFormat(16)
RO34 = FpFormat(34)


@dataclass(frozen=True)
class FpTriple:
    """ビットパターンの符号・指数・仮数への分解"""

    sign: int
    biased_exp: int
    significand: int  # 隠れビットを含まない仮数部フィールド
    fmt: FpFormat = BINARY32

    @property
    def is_nan(self) -> bool:
        return self.biased_exp == 0xFF and self.significand != 0

    @property
    def is_inf(self) -> bool:
        return self.biased_exp == 0xFF and self.significand == 0

    @property
    def is_zero(self) -> bool:
        return self.biased_exp == 0 and self.significand == 0

    @property
    def is_subnormal(self) -> bool:
        return self.biased_exp == 0 and self.significand != 0

    @property
    def is_finite(self) -> bool:
        return self.biased_exp != 0xFF

    @property
    def integer_significand(self) -> int:
        """隠れビットを含む整数仮数"""
        if self.biased_exp == 0:
            return self.significand
        return self.significand | (1 << self.fmt.frac_bits)

    @property
    def lsb_exp(self) -> int:
        """整数仮数の最下位ビットの指数"""
        return max(self.biased_exp, 1) - self.fmt.bias - self.fmt.frac_bits

    @property
    def value(self) -> float:
        """正確なbinary64値（34ビット以下のフォーマットは誤差なく埋め込める）"""
        if self.is_nan:
            return math.nan
        if self.is_inf:
            return -math.inf if self.sign else math.inf
        v = math.ldexp(self.integer_significand, self.lsb_exp)
        return -v if self.sign else v


@dataclass(frozen=True)
class ReducedInput:
    """範囲縮小の結果 (x', k')"""

    xp: float
    kp: int
    needs_reduction: bool = True
