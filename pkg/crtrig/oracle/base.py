"""高精度オラクルの抽象ベースクラス"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction

from crtrig.models import Func


@dataclass(frozen=True)
class HpValue:
    """真値を含む区間 [center - radius, center + radius]"""

    center: Fraction
    radius: Fraction
    bits: int

    @property
    def lo(self) -> Fraction:
        return self.center - self.radius

    @property
    def hi(self) -> Fraction:
        return self.center + self.radius

    @property
    def is_exact(self) -> bool:
        return self.radius == 0

    @classmethod
    def exact(cls, value: Fraction | int, bits: int = 0) -> "HpValue":
        return cls(Fraction(value), Fraction(0), bits)


@dataclass(frozen=True)
class RoundingInterval:
    """34ビット round-to-odd で正しい結果に丸まるbinary64値の区間"""

    lo: float
    hi: float
    func: Func
    input: int

    def contains(self, v: float) -> bool:
        return self.lo <= v <= self.hi


@dataclass(frozen=True)
class HpReduction:
    """256x/π = 512m + k_mod_512 + r となる高精度の縮小結果"""

    k_mod_512: int
    r: Fraction
    precision_bits: int


class OracleBackend(ABC):
    """関数値の高精度評価エンジン"""

    name: str

    @abstractmethod
    def evaluate(self, func: Func, x: float, bits: int) -> HpValue:
        """
        0でない有限の x について f(x) を含む区間を返す

        Args:
            func: 関数
            x: binary32値を保持するbinary64値
            bits: 作業精度（ビット）

        Returns:
            相対幅がおよそ 2**-bits の区間
        """
        pass
