"""sin(jπ/256) の512要素テーブル"""

import hashlib
import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from mpmath import mp

from crtrig.fpcore import format_hex
from crtrig.models import REDUCTION_ORACLE_BITS, TABLE_SIZE

logger = logging.getLogger(__name__)

QUARTER = TABLE_SIZE // 4
HALF = TABLE_SIZE // 2


@dataclass(frozen=True)
class SinTable:
    """sin, cos, tan の出力補正で共有するテーブル"""

    entries: tuple[float, ...]

    def __post_init__(self):
        if len(self.entries) != TABLE_SIZE:
            raise ValueError(f"テーブルの要素数が不正です: {len(self.entries)}")

    def sin_entry(self, kp: int) -> float:
        assert 0 <= kp < TABLE_SIZE, f"テーブル添字が範囲外です: {kp}"
        return self.entries[kp]

    def cos_entry(self, kp: int) -> float:
        assert 0 <= kp < TABLE_SIZE, f"テーブル添字が範囲外です: {kp}"
        return self.entries[(kp + QUARTER) % TABLE_SIZE]

    def to_text(self) -> str:
        """添字付き16進浮動小数点テキスト"""
        return "".join(f"{j} {format_hex(v)}\n" for j, v in enumerate(self.entries))

    def checksum(self) -> str:
        return hashlib.sha256(self.to_text().encode("ascii")).hexdigest()


@lru_cache(maxsize=None)
def build_sin_table(oracle_bits: int = REDUCTION_ORACLE_BITS) -> SinTable:
    """
    各要素を sin(jπ/256) の最近接binary64としてテーブルを構築

    第1象限だけを計算し、残りは対称性で埋める。
    """
    from crtrig.oracle.mp import mpf_to_float

    quadrant = []
    with mp.workprec(oracle_bits):
        for j in range(QUARTER + 1):
            quadrant.append(mpf_to_float(mp.sinpi(mp.mpf(j) / HALF)))

    entries = [0.0] * TABLE_SIZE
    for j in range(QUARTER + 1):
        entries[j] = quadrant[j]
        entries[HALF - j] = quadrant[j]
    for j in range(1, HALF):
        entries[TABLE_SIZE - j] = -entries[j]
    entries[HALF] = 0.0
    logger.debug("sinテーブルを構築しました")
    return SinTable(tuple(entries))


def save_sin_table(table: SinTable, path: str | Path) -> None:
    """テーブルをテキストファイルに保存"""
    path = Path(path)
    path.write_text(table.to_text(), encoding="ascii")
    logger.info("テーブルを保存しました: %s", path)


def load_sin_table(path: str | Path) -> SinTable:
    """
    テキストファイルからテーブルを読み込む

    Raises:
        ValueError: 行の形式や添字が不正な場合
    """
    path = Path(path)
    entries: dict[int, float] = {}
    for lineno, raw in enumerate(path.read_text(encoding="ascii").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            index, value = line.split()
            entries[int(index)] = float.fromhex(value)
        except ValueError as e:
            raise ValueError(f"{path}:{lineno}: テーブルの形式が不正です: {e}") from e
    if sorted(entries) != list(range(TABLE_SIZE)):
        raise ValueError(f"{path}: テーブルの添字が揃っていません")
    return SinTable(tuple(entries[j] for j in range(TABLE_SIZE)))
