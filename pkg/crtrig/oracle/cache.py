"""入力パターン -> 34ビット round-to-odd 値のキャッシュファイル"""

import logging
from collections.abc import Iterable
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

# 4バイトの入力パターン + 8バイトの結果（リトルエンディアン、詰め物なし）
RECORD_DTYPE = np.dtype([("bits", "<u4"), ("value", "<f8")])


def _merge(
    bits: np.ndarray,
    values: np.ndarray,
    new_bits: np.ndarray,
    new_values: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """整列済みの配列に追加分を併合する（同じパターンは追加分を優先）"""
    all_bits = np.concatenate([bits, new_bits])
    all_values = np.concatenate([values, new_values])
    order = np.argsort(all_bits, kind="stable")
    all_bits = all_bits[order]
    all_values = all_values[order]
    last = np.append(all_bits[1:] != all_bits[:-1], True) if len(all_bits) else np.ones(0, bool)
    return all_bits[last], all_values[last]


class OracleCache:
    """
    オラクル結果のキャッシュ（1ファイル1関数）

    入力パターン順に整列した配列を二分探索で引く。put した値は併合待ちの
    辞書に溜め、件数の問い合わせ・一括検索・保存のときに配列へ併合する。
    """

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path else None
        self._bits = np.empty(0, dtype=np.uint32)
        self._values = np.empty(0, dtype=np.float64)
        self._pending: dict[int, float] = {}
        if self.path and self.path.exists():
            self.load(self.path)

    def _flush(self) -> None:
        if not self._pending:
            return
        new_bits = np.fromiter(self._pending.keys(), dtype=np.uint32, count=len(self._pending))
        new_values = np.fromiter(self._pending.values(), dtype=np.float64, count=len(self._pending))
        self._bits, self._values = _merge(self._bits, self._values, new_bits, new_values)
        self._pending.clear()

    def __len__(self) -> int:
        self._flush()
        return len(self._bits)

    def __contains__(self, bits: int) -> bool:
        return self.get(bits) is not None

    def get(self, bits: int) -> float | None:
        value = self._pending.get(bits)
        if value is not None:
            return value
        i = int(np.searchsorted(self._bits, bits))
        if i < len(self._bits) and self._bits[i] == bits:
            return float(self._values[i])
        return None

    def get_many(self, patterns: Iterable[int]) -> dict[int, float]:
        """キャッシュにあるパターンだけを一括で引く"""
        self._flush()
        keys = np.fromiter(patterns, dtype=np.uint32)
        if not len(keys) or not len(self._bits):
            return {}
        idx = np.minimum(np.searchsorted(self._bits, keys), len(self._bits) - 1)
        hit = self._bits[idx] == keys
        return dict(zip(keys[hit].tolist(), self._values[idx[hit]].tolist()))

    def put(self, bits: int, value: float) -> None:
        self._pending[bits] = value

    def load(self, path: str | Path) -> None:
        """
        キャッシュファイルを読み込んで既存の内容に追加

        Raises:
            ValueError: ファイルサイズがレコード長の倍数でない場合
        """
        path = Path(path)
        size = path.stat().st_size
        if size % RECORD_DTYPE.itemsize:
            raise ValueError(f"キャッシュファイルのサイズが不正です: {path} ({size} bytes)")
        if size == 0:
            return
        records = np.memmap(path, dtype=RECORD_DTYPE, mode="r")
        bits = np.asarray(records["bits"], dtype=np.uint32)
        values = np.asarray(records["value"], dtype=np.float64)
        self._flush()
        if not len(self._bits) and np.all(bits[1:] > bits[:-1]):
            # 保存したファイルは整列済みなのでそのまま使う
            self._bits, self._values = bits, values
        else:
            self._bits, self._values = _merge(self._bits, self._values, bits, values)
        logger.info("キャッシュを読み込みました: %s (%s件)", path, len(records))

    def save(self, path: str | Path | None = None) -> None:
        """入力パターン順に並べて保存"""
        path = Path(path) if path else self.path
        if path is None:
            raise ValueError("キャッシュファイルのパスが指定されていません")
        self._flush()
        records = np.empty(len(self._bits), dtype=RECORD_DTYPE)
        records["bits"] = self._bits
        records["value"] = self._values
        # 一時ファイルに書いてから置き換える
        tmp = path.with_name(path.name + ".tmp")
        records.tofile(tmp)
        tmp.replace(path)
        self._bits = records["bits"].copy()
        self._values = records["value"].copy()
        logger.info("キャッシュを保存しました: %s (%s件)", path, len(records))
