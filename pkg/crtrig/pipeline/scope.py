"""検証・生成に使う入力集合"""

from collections.abc import Iterator
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from mpmath import mp

from crtrig.fpcore import widen
from crtrig.models import BINARY32, EXP_BIAS, LP_HARD_NEIGHBORS, FpFormat

SCOPE_EXHAUSTIVE = "exhaustive"
SCOPE_RANDOM = "random"
SCOPE_FILE = "file"
SCOPE_STRATIFIED = "stratified"
SCOPE_HARD = "hard"

# π/128 をまたぐ指数から探索する
HARD_MIN_EXP_FIELD = 121
HARD_SEARCH_BITS = 512


@dataclass(frozen=True)
class InputScope:
    """exhaustive / random:N:SEED / stratified:N:SEED / hard / file:PATH"""

    kind: str
    count: int = 0
    seed: int = 0
    path: Path | None = None

    @classmethod
    def parse(cls, text: str) -> "InputScope":
        """
        文字列から入力集合を作る

        Raises:
            ValueError: 形式が不正な場合
        """
        if text in (SCOPE_EXHAUSTIVE, SCOPE_HARD):
            return cls(text)
        kind, _, rest = text.partition(":")
        if kind in (SCOPE_RANDOM, SCOPE_STRATIFIED):
            parts = rest.split(":")
            try:
                count = int(parts[0])
                seed = int(parts[1]) if len(parts) > 1 and parts[1] else 0
            except (IndexError, ValueError):
                raise ValueError(f"不明な入力範囲: {text}") from None
            if count < 0 or len(parts) > 2:
                raise ValueError(f"不明な入力範囲: {text}")
            return cls(kind, count=count, seed=seed)
        if kind == SCOPE_FILE and rest:
            return cls(SCOPE_FILE, path=Path(rest))
        raise ValueError(f"不明な入力範囲: {text}")

    def size(self, fmt: FpFormat = BINARY32) -> int:
        if self.kind == SCOPE_EXHAUSTIVE:
            return 1 << fmt.total_bits
        if self.kind in (SCOPE_RANDOM, SCOPE_STRATIFIED):
            return self.count
        return len(self.patterns(fmt))

    def patterns(self, fmt: FpFormat = BINARY32) -> list[int]:
        """fmt 幅のビットパターン（exhaustive は iter_patterns を使うこと）"""
        return list(self.iter_patterns(fmt))

    def iter_patterns(self, fmt: FpFormat = BINARY32) -> Iterator[int]:
        """
        fmt 幅のビットパターンを順に返す

        Raises:
            FileNotFoundError: file の入力ファイルがない場合
            ValueError: file の内容が不正な場合、または stratified / hard をbinary32以外で使った場合
        """
        if self.kind == SCOPE_EXHAUSTIVE:
            yield from range(1 << fmt.total_bits)
        elif self.kind == SCOPE_RANDOM:
            rng = np.random.default_rng(self.seed)
            values = rng.integers(0, 1 << fmt.total_bits, size=self.count, dtype=np.uint64)
            yield from (int(v) for v in values)
        elif self.kind in (SCOPE_STRATIFIED, SCOPE_HARD):
            if fmt.total_bits != BINARY32.total_bits:
                raise ValueError(f"{self.kind} はbinary32でのみ使えます")
            if self.kind == SCOPE_HARD:
                yield from near_table_multiples()
            else:
                yield from stratified_patterns(self.count, self.seed)
        else:
            yield from read_pattern_file(self.path, fmt)

    def chunks(self, fmt: FpFormat, chunk_size: int) -> Iterator[list[int]]:
        """chunk_size ごとに区切った入力パターン"""
        chunk = []
        for bits in self.iter_patterns(fmt):
            chunk.append(bits)
            if len(chunk) >= chunk_size:
                yield chunk
                chunk = []
        if chunk:
            yield chunk

    def __str__(self) -> str:
        if self.kind in (SCOPE_RANDOM, SCOPE_STRATIFIED):
            return f"{self.kind}:{self.count}:{self.seed}"
        if self.kind == SCOPE_FILE:
            return f"{SCOPE_FILE}:{self.path}"
        return self.kind


def read_pattern_file(path: str | Path, fmt: FpFormat = BINARY32) -> list[int]:
    """1行1個の16進パターン（# 以降はコメント）"""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"入力ファイルが見つかりません: {path}")
    patterns = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            bits = int(line, 16)
        except ValueError:
            raise ValueError(f"{path}:{lineno}: 16進パターンではありません: {line}") from None
        if bits > fmt.mask:
            raise ValueError(f"{path}:{lineno}: パターンが範囲外です: {line}")
        patterns.append(bits)
    return patterns


def to_binary32(bits: int, fmt: FpFormat) -> int:
    """fmt 幅のパターンを同じ値のbinary32パターンにする"""
    return bits if fmt.total_bits == BINARY32.total_bits else widen(bits, fmt)


@lru_cache(maxsize=None)
def near_table_multiples(neighbors: int = LP_HARD_NEIGHBORS) -> tuple[int, ...]:
    """
    π/512 の整数倍に近い正のbinary32値のパターン

    指数ごとに π/512 / 2^e の連分数展開の近似分数 m/q を求め、仮数 m が
    24ビットに収まるものとその前後 neighbors 個を返す。

    Args:
        neighbors: 前後に加える隣接値の数
    """
    patterns = set()
    with mp.workprec(HARD_SEARCH_BITS):
        for field in range(HARD_MIN_EXP_FIELD, 0xFF):
            e = field - EXP_BIAS - 23
            a = mp.ldexp(mp.pi, -9 - e)
            h_prev, h = 0, 1
            while True:
                ai = int(mp.floor(a))
                h_prev, h = h, ai * h + h_prev
                if h >= 1 << 24:
                    break
                if h >= 1 << 23:
                    for m in range(h - neighbors, h + neighbors + 1):
                        if 1 << 23 <= m < 1 << 24:
                            patterns.add(field << 23 | (m - (1 << 23)))
                rest = a - ai
                if rest == 0:
                    break
                a = 1 / rest
    return tuple(sorted(patterns))


def stratified_patterns(count: int, seed: int = 0, min_exp: int = 1, max_exp: int = 254) -> list[int]:
    """指数フィールドが一様で符号・仮数がランダムなbinary32パターン"""
    rng = np.random.default_rng(seed)
    signs = rng.integers(0, 2, size=count)
    exps = rng.integers(min_exp, max_exp + 1, size=count)
    fracs = rng.integers(0, 1 << 23, size=count)
    return [int(s) << 31 | int(e) << 23 | int(f) for s, e, f in zip(signs, exps, fracs)]
