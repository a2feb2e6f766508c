"""生成した多項式を実際のカーネルで検証する"""

import logging
from collections.abc import Callable, Iterable

from crtrig.fpcore import same_value
from crtrig.kernels import TrigKernel
from crtrig.models import Func, ReductionStrategy
from crtrig.oracle import Oracle
from crtrig.oracle.cache import OracleCache
from crtrig.poly import PolyPair

logger = logging.getLogger(__name__)


def oracle_ro34(oracle: Oracle, func: Func, bits: int, cache: OracleCache | None = None) -> float:
    """キャッシュがあればそれを使うオラクル値"""
    if cache is not None:
        value = cache.get(bits)
        if value is not None:
            return value
    value = oracle.ro34(func, bits)
    if cache is not None:
        cache.put(bits, value)
    return value


def validate(
    pp: PolyPair,
    func: Func,
    inputs: Iterable[int],
    kernel: TrigKernel | None = None,
    oracle: Oracle | None = None,
    strategy: ReductionStrategy | None = None,
    cache: OracleCache | None = None,
    progress_callback: Callable[[int, int], None] | None = None,
) -> list[int]:
    """
    pp を組み込んだカーネルの34ビット結果をオラクルと比較

    Args:
        pp: 検証する多項式（関数・定義域の分だけ差し替える）
        func: 関数
        inputs: binary32ビットパターン
        kernel: 基になるカーネル
        oracle: 参照値のオラクル
        strategy: 範囲縮小の戦略
        cache: オラクル結果のキャッシュ
        progress_callback: 進捗コールバック(current, total)

    Returns:
        結果が一致しなかった入力パターン（空なら合格）
    """
    kernel = (kernel or TrigKernel()).with_poly(pp)
    oracle = oracle or Oracle()
    inputs = list(inputs)
    failing = []
    for i, bits in enumerate(inputs):
        if progress_callback:
            progress_callback(i + 1, len(inputs))
        got = kernel.eval34(func, bits, strategy)
        expected = oracle_ro34(oracle, func, bits, cache)
        if not same_value(got, expected):
            failing.append(bits)
    if failing:
        logger.warning("検証に失敗しました: %s %s/%s 件", func.value, len(failing), len(inputs))
    return failing
