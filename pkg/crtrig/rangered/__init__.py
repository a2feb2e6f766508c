"""範囲縮小モジュール"""

from functools import lru_cache

from crtrig.models import ReducedInput, ReductionStrategy
from crtrig.rangered.base import RangeReducer
from crtrig.rangered.constants import PiConstants, gen_pi_constants

__all__ = [
    "RangeReducer",
    "PiConstants",
    "gen_pi_constants",
    "create_reducer",
    "get_available_strategies",
    "reduce",
]


def get_available_strategies() -> list[str]:
    """利用可能な縮小戦略のリストを取得"""
    return [s.value for s in ReductionStrategy]


def create_reducer(
    strategy: ReductionStrategy | str,
    constants: PiConstants | None = None,
    **kwargs,
) -> RangeReducer:
    """指定戦略の範囲縮小器を作成"""
    try:
        strategy = ReductionStrategy(strategy)
    except ValueError:
        raise ValueError(f"不明な縮小戦略: {strategy}") from None

    if strategy is ReductionStrategy.FPV1:
        from crtrig.rangered.fp import FpV1Reducer
        return FpV1Reducer(constants)
    elif strategy is ReductionStrategy.FPV2:
        from crtrig.rangered.fp import FpV2Reducer
        return FpV2Reducer(constants)
    elif strategy is ReductionStrategy.INT:
        from crtrig.rangered.integer import IntReducer
        return IntReducer(constants, **kwargs)
    else:
        from crtrig.rangered.hybrid import HybridReducer
        return HybridReducer(constants, **kwargs)


@lru_cache(maxsize=None)
def _default_reducer(strategy: ReductionStrategy) -> RangeReducer:
    return create_reducer(strategy)


def reduce(x: float, strategy: ReductionStrategy | str = ReductionStrategy.HYBRID) -> ReducedInput:
    """
    既定の定数で x を縮小

    Args:
        x: binary32値を保持するbinary64値
        strategy: 縮小戦略

    Raises:
        ValueError: NaN・無限大、または不明な戦略の場合
    """
    try:
        strategy = ReductionStrategy(strategy)
    except ValueError:
        raise ValueError(f"不明な縮小戦略: {strategy}") from None
    return _default_reducer(strategy).reduce(x)
