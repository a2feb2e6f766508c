"""高精度オラクルモジュール"""

from crtrig.oracle.base import HpReduction, HpValue, OracleBackend, RoundingInterval
from crtrig.oracle.evaluator import Oracle, OraclePrecisionError, reconstruction_error

__all__ = [
    "HpReduction",
    "HpValue",
    "Oracle",
    "OracleBackend",
    "OraclePrecisionError",
    "RoundingInterval",
    "create_oracle",
    "create_oracle_backend",
    "get_available_backends",
    "reconstruction_error",
]


def get_available_backends() -> list[str]:
    """利用可能な評価エンジンのリストを取得"""
    return ["mpmath", "taylor"]


def create_oracle_backend(backend_type: str) -> OracleBackend:
    """指定タイプの評価エンジンを作成"""
    if backend_type == "mpmath":
        from crtrig.oracle.mp import MpmathBackend
        return MpmathBackend()
    elif backend_type == "taylor":
        from crtrig.oracle.taylor import TaylorBackend
        return TaylorBackend()
    else:
        raise ValueError(f"不明な評価エンジン: {backend_type}")


def create_oracle(backend_type: str = "mpmath", **kwargs) -> Oracle:
    """指定エンジンのオラクルを作成"""
    return Oracle(create_oracle_backend(backend_type), **kwargs)
