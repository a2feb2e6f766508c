"""カーネルの結果をオラクルと照合する検証パイプライン"""

import json
import logging
import time
from collections import deque
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from crtrig.artifact_loader import load_artifacts
from crtrig.fpcore import round_from_34
from crtrig.kernels import TrigKernel
from crtrig.models import (
    BINARY32,
    MAX_REPORTED_FAILURES,
    FpFormat,
    Func,
    ReductionStrategy,
    RoundingMode,
)
from crtrig.oracle import Oracle, create_oracle
from crtrig.oracle.cache import OracleCache
from crtrig.pipeline.scope import InputScope, to_binary32

logger = logging.getLogger(__name__)

DEFAULT_CHUNK_SIZE = 1 << 16


@dataclass
class VerifyConfig:
    """検証設定"""

    func: Func = Func.SIN
    fmt: FpFormat = BINARY32
    mode: RoundingMode = RoundingMode.RNE
    strategy: ReductionStrategy = ReductionStrategy.HYBRID
    scope: InputScope = field(default_factory=lambda: InputScope.parse("exhaustive"))
    jobs: int = 1
    chunk_size: int = DEFAULT_CHUNK_SIZE
    artifacts: str | Path | None = None
    oracle_cache: str | Path | None = None
    oracle_backend: str = "mpmath"


@dataclass
class FailureRecord:
    input_bits: str
    expected_bits: str
    got_bits: str


@dataclass
class VerifyReport:
    """1つの (関数, フォーマット, 丸めモード, 戦略) の検証結果"""

    func: str
    fmt: int
    mode: str
    strategy: str
    scope: str
    total: int = 0
    mismatches: int = 0
    first_failures: list[FailureRecord] = field(default_factory=list)
    wall_time_seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.mismatches == 0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)


# JSON行のスキーマ（フィールド名 -> 型）
REPORT_SCHEMA: dict[str, type | tuple[type, ...]] = {
    "func": str,
    "fmt": int,
    "mode": str,
    "strategy": str,
    "scope": str,
    "total": int,
    "mismatches": int,
    "first_failures": list,
    "wall_time_seconds": (int, float),
}
FAILURE_FIELDS = ("input_bits", "expected_bits", "got_bits")


def check_report_schema(record: dict) -> None:
    """
    検証レポートのJSONレコードを検査

    Raises:
        ValueError: フィールドの欠落・型の不一致・不正な値がある場合
    """
    for name, kind in REPORT_SCHEMA.items():
        if name not in record:
            raise ValueError(f"フィールドがありません: {name}")
        if not isinstance(record[name], kind) or isinstance(record[name], bool):
            raise ValueError(f"フィールドの型が不正です: {name}")
    extra = set(record) - set(REPORT_SCHEMA)
    if extra:
        raise ValueError(f"不明なフィールド: {sorted(extra)}")
    if record["func"] not in {f.value for f in Func}:
        raise ValueError(f"不明な関数: {record['func']}")
    if record["mode"] not in {m.value for m in RoundingMode.user_modes()}:
        raise ValueError(f"不明な丸めモード: {record['mode']}")
    if not 0 <= record["mismatches"] <= record["total"]:
        raise ValueError(f"不一致数が範囲外です: {record['mismatches']}")
    failures = record["first_failures"]
    if len(failures) > min(record["mismatches"], MAX_REPORTED_FAILURES):
        raise ValueError(f"失敗レコードが多すぎます: {len(failures)}")
    for failure in failures:
        if not isinstance(failure, dict) or set(failure) != set(FAILURE_FIELDS):
            raise ValueError(f"失敗レコードの形式が不正です: {failure}")
        for name in FAILURE_FIELDS:
            value = failure[name]
            if not isinstance(value, str) or not value.startswith("0x"):
                raise ValueError(f"16進表記ではありません: {name}={value}")
            int(value, 16)


# ワーカープロセスごとのカーネルとオラクル
_worker_kernel: TrigKernel | None = None
_worker_oracle: Oracle | None = None


def _init_worker(
    artifacts: str | Path | None, strategy: ReductionStrategy, oracle_backend: str
) -> None:
    global _worker_kernel, _worker_oracle
    _worker_kernel = TrigKernel(load_artifacts(artifacts), strategy)
    _worker_oracle = create_oracle(oracle_backend)


def _verify_chunk(
    func: Func,
    fmt_bits: int,
    mode: RoundingMode,
    chunk: list[int],
    cached: dict[int, float] | None,
) -> tuple[int, list[tuple[int, int, int]], dict[int, float]]:
    """
    入力の塊を検証

    cached が None でなければ34ビット値を経由して期待値を作り、新しく求めた
    オラクル値を返す。
    """
    fmt = FpFormat(fmt_bits)
    failures = []
    computed: dict[int, float] = {}
    for bits in chunk:
        wide = to_binary32(bits, fmt)
        got = _worker_kernel.eval(func, wide, fmt, mode)
        if cached is None:
            expected = _worker_oracle.correctly_rounded(func, wide, fmt, mode)
        else:
            value = cached.get(wide)
            if value is None:
                value = _worker_oracle.ro34(func, wide)
                computed[wide] = value
            expected = round_from_34(value, fmt, mode)
        if got != expected:
            failures.append((bits, expected, got))
    return len(chunk), failures, computed


def _hex(bits: int, fmt: FpFormat) -> str:
    return f"0x{bits:0{(fmt.total_bits + 3) // 4}x}"


def run_verification(
    config: VerifyConfig,
    cache: OracleCache | None = None,
    progress_callback: Callable[[int, int], None] | None = None,
) -> VerifyReport:
    """
    入力集合の全パターンについてカーネルとオラクルを比較

    Args:
        config: 検証設定
        cache: オラクル結果のキャッシュ（省略時は config.oracle_cache を開く）
        progress_callback: 進捗コールバック(current, total)

    Returns:
        VerifyReport（失敗は入力順に最大100件）

    Raises:
        FileNotFoundError: 成果物ディレクトリや入力ファイルがない場合
    """
    if config.mode is RoundingMode.ODD:
        raise ValueError(f"ユーザー向けではない丸めモードです: {config.mode.value}")
    # 成果物の有無をワーカー起動前に確かめる
    load_artifacts(config.artifacts)
    if cache is None and config.oracle_cache:
        cache = OracleCache(config.oracle_cache)

    fmt = config.fmt
    total = config.scope.size(fmt)
    start = time.perf_counter()
    report = VerifyReport(
        func=config.func.value,
        fmt=fmt.total_bits,
        mode=config.mode.value,
        strategy=config.strategy.value,
        scope=str(config.scope),
    )

    def tasks():
        for chunk in config.scope.chunks(fmt, config.chunk_size):
            cached = None
            if cache is not None:
                cached = cache.get_many(to_binary32(bits, fmt) for bits in chunk)
            yield chunk, cached

    failures: list[tuple[int, int, int]] = []
    done = 0

    def collect(result):
        nonlocal done
        count, chunk_failures, computed = result
        done += count
        report.mismatches += len(chunk_failures)
        if chunk_failures:
            failures.extend(chunk_failures)
            failures.sort()
            del failures[MAX_REPORTED_FAILURES:]
        if cache is not None:
            for bits, value in computed.items():
                cache.put(bits, value)
        if progress_callback:
            progress_callback(done, total)

    args = (config.artifacts, config.strategy, config.oracle_backend)
    if config.jobs <= 1:
        _init_worker(*args)
        for chunk, cached in tasks():
            collect(_verify_chunk(config.func, fmt.total_bits, config.mode, chunk, cached))
    else:
        with ProcessPoolExecutor(
            max_workers=config.jobs, initializer=_init_worker, initargs=args
        ) as pool:
            # 投入済みの塊を jobs の数倍に抑えて順に回収する
            pending: deque = deque()
            for chunk, cached in tasks():
                pending.append(
                    pool.submit(
                        _verify_chunk, config.func, fmt.total_bits, config.mode, chunk, cached
                    )
                )
                if len(pending) >= config.jobs * 4:
                    collect(pending.popleft().result())
            while pending:
                collect(pending.popleft().result())

    report.total = done
    report.first_failures = [
        FailureRecord(_hex(b, fmt), _hex(e, fmt), _hex(g, fmt))
        for b, e, g in failures[:MAX_REPORTED_FAILURES]
    ]
    report.wall_time_seconds = time.perf_counter() - start
    if cache is not None and cache.path is not None:
        cache.save()
    logger.info(
        "検証完了: %s fmt%s %s %s 不一致 %s/%s",
        report.func,
        report.fmt,
        report.mode,
        report.strategy,
        report.mismatches,
        report.total,
    )
    return report
