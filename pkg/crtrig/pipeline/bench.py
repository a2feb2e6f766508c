"""範囲縮小の戦略ごとのレイテンシ計測"""

import json
import logging
import math
import statistics
import time
from collections.abc import Callable
from dataclasses import asdict, dataclass, field

import numpy as np

from crtrig.artifact_loader import load_artifacts
from crtrig.fpcore import bits_to_f32
from crtrig.kernels import TrigKernel
from crtrig.models import EXP_BIAS, MIN_BENCH_REPEATS, Func, ReductionStrategy

logger = logging.getLogger(__name__)

WORKLOAD_UNIFORM = "uniform"
WORKLOAD_SMALL = "small"
WORKLOAD_LARGE = "large"
WORKLOADS = (WORKLOAD_UNIFORM, WORKLOAD_SMALL, WORKLOAD_LARGE)

# |x| >= 2^30 となる最小の指数フィールド
_LARGE_EXP_FIELD = EXP_BIAS + 30

_MATH_FUNCS = {Func.SIN: math.sin, Func.COS: math.cos, Func.TAN: math.tan}


@dataclass
class BenchConfig:
    """ベンチマーク設定"""

    func: Func = Func.SIN
    strategies: list[ReductionStrategy] = field(default_factory=lambda: list(ReductionStrategy))
    workload: str = WORKLOAD_UNIFORM
    n: int = 100_000
    seed: int = 0
    repeats: int = MIN_BENCH_REPEATS
    include_math: bool = False
    artifacts: str | None = None


@dataclass
class BenchRow:
    name: str
    ns_per_call: float
    samples_ns: list[float]


@dataclass
class BenchReport:
    func: str
    workload: str
    n: int
    seed: int
    repeats: int
    rows: list[BenchRow] = field(default_factory=list)
    ratios: dict[str, float] = field(default_factory=dict)
    note: str = "計測値は実行環境に依存します（中央値）"

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)

    def format_table(self) -> str:
        lines = [f"{self.func} / {self.workload} / n={self.n}", f"{'strategy':<10} {'ns/call':>10}"]
        lines.extend(f"{row.name:<10} {row.ns_per_call:>10.1f}" for row in self.rows)
        lines.extend(f"{name}: {value:.3f}x" for name, value in self.ratios.items())
        return "\n".join(lines)


def make_workload(workload: str, n: int, seed: int = 0) -> list[int]:
    """
    同じシードなら同じ入力列を作る

    Args:
        workload: uniform（一様なビット列）/ small（|x| < 2^30）/ large（有限で |x| >= 2^30）
        n: 入力数
        seed: 乱数シード

    Raises:
        ValueError: 不明なワークロードの場合
    """
    rng = np.random.default_rng(seed)
    if workload == WORKLOAD_UNIFORM:
        return [int(v) for v in rng.integers(0, 1 << 32, size=n, dtype=np.uint64)]
    if workload == WORKLOAD_SMALL:
        exps = rng.integers(0, _LARGE_EXP_FIELD, size=n)
    elif workload == WORKLOAD_LARGE:
        exps = rng.integers(_LARGE_EXP_FIELD, 0xFF, size=n)
    else:
        raise ValueError(f"不明なワークロード: {workload}")
    signs = rng.integers(0, 2, size=n)
    fracs = rng.integers(0, 1 << 23, size=n)
    return [int(s) << 31 | int(e) << 23 | int(f) for s, e, f in zip(signs, exps, fracs)]


def _time_loop(fn: Callable[[int], float], inputs: list[int]) -> tuple[float, float]:
    sink = 0.0
    start = time.perf_counter_ns()
    for bits in inputs:
        v = fn(bits)
        if v == v:
            sink += v
    elapsed = time.perf_counter_ns() - start
    return elapsed / max(len(inputs), 1), sink


def _measure(fn: Callable[[int], float], inputs: list[int], repeats: int) -> BenchRow:
    samples = []
    sink = 0.0
    for _ in range(repeats):
        ns, s = _time_loop(fn, inputs)
        samples.append(ns)
        sink += s
    logger.debug("sink=%s", sink)
    return BenchRow("", statistics.median(samples), samples)


def run_bench(
    config: BenchConfig,
    progress_callback: Callable[[int, int], None] | None = None,
) -> BenchReport:
    """
    戦略ごとに同じ入力列でカーネルの1呼び出しあたりの時間を計測

    Returns:
        BenchReport（ratios は hybrid に対する速度比、1より大きければ hybrid が速い）
    """
    repeats = max(config.repeats, MIN_BENCH_REPEATS)
    inputs = make_workload(config.workload, config.n, config.seed)
    artifacts = load_artifacts(config.artifacts)
    report = BenchReport(config.func.value, config.workload, config.n, config.seed, repeats)

    targets: list[tuple[str, Callable[[int], float]]] = []
    for strategy in config.strategies:
        kernel = TrigKernel(artifacts, strategy)
        targets.append((strategy.value, lambda b, k=kernel: k.eval34(config.func, b)))
    if config.include_math:
        def math_call(bits: int, math_fn=_MATH_FUNCS[config.func]) -> float:
            x = bits_to_f32(bits)
            return math_fn(x) if math.isfinite(x) else math.nan

        targets.append(("math", math_call))

    for i, (name, target) in enumerate(targets):
        # 1周目はキャッシュの暖機
        _time_loop(target, inputs[: min(len(inputs), 1000)])
        row = _measure(target, inputs, repeats)
        row.name = name
        report.rows.append(row)
        logger.info("%s: %.1f ns/call", name, row.ns_per_call)
        if progress_callback:
            progress_callback(i + 1, len(targets))

    times = {row.name: row.ns_per_call for row in report.rows}
    hybrid = times.get(ReductionStrategy.HYBRID.value)
    if hybrid:
        for other in (ReductionStrategy.FPV1.value, ReductionStrategy.INT.value):
            if other in times:
                report.ratios[f"hybrid_vs_{other}"] = times[other] / hybrid
    return report
