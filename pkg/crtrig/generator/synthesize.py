"""関数ごとの多項式生成（制約作成 -> LP -> 検証）"""

import logging
from collections.abc import Callable, Iterable, Sequence

from crtrig.fpcore import format_hex
from crtrig.generator.constraints import make_constraints
from crtrig.generator.lp import GeneratorConfig, LpInfeasibleError, solve_lp
from crtrig.generator.report import GenerationReport
from crtrig.generator.validate import validate
from crtrig.kernels import TrigKernel
from crtrig.models import (
    DEFAULT_COS_DEGREE,
    DEFAULT_MARGIN_ULPS,
    DEFAULT_SIN_DEGREE,
    Func,
    ReductionStrategy,
)
from crtrig.oracle import Oracle
from crtrig.oracle.cache import OracleCache
from crtrig.poly import DOMAINS, FuncPolys, taylor_seed

logger = logging.getLogger(__name__)


def generate_func_polys(
    func: Func,
    inputs: Iterable[int],
    sin_degree: int = DEFAULT_SIN_DEGREE,
    cos_degree: int = DEFAULT_COS_DEGREE,
    strategy: ReductionStrategy = ReductionStrategy.HYBRID,
    kernel: TrigKernel | None = None,
    oracle: Oracle | None = None,
    config: GeneratorConfig | None = None,
    margin_ulps: float = DEFAULT_MARGIN_ULPS,
    cache: OracleCache | None = None,
    progress_callback: Callable[[int, int], None] | None = None,
    holdout: Sequence[int] = (),
) -> tuple[FuncPolys, list[GenerationReport]]:
    """
    縮小後の定義域と小さい入力の定義域の両方について係数を生成

    制約のない定義域はテイラー係数のまま残す。できた係数は制約を作った入力に
    加えて、制約に使っていない holdout の入力でも検証する。tan は分母を払った
    制約が近似なので、有理数の再検査ではなく検証の結果で合否を決める。

    Args:
        func: 関数
        inputs: 制約を作る入力パターン
        sin_degree: sin多項式の次数
        cos_degree: cos多項式の次数
        strategy: 範囲縮小の戦略
        kernel: テーブル・定数を持つカーネル
        oracle: 参照値のオラクル
        config: LPの設定
        margin_ulps: 区間の余裕量
        cache: オラクル結果のキャッシュ
        progress_callback: 進捗コールバック(current, total)
        holdout: 検証だけに使う入力パターン

    Returns:
        (生成した多項式, 定義域ごとのレポート)
    """
    kernel = kernel or TrigKernel()
    oracle = oracle or Oracle()
    inputs = list(inputs)
    built = make_constraints(
        func, inputs, strategy, kernel, oracle, margin_ulps, progress_callback
    )

    polys = kernel.artifacts.polys[func]
    reports = []
    for domain in DOMAINS:
        problem = built.problem(func, domain, sin_degree, cos_degree)
        report = GenerationReport(
            func=func.value,
            domain=domain,
            sin_degree=sin_degree,
            cos_degree=cos_degree,
            inputs=len(inputs),
            constraints=sum(1 for c in problem.constraints if not c.is_anchor),
            anchor_constraints=sum(1 for c in problem.constraints if c.is_anchor),
            exact_check_required=func is not Func.TAN,
            holdout_inputs=len(holdout),
            skipped_inputs=built.skipped,
            hard_inputs=[f"0x{b:08x}" for b in built.hard_inputs],
            margin_ulps=built.margin_ulps,
        )
        seed = taylor_seed(sin_degree, cos_degree, func, domain)
        if not problem.constraints:
            logger.info("制約がないため初期係数を使います: %s/%s", func.value, domain)
            polys = polys.replaced(seed)
            report.exact_check = True
            report.coefficients = [format_hex(v) for v in seed.coeffs]
            reports.append(report)
            continue
        try:
            result = solve_lp(problem, config, seed)
        except LpInfeasibleError as e:
            logger.error("%s", e)
            report.error = str(e)
            report.validation_failures = [f"0x{b:08x}" for b in e.inputs]
            reports.append(report)
            continue

        polys = polys.replaced(result.pp)
        report.rounds = result.rounds
        report.active_constraints = result.active_count
        report.min_slack = result.min_slack
        report.exact_check = result.exact_check
        report.exact_refined = result.exact_refined
        report.coefficients = [format_hex(v) for v in result.pp.coeffs]
        reports.append(report)

    # 2つの定義域は入力で分かれるので、両方を組み込んだ状態で検証する
    combined = kernel.with_poly(polys.reduced).with_poly(polys.small)
    failures = validate(polys.reduced, func, inputs, combined, oracle, strategy, cache)
    failed = [f"0x{b:08x}" for b in failures]
    held_out = validate(polys.reduced, func, holdout, combined, oracle, strategy, cache)
    held_out_failed = [f"0x{b:08x}" for b in held_out]
    if held_out:
        logger.warning("制約外の入力で %s 件失敗しました: %s", len(held_out), func.value)
    for report in reports:
        if report.error is None:
            report.validation_failures = failed
            report.holdout_failures = held_out_failed
    return polys, reports
