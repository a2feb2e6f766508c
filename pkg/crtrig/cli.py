"""CLIエントリーポイント"""

import argparse
import json
import logging
import sys
from pathlib import Path

from tqdm import tqdm

from crtrig import __version__
from crtrig.models import (
    BINARY32,
    DEFAULT_COS_DEGREE,
    DEFAULT_SIN_DEGREE,
    LP_HOLDOUT_SIZE,
    MIN_BENCH_REPEATS,
    FpFormat,
    Func,
    ReductionStrategy,
    RoundingMode,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

DEFAULT_GENERATE_SCOPE = "random:20000:0"
HOLDOUT_SEED_OFFSET = 1_000_003


def parse_fmt_range(text: str) -> list[int]:
    """'N' または 'N..M' をビット幅のリストにする"""
    lo_text, sep, hi_text = text.partition("..")
    try:
        lo = int(lo_text)
        hi = int(hi_text) if sep else lo
    except ValueError:
        raise argparse.ArgumentTypeError(f"不明なフォーマット指定: {text}") from None
    if not 10 <= lo <= hi <= 32:
        raise argparse.ArgumentTypeError(f"フォーマットのビット幅が範囲外です: {text}")
    return list(range(lo, hi + 1))


def _modes(value: str) -> list[RoundingMode]:
    if value == "all":
        return RoundingMode.user_modes()
    return [RoundingMode(value)]


def _strategies(value: str) -> list[ReductionStrategy]:
    if value == "all":
        return list(ReductionStrategy)
    return [ReductionStrategy(value)]


def create_parser() -> argparse.ArgumentParser:
    """コマンドライン引数パーサーを作成"""
    parser = argparse.ArgumentParser(
        prog="crtrig",
        description="正しく丸めた sin / cos / tan の検証・計測・成果物生成",
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {__version__}",
    )
    parser.add_argument(
        "-v", "--verbose",
        action="store_true",
        help="詳細なログを出力",
    )

    subparsers = parser.add_subparsers(dest="command", help="サブコマンド")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--func",
        choices=[f.value for f in Func],
        default=Func.SIN.value,
        help="対象の関数（デフォルト: sin）",
    )
    common.add_argument(
        "--artifacts",
        type=Path,
        help="成果物ディレクトリ（デフォルト: 環境変数 CRTRIG_ARTIFACTS）",
    )
    common.add_argument(
        "--out",
        type=Path,
        help="JSONレポートの出力先（デフォルト: 標準出力）",
    )

    # 検証コマンド
    verify_parser = subparsers.add_parser("verify", parents=[common], help="オラクルと照合")
    verify_parser.add_argument(
        "--fmt",
        type=parse_fmt_range,
        default=[32],
        help="出力フォーマットのビット幅 N または N..M（デフォルト: 32）",
    )
    verify_parser.add_argument(
        "--mode",
        choices=[m.value for m in RoundingMode.user_modes()] + ["all"],
        default=RoundingMode.RNE.value,
        help="丸めモード（デフォルト: rne）",
    )
    verify_parser.add_argument(
        "--strategy",
        choices=[s.value for s in ReductionStrategy] + ["all"],
        default=ReductionStrategy.HYBRID.value,
        help="範囲縮小の戦略（デフォルト: hybrid）",
    )
    verify_parser.add_argument(
        "--scope",
        default="exhaustive",
        help="入力範囲 exhaustive / random:N:SEED / stratified:N:SEED / hard / file:PATH（デフォルト: exhaustive）",
    )
    verify_parser.add_argument(
        "--jobs",
        type=int,
        default=1,
        help="ワーカープロセス数（デフォルト: 1）",
    )
    verify_parser.add_argument(
        "--oracle-cache",
        type=Path,
        help="オラクル結果のキャッシュファイル（関数ごとに1ファイル）",
    )

    # ベンチマークコマンド
    bench_parser = subparsers.add_parser("bench", parents=[common], help="戦略ごとの計測")
    bench_parser.add_argument(
        "--strategy",
        choices=[s.value for s in ReductionStrategy] + ["all"],
        default="all",
        help="範囲縮小の戦略（デフォルト: all）",
    )
    bench_parser.add_argument(
        "--workload",
        choices=["uniform", "small", "large"],
        default="uniform",
        help="入力の分布（デフォルト: uniform）",
    )
    bench_parser.add_argument("-n", type=int, default=100_000, help="入力数")
    bench_parser.add_argument("--seed", type=int, default=0, help="乱数シード")
    bench_parser.add_argument(
        "--repeats",
        type=int,
        default=MIN_BENCH_REPEATS,
        help=f"繰り返し回数（最小 {MIN_BENCH_REPEATS}）",
    )
    bench_parser.add_argument(
        "--with-math",
        action="store_true",
        help="Pythonの math モジュールも計測",
    )

    # 生成コマンド
    generate_parser = subparsers.add_parser("generate", parents=[common], help="成果物を生成")
    generate_parser.add_argument(
        "what",
        choices=["constants", "table", "poly"],
        help="生成する成果物",
    )
    generate_parser.add_argument(
        "--degrees",
        type=int,
        nargs=2,
        metavar=("SIN", "COS"),
        default=[DEFAULT_SIN_DEGREE, DEFAULT_COS_DEGREE],
        help=f"多項式の次数（デフォルト: {DEFAULT_SIN_DEGREE} {DEFAULT_COS_DEGREE}）",
    )
    generate_parser.add_argument(
        "--scope",
        default=DEFAULT_GENERATE_SCOPE,
        help=f"制約を作る入力範囲（デフォルト: {DEFAULT_GENERATE_SCOPE}）",
    )
    generate_parser.add_argument(
        "--seed",
        type=int,
        default=0,
        help="LPの制約サンプリングの乱数シード",
    )
    generate_parser.add_argument(
        "--holdout",
        type=int,
        default=LP_HOLDOUT_SIZE,
        help=f"制約に使わず検証だけに使う入力数（デフォルト: {LP_HOLDOUT_SIZE}）",
    )

    return parser


def _emit(lines: list[str], out: Path | None) -> None:
    """JSON行を出力先に書く"""
    text = "".join(line + "\n" for line in lines)
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _progress_bar(desc: str, total: int):
    bar = tqdm(total=total, desc=desc, file=sys.stderr, leave=False)

    def update(current, total):
        bar.total = total
        bar.update(current - bar.n)

    return bar, update


def run_verify(args: argparse.Namespace) -> int:
    """検証を実行"""
    from crtrig.oracle.cache import OracleCache
    from crtrig.pipeline.scope import InputScope
    from crtrig.pipeline.verifier import VerifyConfig, run_verification

    try:
        scope = InputScope.parse(args.scope)
        cache = OracleCache(args.oracle_cache) if args.oracle_cache else None
    except (ValueError, OSError) as e:
        print(f"エラー: {e}", file=sys.stderr)
        return EXIT_USAGE

    reports = []
    func = Func(args.func)
    for bits in args.fmt:
        for mode in _modes(args.mode):
            for strategy in _strategies(args.strategy):
                config = VerifyConfig(
                    func=func,
                    fmt=FpFormat(bits),
                    mode=mode,
                    strategy=strategy,
                    scope=scope,
                    jobs=args.jobs,
                    artifacts=args.artifacts,
                )
                desc = f"{func.value} fmt{bits} {mode.value} {strategy.value}"
                bar, update = _progress_bar(desc, 0)
                try:
                    report = run_verification(config, cache, update)
                except (FileNotFoundError, ValueError) as e:
                    print(f"エラー: {e}", file=sys.stderr)
                    return EXIT_USAGE
                finally:
                    bar.close()
                status = "OK" if report.passed else "NG"
                print(
                    f"{status} {desc}: 不一致 {report.mismatches}/{report.total}"
                    f" ({report.wall_time_seconds:.1f}s)",
                    file=sys.stderr,
                )
                reports.append(report)

    _emit([r.to_json() for r in reports], args.out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def run_bench_command(args: argparse.Namespace) -> int:
    """ベンチマークを実行"""
    from crtrig.pipeline.bench import BenchConfig, run_bench

    config = BenchConfig(
        func=Func(args.func),
        strategies=_strategies(args.strategy),
        workload=args.workload,
        n=args.n,
        seed=args.seed,
        repeats=args.repeats,
        include_math=args.with_math,
        artifacts=args.artifacts,
    )
    try:
        report = run_bench(config)
    except (FileNotFoundError, ValueError) as e:
        print(f"エラー: {e}", file=sys.stderr)
        return EXIT_USAGE
    print(report.format_table(), file=sys.stderr)
    print(report.note, file=sys.stderr)
    _emit([report.to_json()], args.out)
    return EXIT_OK


def run_generate(args: argparse.Namespace) -> int:
    """成果物を生成"""
    from crtrig.artifact_loader import (
        CONSTANTS_FILE,
        TABLE_FILE,
        load_artifacts,
        poly_file_name,
        resolve_artifact_dir,
    )

    directory = resolve_artifact_dir(args.artifacts)
    if directory is None:
        print("エラー: 出力先の成果物ディレクトリを指定してください (--artifacts)", file=sys.stderr)
        return EXIT_USAGE
    directory.mkdir(parents=True, exist_ok=True)

    if args.what == "constants":
        from crtrig.rangered.constants import gen_pi_constants, save_pi_constants

        path = directory / CONSTANTS_FILE
        save_pi_constants(gen_pi_constants(), path)
        _emit([json.dumps({"artifact": "constants", "path": str(path)})], args.out)
        return EXIT_OK

    if args.what == "table":
        from crtrig.tables import build_sin_table, save_sin_table

        path = directory / TABLE_FILE
        table = build_sin_table()
        save_sin_table(table, path)
        record = {"artifact": "table", "path": str(path), "checksum": table.checksum()}
        _emit([json.dumps(record)], args.out)
        return EXIT_OK

    from crtrig.generator import GeneratorConfig, generate_func_polys
    from crtrig.kernels import TrigKernel
    from crtrig.pipeline.scope import InputScope, near_table_multiples, stratified_patterns
    from crtrig.poly import save_func_polys, taylor_seed

    if args.holdout < 0:
        print(f"エラー: 検証用の入力数が負です: {args.holdout}", file=sys.stderr)
        return EXIT_USAGE
    sin_degree, cos_degree = args.degrees
    try:
        taylor_seed(sin_degree, cos_degree)
    except ValueError as e:
        print(f"エラー: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        scope = InputScope.parse(args.scope)
        # π/512 の倍数に近い入力は必ず制約に含める
        inputs = sorted(set(scope.patterns(BINARY32)) | set(near_table_multiples()))
        training = set(inputs)
        holdout = [
            b
            for b in stratified_patterns(args.holdout, args.seed + HOLDOUT_SEED_OFFSET)
            if b not in training
        ]
        artifacts = load_artifacts(directory)
    except (FileNotFoundError, ValueError) as e:
        print(f"エラー: {e}", file=sys.stderr)
        return EXIT_USAGE

    func = Func(args.func)
    bar, update = _progress_bar(f"制約 {func.value}", len(inputs))
    try:
        polys, reports = generate_func_polys(
            func,
            inputs,
            sin_degree,
            cos_degree,
            kernel=TrigKernel(artifacts),
            config=GeneratorConfig(seed=args.seed),
            progress_callback=update,
            holdout=holdout,
        )
    except ValueError as e:
        print(f"エラー: {e}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        bar.close()

    _emit([r.to_json() for r in reports], args.out)
    if not all(r.ok for r in reports):
        for r in reports:
            if r.error:
                print(f"エラー: {r.error}", file=sys.stderr)
            elif r.validation_failures or r.holdout_failures:
                print(
                    f"エラー: 検証に失敗した入力が {len(r.validation_failures)} 件"
                    f"（制約外 {len(r.holdout_failures)} 件）あります ({r.func}/{r.domain})",
                    file=sys.stderr,
                )
            elif r.exact_check_required and not r.exact_check:
                print(f"エラー: 有理数による再検査に失敗しました ({r.func}/{r.domain})", file=sys.stderr)
        return EXIT_FAILED

    path = directory / poly_file_name(func)
    save_func_polys(polys, path, table_checksum=artifacts.table.checksum())
    print(f"完了: {path}", file=sys.stderr)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    """メインエントリーポイント"""
    parser = create_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(levelname)s: %(message)s",
        stream=sys.stderr,
    )

    if args.command is None:
        parser.print_help()
        return EXIT_OK

    if args.command == "verify":
        return run_verify(args)
    elif args.command == "bench":
        return run_bench_command(args)
    elif args.command == "generate":
        return run_generate(args)

    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
