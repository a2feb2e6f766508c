"""検証・ベンチマークのパイプライン"""

from crtrig.pipeline.bench import BenchConfig, BenchReport, make_workload, run_bench
from crtrig.pipeline.scope import (
    InputScope,
    near_table_multiples,
    read_pattern_file,
    stratified_patterns,
)
from crtrig.pipeline.verifier import (
    VerifyConfig,
    VerifyReport,
    check_report_schema,
    run_verification,
)

__all__ = [
    "BenchConfig",
    "BenchReport",
    "InputScope",
    "VerifyConfig",
    "VerifyReport",
    "check_report_schema",
    "make_workload",
    "near_table_multiples",
    "read_pattern_file",
    "run_bench",
    "run_verification",
    "stratified_patterns",
]
