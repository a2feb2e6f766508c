"""定数・テーブル・係数の共通ローダー"""

import logging
import os
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from crtrig.models import Func
from crtrig.poly import FuncPolys, default_func_polys, load_func_polys
from crtrig.rangered.constants import PiConstants, gen_pi_constants, load_pi_constants
from crtrig.tables import SinTable, build_sin_table, load_sin_table

logger = logging.getLogger(__name__)

ARTIFACTS_ENV = "CRTRIG_ARTIFACTS"
CONSTANTS_FILE = "pi_constants.txt"
TABLE_FILE = "sin_table.txt"


def poly_file_name(func: Func) -> str:
    return f"poly_{func.value}.txt"


@dataclass(frozen=True)
class Artifacts:
    """カーネルが使う不変の成果物一式"""

    constants: PiConstants
    table: SinTable
    polys: dict[Func, FuncPolys] = field(hash=False)
    directory: Path | None = None


def resolve_artifact_dir(directory: str | Path | None = None) -> Path | None:
    """引数 > 環境変数 CRTRIG_ARTIFACTS > なし の順で成果物ディレクトリを決める"""
    if directory is None:
        directory = os.environ.get(ARTIFACTS_ENV) or None
    return Path(directory) if directory is not None else None


@lru_cache(maxsize=8)
def _load(directory: Path | None) -> Artifacts:
    if directory is None:
        logger.debug("組み込みの定数・テーブル・既定係数を使用します")
        return Artifacts(
            constants=gen_pi_constants(),
            table=build_sin_table(),
            polys={f: default_func_polys(f) for f in Func},
        )

    if not directory.is_dir():
        raise FileNotFoundError(f"成果物ディレクトリが見つかりません: {directory}")

    path = directory / CONSTANTS_FILE
    constants = load_pi_constants(path) if path.exists() else gen_pi_constants()
    path = directory / TABLE_FILE
    table = load_sin_table(path) if path.exists() else build_sin_table()

    polys = {}
    for func in Func:
        path = directory / poly_file_name(func)
        if not path.exists():
            polys[func] = default_func_polys(func)
            continue
        loaded = load_func_polys(path)
        checksum = loaded.header.get("table_checksum", "-")
        if checksum not in ("-", table.checksum()):
            logger.warning("係数ファイルのテーブルチェックサムが一致しません: %s", path)
        polys[func] = loaded
    logger.info("成果物を読み込みました: %s", directory)
    return Artifacts(constants, table, polys, directory)


def load_artifacts(directory: str | Path | None = None) -> Artifacts:
    """
    成果物を読み込む（ディレクトリごとに1回だけ）

    ファイルがない成果物は組み込みの生成処理と既定係数で補う。

    Args:
        directory: 成果物ディレクトリ（Noneの場合は環境変数を参照）

    Returns:
        Artifacts

    Raises:
        FileNotFoundError: 指定したディレクトリが存在しない場合
        ValueError: ファイルの形式が不正な場合
    """
    resolved = resolve_artifact_dir(directory)
    return _load(resolved.resolve() if resolved is not None else None)
