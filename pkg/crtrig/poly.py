"""縮小後の入力に対する多項式評価と出力補正"""

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

from crtrig import __version__
from crtrig.fpcore import format_hex
from crtrig.models import DEFAULT_COS_DEGREE, DEFAULT_SIN_DEGREE, Func
from crtrig.tables import SinTable

logger = logging.getLogger(__name__)

DOMAIN_REDUCED = "reduced"
DOMAIN_SMALL = "small"
DOMAINS = (DOMAIN_REDUCED, DOMAIN_SMALL)

# 係数の証明はこの評価順序に対してのみ有効
EVAL_ORDER_TAG = "horner-x2-v1"


@dataclass(frozen=True)
class PolyPair:
    """奇関数の sin 多項式と偶関数の cos 多項式の係数"""

    sin_coeffs: tuple[float, ...]  # c1, c3, c5, ...
    cos_coeffs: tuple[float, ...]  # d0, d2, d4, ...
    func: Func = Func.SIN
    domain: str = DOMAIN_REDUCED

    def __post_init__(self):
        if not self.sin_coeffs or not self.cos_coeffs:
            raise ValueError("係数が空です")
        if self.domain not in DOMAINS:
            raise ValueError(f"不明な定義域: {self.domain}")

    @property
    def sin_degree(self) -> int:
        return 2 * len(self.sin_coeffs) - 1

    @property
    def cos_degree(self) -> int:
        return 2 * (len(self.cos_coeffs) - 1)

    @property
    def coeffs(self) -> tuple[float, ...]:
        """LP変数の並び（sin係数の後にcos係数）"""
        return self.sin_coeffs + self.cos_coeffs

    def with_coeffs(self, coeffs) -> "PolyPair":
        """同じ次数で係数だけ差し替える"""
        n = len(self.sin_coeffs)
        coeffs = tuple(float(v) for v in coeffs)
        return replace(self, sin_coeffs=coeffs[:n], cos_coeffs=coeffs[n:])


@dataclass(frozen=True)
class FuncPolys:
    """1つの関数が使う2つの定義域の多項式"""

    reduced: PolyPair
    small: PolyPair
    header: dict = field(default_factory=dict, compare=False)

    def get(self, domain: str) -> PolyPair:
        return self.small if domain == DOMAIN_SMALL else self.reduced

    @property
    def certified(self) -> bool:
        """生成器が検証済みの係数か（テイラー初期値のままなら False）"""
        return self.header.get("generator_version", "seed") != "seed"

    def replaced(self, pp: PolyPair) -> "FuncPolys":
        if pp.domain == DOMAIN_SMALL:
            return replace(self, small=pp)
        return replace(self, reduced=pp)


def eval_sin_poly(pp: PolyPair, xp: float) -> float:
    """x'^2 のHorner法で評価し、最後に x' を掛ける"""
    c = pp.sin_coeffs
    x2 = xp * xp
    acc = c[-1]
    for coef in reversed(c[:-1]):
        acc = acc * x2 + coef
    return acc * xp


def eval_cos_poly(pp: PolyPair, xp: float) -> float:
    """x'^2 のHorner法で評価"""
    d = pp.cos_coeffs
    x2 = xp * xp
    acc = d[-1]
    for coef in reversed(d[:-1]):
        acc = acc * x2 + coef
    return acc


def compensate_sin(kp: int, s: float, c: float, table: SinTable) -> float:
    """sin(k'π/256)cos(x') + cos(k'π/256)sin(x')"""
    return table.sin_entry(kp) * c + table.cos_entry(kp) * s


def compensate_cos(kp: int, s: float, c: float, table: SinTable) -> float:
    """cos(k'π/256)cos(x') - sin(k'π/256)sin(x')"""
    return table.cos_entry(kp) * c - table.sin_entry(kp) * s


def divide(num: float, den: float) -> float:
    """binary64の除算（分母が0なら符号付き無限大）"""
    if den == 0.0:
        return math.copysign(math.inf, num) * math.copysign(1.0, den)
    return num / den


def compensate_tan(kp: int, s: float, c: float, table: SinTable) -> float:
    return divide(compensate_sin(kp, s, c, table), compensate_cos(kp, s, c, table))


def taylor_seed(
    sin_degree: int = DEFAULT_SIN_DEGREE,
    cos_degree: int = DEFAULT_COS_DEGREE,
    func: Func = Func.SIN,
    domain: str = DOMAIN_REDUCED,
) -> PolyPair:
    """
    テイラー係数を最近接binary64に丸めた初期多項式

    Raises:
        ValueError: sin の次数が奇数でない、または cos の次数が偶数でない場合
    """
    if sin_degree < 1 or sin_degree % 2 != 1:
        raise ValueError(f"sin多項式の次数が不正です: {sin_degree}")
    if cos_degree < 0 or cos_degree % 2 != 0:
        raise ValueError(f"cos多項式の次数が不正です: {cos_degree}")
    sin_coeffs = tuple(
        float(Fraction((-1) ** i, math.factorial(2 * i + 1))) for i in range(sin_degree // 2 + 1)
    )
    cos_coeffs = tuple(
        float(Fraction((-1) ** i, math.factorial(2 * i))) for i in range(cos_degree // 2 + 1)
    )
    return PolyPair(sin_coeffs, cos_coeffs, func, domain)


def default_func_polys(func: Func) -> FuncPolys:
    """生成済みファイルがないときの既定多項式"""
    return FuncPolys(
        reduced=taylor_seed(func=func, domain=DOMAIN_REDUCED),
        small=taylor_seed(func=func, domain=DOMAIN_SMALL),
        header={"generator_version": "seed"},
    )


def save_func_polys(
    polys: FuncPolys,
    path: str | Path,
    table_checksum: str = "",
    generator_version: str = __version__,
) -> None:
    """
    係数ファイルを保存

    Args:
        polys: 保存する多項式
        path: 出力先
        table_checksum: 証明に使ったテーブルのチェックサム
        generator_version: 生成器のバージョン
    """
    path = Path(path)
    lines = [
        "# crtrig coefficients",
        f"func {polys.reduced.func.value}",
        f"generator_version {generator_version}",
        f"table_checksum {table_checksum or '-'}",
        f"order {EVAL_ORDER_TAG}",
    ]
    for pp in (polys.reduced, polys.small):
        lines.append(f"domain {pp.domain}")
        lines.append(f"degrees {pp.sin_degree} {pp.cos_degree}")
        lines.extend(f"sin {i} {format_hex(v)}" for i, v in enumerate(pp.sin_coeffs))
        lines.extend(f"cos {i} {format_hex(v)}" for i, v in enumerate(pp.cos_coeffs))
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    logger.info("係数ファイルを保存しました: %s", path)


def load_func_polys(path: str | Path) -> FuncPolys:
    """
    係数ファイルを読み込む

    Raises:
        ValueError: 形式・評価順序・次数が不正な場合
    """
    path = Path(path)
    header: dict[str, str] = {}
    blocks: dict[str, dict] = {}
    current = None
    for lineno, raw in enumerate(path.read_text(encoding="ascii").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        tag = parts[0]
        try:
            if tag == "domain":
                current = blocks.setdefault(parts[1], {"sin": {}, "cos": {}, "degrees": None})
            elif tag == "degrees":
                current["degrees"] = (int(parts[1]), int(parts[2]))
            elif tag in ("sin", "cos"):
                current[tag][int(parts[1])] = float.fromhex(parts[2])
            else:
                header[tag] = parts[1]
        except (IndexError, ValueError, TypeError) as e:
            raise ValueError(f"{path}:{lineno}: 係数ファイルの形式が不正です: {e}") from e

    if header.get("order") != EVAL_ORDER_TAG:
        raise ValueError(f"{path}: 評価順序が一致しません: {header.get('order')}")
    try:
        func = Func(header.get("func"))
    except ValueError:
        raise ValueError(f"{path}: 不明な関数: {header.get('func')}") from None

    pairs = {}
    for domain in DOMAINS:
        block = blocks.get(domain)
        if block is None:
            raise ValueError(f"{path}: 定義域 {domain} がありません")
        sin_coeffs = tuple(block["sin"][i] for i in sorted(block["sin"]))
        cos_coeffs = tuple(block["cos"][i] for i in sorted(block["cos"]))
        pp = PolyPair(sin_coeffs, cos_coeffs, func, domain)
        if block["degrees"] != (pp.sin_degree, pp.cos_degree):
            raise ValueError(f"{path}: 次数が係数の数と一致しません: {block['degrees']}")
        pairs[domain] = pp
    return FuncPolys(pairs[DOMAIN_REDUCED], pairs[DOMAIN_SMALL], header)
