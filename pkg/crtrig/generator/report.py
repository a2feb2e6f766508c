"""係数生成のJSONレポート"""

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from crtrig import __version__


@dataclass
class GenerationReport:
    """1つの関数・定義域についての生成結果"""

    func: str
    domain: str
    sin_degree: int
    cos_degree: int
    inputs: int = 0
    constraints: int = 0
    anchor_constraints: int = 0
    active_constraints: int = 0
    skipped_inputs: int = 0
    hard_inputs: list[str] = field(default_factory=list)
    margin_ulps: float = 0.0
    rounds: int = 0
    min_slack: float = 0.0
    exact_check: bool = False
    exact_refined: bool = False
    exact_check_required: bool = True
    validation_failures: list[str] = field(default_factory=list)
    holdout_inputs: int = 0
    holdout_failures: list[str] = field(default_factory=list)
    coefficients: list[str] = field(default_factory=list)
    error: str | None = None
    generator_version: str = __version__

    @property
    def ok(self) -> bool:
        if self.error is not None or self.validation_failures or self.holdout_failures:
            return False
        return self.exact_check or not self.exact_check_required

    def to_dict(self) -> dict:
        data = asdict(self)
        data["ok"] = self.ok
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")
