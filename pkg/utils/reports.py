from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import pandas as pd

CSV_COLUMNS = ["prefix", "policy", "mean_cost", "stderr", "mean_opened", "mean_broken", "ref_cost", "ratio"]


@dataclass
class RunReport:
    command: list[str]
    params: dict
    seed: int | None = None
    # per policy (or per solver) results, already JSON-ready
    results: dict = field(default_factory=dict)
    rows: list[dict] = field(default_factory=list)
    # "exact_single_bin", "single_bin_float", "proxy_n_over_C_plus_1", or a policy name
    reference: str | None = None
    checks: list[dict] = field(default_factory=list)
    wall_clock: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def rows_frame(rows: list[dict]) -> pd.DataFrame:
    df = pd.DataFrame(rows, columns=CSV_COLUMNS)
    return df.sort_values(["prefix", "policy"], kind="stable").reset_index(drop=True)


def write_csv(rows: list[dict], path: str) -> pd.DataFrame:
    df = rows_frame(rows)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format="%.10g")
    return df


def write_report(report: RunReport, path: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(report.to_dict(), indent=2, default=str) + "\n", encoding="utf-8")
