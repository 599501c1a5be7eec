"""Per-round cost accounting and summaries.

Durations are seconds from a monotonic clock and are excluded from
determinism checks. Byte counts are lengths of the encodings actually
transmitted in the round.
"""

from __future__ import annotations

import csv
import json
import math
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Iterator, Optional, Sequence

DURATION_FIELDS = (
    "t_select",
    "t_train",
    "t_enc",
    "t_aggr",
    "t_prove",
    "t_verify_client",
    "t_verify_miner",
    "t_chain_read",
)


@dataclass
class RoundReport:
    round: int
    mode: str
    n: int
    d: int
    t_select: Optional[float] = None
    t_train: float = 0.0
    t_enc: float = 0.0
    t_aggr: float = 0.0
    t_prove: float = 0.0
    t_verify_client: Optional[float] = None
    t_verify_miner: Optional[float] = None
    t_chain_read: Optional[float] = None
    bytes_plain_update: int = 0
    bytes_enc_update: int = 0
    bytes_proof: int = 0
    bytes_statement: int = 0
    outcome: str = "verified"
    diagnostics: str = ""
    n_clamped: int = 0
    accuracy: Optional[float] = None
    loss: Optional[float] = None

    def deterministic_view(self) -> dict:
        return {k: v for k, v in asdict(self).items() if k not in DURATION_FIELDS}


CSV_COLUMNS = tuple(f.name for f in fields(RoundReport))


class Stopwatch:
    """Accumulates monotonic durations under named keys."""

    def __init__(self):
        self.totals: dict[str, float] = {}

    @contextmanager
    def time(self, key: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            self.totals[key] = self.totals.get(key, 0.0) + (time.perf_counter() - start)


def write_reports(reports: Sequence[RoundReport], out_dir: Path, stem: str = "reports") -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{stem}.csv"
    with open(csv_path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        w.writeheader()
        for r in reports:
            w.writerow({k: ("" if v is None else v) for k, v in asdict(r).items()})
    json_path = out_dir / f"{stem}.json"
    json_path.write_text(json.dumps([asdict(r) for r in reports], indent=2))
    return csv_path, json_path


def read_reports_csv(path: Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _mean_std(xs: Sequence[float]) -> tuple[float, float]:
    m = sum(xs) / len(xs)
    if len(xs) < 2:
        return m, 0.0
    var = sum((x - m) ** 2 for x in xs) / (len(xs) - 1)
    return m, math.sqrt(var)


SUMMARY_TERMS = {
    "E(train)": "t_train",
    "E(enc)": "t_enc",
    "E(aggr)": "t_aggr",
    "E(ZKP.gen)": "t_prove",
    "E(ZKP.ver)": "t_verify_client",
    "E(miner.ver)": "t_verify_miner",
    "E(chain.read)": "t_chain_read",
}


def summarize(reports: Sequence[RoundReport]) -> list[dict]:
    """Mean and standard deviation of each cost term, plus the composite per-party costs.

    Terms that were never measured (for example client verification in
    blockchain mode) are left out.
    """
    if not reports:
        raise ValueError("summarize needs at least one report")
    rows = []
    have = {}
    for term, col in SUMMARY_TERMS.items():
        xs = [getattr(r, col) for r in reports if getattr(r, col) is not None]
        if not xs:
            continue
        mean, std = _mean_std(xs)
        have[term] = [float(x) for x in xs]
        rows.append({"term": term, "column": col, "mean": mean, "std": std, "count": len(xs)})

    def composite(name, parts):
        if not all(p in have for p in parts):
            return
        k = min(len(have[p]) for p in parts)
        xs = [sum(have[p][i] for p in parts) for i in range(k)]
        mean, std = _mean_std(xs)
        rows.append({"term": name, "column": "+".join(SUMMARY_TERMS[p] for p in parts), "mean": mean, "std": std, "count": k})

    composite("E_aggregator", ["E(aggr)", "E(ZKP.gen)"])
    composite("E_client", ["E(train)", "E(enc)", "E(ZKP.ver)"])
    composite("E_client_block", ["E(train)", "E(enc)", "E(chain.read)"])
    return rows


def write_summary(rows: Sequence[dict], out_dir: Path) -> Path:
    out_dir = Path(out_dir)
    path = out_dir / "summary.csv"
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["term", "column", "mean", "std", "count"])
        w.writeheader()
        w.writerows(rows)
    (out_dir / "summary.json").write_text(json.dumps(list(rows), indent=2))
    return path
