"""Monte Carlo sweeps over (n, rho) for the correlated family ``P_rho``."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng
from .dist import correlated_family, mutual_information
from .errors import FormatError
from .graph import make_instance
from .matcher import MatchConfig, MatchResult, match

SWEEP_COLUMNS = ["n", "rho", "mi_bits", "epsilon", "trials", "mean_correct_fraction",
                 "std_correct_fraction", "mean_candidate_count", "empty_sigma_rate", "seed"]

_KEYS = {"n_list", "rho_list", "trials", "epsilon", "seed", "mode", "l"}


@dataclass(frozen=True)
class SweepConfig:
    n_list: tuple[int, ...]
    rho_list: tuple[float, ...]
    trials: int = 100
    epsilon: float | str = "auto"
    seed: int = 0
    mode: str = "exhaustive"
    l: int = 2

    def __post_init__(self):
        if not self.n_list or not self.rho_list:
            raise ValueError("n_list and rho_list must be non-empty")
        if any(n < 3 for n in self.n_list):
            raise ValueError("every n must be at least 3")
        if any(not 0.0 <= r <= 1.0 for r in self.rho_list):
            raise ValueError("every rho must lie in [0, 1]")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        MatchConfig(epsilon=self.epsilon, mode=self.mode)  # validates both


def parse_config(text: str) -> SweepConfig:
    """Flat ``key=value`` lines; ``#`` starts a comment; lists are comma-separated."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, val = line.partition("=")
        key = key.strip()
        if not eq or key not in _KEYS:
            raise FormatError(f"line {lineno}: expected one of {sorted(_KEYS)} as key=value, got {line!r}")
        raw[key] = val.strip()
    missing = {"n_list", "rho_list"} - raw.keys()
    if missing:
        raise FormatError(f"config is missing {sorted(missing)}")
    try:
        eps = raw.get("epsilon", "auto")
        cfg = SweepConfig(
            n_list=tuple(int(v) for v in raw["n_list"].split(",") if v.strip()),
            rho_list=tuple(float(v) for v in raw["rho_list"].split(",") if v.strip()),
            trials=int(raw.get("trials", 100)),
            epsilon=eps if eps == "auto" else float(eps),
            seed=int(raw.get("seed", 0)),
            mode=raw.get("mode", "exhaustive"),
            l=int(raw.get("l", 2)),
        )
    except ValueError as exc:
        raise FormatError(f"invalid config: {exc}") from None
    return cfg


def instance_seed(seed: int, n: int, rho_index: int, trial: int) -> int:
    return rng.subseed(seed, rng.SWEEP, n, rho_index, trial)


def run_cell(cfg: SweepConfig, n: int, rho_index: int) -> list[MatchResult]:
    dist = correlated_family(cfg.rho_list[rho_index], cfg.l)
    out = []
    for trial in range(cfg.trials):
        s = instance_seed(cfg.seed, n, rho_index, trial)
        inst = make_instance(dist, n, s)
        out.append(match(inst, MatchConfig(epsilon=cfg.epsilon, mode=cfg.mode, seed=s,
                                           max_exhaustive_n=max(10, n))))
    return out


def summarize_cell(cfg: SweepConfig, n: int, rho_index: int, results: list[MatchResult]) -> dict:
    """One CSV row. Empty outcomes are excluded from the correct-fraction mean."""
    rho = cfg.rho_list[rho_index]
    ok = [r.correct_fraction for r in results if r.status == "ok"]
    return {
        "n": n,
        "rho": rho,
        "mi_bits": mutual_information(correlated_family(rho, cfg.l), 2),
        "epsilon": results[0].epsilon,
        "trials": len(results),
        "mean_correct_fraction": float(np.mean(ok)) if ok else math.nan,
        "std_correct_fraction": float(np.std(ok)) if ok else math.nan,
        "mean_candidate_count": float(np.mean([r.candidate_count for r in results])),
        "empty_sigma_rate": sum(r.status == "empty" for r in results) / len(results),
        "seed": cfg.seed,
    }


def _cell_task(args):
    cfg, n, k = args
    return run_cell(cfg, n, k)


def run_sweep(cfg: SweepConfig, jobs: int = 1) -> tuple[list[dict], dict]:
    """Rows in (n, rho) order, plus the raw per-instance results keyed by ``(n, rho_index)``."""
    cells = [(cfg, n, k) for n in cfg.n_list for k in range(len(cfg.rho_list))]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(_cell_task, cells))
    else:
        results = [_cell_task(c) for c in cells]
    raw = {(n, k): res for (_, n, k), res in zip(cells, results)}
    rows = [summarize_cell(cfg, n, k, res) for (_, n, k), res in zip(cells, results)]
    return rows, raw


def format_value(v) -> str:
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_value(row[c]) for c in columns])
    return buf.getvalue()


def read_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))
