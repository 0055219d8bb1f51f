"""Seeded Monte Carlo runs, parameter sweeps and their CSV outputs.

Trial ``i`` draws all of its randomness from ``(cfg.seed, i)``, and results
are reduced in trial order, so outputs do not depend on the worker count.
"""
from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .. import analytics
from ..arena import Trajectory, run_trial
from ..tdfs import TdfsConfig
from .config import ExperimentConfig, with_sweep_value

log = logging.getLogger(__name__)

SWEEP_HEADER = [
    "value", "leading_constant_mean", "stderr", "centralized_constant",
    "tds_constant", "upper_model1", "upper_model2",
]


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.9g}"


def tdfs_config(cfg: ExperimentConfig) -> TdfsConfig:
    return TdfsConfig(
        M=cfg.M, N=cfg.N, family=cfg.family, policy=cfg.policy,
        coupled=cfg.coupled, pre_agreement=cfg.pre_agreement, delta=cfg.delta,
    )


def _one_trial(args) -> Trajectory:
    cfg, trial = args
    return run_trial(
        cfg.trial_params, tdfs_config(cfg), cfg.collision_model, cfg.T,
        cfg.seed, trial, cfg.presence, cfg.checkpoints,
    )


def run_trials(cfg: ExperimentConfig, workers: int = 1) -> list[Trajectory]:
    jobs = [(cfg, i) for i in range(cfg.trials)]
    if workers <= 1 or cfg.trials == 1:
        return [_one_trial(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_one_trial, jobs, chunksize=max(1, cfg.trials // (4 * workers))))


@dataclass
class ExperimentResult:
    cfg: ExperimentConfig
    trajectories: list[Trajectory]
    curve: analytics.RegretCurve
    player_curves: list[analytics.RegretCurve]
    bounds: analytics.BoundReport

    @property
    def leading_constant(self) -> float:
        return analytics.leading_constant_estimate(self.curve)

    @property
    def leading_constant_stderr(self) -> float:
        return float(self.curve.stderr[-1] / math.log(self.cfg.T))

    def collisions_mean(self) -> np.ndarray:
        return np.mean([tr.collisions for tr in self.trajectories], axis=0)

    def player_rewards_mean(self) -> np.ndarray:
        return np.mean([tr.player_reward[:, -1] for tr in self.trajectories], axis=0)

    def summary(self) -> dict:
        out = {
            "name": self.cfg.name,
            "trials": self.cfg.trials,
            "T": self.cfg.T,
            "M": self.cfg.M,
            "N": self.cfg.N,
            "leading_constant": self.leading_constant,
            "leading_constant_stderr": self.leading_constant_stderr,
            "centralized_constant": self.bounds.centralized_constant,
            "tds_constant": self.bounds.tds_constant,
            "upper_model1": self.bounds.upper_model1,
            "upper_model2": self.bounds.upper_model2,
            "total_collisions_mean": float(self.collisions_mean()[-1]),
            "regenerations_mean": float(np.mean([tr.regenerations.sum() for tr in self.trajectories])),
        }
        for i, r in enumerate(self.player_rewards_mean(), start=1):
            out[f"reward_player{i}_mean"] = float(r)
        return out


def summarize(cfg: ExperimentConfig, trajectories: list[Trajectory]) -> ExperimentResult:
    params = cfg.trial_params
    return ExperimentResult(
        cfg,
        trajectories,
        analytics.system_regret(trajectories, params, cfg.M),
        analytics.per_player_regret(trajectories, params, cfg.M),
        analytics.bound_report(cfg.params, cfg.M),
    )


def run_experiment(cfg: ExperimentConfig, out_dir: str | Path | None = None,
                   workers: int = 1) -> ExperimentResult:
    log.info("running %s: %d trials of T=%d", cfg.name, cfg.trials, cfg.T)
    result = summarize(cfg, run_trials(cfg, workers))
    out_dir = out_dir or cfg.output_dir
    if out_dir is not None:
        write_experiment(result, Path(out_dir))
    return result


def regret_rows(result: ExperimentResult) -> tuple[list[str], list[list[str]]]:
    M = result.cfg.M
    header = ["t", "regret_mean", "regret_stderr", "regret_over_logt"]
    header += [f"regret_player{i}" for i in range(1, M + 1)]
    header += ["collisions_cum_mean"]
    c = result.curve
    coll = result.collisions_mean()
    rows = []
    for idx, t in enumerate(c.checkpoints):
        rol = c.regret_over_log[idx]
        row = [fmt(t), fmt(c.regret[idx]), fmt(c.stderr[idx]), "" if np.isnan(rol) else fmt(rol)]
        row += [fmt(pc.regret[idx]) for pc in result.player_curves]
        row.append(fmt(coll[idx]))
        rows.append(row)
    return header, rows


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_experiment(result: ExperimentResult, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    header, rows = regret_rows(result)
    _write_csv(out_dir / "regret.csv", header, rows)
    summary = result.summary()
    _write_csv(out_dir / "summary.csv", list(summary),
               [[v if isinstance(v, str) else fmt(v) for v in summary.values()]])


def run_sweep(cfg: ExperimentConfig, param: str, values: Sequence[int],
              out_dir: str | Path | None = None, workers: int = 1) -> list[dict]:
    points = [with_sweep_value(cfg, param, v) for v in values]  # validate all first
    rows = []
    for value, point in zip(values, points):
        res = run_experiment(point, out_dir=None, workers=workers)
        b = res.bounds
        rows.append({
            "value": value,
            "leading_constant_mean": res.leading_constant,
            "stderr": res.leading_constant_stderr,
            "centralized_constant": b.centralized_constant,
            "tds_constant": b.tds_constant,
            "upper_model1": b.upper_model1,
            "upper_model2": b.upper_model2,
        })
    out_dir = out_dir or cfg.output_dir
    if out_dir is not None:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        _write_csv(path / "sweep.csv", SWEEP_HEADER,
                   [[fmt(r[k]) for k in SWEEP_HEADER] for r in rows])
    return rows
