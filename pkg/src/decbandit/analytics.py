"""Regret curves, fairness and the closed-form regret constants.

The constants are the coefficients of ``ln T``:

* :func:`centralized_constant` -- lower bound for any uniformly good policy
  (centralized, hence also decentralized).
* :func:`tds_constant` -- lower bound for uniformly good time-division
  selection policies.
* :func:`upper_constant` -- the TDFS upper bound under either collision
  model, built from :func:`x_k`.

They are asymptotic statements and are reported next to simulation
estimates, never asserted against finite-horizon regret.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .arena import CollisionModel, Trajectory
from .rewards import ParameterSet, rank_arms


@dataclass
class RegretCurve:
    checkpoints: np.ndarray
    regret: np.ndarray
    stderr: np.ndarray
    regret_over_log: np.ndarray = field(init=False)

    def __post_init__(self):
        t = np.asarray(self.checkpoints, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            rol = self.regret / np.log(t)
        self.regret_over_log = np.where(t > 1, rol, np.nan)


def _base_params(params: ParameterSet | Sequence[ParameterSet]) -> ParameterSet:
    # per-player sets share their top-M arms and means, so any one defines the benchmark
    return params if isinstance(params, ParameterSet) else params[0]


def best_rate(params: ParameterSet | Sequence[ParameterSet], M: int) -> float:
    """Per-slot reward of the M best arms, sum of mu(theta_sigma(j)) for j <= M."""
    return float(sum(rank_arms(_base_params(params), M).means[:M]))


def _curve(losses: np.ndarray, checkpoints: np.ndarray) -> RegretCurve:
    n = losses.shape[0]
    mean = losses.mean(axis=0)
    if n > 1:
        stderr = losses.std(axis=0, ddof=1) / math.sqrt(n)
    else:
        stderr = np.zeros_like(mean)
    return RegretCurve(np.asarray(checkpoints), mean, stderr)


def _check(trajectories: Sequence[Trajectory]) -> np.ndarray:
    if not trajectories:
        raise ValueError("empty trial set")
    cps = trajectories[0].checkpoints
    for tr in trajectories[1:]:
        if not np.array_equal(tr.checkpoints, cps):
            raise ValueError("trajectories use different checkpoints")
    return cps


def system_regret(trajectories: Sequence[Trajectory], params, M: int) -> RegretCurve:
    cps = _check(trajectories)
    target = best_rate(params, M) * cps
    losses = np.stack([target - tr.system_reward for tr in trajectories])
    return _curve(losses, cps)


def per_player_regret(trajectories: Sequence[Trajectory], params, M: int) -> list[RegretCurve]:
    """Local regret of each player against an equal 1/M share of the best reward."""
    cps = _check(trajectories)
    share = best_rate(params, M) * cps / M
    n_players = trajectories[0].player_reward.shape[0]
    return [
        _curve(np.stack([share - tr.player_reward[i] for tr in trajectories]), cps)
        for i in range(n_players)
    ]


def leading_constant_estimate(curve: RegretCurve) -> float:
    """regret(T) / ln T at the final checkpoint."""
    T = float(curve.checkpoints[-1])
    if T < 2:
        raise ValueError("final checkpoint must be >= 2")
    return float(curve.regret[-1] / math.log(T))


def tail_relative_change(curve: RegretCurve, fraction: float = 0.2) -> float:
    """|r(end) - r(start)| / |r(start)| of regret/ln t over the last ``fraction`` of checkpoints."""
    rol = curve.regret_over_log
    start = max(int(math.floor(len(rol) * (1.0 - fraction))), 0)
    first, last = rol[start], rol[-1]
    return float(abs(last - first) / abs(first))


# ---------------------------------------------------------------- constants

def _below(mu: np.ndarray, level: float) -> list[int]:
    return [j for j in range(mu.size) if mu[j] < level]


def centralized_constant(params: ParameterSet, M: int) -> float:
    rank = rank_arms(params, M)
    mu = params.means
    sM = rank.order[M - 1] - 1
    return float(sum((mu[sM] - mu[j]) / params.kl(j, sM) for j in _below(mu, mu[sM])))


def x_k(params: ParameterSet, M: int, k: int) -> float:
    if not 1 <= k <= M:
        raise ValueError(f"k must lie in 1..{M}, got {k}")
    rank = rank_arms(params, M)
    mu = params.means
    total = 0.0
    for i in range(k):
        si = rank.order[i] - 1
        total += sum(1.0 / params.kl(j, si) for j in _below(mu, mu[si]))
    return total


def upper_constant(params: ParameterSet, M: int, model: CollisionModel | str) -> float:
    model = CollisionModel.parse(model)
    rank = rank_arms(params, M)
    mu = params.means
    top = [s - 1 for s in rank.order[:M]]
    sM = top[-1]
    xs = [x_k(params, M, k) for k in range(1, M + 1)]
    below = _below(mu, mu[sM])
    if model is CollisionModel.SHARE:
        gain = sum(xs[i] * mu[top[i]] for i in range(M))
        credit = sum(mu[n] / params.kl(n, sM) for n in below)
    else:
        gain = sum(xs) * sum(mu[s] for s in top)
        credit = sum(
            mu[n] * max(1.0 / params.kl(n, sM) - sum(1.0 / params.kl(n, top[i]) for i in range(M - 1)), 0.0)
            for n in below
        )
    return float(M * (gain - credit))


def tds_constant(params: ParameterSet, M: int) -> float:
    rank = rank_arms(params, M)
    mu = params.means
    top = [s - 1 for s in rank.order[:M]]
    sM = top[-1]
    return float(sum(
        (mu[sM] - mu[j]) / params.kl(j, si) for si in top for j in _below(mu, mu[sM])
    ))


@dataclass(frozen=True)
class BoundReport:
    centralized_constant: float
    tds_constant: float
    upper_model1: float
    upper_model2: float
    x: tuple[float, ...]

    def as_dict(self) -> dict:
        return {
            "centralized_constant": self.centralized_constant,
            "tds_constant": self.tds_constant,
            "upper_model1": self.upper_model1,
            "upper_model2": self.upper_model2,
            **{f"x_{k}": v for k, v in enumerate(self.x, start=1)},
        }


def bound_report(params: ParameterSet, M: int) -> BoundReport:
    return BoundReport(
        centralized_constant(params, M),
        tds_constant(params, M),
        upper_constant(params, M, CollisionModel.SHARE),
        upper_constant(params, M, CollisionModel.NO_REWARD),
        tuple(x_k(params, M, k) for k in range(1, M + 1)),
    )
