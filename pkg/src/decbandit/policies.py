"""Single-player arm selection over an arbitrary eligible subset of arms.

Two families of policies share one ``select(stats, eligible, seq_time)``
interface so the decentralized wrapper can run either of them on any arm
subset and any statistics table:

* :class:`LaiRobbins` -- leader versus round-robin candidate, using the
  two-condition form of the confidence-bound comparison (only point
  estimates are needed).
* :class:`IndexPolicy` -- the Agrawal (per-family) and Auer sample-mean
  indexes.

Arm ids are 1-based throughout.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .rewards import Kind, RewardFamily, kl

EPS = 1e-6


def oslash(k: int, l: int) -> int:
    """1-based modulus ``((k - 1) mod l) + 1``."""
    if l < 1:
        raise ValueError(f"l must be >= 1, got {l}")
    return (k - 1) % l + 1


@dataclass
class ArmStatistics:
    count: int = 0
    sum: float = 0.0

    @property
    def point_estimate(self) -> float:
        return self.sum / self.count if self.count else math.nan


class StatsTable:
    """Per-arm play counts and running sums over the arm universe 1..N."""

    __slots__ = ("N", "count", "sum")

    def __init__(self, N: int):
        self.N = N
        self.count = [0] * (N + 1)  # slot 0 unused
        self.sum = [0.0] * (N + 1)

    def observe(self, arm: int, value: float) -> None:
        self.count[arm] += 1
        self.sum[arm] += value

    def __getitem__(self, arm: int) -> ArmStatistics:
        return ArmStatistics(self.count[arm], self.sum[arm])

    def estimate(self, arm: int) -> float:
        c = self.count[arm]
        return self.sum[arm] / c if c else math.nan

    def copy(self) -> "StatsTable":
        out = StatsTable(self.N)
        out.count = list(self.count)
        out.sum = list(self.sum)
        return out


def _needs_init(stats: StatsTable, eligible: Sequence[int]) -> bool:
    # the one-play-per-arm warm-up is skipped when the table already covers every arm
    count = stats.count
    for arm in eligible:
        if not count[arm]:
            return True
    return False


def clamp_estimate(family: RewardFamily, h: float) -> float:
    k = family.kind
    if k is Kind.BERNOULLI:
        return min(max(h, EPS), 1.0 - EPS)
    if k is Kind.GAUSSIAN:
        return h
    return max(h, EPS)


def _log_elapsed(local_time: int) -> float:
    # ln(t - 1), taken as 0 on the very first slot of a warm-started sequence
    return math.log(local_time - 1) if local_time > 1 else 0.0


def _leader_wins(family: RewardFamily, h_leader, h_cand, count_cand, local_time) -> bool:
    if not h_cand < h_leader:
        return False
    d = kl(family, clamp_estimate(family, h_cand), clamp_estimate(family, h_leader))
    return d > _log_elapsed(local_time) / count_cand


def lr_comparison(
    leader: ArmStatistics, candidate: ArmStatistics, family: RewardFamily, local_time: int
) -> bool:
    """True when the leader's estimate beats the candidate's upper confidence bound.

    Equivalent to ``h_leader > g(t, tau_candidate)`` but expressed through
    the candidate/leader estimates and the KL threshold ``ln(t-1)/tau``.
    """
    if leader.count <= 0 or candidate.count <= 0:
        raise ValueError("both arms need at least one observation")
    if local_time < 2:
        raise ValueError(f"local_time must be >= 2, got {local_time}")
    return _leader_wins(
        family, leader.point_estimate, candidate.point_estimate, candidate.count, local_time
    )


class LaiRobbins:
    name = "lai_robbins"

    def __init__(self, family: RewardFamily, N: int, delta: float | None = None):
        if delta is None:
            delta = 1.0 / (2 * N)
        if not 0.0 < delta < 1.0 / N:
            raise ValueError(f"delta must lie in (0, 1/N) = (0, {1.0 / N}), got {delta}")
        self.family = family
        self.N = N
        self.delta = delta

    def leader(self, stats: StatsTable, eligible: Sequence[int], seq_time: int) -> int | None:
        threshold = (seq_time - 1) * self.delta
        count, total = stats.count, stats.sum
        best, best_h = None, -math.inf
        for arm in eligible:
            c = count[arm]
            if c and c >= threshold:
                h = total[arm] / c
                if h > best_h or (h == best_h and arm < best):
                    best, best_h = arm, h
        return best

    def select(self, stats: StatsTable, eligible: Sequence[int], seq_time: int) -> int:
        n = len(eligible)
        if seq_time <= n and _needs_init(stats, eligible):
            return eligible[seq_time - 1]
        candidate = eligible[(seq_time - 1) % n]
        lead = self.leader(stats, eligible, seq_time)
        # no arm clears the (m-1)*delta threshold: fall back to round robin
        if lead is None or lead == candidate:
            return candidate
        c = stats.count[candidate]
        if c == 0:
            return candidate
        h_lead = stats.sum[lead] / stats.count[lead]
        h_cand = stats.sum[candidate] / c
        return lead if _leader_wins(self.family, h_lead, h_cand, c, seq_time) else candidate


def agrawal_index(family: RewardFamily, x: float, local_time: int, tau: int) -> float:
    """Agrawal's sample-mean index for the four shipped families."""
    L = _log_elapsed(local_time)
    E = L + 2.0 * max(math.log(L), 0.0) if L > 0 else 0.0
    k = family.kind
    if k is Kind.GAUSSIAN:
        return x + math.sqrt(2.0 * E / tau)
    if k is Kind.BERNOULLI:
        return x + min(math.sqrt(2.0 * E / tau) / 2.0, 1.0)
    if k is Kind.POISSON:
        return x + min(math.sqrt(2.0 * family.a * E / tau) / 2.0, family.a)
    return x + family.b * min(math.sqrt(2.0 * E / tau), 1.0)


def auer_index(x: float, local_time: int, tau: int) -> float:
    return x + math.sqrt(2.0 * _log_elapsed(local_time) / tau)


class IndexKind(str, enum.Enum):
    AGRAWAL = "agrawal"
    AUER = "auer"


class IndexPolicy:
    def __init__(self, family: RewardFamily, kind: IndexKind | str):
        self.family = family
        self.kind = IndexKind(kind)
        self.name = f"{self.kind.value}_index"

    def index(self, x: float, local_time: int, tau: int) -> float:
        if self.kind is IndexKind.AUER:
            return auer_index(x, local_time, tau)
        return agrawal_index(self.family, x, local_time, tau)

    def select(self, stats: StatsTable, eligible: Sequence[int], seq_time: int) -> int:
        n = len(eligible)
        if seq_time <= n and _needs_init(stats, eligible):
            return eligible[seq_time - 1]
        best, best_v = None, -math.inf
        for arm in eligible:
            c = stats.count[arm]
            v = math.inf if c == 0 else self.index(stats.sum[arm] / c, seq_time, c)
            if v > best_v or (v == best_v and arm < best):
                best, best_v = arm, v
        return best


class PolicyKind(str, enum.Enum):
    LAI_ROBBINS = "lai_robbins"
    AGRAWAL = "agrawal"
    AUER = "auer"


def make_policy(kind: PolicyKind | str, family: RewardFamily, N: int, delta: float | None = None):
    kind = PolicyKind(kind)
    if kind is PolicyKind.LAI_ROBBINS:
        return LaiRobbins(family, N, delta)
    return IndexPolicy(family, kind.value)


class SinglePlayer:
    """A policy bundled with its own statistics, for plain single-player use."""

    def __init__(self, policy, N: int):
        self.policy = policy
        self.stats = StatsTable(N)
        self.arms = tuple(range(1, N + 1))
        self.t = 0

    def select(self, eligible: Sequence[int] | None = None) -> int:
        self.t += 1
        return self.policy.select(self.stats, eligible or self.arms, self.t)

    def observe(self, arm: int, value: float) -> None:
        self.stats.observe(arm, value)
