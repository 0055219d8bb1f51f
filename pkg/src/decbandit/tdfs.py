"""Time-division fair sharing (TDFS) of the M best arms among M players.

Each player splits its time into M interleaved subsequences and, with its
own offset, targets rank ``j`` in subsequence ``k`` where
``j = target_rank(k, offset + 1, M)``. Rank-1 slots run the single-player
policy over all arms; rank-j slots (j > 1) remove the arms the player just
played at ranks 1..j-1 and run the policy on what is left. Each distinct
remaining subset is its own *mini-sequence* with its own slot counter.

Without pre-agreement a player draws its offset uniformly at join and
re-draws it at the end of any round (M acted slots) in which it observed
a collision.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .policies import StatsTable, make_policy, oslash
from .rewards import RewardFamily

__all__ = [
    "TdfsConfig",
    "TdfsPlayer",
    "oslash",
    "target_rank",
    "mini_sequence_key",
]


def target_rank(k: int, i_offset: int, M: int) -> int:
    """Rank targeted in subsequence ``k`` by the player with offset ``i_offset``."""
    i = i_offset + 1
    return oslash(k - i + M + 1, M)


def mini_sequence_key(recent_actions: Sequence[int], j: int, N: int) -> tuple[int, ...]:
    """Arms left for a rank-``j`` slot after removing the last ``j - 1`` own actions."""
    if j <= 1:
        return tuple(range(1, N + 1))
    removed = set(recent_actions[-(j - 1):])
    return tuple(a for a in range(1, N + 1) if a not in removed)


@dataclass
class TdfsConfig:
    M: int
    N: int
    family: RewardFamily
    policy: str | Sequence[str] = "lai_robbins"  # one name, or one per player
    coupled: bool = True
    pre_agreement: bool = True
    delta: float | None = None

    def __post_init__(self):
        if not 1 <= self.M < self.N:
            raise ValueError(f"need 1 <= M < N, got M={self.M}, N={self.N}")
        if self.delta is None:
            self.delta = 1.0 / (2 * self.N)
        if not 0.0 < self.delta < 1.0 / self.N:
            raise ValueError(f"delta must lie in (0, 1/N), got {self.delta}")
        if not isinstance(self.policy, str) and len(self.policy) != self.M:
            raise ValueError(f"need {self.M} per-player policies, got {len(self.policy)}")

    def policy_for(self, player_id: int) -> str:
        if isinstance(self.policy, str):
            return self.policy
        return self.policy[player_id - 1]


@dataclass
class TdfsPlayer:
    """Local state and decision rule of one TDFS player."""

    player_id: int
    cfg: TdfsConfig
    rng: np.random.Generator | None = None
    join_time: int = 1

    offset: int = field(init=False)
    acted: int = field(init=False, default=0)
    global_stats: StatsTable = field(init=False)
    context_stats: dict = field(init=False, default_factory=dict)
    subseq_counters: dict = field(init=False, default_factory=dict)
    mini_counters: dict = field(init=False, default_factory=dict)
    recent_actions: list = field(init=False, default_factory=list)
    round_collision: bool = field(init=False, default=False)
    round_position: int = field(init=False, default=0)
    regenerations: int = field(init=False, default=0)

    def __post_init__(self):
        cfg = self.cfg
        if not 1 <= self.player_id <= cfg.M:
            raise ValueError(f"player_id must lie in 1..{cfg.M}, got {self.player_id}")
        self.policy = make_policy(cfg.policy_for(self.player_id), cfg.family, cfg.N, cfg.delta)
        self.global_stats = StatsTable(cfg.N)
        self._all_arms = tuple(range(1, cfg.N + 1))
        self._pending_context = None
        if cfg.pre_agreement:
            self.offset = self.player_id - 1
        else:
            if self.rng is None:
                raise ValueError("a random stream is required without pre-agreement")
            self.offset = self._draw_offset()

    def _draw_offset(self) -> int:
        if self.cfg.M == 1:
            return 0
        return int(self.rng.integers(self.cfg.M))

    def clock(self, global_t: int) -> int:
        """Slot index driving the subsequence schedule."""
        if self.cfg.pre_agreement:
            return global_t
        return global_t - self.join_time + 1

    def rank_at(self, global_t: int) -> int:
        k = oslash(self.clock(global_t), self.cfg.M)
        return target_rank(k, self.offset, self.cfg.M)

    def step(self, global_t: int) -> int:
        cfg = self.cfg
        M, N = cfg.M, cfg.N
        k = oslash(self.clock(global_t), M)
        j = target_rank(k, self.offset, M)
        key = (self.offset, k)
        m = self.subseq_counters.get(key, 0) + 1
        self.subseq_counters[key] = m
        if j == 1:
            self.recent_actions.clear()
            eligible = self._all_arms
        else:
            eligible = mini_sequence_key(self.recent_actions, j, N)
        ctx = (self.offset, j, eligible)

        if m <= N:
            arm = m
            # subsequence initialisation belongs to the rank-1 procedure only
            self._pending_context = ctx if j == 1 else None
        else:
            n_mini = self.mini_counters.get(ctx, 0) + 1
            self.mini_counters[ctx] = n_mini
            seq_time = m if j == 1 else n_mini
            if cfg.coupled:
                stats = self.global_stats
            else:
                stats = self.context_stats.get(ctx)
                if stats is None:
                    stats = self.context_stats[ctx] = StatsTable(N)
            arm = self.policy.select(stats, eligible, seq_time)
            self._pending_context = ctx

        self.recent_actions.append(arm)
        if len(self.recent_actions) > M - 1:
            del self.recent_actions[0]
        self.acted += 1
        return arm

    def observe(self, arm: int, value: float, collided: bool) -> bool:
        """Record the sensed state of ``arm``; returns True if the offset was re-drawn."""
        self.global_stats.observe(arm, value)
        if not self.cfg.coupled and self._pending_context is not None:
            ctx = self._pending_context
            stats = self.context_stats.get(ctx)
            if stats is None:
                stats = self.context_stats[ctx] = StatsTable(self.cfg.N)
            stats.observe(arm, value)
        self._pending_context = None
        if self.cfg.pre_agreement:
            return False
        if collided:
            self.round_collision = True
        self.round_position += 1
        if self.round_position == self.cfg.M:
            return self.offset_round_end()
        return False

    def offset_round_end(self) -> bool:
        changed = False
        if self.round_collision:
            self.offset = self._draw_offset()
            self.regenerations += 1
            changed = True
        self.round_collision = False
        self.round_position = 0
        return changed
