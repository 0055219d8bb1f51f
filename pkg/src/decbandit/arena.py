"""Multi-player bandit environment and trial runner.

Every slot the environment draws the state of all N arms, asks each present
player for an arm, resolves collisions and hands each player the sensed
state of its own arm plus a collision flag. Players always sense the state
of their arm; collisions only affect the reward they are credited with.

* Model 1 (shared): a collided arm yields its state once, credited to one
  collider chosen uniformly at random.
* Model 2 (no reward): a collided arm yields nothing.
"""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np

from . import seeding
from .rewards import ParameterSet, RankingError, rank_arms, sample_block
from .tdfs import TdfsConfig, TdfsPlayer

STATE_BLOCK = 1024
DENSE_LIMIT = 10_000


class CollisionModel(str, enum.Enum):
    SHARE = "model1"
    NO_REWARD = "model2"

    @classmethod
    def parse(cls, value) -> "CollisionModel":
        if isinstance(value, cls):
            return value
        aliases = {"1": cls.SHARE, "model1": cls.SHARE, "share": cls.SHARE,
                   "2": cls.NO_REWARD, "model2": cls.NO_REWARD, "no_reward": cls.NO_REWARD}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown collision model {value!r}") from None


@dataclass(frozen=True)
class PlayerPresence:
    join_time: int = 1
    absence_windows: tuple[tuple[int, int], ...] = ()  # inclusive slot ranges

    def __post_init__(self):
        if self.join_time < 1:
            raise ValueError(f"join_time must be >= 1, got {self.join_time}")
        windows = sorted(tuple(int(x) for x in w) for w in self.absence_windows)
        prev_end = self.join_time
        for start, end in windows:
            if end < start:
                raise ValueError(f"absence window ({start}, {end}) ends before it starts")
            if start <= prev_end:
                raise ValueError(
                    f"absence window ({start}, {end}) overlaps another window or the join slot"
                )
            prev_end = end
        object.__setattr__(self, "absence_windows", tuple(windows))

    def present(self, t: int) -> bool:
        if t < self.join_time:
            return False
        for start, end in self.absence_windows:
            if start <= t <= end:
                return False
        return True


@dataclass
class SlotOutcome:
    states: Sequence[float]
    actions: dict[int, int]
    observations: dict[int, float]
    collided: dict[int, bool]
    rewards: dict[int, float]
    system_reward: float


def resolve(
    actions: dict[int, int],
    states: Sequence[float],
    model: CollisionModel,
    rng: np.random.Generator,
    player_states: dict[int, Sequence[float]] | None = None,
) -> SlotOutcome:
    """Resolve one slot. ``actions`` maps present player id -> 1-based arm.

    ``player_states`` optionally gives each player its own state vector
    (per-player reward distributions); otherwise all players share ``states``.
    """
    model = CollisionModel.parse(model)
    choosers: dict[int, list[int]] = {}
    for p, a in actions.items():
        choosers.setdefault(a, []).append(p)
    obs, collided, rewards = {}, {}, {}
    for p, a in actions.items():
        own = states if player_states is None else player_states[p]
        obs[p] = own[a - 1]
        collided[p] = len(choosers[a]) > 1
        rewards[p] = 0.0
    for a, ps in choosers.items():
        if len(ps) == 1:
            rewards[ps[0]] = obs[ps[0]]
        elif model is CollisionModel.SHARE:
            winner = ps[int(rng.integers(len(ps)))]
            rewards[winner] = obs[winner]
    return SlotOutcome(states, dict(actions), obs, collided, rewards, sum(rewards.values()))


class Player(Protocol):
    def step(self, global_t: int) -> int: ...
    def observe(self, arm: int, value: float, collided: bool) -> bool | None: ...


def checkpoint_grid(T: int, mode: str = "auto", n_geometric: int = 400) -> np.ndarray:
    if mode == "auto":
        mode = "dense" if T <= DENSE_LIMIT else "geometric"
    if mode == "dense":
        return np.arange(1, T + 1)
    if mode != "geometric":
        raise ValueError(f"unknown checkpoint mode {mode!r}")
    grid = np.unique(np.round(np.geomspace(1, T, n_geometric)).astype(int))
    return np.union1d(grid, [T])


@dataclass
class Trajectory:
    T: int
    M: int
    N: int
    checkpoints: np.ndarray
    system_reward: np.ndarray  # cumulative Y at each checkpoint
    player_reward: np.ndarray  # (M, C) cumulative Y_i
    collisions: np.ndarray  # cumulative collided-arm events
    play_counts: np.ndarray  # (M, N)
    arm_collisions: np.ndarray  # (N,) slots in which each arm was collided on
    regenerations: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    last_offset_conflict: int = 0  # last slot with non-distinct offsets among present players

    @property
    def total_reward(self) -> float:
        return float(self.system_reward[-1])

    def same_as(self, other: "Trajectory") -> bool:
        return (
            self.T == other.T
            and self.last_offset_conflict == other.last_offset_conflict
            and all(
                np.array_equal(getattr(self, f), getattr(other, f))
                for f in ("checkpoints", "system_reward", "player_reward", "collisions",
                          "play_counts", "arm_collisions", "regenerations")
            )
        )


def validate_player_params(per_player: Sequence[ParameterSet], M: int) -> None:
    """Per-player distributions must agree on the M best arms and their means."""
    ranks = [rank_arms(p, M) for p in per_player]
    ref = ranks[0]
    for i, r in enumerate(ranks[1:], start=2):
        if set(r.order[:M]) != set(ref.order[:M]):
            raise RankingError(
                f"player {i} top-{M} arms {sorted(r.order[:M])} differ from "
                f"player 1's {sorted(ref.order[:M])}"
            )
        if r.order[:M] != ref.order[:M] or r.means[:M] != ref.means[:M]:
            raise RankingError(f"player {i} top-{M} means {r.means[:M]} differ from {ref.means[:M]}")


def simulate(
    players: dict[int, Player],
    params: ParameterSet | Sequence[ParameterSet],
    model: CollisionModel | str,
    T: int,
    seed: int,
    trial: int = 0,
    presence: dict[int, PlayerPresence] | None = None,
    checkpoints: str | np.ndarray = "auto",
) -> Trajectory:
    """Run ``players`` (id -> object with ``step``/``observe``) for T slots."""
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    model = CollisionModel.parse(model)
    ids = sorted(players)
    M = len(ids)
    per_player = None
    if isinstance(params, ParameterSet):
        family, N = params.family, params.N
    else:
        per_player = dict(zip(ids, params))
        if len(per_player) != M:
            raise ValueError(f"need {M} per-player parameter sets, got {len(params)}")
        validate_player_params(list(per_player.values()), M)
        family, N = params[0].family, params[0].N
    presence = presence or {}
    pres = {p: presence.get(p, PlayerPresence()) for p in ids}

    grid = checkpoints if isinstance(checkpoints, np.ndarray) else checkpoint_grid(T, checkpoints)
    grid = np.asarray(grid, dtype=int)
    C = grid.size
    sys_series = np.zeros(C)
    player_series = np.zeros((M, C))
    coll_series = np.zeros(C, dtype=np.int64)
    play_counts = np.zeros((M, N), dtype=np.int64)
    arm_coll = np.zeros(N, dtype=np.int64)

    coll_rng = seeding.stream(seed, trial, seeding.ENV_COLLISIONS)
    if per_player is None:
        thetas = np.array(params.theta)
        state_rng = seeding.state_stream(seed, trial)
    else:
        thetas = {p: np.array(per_player[p].theta) for p in ids}
        state_rngs = {p: seeding.state_stream(seed, trial, p) for p in ids}

    row_of = {p: r for r, p in enumerate(ids)}
    cum_sys = 0.0
    cum_player = [0.0] * M
    cum_coll = 0
    last_conflict = 0
    track_offsets = all(hasattr(players[p], "offset") for p in ids)
    next_cp = 0
    block = None
    for t in range(1, T + 1):
        b = (t - 1) % STATE_BLOCK
        if b == 0:
            size = min(STATE_BLOCK, T - t + 1)
            if per_player is None:
                block = sample_block(family, thetas, size, state_rng).tolist()
            else:
                block = {p: sample_block(family, thetas[p], size, state_rngs[p]).tolist()
                         for p in ids}
        present = [p for p in ids if pres[p].present(t)]
        if track_offsets and len(present) > 1:
            offs = [players[p].offset for p in present]
            if len(set(offs)) < len(offs):
                last_conflict = t
        actions = {p: players[p].step(t) for p in present}
        if per_player is None:
            out = resolve(actions, block[b], model, coll_rng)
        else:
            out = resolve(actions, None, model, coll_rng, {p: block[p][b] for p in present})
        counts = Counter(actions.values())
        for a, c in counts.items():
            if c > 1:
                cum_coll += 1
                arm_coll[a - 1] += 1
        for p in present:
            a = actions[p]
            players[p].observe(a, out.observations[p], out.collided[p])
            play_counts[row_of[p], a - 1] += 1
            cum_player[row_of[p]] += out.rewards[p]
        cum_sys += out.system_reward
        if next_cp < C and grid[next_cp] == t:
            sys_series[next_cp] = cum_sys
            player_series[:, next_cp] = cum_player
            coll_series[next_cp] = cum_coll
            next_cp += 1

    regen = np.array([getattr(players[p], "regenerations", 0) for p in ids], dtype=int)
    return Trajectory(T, M, N, grid, sys_series, player_series, coll_series,
                      play_counts, arm_coll, regen, last_conflict)


def run_trial(
    params: ParameterSet | Sequence[ParameterSet],
    cfg: TdfsConfig,
    model: CollisionModel | str,
    T: int,
    seed: int,
    trial: int = 0,
    presence: dict[int, PlayerPresence] | None = None,
    checkpoints: str | np.ndarray = "auto",
) -> Trajectory:
    """One seeded TDFS trial with ``cfg.M`` players."""
    presence = presence or {}
    players = {}
    for i in range(1, cfg.M + 1):
        join = presence.get(i, PlayerPresence()).join_time
        rng = seeding.player_stream(seed, trial, i)
        players[i] = TdfsPlayer(i, cfg, rng=rng, join_time=join)
    return simulate(players, params, model, T, seed, trial, presence, checkpoints)
