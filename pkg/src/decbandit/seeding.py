"""Deterministic random-stream derivation.

A trial's streams are a pure function of ``(master_seed, trial, stream)``:
each is seeded by ``SeedSequence(master_seed, spawn_key=(trial, stream))``.
Stream 0 draws arm states, stream 1 resolves collisions, and stream
``1 + i`` belongs to player ``i``. Running trials in any order, or any
subset of them, leaves each trial's draws unchanged.
"""
from __future__ import annotations

import numpy as np

ENV_STATES = 0
ENV_COLLISIONS = 1


def stream(master_seed: int, trial: int, stream_id: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(master_seed) % 2**64, spawn_key=(int(trial), int(stream_id)))
    return np.random.Generator(np.random.PCG64(ss))


def player_stream(master_seed: int, trial: int, player_id: int) -> np.random.Generator:
    return stream(master_seed, trial, 1 + player_id)


def state_stream(master_seed: int, trial: int, player_id: int = 0) -> np.random.Generator:
    """Arm-state stream; ``player_id > 0`` gives a player's private draws."""
    if player_id == 0:
        return stream(master_seed, trial, ENV_STATES)
    return stream(master_seed, trial, 1000 + player_id)
