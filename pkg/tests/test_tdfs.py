import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decbandit.arena import run_trial
from decbandit.rewards import ParameterSet, RewardFamily
from decbandit.tdfs import TdfsConfig, TdfsPlayer, mini_sequence_key, oslash, target_rank

BERN = RewardFamily.bernoulli()


def drive(players, T, state_fn, start=1):
    """Step players through slots start..start+T-1; returns {id: [arms]}."""
    out = {p.player_id: [] for p in players}
    for t in range(start, start + T):
        acts = {p.player_id: p.step(t) for p in players}
        seen = list(acts.values())
        for p in players:
            a = acts[p.player_id]
            p.observe(a, state_fn(t, a), seen.count(a) > 1)
            out[p.player_id].append(a)
    return out


@pytest.mark.parametrize("k,l,expected", [(5, 3, 2), (3, 3, 3), (1, 1, 1), (1, 7, 1), (8, 4, 4)])
def test_oslash(k, l, expected):
    assert oslash(k, l) == expected


def test_target_rank_examples():
    assert target_rank(1, 0, 2) == 1
    assert target_rank(1, 1, 2) == 2
    for M in range(1, 6):
        for i_off in range(M):
            assert target_rank(i_off + 1, i_off, M) == 1


@pytest.mark.parametrize("M", [2, 3, 4, 5])
def test_distinct_offsets_target_distinct_ranks(M):
    for k in range(1, M + 1):
        ranks = [target_rank(k, o, M) for o in range(M)]
        assert sorted(ranks) == list(range(1, M + 1))


def test_mini_sequence_key_examples():
    assert mini_sequence_key([2, 3], 1, 4) == (1, 2, 3, 4)
    assert mini_sequence_key([1], 2, 3) == (2, 3)
    assert mini_sequence_key([4, 1, 3], 3, 5) == (2, 4, 5)
    # duplicate earlier actions are removed once
    assert mini_sequence_key([2, 2], 3, 4) == (1, 3, 4)


def test_golden_trace():
    # hand simulation: M=2, N=3, delta=1/6, every sensed state equal to 1
    cfg = TdfsConfig(M=2, N=3, family=BERN, delta=1 / 6)
    players = [TdfsPlayer(1, cfg), TdfsPlayer(2, cfg)]
    arms = drive(players, 10, lambda t, a: 1.0)
    assert arms[1][:6] == [1, 1, 2, 2, 3, 3]
    assert arms[2][:6] == [1, 1, 2, 2, 3, 3]
    assert arms[1] == [1, 1, 2, 2, 3, 3, 1, 2, 2, 1]
    assert arms[2] == [1, 1, 2, 2, 3, 3, 1, 1, 2, 2]


def _random_run(M, N, T, seed, coupled=True, pre_agreement=True, policy="lai_robbins"):
    cfg = TdfsConfig(M=M, N=N, family=BERN, coupled=coupled, pre_agreement=pre_agreement,
                     policy=policy)
    players = [TdfsPlayer(i, cfg, rng=np.random.default_rng([seed, i])) for i in range(1, M + 1)]
    theta = np.linspace(0.1, 0.9, N)
    rng = np.random.default_rng(seed)
    states = {}

    def state(t, a):
        if t not in states:
            states[t] = (rng.random(N) < theta).astype(float)
        return states[t][a - 1]

    return players, drive(players, T, state)


def test_rank_two_keys_for_three_arms():
    players, _ = _random_run(2, 3, 3000, seed=4)
    keys = {ctx[2] for ctx in players[0].mini_counters if ctx[1] == 2}
    assert len(keys) == comb(3, 1) == 3


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2), st.integers(0, 10_000), st.booleans(), st.booleans(),
       st.sampled_from(["lai_robbins", "auer", "agrawal"]))
def test_actions_legal_and_counters_conserved(M, extra, seed, coupled, pre, policy):
    N = M + 1 + extra
    cfg = TdfsConfig(M=M, N=N, family=BERN, coupled=coupled, pre_agreement=pre, policy=policy)
    players = [TdfsPlayer(i, cfg, rng=np.random.default_rng([seed, i])) for i in range(1, M + 1)]
    rng = np.random.default_rng(seed)
    for t in range(1, 301):
        states = (rng.random(N) < 0.5).astype(float)
        acts = {}
        for p in players:
            j = p.rank_at(t)
            before = list(p.recent_actions)
            a = p.step(t)
            assert 1 <= a <= N
            # transient keys from repeated actions are larger; only full-size ones are counted
            ctx_keys = [c for c in p.mini_counters if c[1] == j and len(c[2]) == N - j + 1]
            if j > 1 and p.subseq_counters[(p.offset, (p.clock(t) - 1) % M + 1)] > N:
                assert a in mini_sequence_key(before, j, N)
                assert len(ctx_keys) <= comb(N, j - 1) * M
            acts[p.player_id] = a
        for p in players:
            a = acts[p.player_id]
            p.observe(a, states[a - 1], list(acts.values()).count(a) > 1)
    for p in players:
        assert sum(p.subseq_counters.values()) == p.acted == 300
        for (off, k), m in p.subseq_counters.items():
            j = target_rank(k, off, M)
            minis = sum(v for c, v in p.mini_counters.items() if c[0] == off and c[1] == j)
            assert minis == max(m - N, 0)


@pytest.mark.parametrize("M", [2, 3, 4])
def test_rank_coverage_with_pre_agreement(M):
    cfg = TdfsConfig(M=M, N=M + 2, family=BERN)
    for pid in range(1, M + 1):
        p = TdfsPlayer(pid, cfg)
        ranks = [p.rank_at(t) for t in range(1, 40)]
        for w in range(len(ranks) - M + 1):
            assert sorted(ranks[w:w + M]) == list(range(1, M + 1))


def test_pre_agreement_deterministic():
    _, a = _random_run(3, 6, 500, seed=8)
    _, b = _random_run(3, 6, 500, seed=8)
    assert a == b


def test_pre_agreement_offsets_fixed():
    players, _ = _random_run(3, 5, 300, seed=2)
    assert [p.offset for p in players] == [0, 1, 2]
    assert all(p.regenerations == 0 for p in players)


def test_coupled_observation_touches_one_statistic():
    cfg = TdfsConfig(M=2, N=3, family=BERN)
    p = TdfsPlayer(1, cfg)
    a = p.step(1)
    p.observe(a, 1.0, False)
    assert sum(p.global_stats.count) == 1 and p.global_stats.count[a] == 1
    assert p.context_stats == {}


def test_uncoupled_observation_updates_only_its_context():
    players, _ = _random_run(2, 4, 400, seed=3, coupled=False)
    p = players[0]
    counts_before = {ctx: list(s.count) for ctx, s in p.context_stats.items()}
    t = 401
    a = p.step(t)
    ctx = p._pending_context
    p.observe(a, 1.0, False)
    for c, s in p.context_stats.items():
        expected = list(counts_before.get(c, [0] * 5))
        if c == ctx:
            expected[a] += 1
        assert s.count == expected


def test_offset_kept_without_collision():
    cfg = TdfsConfig(M=3, N=5, family=BERN, pre_agreement=False)
    p = TdfsPlayer(1, cfg, rng=np.random.default_rng(0))
    before = p.offset
    for t in range(1, 4):
        p.observe(p.step(t), 0.0, False)
    assert p.offset == before and p.regenerations == 0


def test_offset_regenerated_uniformly_after_collision():
    M = 4
    cfg = TdfsConfig(M=M, N=6, family=BERN, pre_agreement=False)
    p = TdfsPlayer(1, cfg, rng=np.random.default_rng(17))
    n = 100_000
    hits = np.zeros(M)
    for _ in range(n):
        p.round_collision = True
        p.offset_round_end()
        hits[p.offset] += 1
    assert np.all(np.abs(hits / n - 1 / M) < 0.01)
    assert p.round_collision is False and p.recent_actions == []


def test_single_player_offset_always_zero():
    cfg = TdfsConfig(M=1, N=3, family=BERN, pre_agreement=False)
    p = TdfsPlayer(1, cfg, rng=np.random.default_rng(0))
    for t in range(1, 50):
        p.observe(p.step(t), 1.0, True)
        assert p.offset == 0


def test_distinct_offsets_absorb():
    # near-deterministic states with widely separated means: once offsets
    # separate, nobody collides again
    fam = RewardFamily.gaussian(1e-9)
    params = ParameterSet(fam, [0.0, 10.0, 20.0, 30.0, 40.0])
    cfg = TdfsConfig(M=3, N=5, family=fam, pre_agreement=False)
    for trial in range(5):
        tr = run_trial(params, cfg, "model2", 3000, seed=21, trial=trial)
        assert tr.last_offset_conflict < 1500
        assert tr.collisions[-1] == tr.collisions[1499]


def test_config_validation():
    with pytest.raises(ValueError):
        TdfsConfig(M=3, N=3, family=BERN)
    with pytest.raises(ValueError):
        TdfsConfig(M=2, N=4, family=BERN, delta=0.3)
    with pytest.raises(ValueError):
        TdfsConfig(M=2, N=4, family=BERN, policy=("auer",))


def test_per_player_policies():
    cfg = TdfsConfig(M=2, N=4, family=BERN, policy=("lai_robbins", "auer"))
    assert TdfsPlayer(1, cfg).policy.name == "lai_robbins"
    assert TdfsPlayer(2, cfg).policy.name == "auer_index"


def test_free_mode_needs_stream():
    cfg = TdfsConfig(M=2, N=4, family=BERN, pre_agreement=False)
    with pytest.raises(ValueError):
        TdfsPlayer(1, cfg)


def test_offsets_cover_all_values():
    cfg = TdfsConfig(M=3, N=5, family=BERN, pre_agreement=False)
    seen = {TdfsPlayer(1, cfg, rng=np.random.default_rng(s)).offset for s in range(60)}
    assert seen == {0, 1, 2}


def test_mini_key_count_bounded_by_binomial():
    players, _ = _random_run(3, 5, 3000, seed=12)
    for p in players:
        for j in (2, 3):
            keys = {c[2] for c in p.mini_counters if c[1] == j}
            assert len(keys) <= comb(5, j - 1)
            assert all(len(k) >= 5 - j + 1 for k in keys)
    assert list(itertools.islice(players[0].mini_counters, 1))
