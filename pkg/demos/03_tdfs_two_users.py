# Two secondary users, pre-agreed offsets, colliders get nothing.
#
# Each user cycles through its ranks, so the best two channels are shared
# by time division.  Collisions happen early while the ranking is unsettled
# and thin out later.

import numpy as np

from decbandit import (CollisionModel, ParameterSet, RewardFamily, TdfsConfig,
                       per_player_regret, run_trial, system_regret)

bern = RewardFamily.bernoulli()
params = ParameterSet(bern, [0.1, 0.3, 0.5, 0.7, 0.9])
cfg = TdfsConfig(M=2, N=5, family=bern)
T, trials = 4000, 40

for model in CollisionModel:
    trs = [run_trial(params, cfg, model, T, seed=7, trial=k) for k in range(trials)]
    sys_c = system_regret(trs, params, 2)
    per = per_player_regret(trs, params, 2)
    coll = np.mean([tr.collisions for tr in trs], axis=0)
    half = np.searchsorted(trs[0].checkpoints, T // 2)
    print(model.value)
    print(f"  regret at T         {sys_c.regret[-1]:8.1f} +/- {sys_c.stderr[-1]:.1f}")
    print(f"  per player          " + ", ".join(f"{c.regret[-1]:.1f}" for c in per))
    print(f"  collisions by T/2   {coll[half]:8.1f}, after: {coll[-1] - coll[half]:.1f}")
    print(f"  plays of each arm   {np.mean([tr.play_counts.sum(0) for tr in trs], axis=0).round(0)}")
