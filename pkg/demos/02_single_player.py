# One user, nine Bernoulli channels, three learning rules.
#
# Regret should bend over like ln t.  We print regret/ln t at a few times;
# it settles instead of climbing.

import numpy as np

from decbandit import (ParameterSet, RewardFamily, TdfsConfig, run_trial,
                       system_regret)

bern = RewardFamily.bernoulli()
params = ParameterSet(bern, np.round(np.arange(1, 10) * 0.1, 1))
T, trials = 3000, 30

for policy in ("lai_robbins", "auer", "agrawal"):
    cfg = TdfsConfig(M=1, N=9, family=bern, policy=policy)   # M=1 is the plain policy
    trs = [run_trial(params, cfg, "model2", T, seed=1, trial=k) for k in range(trials)]
    c = system_regret(trs, params, 1)
    idx = np.searchsorted(c.checkpoints, [100, 1000, T])
    print(f"{policy:12s}", "  ".join(f"t={t}: {r:6.2f}"
                                      for t, r in zip(c.checkpoints[idx], c.regret_over_log[idx])))
