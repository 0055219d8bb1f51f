# Regret constants for a handful of channel configurations.
#
# Every constant here multiplies ln T.  The centralized one is the floor for
# any policy; the time-division one is the floor for policies that share the
# best arms by taking turns; the two upper constants are what TDFS guarantees.

import numpy as np

from decbandit import ParameterSet, RewardFamily, bound_report, kl

# ## Divergences
# Closed forms for the four families.  Bernoulli blows up at the boundary.

bern = RewardFamily.bernoulli()
gauss = RewardFamily.gaussian(1.0)
print("kl bern(0.1 || 0.2)  =", round(kl(bern, 0.1, 0.2), 6))
print("kl gauss(1 || 2)     =", kl(gauss, 1.0, 2.0))
print("kl expo(1 || 2)      =", round(kl(RewardFamily.exponential(b=10), 1.0, 2.0), 6))
print("kl poisson(1 || 2)   =", round(kl(RewardFamily.poisson(a=10), 1.0, 2.0), 6))

# ## Bound constants, nine Bernoulli channels

params = ParameterSet(bern, np.round(np.arange(1, 10) * 0.1, 1))
for M in (1, 2, 3, 4):
    rep = bound_report(params, M)
    print(f"M={M}  centralized={rep.centralized_constant:8.2f}  tds={rep.tds_constant:8.2f}  "
          f"upper1={rep.upper_model1:9.1f}  upper2={rep.upper_model2:9.1f}")

# At M = 1 all four collapse to the same number; the gap opens with M.
