"""Decentralized multi-armed bandits with distributed players.

Single-player learning policies, the time-division fair sharing (TDFS)
policy, both collision models, regret analytics and a seeded experiment
runner.
"""
from .analytics import (
    BoundReport,
    RegretCurve,
    bound_report,
    centralized_constant,
    leading_constant_estimate,
    per_player_regret,
    system_regret,
    tds_constant,
    upper_constant,
    x_k,
)
from .arena import CollisionModel, PlayerPresence, Trajectory, resolve, run_trial, simulate
from .policies import (
    IndexPolicy,
    LaiRobbins,
    SinglePlayer,
    StatsTable,
    agrawal_index,
    auer_index,
    lr_comparison,
    oslash,
)
from .rewards import ParameterSet, RewardFamily, kl, mean, rank_arms, sample
from .tdfs import TdfsConfig, TdfsPlayer, mini_sequence_key, target_rank

__version__ = "0.1.0"
