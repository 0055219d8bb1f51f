"""Reward families, parameter sets, KL divergences and arm ranking.

Every family is mean-parameterized, so ``mean(family, theta) == theta``.
All logarithms are natural (KL in nats).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class ParameterDomainError(ValueError):
    """A parameter lies outside the domain of its reward family."""


class InfiniteDivergenceError(ValueError):
    """The KL divergence between two parameters is infinite."""


class RankingError(ValueError):
    """The top of the arm ranking violates the distinct nonnegative means rule."""


class Kind(str, enum.Enum):
    BERNOULLI = "bernoulli"
    GAUSSIAN = "gaussian"
    POISSON = "poisson"
    EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class RewardFamily:
    kind: Kind
    sigma: float = 1.0  # gaussian: known common std
    a: float = 1.0  # poisson: upper bound on theta
    b: float = 1.0  # exponential: upper bound on theta

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind is Kind.GAUSSIAN and not self.sigma > 0:
            raise ParameterDomainError(f"gaussian sigma must be > 0, got {self.sigma}")
        if self.kind is Kind.POISSON and not self.a > 0:
            raise ParameterDomainError(f"poisson bound a must be > 0, got {self.a}")
        if self.kind is Kind.EXPONENTIAL and not self.b > 0:
            raise ParameterDomainError(f"exponential bound b must be > 0, got {self.b}")

    @classmethod
    def bernoulli(cls) -> "RewardFamily":
        return cls(Kind.BERNOULLI)

    @classmethod
    def gaussian(cls, sigma: float = 1.0) -> "RewardFamily":
        return cls(Kind.GAUSSIAN, sigma=sigma)

    @classmethod
    def poisson(cls, a: float) -> "RewardFamily":
        return cls(Kind.POISSON, a=a)

    @classmethod
    def exponential(cls, b: float) -> "RewardFamily":
        return cls(Kind.EXPONENTIAL, b=b)

    @property
    def nonnegative(self) -> bool:
        return self.kind is not Kind.GAUSSIAN


def check_theta(family: RewardFamily, theta: float) -> None:
    k = family.kind
    if not math.isfinite(theta):
        raise ParameterDomainError(f"theta must be finite, got {theta}")
    if k is Kind.BERNOULLI and not 0.0 < theta < 1.0:
        raise ParameterDomainError(f"bernoulli theta must lie in (0, 1), got {theta}")
    if k is Kind.POISSON and not 0.0 < theta <= family.a:
        raise ParameterDomainError(f"poisson theta must lie in (0, a={family.a}], got {theta}")
    if k is Kind.EXPONENTIAL and not 0.0 < theta <= family.b:
        raise ParameterDomainError(
            f"exponential theta must lie in (0, b={family.b}], got {theta}"
        )


def mean(family: RewardFamily, theta: float) -> float:
    check_theta(family, theta)
    return float(theta)


def kl(family: RewardFamily, theta: float, theta_prime: float) -> float:
    """KL divergence I(theta, theta') in nats, closed form per family."""
    k = family.kind
    p, q = float(theta), float(theta_prime)
    if p == q:
        return 0.0
    if k is Kind.GAUSSIAN:
        return (p - q) ** 2 / (2.0 * family.sigma**2)
    if k is Kind.BERNOULLI:
        if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
            raise ParameterDomainError(f"bernoulli parameters out of [0, 1]: {p}, {q}")
        if q in (0.0, 1.0):
            raise InfiniteDivergenceError(f"KL({p}, {q}) is infinite for bernoulli")
        out = 0.0
        if p > 0.0:
            out += p * math.log(p / q)
        if p < 1.0:
            out += (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
        return max(out, 0.0)
    if k is Kind.POISSON:
        if p < 0.0 or q <= 0.0:
            raise InfiniteDivergenceError(f"KL({p}, {q}) is infinite for poisson")
        out = q - p
        if p > 0.0:
            out += p * math.log(p / q)
        return max(out, 0.0)
    # exponential
    if p <= 0.0 or q <= 0.0:
        raise InfiniteDivergenceError(f"KL({p}, {q}) is infinite for exponential")
    r = p / q
    return max(r - 1.0 - math.log(r), 0.0)


def sample(family: RewardFamily, theta: float, rng: np.random.Generator) -> float:
    check_theta(family, theta)
    return float(sample_block(family, np.array([theta]), 1, rng)[0, 0])


def sample_block(
    family: RewardFamily, thetas: np.ndarray, size: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw ``size`` i.i.d. rows of arm states, shape ``(size, len(thetas))``."""
    thetas = np.asarray(thetas, dtype=float)
    shape = (size, thetas.size)
    k = family.kind
    if k is Kind.BERNOULLI:
        return (rng.random(shape) < thetas).astype(float)
    if k is Kind.GAUSSIAN:
        return thetas + family.sigma * rng.standard_normal(shape)
    if k is Kind.POISSON:
        return rng.poisson(thetas, shape).astype(float)
    return rng.exponential(thetas, shape)


@dataclass(frozen=True)
class ParameterSet:
    family: RewardFamily
    theta: tuple[float, ...]

    def __init__(self, family: RewardFamily, theta: Sequence[float]):
        theta = tuple(float(x) for x in theta)
        if len(theta) < 2:
            raise ParameterDomainError(f"need at least 2 arms, got {len(theta)}")
        for x in theta:
            check_theta(family, x)
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "theta", theta)

    @property
    def N(self) -> int:
        return len(self.theta)

    @property
    def means(self) -> np.ndarray:
        return np.array([mean(self.family, x) for x in self.theta])

    def kl(self, i: int, j: int) -> float:
        """I(theta_i, theta_j) for 0-based arm indices."""
        return kl(self.family, self.theta[i], self.theta[j])


@dataclass(frozen=True)
class ArmRank:
    order: tuple[int, ...]  # 1-based arm ids, best first
    means: tuple[float, ...]  # means along ``order``


def rank_arms(params: ParameterSet, M: int) -> ArmRank:
    N = params.N
    if not 1 <= M < N:
        raise RankingError(f"need 1 <= M < N, got M={M}, N={N}")
    mu = params.means
    # stable descending sort: equal means keep ascending arm id
    order = sorted(range(N), key=lambda i: -mu[i])
    top = order[: M + 1]
    for r in range(M):
        if mu[top[r]] == mu[top[r + 1]]:
            raise RankingError(
                f"tie at rank {r + 1}: arms {top[r] + 1} and {top[r + 1] + 1} "
                f"share mean {mu[top[r]]}"
            )
    negative = [i + 1 for i in order[:M] if mu[i] < 0]
    if negative:
        raise RankingError(f"top-{M} arms {negative} have negative means")
    return ArmRank(tuple(i + 1 for i in order), tuple(float(mu[i]) for i in order))
