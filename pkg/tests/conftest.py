import math

import numpy as np
import pytest
from scipy import integrate, stats

from decbandit.rewards import Kind, RewardFamily


def numeric_kl(family: RewardFamily, theta: float, theta_prime: float) -> float:
    """E_theta[log f(Y; theta) / f(Y; theta')] by quadrature or summation."""
    k = family.kind
    if k is Kind.BERNOULLI:
        return sum(
            stats.bernoulli.pmf(s, theta)
            * (stats.bernoulli.logpmf(s, theta) - stats.bernoulli.logpmf(s, theta_prime))
            for s in (0, 1)
        )
    if k is Kind.POISSON:
        hi = int(stats.poisson.isf(1e-13, theta)) + 10
        ks = np.arange(0, hi + 1)
        p = stats.poisson.pmf(ks, theta)
        return float(np.sum(p * (stats.poisson.logpmf(ks, theta) - stats.poisson.logpmf(ks, theta_prime))))
    if k is Kind.GAUSSIAN:
        sd = family.sigma
        logf = lambda y, m: -0.5 * ((y - m) / sd) ** 2 - math.log(sd * math.sqrt(2 * math.pi))
        lo, hi = theta - 40 * sd, theta + 40 * sd
    else:
        logf = lambda y, m: -y / m - math.log(m)
        lo, hi = 0.0, 80 * theta
    val, _ = integrate.quad(
        lambda y: math.exp(logf(y, theta)) * (logf(y, theta) - logf(y, theta_prime)),
        lo, hi, limit=400, epsabs=1e-12, epsrel=1e-12)
    return val


FAMILIES = {
    "bernoulli": RewardFamily.bernoulli(),
    "gaussian": RewardFamily.gaussian(1.5),
    "poisson": RewardFamily.poisson(a=10.0),
    "exponential": RewardFamily.exponential(b=10.0),
}


def kl_grid(name: str, n_pairs: int = 50, seed: int = 0) -> list[tuple[float, float]]:
    rng = np.random.default_rng([seed, len(name)])
    if name == "bernoulli":
        draw = lambda: rng.uniform(0.02, 0.98)
    elif name == "gaussian":
        draw = lambda: rng.uniform(-5.0, 5.0)
    else:
        draw = lambda: rng.uniform(0.1, 10.0)
    return [(float(draw()), float(draw())) for _ in range(n_pairs)]


@pytest.fixture(params=sorted(FAMILIES))
def family_name(request):
    return request.param


def ln(x):
    return math.log(x)


# ---------------------------------------------------------------- acceptance report

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when not in ("setup", "call"):
        return
    n, title = mark.args
    entry = _CRITERIA.setdefault(n, {"title": title, "ok": True, "detail": []})
    if call.excinfo is not None:
        entry["ok"] = False
    if call.when == "call":
        entry["detail"] += [v for k, v in item.user_properties if k == "detail"]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        e = _CRITERIA[n]
        status = "PASS" if e["ok"] else "FAIL"
        detail = "; ".join(e["detail"])
        terminalreporter.write_line(f"[{status}] C{n:<2} {e['title']}" + (f" | {detail}" if detail else ""))
