"""TOML experiment configuration with strict, exhaustive validation."""
from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..arena import CollisionModel, PlayerPresence
from ..policies import PolicyKind
from ..rewards import Kind, ParameterSet, RewardFamily, rank_arms

TOP_KEYS = {
    "name", "M", "N", "T", "trials", "seed", "policy", "coupled", "pre_agreement",
    "delta", "collision_model", "checkpoints", "output_dir",
    "family", "theta", "player_theta", "presence", "sweep",
}
FAMILY_KEYS = {"kind", "sigma", "a", "b"}
THETA_KEYS = {"values", "start", "step"}
PRESENCE_KEYS = {"player", "join", "absences"}
SWEEP_KEYS = {"param", "values"}


class ConfigError(ValueError):
    """Carries every validation problem found, each prefixed by its key path."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.errors))


@dataclass
class ExperimentConfig:
    family: RewardFamily
    theta: tuple[float, ...]
    M: int
    T: int
    trials: int = 100
    seed: int = 0
    policy: str | tuple[str, ...] = "lai_robbins"
    coupled: bool = True
    pre_agreement: bool = True
    delta: float | None = None
    collision_model: CollisionModel = CollisionModel.NO_REWARD
    presence: dict[int, PlayerPresence] = field(default_factory=dict)
    player_theta: tuple[tuple[float, ...], ...] | None = None
    checkpoints: str = "auto"
    output_dir: str | None = None
    name: str = "experiment"
    theta_generator: tuple[float, float] | None = None  # (start, step), re-expanded per N
    sweep: tuple[str, tuple[int, ...]] | None = None

    @property
    def N(self) -> int:
        return len(self.theta)

    @property
    def params(self) -> ParameterSet:
        return ParameterSet(self.family, self.theta)

    @property
    def trial_params(self):
        if self.player_theta is None:
            return self.params
        return [ParameterSet(self.family, th) for th in self.player_theta]

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


def _expand(start: float, step: float, n: int) -> tuple[float, ...]:
    # rounding keeps 0.1 + 2 * 0.1 from drifting to 0.30000000000000004
    return tuple(round(start + i * step, 12) for i in range(n))


def _unknown(table: dict, allowed: set, path: str, errors: list[str]) -> None:
    for key in sorted(set(table) - allowed):
        errors.append(f"{path}{key}: unknown key")


def _get(table, key, kind, path, errors, default=None, required=False):
    if key not in table:
        if required:
            errors.append(f"{path}{key}: missing required key")
        return default
    value = table[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if kind is int and isinstance(value, bool) or not isinstance(value, kind):
        errors.append(f"{path}{key}: expected {getattr(kind, '__name__', kind)}, got {value!r}")
        return default
    return value


def build_config(doc: dict[str, Any]) -> ExperimentConfig:
    errors: list[str] = []
    _unknown(doc, TOP_KEYS, "", errors)

    fam_doc = _get(doc, "family", dict, "", errors, {}, required=True)
    _unknown(fam_doc, FAMILY_KEYS, "family.", errors)
    family = None
    kind = _get(fam_doc, "kind", str, "family.", errors, required=True)
    if kind is not None:
        try:
            kind = Kind(kind.lower())
            fam_kw = {}
            for key in ("sigma", "a", "b"):
                v = _get(fam_doc, key, float, "family.", errors)
                if v is not None:
                    fam_kw[key] = v
            family = RewardFamily(kind, **fam_kw)
        except ValueError as exc:
            errors.append(f"family: {exc}")

    M = _get(doc, "M", int, "", errors, required=True)
    N = _get(doc, "N", int, "", errors)
    T = _get(doc, "T", int, "", errors, required=True)
    trials = _get(doc, "trials", int, "", errors, 100)
    seed = _get(doc, "seed", int, "", errors, 0)
    if T is not None and T < 1:
        errors.append(f"T: must be >= 1, got {T}")
    if trials is not None and trials < 1:
        errors.append(f"trials: must be >= 1, got {trials}")

    theta_doc = _get(doc, "theta", dict, "", errors, {}, required=True)
    _unknown(theta_doc, THETA_KEYS, "theta.", errors)
    theta, generator = None, None
    if "values" in theta_doc:
        vals = theta_doc["values"]
        if not isinstance(vals, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals):
            errors.append(f"theta.values: expected a list of numbers, got {vals!r}")
        else:
            theta = tuple(float(v) for v in vals)
            if N is not None and N != len(theta):
                errors.append(f"theta.values: has {len(theta)} entries but N = {N}")
        if "start" in theta_doc or "step" in theta_doc:
            errors.append("theta: give either values or start/step, not both")
    elif theta_doc:
        start = _get(theta_doc, "start", float, "theta.", errors, required=True)
        step = _get(theta_doc, "step", float, "theta.", errors, required=True)
        if N is None:
            errors.append("N: required when theta is given as start/step")
        elif start is not None and step is not None:
            generator = (start, step)
            theta = _expand(start, step, N)

    policy = doc.get("policy", "lai_robbins")
    names = [policy] if isinstance(policy, str) else policy
    if not isinstance(names, list) and not isinstance(policy, str):
        errors.append(f"policy: expected a name or a list of names, got {policy!r}")
        names = []
    for i, name in enumerate(names):
        try:
            PolicyKind(name)
        except ValueError:
            path = "policy" if isinstance(policy, str) else f"policy[{i}]"
            errors.append(f"{path}: unknown policy {name!r}; choose from "
                          f"{[p.value for p in PolicyKind]}")
    if not isinstance(policy, str):
        policy = tuple(policy) if isinstance(policy, list) else policy
        if M is not None and isinstance(policy, tuple) and len(policy) != M:
            errors.append(f"policy: {len(policy)} per-player entries for M = {M}")

    coupled = _get(doc, "coupled", bool, "", errors, True)
    pre_agreement = _get(doc, "pre_agreement", bool, "", errors, True)
    delta = _get(doc, "delta", float, "", errors)
    model = CollisionModel.NO_REWARD
    if "collision_model" in doc:
        try:
            model = CollisionModel.parse(doc["collision_model"])
        except ValueError as exc:
            errors.append(f"collision_model: {exc}")
    checkpoints = _get(doc, "checkpoints", str, "", errors, "auto")
    if checkpoints not in ("auto", "dense", "geometric"):
        errors.append(f"checkpoints: must be auto, dense or geometric, got {checkpoints!r}")
    output_dir = _get(doc, "output_dir", str, "", errors)
    name = _get(doc, "name", str, "", errors, "experiment")

    presence: dict[int, PlayerPresence] = {}
    pres_doc = _get(doc, "presence", list, "", errors, [])
    for idx, entry in enumerate(pres_doc):
        path = f"presence[{idx}]."
        if not isinstance(entry, dict):
            errors.append(f"presence[{idx}]: expected a table")
            continue
        _unknown(entry, PRESENCE_KEYS, path, errors)
        player = _get(entry, "player", int, path, errors, required=True)
        join = _get(entry, "join", int, path, errors, 1)
        absences = _get(entry, "absences", list, path, errors, [])
        if player is not None and M is not None and not 1 <= player <= M:
            errors.append(f"{path}player: must lie in 1..{M}, got {player}")
            continue
        try:
            windows = tuple((int(a), int(b)) for a, b in absences)
            presence[player] = PlayerPresence(join, windows)
        except (TypeError, ValueError) as exc:
            errors.append(f"{path}absences: {exc}")

    player_theta = None
    if "player_theta" in doc:
        pt = doc["player_theta"]
        if not isinstance(pt, list) or (M is not None and len(pt) != M):
            errors.append(f"player_theta: expected {M} lists of parameters")
        else:
            player_theta = tuple(tuple(float(v) for v in row) for row in pt)

    sweep = None
    if "sweep" in doc:
        sw = _get(doc, "sweep", dict, "", errors, {})
        _unknown(sw, SWEEP_KEYS, "sweep.", errors)
        param = _get(sw, "param", str, "sweep.", errors, required=True)
        values = _get(sw, "values", list, "sweep.", errors, required=True)
        if param is not None and param not in ("N", "M"):
            errors.append(f"sweep.param: must be N or M, got {param!r}")
        if param is not None and values is not None:
            sweep = (param, tuple(int(v) for v in values))

    # cross-field checks need the pieces above to be well formed
    if theta is not None and M is not None:
        n = len(theta)
        if not 1 <= M < n:
            errors.append(f"M: need 1 <= M < N, got M = {M}, N = {n}")
        if delta is not None and not 0.0 < delta < 1.0 / n:
            errors.append(f"delta: must lie in (0, 1/N) = (0, {1.0 / n:.6g}), got {delta}")
        if family is not None:
            try:
                params = ParameterSet(family, theta)
                if 1 <= M < n:
                    rank_arms(params, M)
            except ValueError as exc:
                errors.append(f"theta: {exc}")
            if player_theta is not None:
                from ..arena import validate_player_params
                try:
                    sets = [ParameterSet(family, th) for th in player_theta]
                    validate_player_params(sets, M)
                except ValueError as exc:
                    errors.append(f"player_theta: {exc}")

    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(
        family=family, theta=theta, M=M, T=T, trials=trials, seed=seed, policy=policy,
        coupled=coupled, pre_agreement=pre_agreement, delta=delta, collision_model=model,
        presence=presence, player_theta=player_theta, checkpoints=checkpoints,
        output_dir=output_dir, name=name, theta_generator=generator, sweep=sweep,
    )


def parse_config(text: str) -> ExperimentConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([f"<document>: {exc}"]) from None
    return build_config(doc)


def load_config(path: str | Path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


def preset_names() -> list[str]:
    files = resources.files("decbandit.bench").joinpath("presets").iterdir()
    return sorted(p.name[:-5] for p in files if p.name.endswith(".toml"))


def load_preset(name: str) -> ExperimentConfig:
    text = resources.files("decbandit.bench").joinpath("presets", f"{name}.toml").read_text()
    return parse_config(text)


def with_sweep_value(cfg: ExperimentConfig, param: str, value: int) -> ExperimentConfig:
    """Instantiate ``cfg`` at one sweep point, re-expanding the theta generator for N."""
    if param == "M":
        new = cfg.replace(M=value, policy=cfg.policy if isinstance(cfg.policy, str) else cfg.policy[:value])
    elif param == "N":
        if cfg.theta_generator is None:
            raise ConfigError(["theta: an N sweep needs theta given as start/step"])
        new = cfg.replace(theta=_expand(*cfg.theta_generator, value))
    else:
        raise ConfigError([f"sweep.param: must be N or M, got {param!r}"])
    errors = []
    n = new.N
    if not 1 <= new.M < n:
        errors.append(f"{param}={value}: need 1 <= M < N, got M = {new.M}, N = {n}")
    if new.delta is not None and not 0.0 < new.delta < 1.0 / n:
        errors.append(f"{param}={value}: delta must lie in (0, 1/N)")
    if not errors:
        try:
            rank_arms(new.params, new.M)
        except ValueError as exc:
            errors.append(f"{param}={value}: {exc}")
    if errors:
        raise ConfigError(errors)
    return new

