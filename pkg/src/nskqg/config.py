"""Experiment configuration: YAML parsing, defaults, validation.

A config is a flat YAML mapping.  Unknown keys are rejected; every value
is validated with a key-precise message.  Example:

    experiment: limit
    N: 64
    gamma: 2.0
    s: 0.5
    alpha: 0.5
    eps: 0.2
    T: 0.5
    dt: 5.0e-4        # 0 selects the adaptive CFL policy
    scheme: imex
    phi0_modes: [[1, 0, 1.0, 0.0], [1, 1, 0.5, 0.3]]
    output_dir: out
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import yaml

from .constitutive import validate_params
from .errors import ConfigError, ParameterError

EXPERIMENTS = ("nsk", "qg", "limit", "sweep")
SCHEMES = ("imex", "rk4")

DEFAULTS = {
    "N": 64,
    "gamma": 2.0,
    "s": 0.5,
    "alpha": 0.5,
    "eps": 0.2,
    "eps_list": (0.4, 0.28, 0.2, 0.14, 0.1),
    "T": 0.5,
    "dt": 5e-4,
    "c_adv": 0.4,
    "c_wave": 0.4,
    "c_disp": 0.4,
    "scheme": "imex",
    "phi0_modes": ((1, 0, 1.0, 0.0), (1, 1, 0.5, 0.3)),
    "rho_min": 1e-4,
    "output_dir": "out",
    "snapshot_every": 0,
    "seed": 0,
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    N: int
    gamma: float
    s: float
    alpha: float
    eps: float
    eps_list: tuple[float, ...]
    T: float
    dt: float
    c_adv: float
    c_wave: float
    c_disp: float
    scheme: str
    phi0_modes: tuple[tuple[int, int, float, float], ...]
    rho_min: float
    output_dir: str
    snapshot_every: int
    seed: int


def _as_float(key: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    return float(value)


def _as_int(key: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    return value


def _as_modes(key: str, value) -> tuple[tuple[int, int, float, float], ...]:
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{key}: expected a list of [k1, k2, amplitude, phase] entries")
    modes = []
    for i, entry in enumerate(value):
        if not isinstance(entry, (list, tuple)) or len(entry) != 4:
            raise ConfigError(f"{key}[{i}]: expected [k1, k2, amplitude, phase]")
        k1 = _as_int(f"{key}[{i}].k1", entry[0])
        k2 = _as_int(f"{key}[{i}].k2", entry[1])
        amp = _as_float(f"{key}[{i}].amplitude", entry[2])
        phase = _as_float(f"{key}[{i}].phase", entry[3])
        modes.append((k1, k2, amp, phase))
    return tuple(modes)


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a YAML config document."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"not valid YAML: {e}") from e
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"top level must be a mapping, got {type(raw).__name__}")

    known = set(DEFAULTS) | {"experiment"}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(unknown)}")
    if "experiment" not in raw:
        raise ConfigError("missing required key: experiment")

    experiment = raw["experiment"]
    if experiment not in EXPERIMENTS:
        raise ConfigError(
            f"experiment: expected one of {', '.join(EXPERIMENTS)}, got {experiment!r}"
        )

    merged = dict(DEFAULTS)
    merged.update({k: v for k, v in raw.items() if k != "experiment"})

    N = _as_int("N", merged["N"])
    if N < 8 or N % 2 != 0:
        raise ConfigError(f"N: must be even and >= 8, got {N}")
    gamma = _as_float("gamma", merged["gamma"])
    s = _as_float("s", merged["s"])
    alpha = _as_float("alpha", merged["alpha"])
    eps = _as_float("eps", merged["eps"])

    if not isinstance(merged["eps_list"], (list, tuple)):
        raise ConfigError("eps_list: expected a list of numbers")
    eps_list = tuple(
        _as_float(f"eps_list[{i}]", v) for i, v in enumerate(merged["eps_list"])
    )

    T = _as_float("T", merged["T"])
    if not T > 0.0:
        raise ConfigError(f"T: must be > 0, got {T}")
    dt = _as_float("dt", merged["dt"])
    if dt < 0.0:
        raise ConfigError(f"dt: must be >= 0 (0 selects adaptive CFL), got {dt}")
    c_adv = _as_float("c_adv", merged["c_adv"])
    c_wave = _as_float("c_wave", merged["c_wave"])
    c_disp = _as_float("c_disp", merged["c_disp"])
    for key, val in (("c_adv", c_adv), ("c_wave", c_wave), ("c_disp", c_disp)):
        if not val > 0.0:
            raise ConfigError(f"{key}: must be > 0, got {val}")

    scheme = merged["scheme"]
    if scheme not in SCHEMES:
        raise ConfigError(f"scheme: expected one of {', '.join(SCHEMES)}, got {scheme!r}")

    phi0_modes = _as_modes("phi0_modes", merged["phi0_modes"])
    band = N // 3
    for i, (k1, k2, _, _) in enumerate(phi0_modes):
        if max(abs(k1), abs(k2)) > band:
            raise ConfigError(
                f"phi0_modes[{i}]: wavenumber ({k1}, {k2}) outside dealias band "
                f"max(|k1|,|k2|) <= {band} for N={N}"
            )

    rho_min = _as_float("rho_min", merged["rho_min"])
    if not (0.0 < rho_min < 1.0):
        raise ConfigError(f"rho_min: must be in (0, 1), got {rho_min}")
    snapshot_every = _as_int("snapshot_every", merged["snapshot_every"])
    if snapshot_every < 0:
        raise ConfigError(f"snapshot_every: must be >= 0, got {snapshot_every}")
    seed = _as_int("seed", merged["seed"])
    output_dir = merged["output_dir"]
    if not isinstance(output_dir, str) or not output_dir:
        raise ConfigError(f"output_dir: expected a non-empty string, got {output_dir!r}")

    eps_for_check = eps_list if experiment == "sweep" else (eps,)
    for e in eps_for_check:
        try:
            validate_params(gamma, s, alpha, e)
        except ParameterError as err:
            raise ConfigError(f"parameters invalid at eps={e}: {err}") from err

    if experiment == "sweep":
        if len(eps_list) < 4:
            raise ConfigError(
                f"eps_list: sweep needs at least 4 values, got {len(eps_list)}"
            )
        if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
            raise ConfigError("eps_list: must be strictly decreasing")
        ratios = [b / a for a, b in zip(eps_list, eps_list[1:])]
        if max(ratios) / min(ratios) > 1.1:
            raise ConfigError(
                "eps_list: must be (approximately) geometric; "
                f"consecutive ratios range over {min(ratios):.4g}..{max(ratios):.4g}"
            )

    return ExperimentConfig(
        experiment=experiment,
        N=N,
        gamma=gamma,
        s=s,
        alpha=alpha,
        eps=eps,
        eps_list=eps_list,
        T=T,
        dt=dt,
        c_adv=c_adv,
        c_wave=c_wave,
        c_disp=c_disp,
        scheme=scheme,
        phi0_modes=phi0_modes,
        rho_min=rho_min,
        output_dir=output_dir,
        snapshot_every=snapshot_every,
        seed=seed,
    )


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as f:
        return parse_config(f.read())


def config_to_dict(config: ExperimentConfig) -> dict:
    """Plain-dict view in declaration order, suitable for YAML/JSON echo."""
    return {
        "experiment": config.experiment,
        "N": config.N,
        "gamma": config.gamma,
        "s": config.s,
        "alpha": config.alpha,
        "eps": config.eps,
        "eps_list": [list(x) if isinstance(x, tuple) else x for x in config.eps_list],
        "T": config.T,
        "dt": config.dt,
        "c_adv": config.c_adv,
        "c_wave": config.c_wave,
        "c_disp": config.c_disp,
        "scheme": config.scheme,
        "phi0_modes": [list(m) for m in config.phi0_modes],
        "rho_min": config.rho_min,
        "output_dir": config.output_dir,
        "snapshot_every": config.snapshot_every,
        "seed": config.seed,
    }


def config_hash(config: ExperimentConfig) -> str:
    blob = json.dumps(config_to_dict(config), sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()
