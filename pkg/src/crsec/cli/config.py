"""Configuration management for crsec."""

import copy
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from ..bench.montecarlo import DEFAULT_SNR_GRID, MonteCarloConfig
from ..channel.model import ChannelStats
from ..sca.driver import ScaConfig
from ..sca.schemes import SCHEME_ORDER, SchemeId
from ..solver.barrier import SolverConfig
from ..utils.exceptions import ConfigError, CrsecError, StorageError
from ..utils.logging import get_logger
from ..utils.validation import parse_name_list, parse_snr_grid

logger = get_logger(__name__)

DEFAULT_CONFIG: Dict[str, Any] = {
    "solver": {
        "kkt_tol": 1e-8,
        "max_iters": 100,
        "barrier_init": 1.0,
        "barrier_reduction": 0.2,
        "backtracking_alpha": 0.01,
        "backtracking_beta": 0.5,
        "verbose": False,
    },
    "sca": {
        "epsilon": 1e-3,
        "max_outer_iters": 200,
        "restoration_max_iters": 30,
        "backoff": 1e-7,
        "power_margin": 1e-3,
        "case_workers": 4,
    },
    "montecarlo": {
        "trials": 100,
        "snr_grid_db": list(DEFAULT_SNR_GRID),
        "n_t": 2,
        "sigma_h1": 1.0,
        "sigma_h2": 1.0,
        "sigma_g1": 1.0,
        "sigma_h3": 1.0,
        "sigma_g2": 1.0,
        "schemes": [s.value for s in SCHEME_ORDER],
        "seed": 0,
        "workers": 4,
        "warm_start": True,
        "record_timing": True,
    },
    "output": {
        "path": None,
    },
}


def load_config(
    config_file: Optional[Path] = None,
    **cli_overrides: Any
) -> Dict[str, Any]:
    """Load configuration from file and CLI arguments."""
    config = copy.deepcopy(DEFAULT_CONFIG)

    if config_file is not None:
        config_file = Path(config_file)
        if not config_file.exists():
            raise ConfigError(f"Config file not found: {config_file}")
        try:
            with open(config_file, 'r', encoding='utf-8') as f:
                file_config = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"Invalid YAML in config file {config_file}: {e}") from e
        except OSError as e:
            raise ConfigError(f"Error reading config file {config_file}: {e}") from e
        if not isinstance(file_config, dict):
            raise ConfigError(f"Config file {config_file} must contain a mapping")
        config = _merge_config(config, file_config)
        logger.debug(f"Loaded configuration from {config_file}")

    config = _apply_cli_overrides(config, cli_overrides)
    return _validate_config(config)


def _merge_config(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Deep merge configuration dictionaries; unknown keys are rejected."""
    result = copy.deepcopy(base)

    for key, value in override.items():
        if key not in result:
            raise ConfigError(f"Unknown configuration key: {key}")
        if isinstance(result[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"Configuration section {key} must be a mapping")
            result[key] = _merge_config(result[key], value)
        else:
            result[key] = value

    return result


def _apply_cli_overrides(config: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Apply CLI argument overrides to configuration."""
    overrides = {k: v for k, v in overrides.items() if v is not None}

    cli_mapping = {
        "eps": ("sca.epsilon", float),
        "max_outer_iters": ("sca.max_outer_iters", int),
        "case_workers": ("sca.case_workers", int),
        "kkt_tol": ("solver.kkt_tol", float),
        "solver_verbose": ("solver.verbose", bool),
        "trials": ("montecarlo.trials", int),
        "snr": ("montecarlo.snr_grid_db", parse_snr_grid),
        "nt": ("montecarlo.n_t", int),
        "sigma_h1": ("montecarlo.sigma_h1", float),
        "sigma_h2": ("montecarlo.sigma_h2", float),
        "schemes": ("montecarlo.schemes", parse_name_list),
        "seed": ("montecarlo.seed", int),
        "workers": ("montecarlo.workers", int),
        "warm_start": ("montecarlo.warm_start", bool),
        "record_timing": ("montecarlo.record_timing", bool),
        "out": ("output.path", str),
    }

    for cli_key, (config_path, converter) in cli_mapping.items():
        if cli_key in overrides:
            value = overrides[cli_key]
            try:
                value = converter(value)
            except CrsecError as e:
                raise ConfigError(f"--{cli_key.replace('_', '-')}: {e}") from e
            except (TypeError, ValueError) as e:
                raise ConfigError(f"--{cli_key.replace('_', '-')}: invalid value {value!r}") from e
            _set_nested_config(config, config_path, value)

    return config


def _set_nested_config(config: Dict[str, Any], path: str, value: Any) -> None:
    """Set a nested configuration value using dot notation."""
    keys = path.split('.')
    current = config

    for key in keys[:-1]:
        if key not in current:
            current[key] = {}
        current = current[key]

    current[keys[-1]] = value


def _validate_config(config: Dict[str, Any]) -> Dict[str, Any]:
    """Validate and normalize configuration."""
    sca = config["sca"]
    if not isinstance(sca["epsilon"], (int, float)) or sca["epsilon"] <= 0:
        raise ConfigError("sca.epsilon must be positive")
    if int(sca["max_outer_iters"]) <= 0:
        raise ConfigError("sca.max_outer_iters must be positive")

    solver = config["solver"]
    if solver["kkt_tol"] <= 0:
        raise ConfigError("solver.kkt_tol must be positive")
    if not 0 < solver["barrier_reduction"] < 1:
        raise ConfigError("solver.barrier_reduction must lie in (0, 1)")

    mc = config["montecarlo"]
    if isinstance(mc["snr_grid_db"], str):
        mc["snr_grid_db"] = parse_snr_grid(mc["snr_grid_db"])
    mc["snr_grid_db"] = [float(s) for s in mc["snr_grid_db"]]
    if int(mc["trials"]) <= 0:
        raise ConfigError("montecarlo.trials must be positive")
    if int(mc["n_t"]) < 2:
        raise ConfigError("montecarlo.n_t must be >= 2")
    for key in ("sigma_h1", "sigma_h2", "sigma_g1", "sigma_h3", "sigma_g2"):
        if float(mc[key]) <= 0:
            raise ConfigError(f"montecarlo.{key} must be positive")

    schemes = mc["schemes"]
    if isinstance(schemes, str):
        schemes = parse_name_list(schemes)
    try:
        mc["schemes"] = [SchemeId.parse(s).value for s in schemes]
    except CrsecError as e:
        raise ConfigError(str(e)) from e
    if not mc["schemes"]:
        raise ConfigError("montecarlo.schemes must not be empty")

    if config["output"]["path"] is not None:
        config["output"]["path"] = Path(config["output"]["path"])

    return config


def build_solver_config(config: Dict[str, Any]) -> SolverConfig:
    return SolverConfig(**config["solver"])


def build_sca_config(config: Dict[str, Any]) -> ScaConfig:
    return ScaConfig(solver=build_solver_config(config), **config["sca"])


def build_montecarlo_config(config: Dict[str, Any]) -> MonteCarloConfig:
    mc = config["montecarlo"]
    return MonteCarloConfig(
        trials=int(mc["trials"]),
        snr_grid_db=tuple(mc["snr_grid_db"]),
        n_t=int(mc["n_t"]),
        stats=ChannelStats(
            h1=mc["sigma_h1"], h2=mc["sigma_h2"], g1=mc["sigma_g1"], h3=mc["sigma_h3"], g2=mc["sigma_g2"]
        ),
        schemes=tuple(SchemeId(s) for s in mc["schemes"]),
        seed=int(mc["seed"]),
        epsilon=float(config["sca"]["epsilon"]),
        output=config["output"]["path"],
        workers=int(mc["workers"]),
        warm_start=bool(mc["warm_start"]),
        record_timing=bool(mc["record_timing"]),
        sca=build_sca_config(config),
    )


def save_example_config(path: Path) -> Path:
    """Save example configuration file."""
    path = Path(path)
    example = copy.deepcopy(DEFAULT_CONFIG)
    example["montecarlo"]["trials"] = 20
    example["output"]["path"] = "results/ssr.csv"

    header: List[str] = [
        "# crsec configuration",
        "# Command-line flags take precedence over these values.",
        "",
    ]
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            f.write("\n".join(header))
            yaml.dump(example, f, default_flow_style=False, indent=2, sort_keys=False)
    except OSError as e:
        raise StorageError(f"Failed to write config file {path}: {e}") from e
    return path
