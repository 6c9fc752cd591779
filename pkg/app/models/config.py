"""
Run configuration: every model parameter group with its default, loaded from TOML or JSON.
"""
import hashlib
import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional, Union

from pydantic import ValidationError

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - Python 3.10 fallback
    import tomli as tomllib

from app.exceptions import ConfigError
from app.models.schemas import (
    AirTaxiParams,
    AmtParams,
    ChoiceParams,
    DecayParams,
    DensityModel,
    FleetParams,
    FrozenModel,
    GridSpec,
    MarketPaths,
    RunSettings,
    TripParams,
)

logger = logging.getLogger(__name__)

# Usual working range of the generalized cost coefficient
BETA_GC_WORKING_RANGE = (-0.3, -0.2)


class RunConfig(FrozenModel):
    """Effective configuration of a run. Absent groups and keys take their defaults."""
    grid: GridSpec = GridSpec()
    population: DecayParams = DecayParams()
    trips: TripParams = TripParams()
    amt: AmtParams = AmtParams()
    air_taxi: AirTaxiParams = AirTaxiParams()
    density: DensityModel = DensityModel()
    choice: ChoiceParams = ChoiceParams()
    fleet: FleetParams = FleetParams()
    market: MarketPaths = MarketPaths()
    run: RunSettings = RunSettings()


def _format_validation_error(exc: ValidationError) -> ConfigError:
    """Turn the first pydantic error into a ConfigError naming the dotted key."""
    first = exc.errors()[0]
    key = ".".join(str(part) for part in first["loc"]) or None
    if first["type"] == "extra_forbidden":
        return ConfigError("unknown key", key=key)
    message = first["msg"]
    ctx = first.get("ctx") or {}
    bounds = ", ".join(f"{name} {value}" for name, value in ctx.items() if name in ("gt", "ge", "lt", "le"))
    if bounds:
        message = f"{message} (valid range: {bounds})"
    return ConfigError(message, key=key)


def build_config(data: Optional[dict[str, Any]] = None) -> RunConfig:
    """
    Validate a config mapping.

    Args:
        data: Nested mapping of parameter groups; None or {} yields all defaults

    Returns:
        Validated RunConfig

    Raises:
        ConfigError naming the offending key
    """
    try:
        config = RunConfig.model_validate(data or {})
    except ValidationError as exc:
        raise _format_validation_error(exc) from exc

    low, high = BETA_GC_WORKING_RANGE
    if not low <= config.choice.beta_gc <= high:
        logger.warning(
            "choice.beta_gc=%s is outside the working range [%s, %s]",
            config.choice.beta_gc, low, high,
        )
    return config


def load_config(path: Optional[Union[str, Path]] = None) -> RunConfig:
    """
    Load a TOML or JSON config document.

    Args:
        path: Config file; None means all defaults

    Returns:
        Validated RunConfig
    """
    if path is None:
        return build_config()

    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc

    try:
        if path.suffix.lower() == ".json":
            data = json.loads(raw.decode("utf-8")) if raw.strip() else {}
        else:
            data = tomllib.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc

    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must contain a key-value document")

    config = build_config(data)
    logger.info("Loaded config %s (digest %s)", path, config_digest(config))
    return config


def config_echo(config: RunConfig) -> dict[str, Any]:
    """Plain JSON-ready dump of the effective config."""
    return config.model_dump(mode="json")


def config_digest(config: RunConfig) -> str:
    """Stable short digest of the effective config, used as run id."""
    canonical = json.dumps(config_echo(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]
