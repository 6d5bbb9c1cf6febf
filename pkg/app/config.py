"""
Run configuration management.

Settings are layered: built-in defaults, then an optional TOML config file,
then ``SPANFORGE_*`` environment variables (and ``.env``), then command-line
flags. The resolved RunConfig is fully concrete.
"""

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from pydantic import Field, ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from core.accel.cost_model import calibrate_package_rate
from core.exceptions import ConfigError


class RunConfig(BaseSettings):
    """Dispatch, accelerator and cost-model settings for one invocation."""

    model_config = SettingsConfigDict(
        env_prefix="SPANFORGE_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Host runtime
    threads: int = Field(default=1, gt=0)
    byte_threshold: int = Field(default=1000, gt=0)
    max_docs_per_package: int = Field(default=8, gt=0)
    flush_timeout_us: float = Field(default=1000, gt=0)

    # Accelerator
    lanes: int = Field(default=4, gt=0)
    clock_hz: float = Field(default=250e6, gt=0)
    setup_cycles: int = Field(default=64, gt=0)
    regex_state_budget: int = Field(default=256, gt=0)
    sorting_buffer_capacity: int = Field(default=1024, gt=0)
    channel_capacity: int = Field(default=16, gt=0)
    caps: str = "default"

    # Cost model
    peak_bandwidth: float = Field(default=500e6, gt=0)
    package_rate: Optional[float] = Field(default=None, gt=0)

    # Partitioner
    subgraph_node_cap: Optional[int] = Field(default=None, gt=0)

    # Monitoring
    log_level: str = "INFO"

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in valid_levels:
            raise ValueError(f"Log level must be one of: {valid_levels}")
        return v.upper()

    @property
    def flush_timeout_s(self) -> float:
        return self.flush_timeout_us / 1e6

    @property
    def resolved_package_rate(self) -> float:
        """Configured rate, or the rate calibrated from peak bandwidth and package size."""
        if self.package_rate is not None:
            return self.package_rate
        return calibrate_package_rate(self.peak_bandwidth, self.max_docs_per_package)


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """Key/value settings from a TOML file; a ``[spanforge]`` table is also accepted."""
    path = Path(path)
    try:
        with path.open("rb") as handle:
            data = tomllib.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    if isinstance(data.get("spanforge"), dict):
        data = data["spanforge"]
    unknown = sorted(set(data) - set(RunConfig.model_fields))
    if unknown:
        raise ConfigError(f"unknown settings in {path}: {', '.join(unknown)}")
    return data


def load_run_config(
    config_file: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> RunConfig:
    """Resolve defaults < config file < environment < overrides (None overrides are skipped)."""
    try:
        environment = RunConfig()
        values: Dict[str, Any] = read_config_file(config_file) if config_file else {}
        values.update(environment.model_dump(include=environment.model_fields_set))
        values.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return RunConfig(**values)
    except ValidationError as exc:
        raise ConfigError(f"invalid configuration: {exc}")
