# moirank/utils.py
"""
Utility functions for moirank: run configuration, scenario presets and
atomic output writing.
"""

import json
import logging
import os
import tempfile
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, List, Optional

from .engagement import EngagementMode
from .errors import ConfigError
from .graph_core import DEFAULT_DAMPING, DEFAULT_MAX_ITER, DEFAULT_TOL
from .report_generator import DEFAULT_TOP_K, ZERO_FOLLOWER_POLICIES, RankConfig

_LOG = logging.getLogger("moirank.utils")

PATH_KEYS = ("accounts_path", "edges_path", "posts_path", "output")
METADATA_KEYS = ("name", "description")
OUTPUT_FORMATS = ("text", "json", "csv", "dot")
LOG_LEVEL_ENV = "MOIRANK_LOG_LEVEL"


@dataclass
class RunConfig:
    """Everything one CLI run needs; defaults match configs/default.json."""
    accounts_path: Optional[str] = None
    edges_path: Optional[str] = None
    posts_path: Optional[str] = None
    mode: str = EngagementMode.STRICT.value
    damping: float = DEFAULT_DAMPING
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    top_k: int = DEFAULT_TOP_K
    zero_follower_policy: str = "fail"
    output: Optional[str] = None
    format: str = "text"

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known - set(METADATA_KEYS) - {"_source"})
        if unknown:
            raise ConfigError(f"Unknown config keys: {unknown}")
        return cls(**{k: v for k, v in data.items() if k in known})

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def validate(self, require_paths: bool = True) -> "RunConfig":
        """
        Check value ranges.

        Raises:
            ConfigError: If any field is out of range
        """
        if require_paths:
            missing = [k for k in ("accounts_path", "edges_path", "posts_path") if not getattr(self, k)]
            if missing:
                raise ConfigError(f"Missing required dataset paths: {missing}")
        try:
            EngagementMode(self.mode)
        except ValueError:
            raise ConfigError(f"mode must be 'strict' or 'raw', got {self.mode!r}")
        if isinstance(self.damping, bool) or not isinstance(self.damping, (int, float)) or not 0.0 <= self.damping <= 1.0:
            raise ConfigError(f"damping must be in [0, 1], got {self.damping!r}")
        if isinstance(self.tol, bool) or not isinstance(self.tol, (int, float)) or not self.tol > 0:
            raise ConfigError(f"tol must be positive, got {self.tol!r}")
        if isinstance(self.max_iter, bool) or not isinstance(self.max_iter, int) or self.max_iter < 1:
            raise ConfigError(f"max_iter must be a positive integer, got {self.max_iter!r}")
        if isinstance(self.top_k, bool) or not isinstance(self.top_k, int) or self.top_k < 1:
            raise ConfigError(f"top_k must be a positive integer, got {self.top_k!r}")
        if self.zero_follower_policy not in ZERO_FOLLOWER_POLICIES:
            raise ConfigError(f"zero_follower_policy must be one of {ZERO_FOLLOWER_POLICIES}")
        if self.format not in OUTPUT_FORMATS:
            raise ConfigError(f"format must be one of {OUTPUT_FORMATS}, got {self.format!r}")
        _LOG.debug("Configuration validated successfully")
        return self

    @property
    def engagement_mode(self) -> EngagementMode:
        return EngagementMode(self.mode)

    def rank_config(self) -> RankConfig:
        return RankConfig(
            damping=float(self.damping),
            tol=float(self.tol),
            max_iter=self.max_iter,
            top_k=self.top_k,
            zero_follower_policy=self.zero_follower_policy,
        )


def load_config(config_path: str) -> Dict[str, Any]:
    """
    Load configuration from JSON file.

    Relative dataset and output paths are resolved against the file's directory.

    Raises:
        FileNotFoundError: If config file doesn't exist
        ConfigError: If config is not a JSON object
    """
    path = Path(config_path)
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {config_path}")

    try:
        cfg = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"Invalid JSON in {config_path}: {e}")
    if not isinstance(cfg, dict):
        raise ConfigError(f"Config {config_path} must be a JSON object")

    for key in PATH_KEYS:
        value = cfg.get(key)
        if isinstance(value, str) and not Path(value).is_absolute():
            cfg[key] = str((path.parent / value).resolve())

    cfg["_source"] = str(path)
    _LOG.info(f"Loaded config from {config_path}")
    return cfg


def _scenario_dirs() -> List[Path]:
    return [
        Path("configs/scenarios"),
        Path(__file__).parent.parent / "configs" / "scenarios",
    ]


def load_scenario(scenario_name: str) -> Dict[str, Any]:
    """
    Load a predefined scenario configuration.

    Args:
        scenario_name: Name of scenario (without .json extension)
    """
    for directory in _scenario_dirs():
        scenario_path = directory / f"{scenario_name}.json"
        if scenario_path.exists():
            return load_config(str(scenario_path))

    raise FileNotFoundError(
        f"Scenario '{scenario_name}' not found. "
        f"Available scenarios: {', '.join(list_available_scenarios())}"
    )


def list_available_scenarios() -> List[str]:
    """Scenario names (without .json) found in any scenario directory."""
    names = set()
    for directory in _scenario_dirs():
        if directory.is_dir():
            names.update(f.stem for f in directory.glob("*.json"))
    return sorted(names)


def merge_configs(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """
    Merge two configuration dictionaries.
    Override values take precedence unless they are None.
    """
    merged = base.copy()
    merged.update({k: v for k, v in override.items() if v is not None})
    return merged


def atomic_write_bytes(path: Path, data: bytes) -> None:
    """Write via a temp file in the same directory, then rename over the target."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise
    _LOG.debug("Wrote %d bytes to %s", len(data), path)


def resolve_log_level(debug: bool = False, default: str = "WARNING") -> int:
    """--debug wins, then MOIRANK_LOG_LEVEL, then default."""
    if debug:
        return logging.DEBUG
    name = os.environ.get(LOG_LEVEL_ENV, default).upper()
    level = logging.getLevelName(name)
    return level if isinstance(level, int) else logging.WARNING
