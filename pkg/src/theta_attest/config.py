"""theta-attest configuration management with .env support"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

# Default .env location
DEFAULT_ENV_PATH = Path.home() / ".theta-attest" / ".env"

MIN_VERIFY_DIGITS = 20

DEFAULTS = {
    "THETA_ATTEST_DIGITS": "50",
    "THETA_ATTEST_GUARD": "10",
    "THETA_ATTEST_SAMPLES": "20",
    "THETA_ATTEST_Q_MIN": "0.05",
    "THETA_ATTEST_Q_MAX": "0.6",
    "THETA_ATTEST_OUTPUT": "text",
}

OUTPUTS = ("text", "json")


class ConfigError(ValueError):
    """Invalid configuration value or combination"""


def get_env_path() -> Path:
    """Get the .env file path (can be overridden by THETA_ATTEST_ENV_PATH)"""
    return Path(os.environ.get("THETA_ATTEST_ENV_PATH", DEFAULT_ENV_PATH))


def ensure_config_dir() -> Path:
    config_dir = get_env_path().parent
    config_dir.mkdir(parents=True, exist_ok=True)
    return config_dir


def load_env() -> dict[str, str]:
    """Defaults, overlaid by the .env file, overlaid by the process environment"""
    env_path = get_env_path()
    config = DEFAULTS.copy()

    if env_path.exists():
        for line in env_path.read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if line and not line.startswith("#") and "=" in line:
                key, _, value = line.partition("=")
                config[key.strip()] = value.strip().strip('"').strip("'")

    for key in DEFAULTS:
        if key in os.environ:
            config[key] = os.environ[key]

    return config


def save_env(config: dict[str, str]) -> Path:
    ensure_config_dir()
    env_path = get_env_path()

    def value(key: str) -> str:
        return config.get(key, DEFAULTS[key])

    lines = [
        "# theta-attest configuration",
        "# Generated by: theta-attest config",
        "",
        "# Decimal digits requested from every evaluation (>= 20 for verify)",
        f'THETA_ATTEST_DIGITS="{value("THETA_ATTEST_DIGITS")}"',
        "",
        "# Internal guard digits carried on top of DIGITS",
        f'THETA_ATTEST_GUARD="{value("THETA_ATTEST_GUARD")}"',
        "",
        "# Sample nomes: count and window [Q_MIN, Q_MAX]",
        f'THETA_ATTEST_SAMPLES="{value("THETA_ATTEST_SAMPLES")}"',
        f'THETA_ATTEST_Q_MIN="{value("THETA_ATTEST_Q_MIN")}"',
        f'THETA_ATTEST_Q_MAX="{value("THETA_ATTEST_Q_MAX")}"',
        "",
        "# Report format: text or json",
        f'THETA_ATTEST_OUTPUT="{value("THETA_ATTEST_OUTPUT")}"',
        "",
    ]
    extra = sorted(k for k in config if k not in DEFAULTS)
    if extra:
        lines.append("# Other settings")
        lines.extend(f'{k}="{config[k]}"' for k in extra)
        lines.append("")

    env_path.write_text("\n".join(lines), encoding="utf-8")
    return env_path


def init_env(force: bool = False) -> tuple[Path, bool]:
    """Initialize .env file with defaults if it doesn't exist.

    Returns:
        Tuple of (path, created) where created is True if file was created
    """
    env_path = get_env_path()

    if env_path.exists() and not force:
        return env_path, False

    save_env(DEFAULTS)
    return env_path, True


def set_config(key: str, value: str) -> dict[str, str]:
    """Set a single configuration value; only known keys are accepted"""
    if key not in DEFAULTS:
        raise ConfigError(f"unknown setting '{key}', expected one of {', '.join(DEFAULTS)}")
    config = load_env()
    config[key] = value
    save_env(config)
    return config


def show_config() -> str:
    config = load_env()
    env_path = get_env_path()

    lines = [
        f"Config file: {env_path}",
        f"  Exists: {env_path.exists()}",
        "",
        "Current settings:",
    ]
    for key, value in config.items():
        lines.append(f"  {key}={value or '(not set)'}")
    return "\n".join(lines)


def _int(config: dict[str, str], key: str) -> int:
    try:
        return int(config[key])
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got '{config[key]}'") from None


def _rational(config: dict[str, str], key: str) -> Fraction:
    try:
        return Fraction(config[key])
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{key} must be a decimal or a/b rational, got '{config[key]}'") from None


@dataclass
class RunConfig:
    """Settings for one run, resolved from .env, environment and command-line overrides"""
    digits: int = 50
    guard: int = 10
    samples: int = 20
    q_min: Fraction = Fraction(1, 20)
    q_max: Fraction = Fraction(3, 5)
    catalog: Optional[Path] = None
    output: str = "text"
    filter: Optional[str] = None
    sampler: str = "even"
    quiet: bool = False
    timings: bool = False

    @classmethod
    def from_env(cls, **overrides) -> RunConfig:
        """Build from load_env(); overrides that are None are ignored"""
        env = load_env()
        config = cls(
            digits=_int(env, "THETA_ATTEST_DIGITS"),
            guard=_int(env, "THETA_ATTEST_GUARD"),
            samples=_int(env, "THETA_ATTEST_SAMPLES"),
            q_min=_rational(env, "THETA_ATTEST_Q_MIN"),
            q_max=_rational(env, "THETA_ATTEST_Q_MAX"),
            output=env["THETA_ATTEST_OUTPUT"],
        )
        for key, value in overrides.items():
            if value is None:
                continue
            if not hasattr(config, key):
                raise ConfigError(f"unknown run setting '{key}'")
            if key in ("q_min", "q_max"):
                value = _rational({key: str(value)}, key)
            elif key == "catalog":
                value = Path(value)
            setattr(config, key, value)
        if config.output not in OUTPUTS:
            raise ConfigError(f"output must be one of {', '.join(OUTPUTS)}, got '{config.output}'")
        if config.guard < 0:
            raise ConfigError(f"guard must be >= 0, got {config.guard}")
        return config

    def validate_for_verify(self) -> RunConfig:
        if self.digits < MIN_VERIFY_DIGITS:
            raise ConfigError(f"verification needs digits >= {MIN_VERIFY_DIGITS}, got {self.digits}")
        if self.samples < 1:
            raise ConfigError(f"samples must be >= 1, got {self.samples}")
        if not 0 < self.q_min < self.q_max < 1:
            raise ConfigError(f"sample window must satisfy 0 < q_min < q_max < 1, got [{self.q_min}, {self.q_max}]")
        return self
