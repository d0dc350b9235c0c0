import json
import logging
import os
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

logger = logging.getLogger(__name__)

RNG_SEED_LIMIT = 2**64
OUTPUT_FORMATS = ("json", "pretty")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass
class VerificationConfig:
    """Random-trial settings shared by every verification suite"""

    rng_seed: int = 0
    trials: int = 20
    max_entry: int = 100  # bound on numerators and denominators of random points
    resample_limit: int = 10
    max_workers: int = 1


@dataclass
class OutputConfig:
    """Command output settings"""

    format: str = "json"  # json or pretty
    sort_keys: bool = True


@dataclass
class LoggingConfig:
    """Logging configuration"""

    level: str = "INFO"
    format: str = "human"  # human or json
    use_colors: bool = True
    log_file: Optional[str] = None


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={raw!r}")
        return default


class Config:
    """Run configuration for bruhat-cluster-lab."""

    # Environment
    ENVIRONMENT: str = os.getenv("ENVIRONMENT", "development")
    CONFIG_FILE: Optional[str] = os.getenv("CONFIG_FILE")

    # Component configurations
    verification: VerificationConfig
    output: OutputConfig
    logging: LoggingConfig

    # Flat aliases
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    RNG_SEED: int = 0
    THREADS: int = 1

    # Internal state
    _instance: Optional["Config"] = None
    _loaded: bool = False
    _config_sources: Dict[str, Any] = {}

    def __new__(cls):
        """Singleton pattern for configuration"""
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance._initialize()
        return cls._instance

    def _initialize(self):
        """Initialize configuration from all sources"""
        if self._loaded:
            return

        self.ENVIRONMENT = os.getenv("ENVIRONMENT", "development")
        self.CONFIG_FILE = os.getenv("CONFIG_FILE")
        self._config_sources = {}

        self.verification = VerificationConfig()
        self.output = OutputConfig()
        self.logging = LoggingConfig()

        self._load_from_env()

        if self.CONFIG_FILE:
            self._load_from_file(self.CONFIG_FILE)

        self._apply_environment_overrides()
        self._update_flat_fields()

        self._loaded = True
        logger.debug(f"Configuration loaded for environment: {self.ENVIRONMENT}")

    def _load_from_env(self):
        """Load configuration from environment variables"""
        self.verification.rng_seed = _env_int("BCF_RNG_SEED", 0)
        self.verification.trials = _env_int("BCF_TRIALS", 20)
        self.verification.max_entry = _env_int("BCF_MAX_ENTRY", 100)
        self.verification.resample_limit = _env_int("BCF_RESAMPLE_LIMIT", 10)
        self.verification.max_workers = _env_int("BCF_THREADS", 1)

        self.output.format = os.getenv("BCF_OUTPUT_FORMAT", "json").lower()

        self.logging.level = os.getenv("LOG_LEVEL", "INFO")
        self.logging.format = os.getenv("LOG_FORMAT", "human")
        self.logging.use_colors = os.getenv("LOG_USE_COLORS", "true").lower() == "true"
        self.logging.log_file = os.getenv("LOG_FILE")

        self._config_sources["environment"] = "Environment variables loaded"

    def _load_from_file(self, config_file: str):
        """Load configuration from a JSON file"""
        config_path = Path(config_file)
        if not config_path.exists():
            logger.warning(f"Config file not found: {config_file}")
            return
        if config_path.suffix != ".json":
            logger.warning(f"Unsupported config file format: {config_path.suffix}")
            return

        try:
            with open(config_path, "r", encoding="utf-8") as f:
                file_config = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            logger.error(f"Error loading config file {config_file}: {e}")
            return

        self._apply_dict_config(file_config)
        self._config_sources["file"] = str(config_path)
        logger.info(f"Loaded configuration from file: {config_path}")

    def _apply_dict_config(self, config_dict: Dict[str, Any]):
        """Apply configuration from dictionary"""
        sections = {
            "verification": self.verification,
            "output": self.output,
            "logging": self.logging,
        }
        for name, section in sections.items():
            values = config_dict.get(name)
            if not isinstance(values, dict):
                continue
            for key, value in values.items():
                if not hasattr(section, key):
                    logger.warning(f"Unknown config key {name}.{key}")
                    continue
                current = getattr(section, key)
                if isinstance(current, int) and not isinstance(current, bool):
                    try:
                        value = int(value)
                    except (TypeError, ValueError):
                        logger.warning(f"Ignoring non-integer {name}.{key}={value!r}")
                        continue
                setattr(section, key, value)

    def _apply_environment_overrides(self):
        """Apply environment-specific configuration overrides"""
        if self.is_production():
            self.logging.level = "WARNING"
            self.logging.format = "json"
            self.logging.use_colors = False
        elif self.is_testing():
            self.logging.use_colors = False

    def _update_flat_fields(self):
        self.LOG_LEVEL = self.logging.level
        self.RNG_SEED = self.verification.rng_seed
        self.THREADS = self.verification.max_workers

    def collect_errors(self) -> List[str]:
        """Return every validation problem of the current values."""
        errors = []
        ver = self.verification
        if not 0 <= ver.rng_seed < RNG_SEED_LIMIT:
            errors.append(f"rng_seed must be an unsigned 64-bit integer: {ver.rng_seed}")
        if ver.trials < 1:
            errors.append(f"trials must be positive: {ver.trials}")
        if ver.max_entry < 1:
            errors.append(f"max_entry must be positive: {ver.max_entry}")
        if ver.resample_limit < 1:
            errors.append(f"resample_limit must be positive: {ver.resample_limit}")
        if ver.max_workers < 1:
            errors.append(f"BCF_THREADS must be at least 1: {ver.max_workers}")
        if self.output.format not in OUTPUT_FORMATS:
            errors.append(f"Invalid output format: {self.output.format}")
        if self.logging.level.upper() not in LOG_LEVELS:
            errors.append(f"Invalid log level: {self.logging.level}")
        return errors

    @classmethod
    def validate(cls) -> bool:
        """Validate configuration values, reporting every problem at once."""
        # Imported here: error_handler imports logging, which imports this module
        from app.utils.error_handler import ConfigurationError

        errors = cls().collect_errors()
        if errors:
            error_msg = "Configuration validation failed:\n" + "\n".join(
                f"  - {e}" for e in errors
            )
            raise ConfigurationError(error_msg, details={"errors": errors})
        return True

    @classmethod
    def reset(cls) -> None:
        """Drop the cached instance so the next access reloads all sources."""
        cls._instance = None
        cls._loaded = False

    @classmethod
    def is_development(cls) -> bool:
        return cls().ENVIRONMENT.lower() == "development"

    @classmethod
    def is_production(cls) -> bool:
        return cls().ENVIRONMENT.lower() == "production"

    @classmethod
    def is_testing(cls) -> bool:
        return cls().ENVIRONMENT.lower() in ["test", "testing"]

    def get_config_summary(self) -> Dict[str, Any]:
        """Get a plain-dict view of the configuration"""
        return {
            "environment": self.ENVIRONMENT,
            "config_sources": dict(self._config_sources),
            "verification": asdict(self.verification),
            "output": asdict(self.output),
            "logging": asdict(self.logging),
        }

    def export_config(self, output_file: str):
        """Export current configuration to a JSON file"""
        output_path = Path(output_file)
        with open(output_path, "w", encoding="utf-8") as f:
            json.dump(self.get_config_summary(), f, indent=2, sort_keys=True)
        logger.info(f"Configuration exported to: {output_path}")


# Create singleton instance
config = Config()
