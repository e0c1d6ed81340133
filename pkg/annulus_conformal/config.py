# config.py

import json
import os
from typing import Any, Optional

from dotenv import load_dotenv

from annulus_conformal.utils.logger import logger, set_log_level

# Keys that may be supplied through the environment or a .env file.
RELEVANT_KEYS = [
    "MODE",
    "LOG_LEVEL",
    "LOG_MESSAGES_FORMAT",
    "POLE_TOLERANCE",
    "DOMAIN_TOLERANCE",
    "ANNULUS_TOLERANCE",
    "SOLVER_MAX_ITER",
    "SOLVER_STEP_TOL",
    "SOLVER_RESIDUAL_TOL",
    "COARSE_SAMPLES",
    "REFINE_TOL",
    "SC_DEFAULT_TERMS",
    "OUTPUT_SAMPLES",
    "OUTPUT_PRECISION",
]


class BaseConfigManager:
    """
    Solver tolerances, sampling sizes and output settings.

    Values start from the given dict, may be overridden by the environment
    (and a .env file outside tests), and are stored as strings until a typed
    getter reads them.
    """

    def __init__(self, config_dict: dict[str, Any], ignore_env: bool = False):
        """
        Initialize the config manager with config_dict as base.

        Args:
            config_dict (dict): The base configuration dictionary.
            ignore_env (bool): If True, environment variables and .env are ignored.
        """
        self._config = config_dict.copy()
        self._ignore_env = ignore_env

        # 1) Possibly load .env if not in test environment
        is_test_env = os.environ.get("IS_TEST_ENV", "false").lower() == "true"
        if not is_test_env and not self._ignore_env:
            load_dotenv(".env", override=False)

        # 2) Merge environment variables if not ignoring env
        if not self._ignore_env:
            self._merge_from_env()

        # 3) Provide defaults and validate
        self._finalize_defaults()
        self._validate_config()

    @classmethod
    def from_dict(cls, config_dict: dict[str, Any], ignore_env: bool = False) -> "BaseConfigManager":
        return cls(config_dict, ignore_env=ignore_env)

    @classmethod
    def from_json(cls, json_file_path: str, ignore_env: bool = False) -> "BaseConfigManager":
        with open(json_file_path, "r", encoding="utf-8") as f:
            config_dict = json.load(f)
        return cls(config_dict, ignore_env=ignore_env)

    # -------------------------------------------------------------------------
    # Internal Helpers
    # -------------------------------------------------------------------------

    def _merge_from_env(self) -> None:
        """Override config entries with matching environment variables."""
        for key in RELEVANT_KEYS:
            if key in os.environ:
                self._config[key] = os.environ[key]

    def _finalize_defaults(self) -> None:
        self._config.setdefault("MODE", "prod")
        self._config.setdefault("LOG_LEVEL", "INFO")
        self._config.setdefault("LOG_MESSAGES_FORMAT", "text")

        self._config.setdefault("POLE_TOLERANCE", "1e-14")
        self._config.setdefault("DOMAIN_TOLERANCE", "1e-12")
        self._config.setdefault("ANNULUS_TOLERANCE", "1e-9")

        self._config.setdefault("SOLVER_MAX_ITER", "200")
        self._config.setdefault("SOLVER_STEP_TOL", "1e-13")
        self._config.setdefault("SOLVER_RESIDUAL_TOL", "1e-12")

        self._config.setdefault("COARSE_SAMPLES", "720")
        self._config.setdefault("REFINE_TOL", "1e-10")
        self._config.setdefault("SC_DEFAULT_TERMS", "5")

        self._config.setdefault("OUTPUT_SAMPLES", "720")
        self._config.setdefault("OUTPUT_PRECISION", "12")

        if str(self._config["MODE"]).lower() == "debug":
            self._config["LOG_LEVEL"] = "DEBUG"

    def _validate_config(self) -> None:
        """Fail early on settings the solvers cannot work with."""
        for key in ("POLE_TOLERANCE", "DOMAIN_TOLERANCE", "ANNULUS_TOLERANCE", "SOLVER_STEP_TOL", "SOLVER_RESIDUAL_TOL", "REFINE_TOL"):
            if float(self._config[key]) <= 0:
                raise ValueError(f"{key} must be positive, got {self._config[key]!r}")
        if int(self._config["SOLVER_MAX_ITER"]) < 1:
            raise ValueError("SOLVER_MAX_ITER must be at least 1")
        if int(self._config["COARSE_SAMPLES"]) < 64:
            raise ValueError("COARSE_SAMPLES must be at least 64")
        if int(self._config["SC_DEFAULT_TERMS"]) < 1:
            raise ValueError("SC_DEFAULT_TERMS must be at least 1")
        if str(self._config["LOG_MESSAGES_FORMAT"]).lower() not in ("text", "json"):
            raise ValueError(f"LOG_MESSAGES_FORMAT must be text or json, got {self._config['LOG_MESSAGES_FORMAT']!r}")

    # -------------------------------------------------------------------------
    # Public Getters
    # -------------------------------------------------------------------------

    def get_config(self) -> dict[str, Any]:
        """Raw settings, keyed as in RELEVANT_KEYS."""
        return self._config

    def get_mode(self) -> str:
        return str(self._config["MODE"])

    def get_log_level(self) -> str:
        return str(self._config["LOG_LEVEL"]).upper()

    def get_log_messages_format(self) -> str:
        return str(self._config["LOG_MESSAGES_FORMAT"]).lower()

    def get_pole_tolerance(self) -> float:
        return float(self._config["POLE_TOLERANCE"])

    def get_domain_tolerance(self) -> float:
        return float(self._config["DOMAIN_TOLERANCE"])

    def get_annulus_tolerance(self) -> float:
        return float(self._config["ANNULUS_TOLERANCE"])

    def get_solver_max_iter(self) -> int:
        return int(self._config["SOLVER_MAX_ITER"])

    def get_solver_step_tol(self) -> float:
        return float(self._config["SOLVER_STEP_TOL"])

    def get_solver_residual_tol(self) -> float:
        return float(self._config["SOLVER_RESIDUAL_TOL"])

    def get_coarse_samples(self) -> int:
        return int(self._config["COARSE_SAMPLES"])

    def get_refine_tol(self) -> float:
        return float(self._config["REFINE_TOL"])

    def get_sc_default_terms(self) -> int:
        return int(self._config["SC_DEFAULT_TERMS"])

    def get_output_samples(self) -> int:
        return int(self._config["OUTPUT_SAMPLES"])

    def get_output_precision(self) -> int:
        return int(self._config["OUTPUT_PRECISION"])


# ------------------------------------------------------------------------------
# Derived classes for Non-Singleton and Singleton usage
# ------------------------------------------------------------------------------


class NonSingletonConfigManager(BaseConfigManager):
    """Independent configuration, e.g. for comparing tolerance settings side by side."""

    def __init__(self, config_dict: dict[str, Any], ignore_env: bool = False):
        super().__init__(config_dict=config_dict, ignore_env=ignore_env)


class SingletonConfigManager(BaseConfigManager):
    """Process-wide configuration read by the core modules when no explicit tolerance is passed."""

    _instance: Optional["SingletonConfigManager"] = None

    def __init__(self, config_dict: dict[str, Any], ignore_env: bool = False):
        if SingletonConfigManager._instance is not None:
            raise RuntimeError("Use SingletonConfigManager.instance() instead")
        super().__init__(config_dict=config_dict, ignore_env=ignore_env)

    @classmethod
    def instance(
        cls,
        config_dict: Optional[dict[str, Any]] = None,
        ignore_env: bool = False,
        override: bool = False,
    ) -> "SingletonConfigManager":
        if override and config_dict is not None:
            cls.reset_instance()
            cls._instance = cls(config_dict, ignore_env=ignore_env)
            logger.debug("SingletonConfigManager instance reset with new config")
        elif cls._instance is None:
            cls._instance = cls(config_dict or {}, ignore_env=ignore_env)
        elif config_dict is not None:
            cls._instance._config.update(config_dict)
            cls._instance._finalize_defaults()
            cls._instance._validate_config()
        return cls._instance

    @classmethod
    def reset_instance(cls) -> None:
        cls._instance = None


def get_global_conf() -> SingletonConfigManager:
    return SingletonConfigManager.instance()


def set_global_conf(
    config_dict: Optional[dict[str, Any]] = None,
    ignore_env: bool = False,
    override: bool = False,
) -> SingletonConfigManager:
    conf = SingletonConfigManager.instance(config_dict, ignore_env=ignore_env, override=override)
    set_log_level(conf.get_log_level(), conf.get_log_messages_format())
    return conf


set_global_conf({"MODE": "prod"})

logger.debug("[Singleton] MODE: %s", get_global_conf().get_mode())
