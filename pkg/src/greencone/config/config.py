"""
Numerical settings shared by every stage: quadrature, envelope sampling, hypothesis grids and the solver.
"""

import os
import re
from pathlib import Path
from typing import Any, Optional, Union

import toml

from greencone.utils import constants
from greencone.utils.errors import ConfigError

DEFAULTS = {
    "quadrature": {
        "tol": constants.QUADRATURE_TOL,
    },
    "envelope": {
        "s_points": constants.ENVELOPE_S_POINTS,
        "t_points": constants.ENVELOPE_T_POINTS,
    },
    "hypotheses": {
        "grid_points": constants.HYPOTHESIS_GRID_POINTS,
        "sweeps": constants.HYPOTHESIS_REFINE_SWEEPS,
        "limit_probes": constants.LIMIT_PROBE_COUNT,
    },
    "solver": {
        "nodes": constants.SOLVER_NODES,
        "tol": constants.SOLVER_TOL,
        "seeds": constants.SOLVER_SEEDS,
        "panel_order": constants.SOLVER_PANEL_ORDER,
    },
}


class Config:
    """Process-wide numerical settings.

    `Config(path)` loads a settings file once; later `Config()` calls return the same object, and a different path
    reloads it. Keys the file leaves out come from `DEFAULTS`.
    """

    _instance = None

    def __new__(cls, conf_file: Optional[Union[str, Path]] = None):
        """Returns the shared instance, loading `conf_file` when it is new."""
        if not cls._instance:
            cls._instance = super(Config, cls).__new__(cls)
            cls._instance._conf_file = conf_file
            cls._instance._load_config()
        elif conf_file is not None and conf_file != cls._instance._conf_file:
            cls._instance._conf_file = conf_file
            cls._instance._load_config()

        return cls._instance

    @classmethod
    def reset(cls):
        """Forgets the loaded settings; the next `Config()` starts from the defaults."""
        # pylint: disable=protected-access
        if cls._instance:
            cls._instance._conf_file = None
            cls._instance.config = {}
            cls._instance = None

    def _load_config(self):
        """Load the settings from the TOML file, if one was given.

        Exceptions:
            ConfigError: Thrown if the file is missing, malformed or names an unknown section
        """
        self.config = {}
        if not self._conf_file:
            return
        try:
            self.config = toml.load(self._conf_file)
        except FileNotFoundError as exc:
            raise ConfigError(f"Configuration file '{self._conf_file}' could not be found.") from exc
        except toml.TomlDecodeError as exc:
            raise ConfigError(f"line {exc.lineno}: {exc.msg}", field=str(self._conf_file)) from exc
        unknown = sorted(set(self.config) - set(DEFAULTS))
        if unknown:
            raise ConfigError(f'unknown section(s) {", ".join(unknown)}', field=str(self._conf_file))

    @staticmethod
    def _expand_env_variables(value):
        """Replaces $VAR, ${VAR} and env:VAR in strings; unset variables are left as written."""
        if isinstance(value, str):
            return re.sub(
                r"(?i)\$(\w+)|env:(\w+)|\$\{(\w+)\}",
                lambda match: os.environ.get(
                    match.group(1) or match.group(2) or match.group(3), match.group(0)
                ),
                value,
            )
        return value

    @staticmethod
    def _coerce(value: Any, default: Any, where: str) -> Any:
        if default is None or not isinstance(value, str):
            return value
        try:
            return type(default)(float(value)) if isinstance(default, int) else type(default)(value)
        except ValueError as exc:
            raise ConfigError(f"cannot read '{value}' as {type(default).__name__}", field=where) from exc

    def get(self, section: str, key: str) -> Any:
        """Value of `section.key` from the settings file, environment-expanded and cast to the default's type.

        Raises:
            ConfigError: The key is unknown or its value cannot be cast.
        """
        default = DEFAULTS.get(section, {}).get(key)
        if key not in self.config.get(section, {}):
            if default is None:
                raise ConfigError(f"unknown setting '{key}'", field=f"{section}.{key}")
            return default

        value = self._expand_env_variables(self.config[section][key])
        return self._coerce(value, default, f"{section}.{key}")

    def set(self, section: str, key: str, val: Any) -> None:
        """Overrides one value for the rest of the process."""
        self.config.setdefault(section, {})[key] = val

    @property
    def conf_file(self) -> Optional[Union[str, Path]]:
        return self._conf_file
