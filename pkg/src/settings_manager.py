import json
import os
import sys
from PyQt6.QtCore import QStandardPaths, QCoreApplication

from src.formula import TwoSatLpError

DEFAULTS = {
    "debug_mode": False,
    "arithmetic": "float",
    "capacity_mode": "unit",
    "tolerance": 1e-7,
    "pivot_rule": "dantzig",
    "degenerate_threshold": 50,
    "refactor_interval": 100,
    "iteration_factor": 50,
    "seed": 0,
    "bench_workers": 2,
}

CHOICES = {
    "arithmetic": ("float", "rational"),
    "capacity_mode": ("unit", "sources"),
    "pivot_rule": ("dantzig", "bland"),
}

POSITIVE = ("tolerance", "degenerate_threshold", "refactor_interval", "iteration_factor", "bench_workers")


class SettingsError(TwoSatLpError):
    pass


def check_setting(key, value):
    """Returns the value coerced to the default's type, or raises SettingsError."""
    if key not in DEFAULTS:
        raise SettingsError(f"unknown setting {key!r}")
    if key in CHOICES:
        if value not in CHOICES[key]:
            raise SettingsError(f"{key} must be one of {', '.join(CHOICES[key])}, got {value!r}")
        return value
    kind = type(DEFAULTS[key])
    if kind is bool:
        if not isinstance(value, bool):
            raise SettingsError(f"{key} must be true or false, got {value!r}")
        return value
    try:
        value = kind(value)
    except (TypeError, ValueError):
        raise SettingsError(f"{key} must be a {kind.__name__}, got {value!r}") from None
    if key in POSITIVE and value <= 0:
        raise SettingsError(f"{key} must be positive, got {value!r}")
    return value


class SettingsManager:
    """
    Solver and bench settings kept as JSON in the platform's application
    config directory. Stored values are merged over DEFAULTS; unknown keys
    and invalid values in the file are skipped with a warning.
    """

    def __init__(self, organization="twosat-lp", app_name="twosat-lp", config_dir=None):
        if config_dir is None:
            QCoreApplication.setOrganizationName(organization)
            QCoreApplication.setApplicationName(app_name)
            config_dir = QStandardPaths.writableLocation(
                QStandardPaths.StandardLocation.AppConfigLocation
            )

        self.config_dir = config_dir
        self.settings_path = os.path.join(self.config_dir, "settings.json")
        os.makedirs(self.config_dir, exist_ok=True)

        self.defaults = dict(DEFAULTS)
        self.settings = self.defaults.copy()
        self.load_settings()

    def load_settings(self):
        # runs before the logger exists, so problems go straight to stderr
        if not os.path.exists(self.settings_path):
            return
        try:
            with open(self.settings_path, "r", encoding="utf-8") as f:
                stored = json.load(f)
            if not isinstance(stored, dict):
                raise ValueError("top level is not an object")
        except (OSError, ValueError) as e:
            print(f"Warning: ignoring {self.settings_path}: {e}", file=sys.stderr)
            self.settings = self.defaults.copy()
            return

        for key, value in stored.items():
            try:
                self.settings[key] = check_setting(key, value)
            except SettingsError as e:
                print(f"Warning: {self.settings_path}: {e}; keeping {self.settings.get(key)!r}", file=sys.stderr)

    def save_settings(self):
        try:
            with open(self.settings_path, "w", encoding="utf-8") as f:
                json.dump(self.settings, f, indent=4)
        except OSError as e:
            print(f"Error: could not save settings to {self.settings_path}: {e}", file=sys.stderr)

    def get(self, key, default=None):
        return self.settings.get(key, default)

    def set(self, key, value):
        self.settings[key] = check_setting(key, value)

    def get_all(self):
        return self.settings.copy()

    def update(self, new_settings):
        """Validates every value first, so a bad entry leaves the settings untouched."""
        checked = {key: check_setting(key, value) for key, value in new_settings.items()}
        self.settings.update(checked)

    def reset_settings(self):
        self.settings = self.defaults.copy()
        self.save_settings()
