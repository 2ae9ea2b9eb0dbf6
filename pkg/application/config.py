"""Configuration management module"""

import json
from pathlib import Path
from typing import Any, Dict

LANGUAGES = ("EN", "UA")
RUN_DEFAULTS: Dict[str, Any] = {"max_iter": 1000, "tol": 1e-8, "workers": 1}


class ConfigManager:
    """Manages application configuration"""

    def __init__(self, config_dir: Path) -> None:
        """
        Initialize ConfigManager

        Args:
            config_dir: Path to configuration directory
        """
        self.config_dir = config_dir
        try:
            self.config_dir.mkdir(parents=True, exist_ok=True)
        except OSError:
            pass  # read-only location: defaults only
        self.config_file = self.config_dir / "settings.json"

    def get_config(self) -> Dict:
        """
        Get configuration from file

        Returns:
            Dictionary with configuration data
        """
        if self.config_file.exists():
            try:
                with open(self.config_file, "r", encoding="utf-8") as f:
                    data = json.load(f)
                    return data if isinstance(data, dict) else {}
            except (OSError, ValueError):
                pass
        return {}

    def save_config(self, config: Dict) -> None:
        """
        Save configuration to file

        Args:
            config: Configuration dictionary to save
        """
        try:
            with open(self.config_file, "w", encoding="utf-8") as f:
                json.dump(config, f, ensure_ascii=False, indent=2)
        except OSError:
            pass  # If save fails, continue working

    def get_language(self) -> str:
        """
        Get saved language from configuration

        Returns:
            Language code (UA or EN)
        """
        language = self.get_config().get("language", "EN")
        return language if language in LANGUAGES else "EN"

    def save_language(self, language: str) -> None:
        """
        Save language to configuration

        Args:
            language: Language code (UA or EN)
        """
        config = self.get_config()
        config["language"] = language
        self.save_config(config)

    def get_run_defaults(self) -> Dict[str, Any]:
        """
        Run settings saved in the configuration merged over the built-in defaults

        Saved values of the wrong type or out of range are ignored.

        Returns:
            Dictionary with max_iter, tol and workers
        """
        config = self.get_config()
        defaults = dict(RUN_DEFAULTS)
        max_iter = config.get("max_iter")
        if isinstance(max_iter, int) and not isinstance(max_iter, bool) and max_iter >= 1:
            defaults["max_iter"] = max_iter
        tol = config.get("tol")
        if isinstance(tol, (int, float)) and not isinstance(tol, bool) and tol > 0:
            defaults["tol"] = float(tol)
        workers = config.get("workers")
        if isinstance(workers, int) and not isinstance(workers, bool) and workers >= 1:
            defaults["workers"] = workers
        return defaults
