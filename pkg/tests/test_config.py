import json

from application.config import RUN_DEFAULTS, ConfigManager


def test_defaults_without_settings_file(tmp_path):
    manager = ConfigManager(tmp_path / "config")
    assert manager.get_config() == {}
    assert manager.get_language() == "EN"
    assert manager.get_run_defaults() == RUN_DEFAULTS


def test_language_round_trip(tmp_path):
    manager = ConfigManager(tmp_path)
    manager.save_language("UA")
    assert ConfigManager(tmp_path).get_language() == "UA"
    manager.save_config({"language": "FR"})
    assert manager.get_language() == "EN"


def test_saved_run_defaults_are_validated(tmp_path):
    (tmp_path / "settings.json").write_text(
        json.dumps({"max_iter": 50, "tol": "tiny", "workers": 0}), encoding="utf-8"
    )
    defaults = ConfigManager(tmp_path).get_run_defaults()
    assert defaults == {"max_iter": 50, "tol": RUN_DEFAULTS["tol"], "workers": RUN_DEFAULTS["workers"]}


def test_corrupt_settings_file_is_ignored(tmp_path):
    (tmp_path / "settings.json").write_text("[1, 2", encoding="utf-8")
    assert ConfigManager(tmp_path).get_config() == {}
