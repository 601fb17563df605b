from lib.config import (
    get_default_config,
    get_depth,
    get_fuel,
    get_nested,
    get_strategy,
    is_color_enabled,
    load_config,
)


def test_missing_file_falls_back_to_defaults(tmp_path) -> None:
    assert load_config(str(tmp_path / "nope.json")) == get_default_config()


def test_invalid_json_falls_back_to_defaults(tmp_path) -> None:
    path = tmp_path / "config.json"
    path.write_text("{")
    assert load_config(str(path)) == get_default_config()


def test_partial_config_keeps_accessor_defaults(tmp_path) -> None:
    path = tmp_path / "config.json"
    path.write_text('{"bounds": {"fuel": 50}}')
    config = load_config(str(path))
    assert get_fuel(config) == 50
    assert get_depth(config) == 6
    assert get_strategy(config) == "lor"


def test_default_bounds() -> None:
    config = get_default_config()
    assert (get_fuel(config), get_depth(config)) == (1000, 6)
    assert get_nested(config, "bounds", "width") == 3
    assert get_nested(config, "bounds", "missing", default=7) == 7


def test_color_switch(monkeypatch) -> None:
    monkeypatch.delenv("LMU_COLOR", raising=False)
    assert is_color_enabled({})
    assert not is_color_enabled({"output": {"color": False}})
    monkeypatch.setenv("LMU_COLOR", "0")
    assert not is_color_enabled({"output": {"color": True}})


def test_sections_are_laid_over_defaults(tmp_path) -> None:
    path = tmp_path / "config.json"
    path.write_text('{"bounds": {"fuel": 50}, "extra": 1}')
    config = load_config(str(path))
    assert config["bounds"] == {**get_default_config()["bounds"], "fuel": 50}
    assert config["extra"] == 1


def test_non_object_config_falls_back_to_defaults(tmp_path) -> None:
    path = tmp_path / "config.json"
    path.write_text("[1, 2]")
    assert load_config(str(path)) == get_default_config()
