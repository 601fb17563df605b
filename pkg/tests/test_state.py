from lib.state import get_changed_verdicts, load_last_run, load_state, save_last_run, save_state


def test_state_round_trip(state_dir) -> None:
    assert load_state("missing.json", state_dir) == {}
    assert save_state({"a": 1}, "s.json", state_dir)
    assert load_state("s.json", state_dir) == {"a": 1}


def test_corrupt_state_reads_as_empty(tmp_path) -> None:
    (tmp_path / "bad.json").write_text("{")
    assert load_state("bad.json", str(tmp_path)) == {}


def test_last_run_records_verdicts(state_dir) -> None:
    verdicts = {"x": {"SN by graph": "SN"}}
    save_last_run(verdicts, "last.json", state_dir)
    last = load_last_run("last.json", state_dir)
    assert last["verdicts"] == verdicts
    assert "timestamp" in last


def test_changed_verdicts_ignore_new_terms() -> None:
    last = {"verdicts": {"x": {"hnf": "true"}, "y": {"hnf": "true"}}}
    current = {"x": {"hnf": "true"}, "y": {"hnf": "Unknown"}, "z": {"hnf": "false"}}
    assert get_changed_verdicts(current, last) == ["y"]
    assert get_changed_verdicts(current, {}) == []


def test_saving_creates_the_state_dir(tmp_path) -> None:
    target = tmp_path / "nested" / "state"
    assert save_last_run({}, "last.json", str(target))
    assert load_last_run("last.json", str(target))["terms"] == 0
