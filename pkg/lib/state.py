"""
State Module
============
Persisted verdicts of the last corpus run, so a run can report which
terms changed verdict since the previous one.
"""

import json
import logging
from datetime import datetime
from pathlib import Path

logger = logging.getLogger(__name__)

DEFAULT_STATE_DIR = "state"
DEFAULT_LAST_RUN_FILE = "last_corpus_run.json"


# ==============================================================================
# STATE FILES
# ==============================================================================


def ensure_state_dir(state_dir: str = DEFAULT_STATE_DIR) -> Path:
    path = Path(state_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def load_state(state_file: str, state_dir: str = DEFAULT_STATE_DIR) -> dict:
    """Read a state file; a missing or unreadable file is an empty state."""
    path = Path(state_dir) / state_file
    if not path.exists():
        logger.debug(f"No state at {path}")
        return {}
    try:
        state = json.loads(path.read_text())
    except (json.JSONDecodeError, OSError) as e:
        logger.warning(f"Ignoring unreadable state {path}: {e}")
        return {}
    return state if isinstance(state, dict) else {}


def save_state(state: dict, state_file: str, state_dir: str = DEFAULT_STATE_DIR) -> bool:
    path = ensure_state_dir(state_dir) / state_file
    try:
        path.write_text(json.dumps(state, indent=2, sort_keys=True, default=str))
    except OSError as e:
        logger.error(f"Could not write state {path}: {e}")
        return False
    logger.info(f"Saved state to {path}")
    return True


# ==============================================================================
# CORPUS RUNS
# ==============================================================================


def load_last_run(state_file: str = DEFAULT_LAST_RUN_FILE, state_dir: str = DEFAULT_STATE_DIR) -> dict:
    return load_state(state_file, state_dir)


def save_last_run(
    verdicts: dict[str, dict],
    state_file: str = DEFAULT_LAST_RUN_FILE,
    state_dir: str = DEFAULT_STATE_DIR,
) -> bool:
    """Record per-term verdicts, keyed by the printed term."""
    state = {"timestamp": datetime.now().isoformat(), "terms": len(verdicts), "verdicts": verdicts}
    return save_state(state, state_file, state_dir)


def get_changed_verdicts(current: dict[str, dict], last: dict) -> list[str]:
    """Terms present in both runs whose verdicts differ, in current order."""
    previous = last.get("verdicts", {})
    changed = [term for term, verdict in current.items() if term in previous and previous[term] != verdict]
    if changed:
        logger.info(f"{len(changed)} term(s) changed verdict since the last run")
    return changed
