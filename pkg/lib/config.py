"""
Config Module
=============
Workbench settings: bounds, reduction defaults, output, corpus and state
locations. Values are read through the accessors below; command-line flags
override them in ``lmu.py``.
"""

import json
import logging
import os
from pathlib import Path
from typing import Any

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = "config.json"


def load_config(config_path: str = DEFAULT_CONFIG_PATH) -> dict:
    """
    Read ``config_path`` and lay its sections over the defaults.

    A missing file, invalid JSON or a top level that is not an object all
    yield the defaults unchanged.
    """
    path = Path(config_path)
    if not path.exists():
        logger.warning(f"No config at {config_path}, using built-in defaults")
        return get_default_config()

    try:
        loaded = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        logger.error(f"Config {config_path} is not valid JSON ({e}), using built-in defaults")
        return get_default_config()
    if not isinstance(loaded, dict):
        logger.error(f"Config {config_path} must hold a JSON object, using built-in defaults")
        return get_default_config()

    config = get_default_config()
    for section, values in loaded.items():
        if isinstance(values, dict) and isinstance(config.get(section), dict):
            config[section] = {**config[section], **values}
        else:
            config[section] = values
    logger.info(f"Loaded config from {config_path}")
    return config


def get_default_config() -> dict:
    return {
        "bounds": {"fuel": 1000, "depth": 6, "width": 3, "search_fuel": 400, "graph_fuel": 200},
        "reduction": {"strategy": "lor", "seed": None},
        "output": {"format": "text", "color": True},
        "corpus": {"file": "corpus/terms.txt", "jobs": 1},
        "state": {"dir": "state", "last_run_file": "last_corpus_run.json"},
        "logging": {"level": "WARNING"},
    }


# ==============================================================================
# CONFIG ACCESSORS
# ==============================================================================


def get_nested(config: dict, *keys, default: Any = None) -> Any:
    """Walk ``keys`` into nested sections; ``default`` when any step is missing."""
    node: Any = config
    for key in keys:
        if not isinstance(node, dict) or key not in node:
            return default
        node = node[key]
    return node


def get_fuel(config: dict) -> int:
    """Get the reduction step budget."""
    return get_nested(config, "bounds", "fuel", default=1000)


def get_depth(config: dict) -> int:
    """Get the derivation height bound for typing search."""
    return get_nested(config, "bounds", "depth", default=6)


def get_width(config: dict) -> int:
    """Get the intersection/continuation width bound for typing search."""
    return get_nested(config, "bounds", "width", default=3)


def get_search_fuel(config: dict) -> int:
    """Get the candidate budget of typing search."""
    return get_nested(config, "bounds", "search_fuel", default=400)


def get_graph_fuel(config: dict) -> int:
    """Get the number of reduction-graph nodes expanded before giving up."""
    return get_nested(config, "bounds", "graph_fuel", default=200)


def get_strategy(config: dict) -> str:
    """Get the default reduction strategy."""
    return get_nested(config, "reduction", "strategy", default="lor")


def get_seed(config: dict) -> Any:
    """Get the seed for the random strategy and generators."""
    return get_nested(config, "reduction", "seed", default=None)


def get_output_format(config: dict) -> str:
    """Get the output format, text or json."""
    return get_nested(config, "output", "format", default="text")


def is_color_enabled(config: dict) -> bool:
    """Check if styled output is enabled (LMU_COLOR=0 always wins)."""
    if os.environ.get("LMU_COLOR") == "0":
        return False
    return get_nested(config, "output", "color", default=True)


def get_corpus_file(config: dict) -> str:
    """Get the path of the annotated corpus."""
    return get_nested(config, "corpus", "file", default="corpus/terms.txt")


def get_corpus_jobs(config: dict) -> int:
    """Get the number of corpus worker threads."""
    return get_nested(config, "corpus", "jobs", default=1)


def get_state_dir(config: dict) -> str:
    """Get the directory holding run state."""
    return get_nested(config, "state", "dir", default="state")


def get_last_run_file(config: dict) -> str:
    """Get the file name of the last corpus run."""
    return get_nested(config, "state", "last_run_file", default="last_corpus_run.json")


def get_log_level(config: dict) -> str:
    """Get the default log level name."""
    return get_nested(config, "logging", "level", default="WARNING")
