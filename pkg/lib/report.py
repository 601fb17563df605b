"""
Report Module
=============
Text and JSON renderings of traces, typings, classification reports and
result tables.
"""

import logging
from typing import Optional

import pandas as pd

from lib.derivations import Derivation, derivation_to_json
from lib.inference import ClassifyReport, Typing
from lib.reduction import ReductionOutcome, SNStatus, Step
from lib.syntax import ctx_to_json, format_ctx, format_type, pretty
from lib.terms import format_position

logger = logging.getLogger(__name__)

GREEN = "\033[32m"
RED = "\033[31m"
YELLOW = "\033[33m"
RESET = "\033[0m"


# ==============================================================================
# VERDICTS
# ==============================================================================


def verdict_text(value: Optional[bool], unknown: str = "Unknown") -> str:
    if value is None:
        return unknown
    return "true" if value else "false"


def styled(text: str, value: Optional[bool], color: bool = True) -> str:
    """Wrap ``text`` in the colour of its verdict."""
    if not color:
        return text
    shade = YELLOW if value is None else GREEN if value else RED
    return f"{shade}{text}{RESET}"


def sn_value(status: SNStatus) -> Optional[bool]:
    return {SNStatus.SN: True, SNStatus.NOT_SN: False}.get(status)


# ==============================================================================
# TRACES
# ==============================================================================


def format_step(number: int, step: Step) -> str:
    return f"{number} {step.kind.value} @{format_position(step.position)} ⟶ {pretty(step.term)}"


def format_trace(outcome: ReductionOutcome) -> list[str]:
    return [format_step(i, step) for i, step in enumerate(outcome.steps, start=1)]


def trace_to_json(outcome: ReductionOutcome) -> dict:
    return {
        "status": outcome.status.value,
        "final": pretty(outcome.final),
        "steps": [
            {"step": i, "kind": s.kind.value, "path": format_position(s.position), "term": pretty(s.term)}
            for i, s in enumerate(outcome.steps, start=1)
        ],
    }


# ==============================================================================
# TYPINGS
# ==============================================================================


def format_typing(typing: Typing | Derivation) -> str:
    term = typing.derivation.term if isinstance(typing, Typing) else typing.term
    return f"{format_ctx(typing.vctx)} |- {pretty(term)} : {format_type(typing.type)} | {format_ctx(typing.nctx)}"


def typing_to_json(typing: Typing, with_derivation: bool = False) -> dict:
    data = {
        "ctx": ctx_to_json(typing.vctx),
        "type": format_type(typing.type),
        "nctx": ctx_to_json(typing.nctx),
    }
    if with_derivation:
        data["derivation"] = derivation_to_json(typing.derivation)
    return data


# ==============================================================================
# TABLES
# ==============================================================================

CLASSIFY_FIELDS = (
    ("hnf_by_reduction", "HNF by reduction"),
    ("nf_by_reduction", "NF by reduction"),
    ("sn_by_graph", "SN by graph"),
    ("typeable_S_nonomega", "S, non-ω type"),
    ("typeable_omega_free", "S, ω-free typing"),
    ("typeable_SN", "SN typing"),
)


def classify_rows(report: ClassifyReport, color: bool = False) -> list[tuple[str, str]]:
    rows = []
    for key, label in CLASSIFY_FIELDS:
        if key == "sn_by_graph":
            verdict = report.sn_by_graph
            value = sn_value(verdict.status)
            text = verdict.status.value
            if verdict.max_path is not None:
                text += f" (longest path {verdict.max_path})"
        else:
            value = getattr(report, key)
            # A typing search that finds nothing proves nothing.
            text = verdict_text(value, "not found" if key.startswith("typeable") else "Unknown")
        rows.append((label, styled(text, value, color)))
    return rows


def classify_table(report: ClassifyReport, color: bool = False) -> str:
    frame = pd.DataFrame(classify_rows(report, color), columns=["property", "verdict"])
    lines = [pretty(report.term), frame.to_string(index=False)]
    if report.disagreements:
        lines.append(styled(f"DISAGREEMENT: {', '.join(report.disagreements)}", False, color))
    return "\n".join(lines)


def results_table(frame: pd.DataFrame) -> str:
    if frame.empty:
        return "(no results)"
    return frame.to_string(index=False)


def summarize_results(frame: pd.DataFrame) -> pd.DataFrame:
    """Counts of passed / failed / inconclusive checks per property."""
    if frame.empty:
        return pd.DataFrame(columns=["property", "passed", "failed", "inconclusive"])
    outcome = frame["ok"].map({True: "passed", False: "failed"}).fillna("inconclusive")
    summary = pd.crosstab(frame["property"], outcome)
    for column in ("passed", "failed", "inconclusive"):
        if column not in summary.columns:
            summary[column] = 0
    return summary[["passed", "failed", "inconclusive"]].reset_index()
