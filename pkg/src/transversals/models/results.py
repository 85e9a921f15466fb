"""Output encoding for command results."""

import json
from typing import Any

from transversals.services.geometry import SignVector, format_rational
from transversals.services.transversal import Cell, CellComplex, format_signs


def render_json(payload: dict[str, Any]) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def render_text(payload: dict[str, Any]) -> str:
    """One ``key: value`` line per top-level entry; nested values stay compact JSON."""
    lines = []
    for key, value in payload.items():
        if isinstance(value, dict | list):
            value = json.dumps(value, ensure_ascii=False, separators=(",", ":"))
        lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def render(payload: dict[str, Any], output_format: str) -> str:
    return render_text(payload) if output_format == "text" else render_json(payload)


def cell_to_dict(cell: Cell) -> dict[str, Any]:
    return {
        "cell": cell.label,
        "dim": cell.dim,
        "witness": [format_rational(c) for c in cell.witness],
    }


def cells_to_dict(cells: CellComplex, subfamilies: dict[SignVector, list[str]]) -> dict[str, Any]:
    """Covector listing with per-cell subfamilies; lineality cells share the zero covector's."""
    return {
        "n": cells.n,
        "pool_size": len(cells.pool),
        "covectors": len(cells.covectors),
        "cells": [
            {**cell_to_dict(c), "subfamily": subfamilies.get(c.covector, [])} for c in cells.cells
        ],
        "lineality_dimension": len(cells.lineality),
        "covector_signs": [format_signs(s) for s in cells.sorted_covectors()],
    }
