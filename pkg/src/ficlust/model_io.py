"""Center-model persistence as a versioned JSON document with exact round-trips."""

from __future__ import annotations

import json
from pathlib import Path

from .core import CentersModel
from .errors import MissingFileError, ParseError

__all__ = ["save_model", "load_model", "MODEL_FORMAT"]

MODEL_FORMAT = "ficlust-model/1"


def save_model(model: CentersModel, path) -> None:
    doc = {
        "format": MODEL_FORMAT,
        "k": model.k,
        "dim": model.dim,
        "block_split": list(model.block_split) if model.block_split else None,
        "provenance": model.provenance,
        "centers": [[float(v) for v in row] for row in model.centers],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path) -> CentersModel:
    p = Path(path)
    if not p.exists():
        raise MissingFileError(f"no such file: {p}")
    try:
        with open(p, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"{p}: not a valid model file: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ParseError(f"{p}: unsupported model format {doc.get('format')!r}"
                         if isinstance(doc, dict) else f"{p}: not a model document")
    try:
        split = doc["block_split"]
        model = CentersModel(
            doc["centers"],
            block_split=None if split is None else (int(split[0]), int(split[1])),
            provenance=str(doc.get("provenance", "unspecified")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{p}: malformed model document: {exc}") from None
    if model.k != doc.get("k") or model.dim != doc.get("dim"):
        raise ParseError(f"{p}: declared shape disagrees with stored centers")
    return model
