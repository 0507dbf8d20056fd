"""File formats: line-oriented counts files, JSON reports, plain-text grids.

All floating-point output is fixed to 9 significant digits so identical
inputs produce byte-identical files.
"""

from __future__ import annotations

import json

import numpy as np

from .counts import CountRecord


class CountsFileError(ValueError):
    """A counts file could not be parsed."""


def format_sig(x) -> str:
    return f"{float(x):.9g}"


def round_sig(x) -> float:
    return float(f"{float(x):.9g}")


def complex_to_pair(z) -> list:
    z = complex(z)
    return [round_sig(z.real), round_sig(z.imag)]


def matrix_to_pairs(matrix) -> list:
    return [[complex_to_pair(z) for z in row] for row in np.asarray(matrix)]


def vector_to_pairs(vector) -> list:
    return [complex_to_pair(z) for z in np.asarray(vector)]


def parse_complex_entry(entry) -> complex:
    """A JSON number or a [re, im] pair."""
    if isinstance(entry, (int, float)):
        return complex(entry)
    if (
        isinstance(entry, (list, tuple))
        and len(entry) == 2
        and all(isinstance(v, (int, float)) for v in entry)
    ):
        return complex(entry[0], entry[1])
    raise ValueError(f"expected a number or [re, im] pair, got {entry!r}")


def _rounded(doc):
    if isinstance(doc, dict):
        return {k: _rounded(v) for k, v in doc.items()}
    if isinstance(doc, (list, tuple)):
        return [_rounded(v) for v in doc]
    if isinstance(doc, bool) or doc is None or isinstance(doc, (int, str)):
        return doc
    return round_sig(doc)


def write_counts(path, records, echo: dict) -> None:
    """One record per line (input, projector, raw, background), after a
    comment header echoing the effective configuration and seed."""
    lines = [
        "# oamtomo counts",
        "# config: " + json.dumps(echo, sort_keys=True, separators=(",", ":")),
        f"# seed: {echo.get('source', {}).get('seed', 0)}",
    ]
    for r in records:
        lines.append(f"{r.input_index} {r.meas_index} {r.raw_counts} {r.background_counts}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_counts(path):
    """Parse a counts file back into CountRecords (header lines are skipped)."""
    records = []
    with open(path) as fh:
        for ln, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 4:
                raise CountsFileError(f"{path}:{ln}: expected 4 integers, got {line!r}")
            try:
                j, i, raw, bg = (int(p) for p in parts)
                records.append(CountRecord(j, i, raw, bg))
            except ValueError as exc:
                raise CountsFileError(f"{path}:{ln}: {exc}") from exc
    if not records:
        raise CountsFileError(f"{path}: no count records found")
    return records


def write_report(path, doc: dict) -> None:
    with open(path, "w") as fh:
        fh.write(json.dumps(_rounded(doc), sort_keys=True, indent=2) + "\n")


def write_grid(path, values, extent: float) -> None:
    """Row-major space-separated grid with an 'N extent' header line."""
    values = np.asarray(values, dtype=float)
    np.savetxt(
        path,
        values,
        fmt="%.9g",
        header=f"{values.shape[0]} {format_sig(extent)}",
        comments="",
    )
