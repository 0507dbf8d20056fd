"""Run configuration: JSON parsing and validation for the command-line front end.

Validation failures raise ConfigError with the offending field path in the
message; an unreadable or syntactically invalid file raises ConfigReadError.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .counts import SourceConfig
from .fileio import parse_complex_entry
from .optics import OpticsConfig, self_fourier_waist
from .qudit import (
    KrausChannel,
    canonical_input_states,
    dephasing_channel,
    depolarizing_channel,
    identity_channel,
    phase_rotation_channel,
    state_vector,
)

MEASUREMENT_MODES = ("abstract", "optical-ideal", "optical-phase-only")

_STATE_NAMES = {"L": 0, "G": 1, "R": 2}


class ConfigReadError(Exception):
    """The configuration file could not be read or parsed as JSON."""


class ConfigError(ValueError):
    """A configuration value is invalid; message starts with the field path."""

    def __init__(self, field_path: str, message: str):
        self.field_path = field_path
        super().__init__(f"{field_path}: {message}")


@dataclass(frozen=True)
class RunConfig:
    dimension: int
    channel: KrausChannel | None
    state: np.ndarray | None
    source: SourceConfig
    optics: OpticsConfig
    measurement_mode: str
    noiseless: bool
    bootstrap_samples: int
    counts_path: str | None
    report_path: str | None
    grids_dir: str | None
    echo: dict


def parse_channel(spec, d: int):
    """Channel spec: null, a named family string, or {"kraus": [...]}.

    Named families: "identity", "depolarizing p", "dephasing p", "unitary theta".
    Kraus entries are nested rows of numbers or [re, im] pairs.
    """
    if spec is None:
        return None
    if isinstance(spec, str):
        parts = spec.split()
        name = parts[0] if parts else ""
        if name == "identity" and len(parts) == 1:
            return identity_channel(d)
        if name in ("depolarizing", "dephasing", "unitary") and len(parts) == 2:
            try:
                value = float(parts[1])
            except ValueError:
                raise ConfigError("channel", f"non-numeric parameter in {spec!r}")
            try:
                if name == "depolarizing":
                    return depolarizing_channel(value, d)
                if name == "dephasing":
                    return dephasing_channel(value, d)
                return phase_rotation_channel(value, d)
            except ValueError as exc:
                raise ConfigError("channel", str(exc))
        raise ConfigError("channel", f"unrecognized channel spec {spec!r}")
    if isinstance(spec, dict) and set(spec) == {"kraus"}:
        try:
            ks = [
                np.array([[parse_complex_entry(e) for e in row] for row in op], dtype=complex)
                for op in spec["kraus"]
            ]
        except (ValueError, TypeError) as exc:
            raise ConfigError("channel.kraus", str(exc))
        try:
            return KrausChannel(tuple(ks))
        except ValueError as exc:
            raise ConfigError("channel.kraus", str(exc))
    raise ConfigError("channel", f"expected null, a spec string, or a kraus object, got {spec!r}")


def parse_state(spec, d: int, field: str = "state"):
    """State spec: null, "L"/"G"/"R", "psi1".."psi9", or a d-component vector.

    Vectors are normalized, so [1, 1, 1] denotes the balanced superposition.
    """
    if spec is None:
        return None
    if isinstance(spec, str):
        if spec in _STATE_NAMES and d == 3:
            return canonical_input_states()[_STATE_NAMES[spec]]
        if spec.startswith("psi") and d == 3:
            try:
                k = int(spec[3:])
            except ValueError:
                k = 0
            if 1 <= k <= 9:
                return canonical_input_states()[k - 1]
        raise ConfigError(field, f"unknown state name {spec!r}")
    if isinstance(spec, (list, tuple)):
        try:
            amps = [parse_complex_entry(e) for e in spec]
        except ValueError as exc:
            raise ConfigError(field, str(exc))
        if len(amps) != d:
            raise ConfigError(field, f"expected {d} amplitudes, got {len(amps)}")
        try:
            return state_vector(amps, normalize=True)
        except ValueError as exc:
            raise ConfigError(field, str(exc))
    raise ConfigError(field, f"expected null, a name, or an amplitude list, got {spec!r}")


def _require(mapping, field: str, kind, default, path: str):
    value = mapping.get(field, default)
    kinds = kind if isinstance(kind, tuple) else (kind,)
    if bool not in kinds and isinstance(value, bool):
        raise ConfigError(f"{path}{field}", f"expected {kind}, got a boolean")
    if not isinstance(value, kind):
        raise ConfigError(f"{path}{field}", f"expected {kind}, got {value!r}")
    return value


def _parse_source(raw: dict) -> SourceConfig:
    num = (int, float)
    kwargs = dict(
        counts_per_setting=_require(raw, "counts_per_setting", num, 10000, "source."),
        background=_require(raw, "background", num, 0.0, "source."),
        efficiency=_require(raw, "efficiency", num, 1.0, "source."),
        window=_require(raw, "window", num, 50e-9, "source."),
        seed=_require(raw, "seed", int, 0, "source."),
    )
    unknown = set(raw) - set(kwargs)
    if unknown:
        raise ConfigError(f"source.{sorted(unknown)[0]}", "unknown field")
    try:
        return SourceConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError("source", str(exc))


def _parse_optics(raw: dict) -> OpticsConfig:
    num = (int, float)
    n = _require(raw, "grid_size", int, 512, "optics.")
    extent = _require(raw, "extent", num, 1.0, "optics.")
    default_waist = self_fourier_waist(n, extent) if n > 0 and extent > 0 else 1.0
    waist = _require(raw, "waist", num, default_waist, "optics.")
    fiber = _require(raw, "fiber_waist", num, default_waist, "optics.")
    unknown = set(raw) - {"grid_size", "extent", "waist", "fiber_waist"}
    if unknown:
        raise ConfigError(f"optics.{sorted(unknown)[0]}", "unknown field")
    try:
        return OpticsConfig(n, float(extent), float(waist), float(fiber))
    except ValueError as exc:
        raise ConfigError("optics", str(exc))


def load_config(path, seed: int | None = None, mode: str | None = None) -> RunConfig:
    """Parse and validate a JSON run configuration.

    seed and mode, when given, override source.seed and measurement_mode;
    the echoed configuration reflects the effective values.
    """
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigReadError(f"{path}: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "configuration must be a JSON object")

    dimension = _require(raw, "dimension", int, 3, "")
    if dimension != 3:
        raise ConfigError("dimension", f"only dimension 3 is supported, got {dimension}")

    source_raw = dict(_require(raw, "source", dict, {}, ""))
    if seed is not None:
        source_raw["seed"] = seed
    source = _parse_source(source_raw)

    optics_raw = _require(raw, "optics", dict, {}, "")
    optics = _parse_optics(optics_raw)

    measurement_mode = mode if mode is not None else _require(
        raw, "measurement_mode", str, "abstract", ""
    )
    if measurement_mode not in MEASUREMENT_MODES:
        raise ConfigError(
            "measurement_mode", f"must be one of {MEASUREMENT_MODES}, got {measurement_mode!r}"
        )

    noiseless = _require(raw, "noiseless", bool, False, "")
    bootstrap = _require(raw, "bootstrap_samples", int, 0, "")
    if bootstrap < 0:
        raise ConfigError("bootstrap_samples", "must be nonnegative")

    channel = parse_channel(raw.get("channel", "identity"), dimension)
    state = parse_state(raw.get("state"), dimension)

    output = _require(raw, "output", dict, {}, "")
    counts_path = output.get("counts")
    report_path = output.get("report")
    grids_dir = output.get("grids")
    for key, value in (("counts", counts_path), ("report", report_path), ("grids", grids_dir)):
        if value is not None and not isinstance(value, str):
            raise ConfigError(f"output.{key}", f"expected a path string, got {value!r}")

    known = {
        "dimension", "channel", "state", "source", "optics", "measurement_mode",
        "noiseless", "bootstrap_samples", "output",
    }
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown field")

    echo = {
        "dimension": dimension,
        "channel": raw.get("channel", "identity"),
        "state": raw.get("state"),
        "source": {
            "counts_per_setting": source.counts_per_setting,
            "background": source.background,
            "efficiency": source.efficiency,
            "window": source.window,
            "seed": source.seed,
        },
        "optics": {
            "grid_size": optics.grid_size,
            "extent": optics.extent,
            "waist": optics.waist,
            "fiber_waist": optics.fiber_waist,
        },
        "measurement_mode": measurement_mode,
        "noiseless": noiseless,
        "bootstrap_samples": bootstrap,
    }
    return RunConfig(
        dimension=dimension,
        channel=channel,
        state=state,
        source=source,
        optics=optics,
        measurement_mode=measurement_mode,
        noiseless=noiseless,
        bootstrap_samples=bootstrap,
        counts_path=counts_path,
        report_path=report_path,
        grids_dir=grids_dir,
        echo=echo,
    )
