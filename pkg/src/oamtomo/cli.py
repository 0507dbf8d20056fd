"""Command-line front end tying the pipeline together.

Commands
--------
simulate             write a counts file for the configured channel (or stored
                     state, when one is declared in the config)
reconstruct-process  counts file -> process matrix report with fidelity
reconstruct-state    counts file -> density matrix report with fidelity
modes                export intensity/phase grids of the three imaging planes

Exit codes: 0 success, 2 unreadable config, 3 invalid parameters,
4 incomplete counts, 5 degenerate count normalization.  Partial outputs are
removed on failure; identical config and seed give byte-identical files.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from . import fileio
from .config import (
    MEASUREMENT_MODES,
    ConfigError,
    ConfigReadError,
    RunConfig,
    load_config,
    parse_state,
)
from .counts import CountRecord, exact_counts, simulate_counts
from .optics import lens_fourier, optical_projection_probability, phase_mask_of, superposition_field
from .qudit import apply_channel_kraus, process_fidelity, projector_of, state_fidelity
from .tomography import (
    DegenerateDataError,
    IncompleteSettingsError,
    canonical_settings,
    ideal_storage_chi,
    probabilities_from_counts,
    project_to_physical_process,
    project_to_physical_state,
    qpt_linear_inversion,
    qst_linear_inversion,
    state_probabilities_from_counts,
)

EXIT_BAD_CONFIG = 2
EXIT_BAD_PARAMS = 3
EXIT_INCOMPLETE = 4
EXIT_DEGENERATE = 5


def _probability_rows(input_states, channel, cfg: RunConfig, settings) -> np.ndarray:
    """Projection probabilities for the given inputs, one row per input.

    Abstract mode evaluates Tr(mu_i E(rho_j)) directly; the optical modes
    decompose each channel output into pure components and send every
    component through the physical projection chain.
    """
    rho_out = []
    for s in input_states:
        rho = projector_of(s)
        rho_out.append(apply_channel_kraus(channel, rho) if channel is not None
                       else np.zeros_like(rho))
    rho_out = np.stack(rho_out)
    if cfg.measurement_mode == "abstract":
        return np.einsum("iab,jba->ji", settings.projectors, rho_out).real
    modulation = "ideal" if cfg.measurement_mode == "optical-ideal" else "phase_only"
    table = np.zeros((len(input_states), settings.n_settings))
    for j, rho in enumerate(rho_out):
        w, v = np.linalg.eigh(rho)
        for k in range(w.size):
            if w[k] < 1e-12:
                continue
            for i, meas in enumerate(settings.inputs):
                table[j, i] += w[k] * optical_projection_probability(
                    v[:, k], meas, cfg.optics, modulation
                )
    return table


def _make_records(table: np.ndarray, cfg: RunConfig):
    if cfg.noiseless:
        return exact_counts(table, cfg.source)
    return simulate_counts(table, cfg.source)


def _resampled(records, rng):
    return [
        CountRecord(r.input_index, r.meas_index,
                    int(rng.poisson(r.raw_counts)), int(rng.poisson(r.background_counts)))
        for r in records
    ]


def _bootstrap(records, cfg: RunConfig, fidelity_of) -> dict | None:
    """Poisson-resample the counts and redo the reconstruction B times."""
    if cfg.bootstrap_samples <= 0:
        return None
    rng = np.random.default_rng([cfg.source.seed, 104729])
    fids = [fidelity_of(_resampled(records, rng)) for _ in range(cfg.bootstrap_samples)]
    return {
        "samples": cfg.bootstrap_samples,
        "fidelity_mean": float(np.mean(fids)),
        "fidelity_std": float(np.std(fids, ddof=1)) if len(fids) > 1 else 0.0,
    }


def cmd_simulate(cfg: RunConfig, out_path: str) -> None:
    settings = canonical_settings()
    if cfg.state is not None:
        table = _probability_rows([cfg.state], cfg.channel, cfg, settings)
    else:
        table = _probability_rows(settings.inputs, cfg.channel, cfg, settings)
    fileio.write_counts(out_path, _make_records(table, cfg), cfg.echo)


def _require_complete(records, n_expected: int) -> None:
    seen = {(r.input_index, r.meas_index) for r in records}
    if len(seen) != len(records):
        raise IncompleteSettingsError("duplicate settings in counts file")
    if len(records) != n_expected:
        raise IncompleteSettingsError(
            f"expected {n_expected} settings, found {len(records)}"
        )


def cmd_reconstruct_process(cfg: RunConfig, counts_path: str, out_path: str) -> None:
    records = fileio.read_counts(counts_path)
    _require_complete(records, 81)
    settings = canonical_settings()
    basis = settings.basis
    ideal = ideal_storage_chi(basis)

    def fidelity_of(recs) -> float:
        chi = qpt_linear_inversion(probabilities_from_counts(recs), settings)
        return process_fidelity(project_to_physical_process(chi), ideal)

    chi_raw = qpt_linear_inversion(probabilities_from_counts(records), settings)
    chi_phys = project_to_physical_process(chi_raw)
    doc = {
        "report": "process",
        "config": cfg.echo,
        "chi": fileio.matrix_to_pairs(chi_phys),
        "chi_raw_trace": float(np.trace(chi_raw).real),
        "min_eigenvalue_pre_projection": float(np.linalg.eigvalsh(chi_raw).min()),
        "min_eigenvalue_post_projection": float(np.linalg.eigvalsh(chi_phys).min()),
        "process_fidelity_vs_ideal": process_fidelity(chi_phys, ideal),
    }
    boot = _bootstrap(records, cfg, fidelity_of)
    if boot is not None:
        doc["bootstrap"] = boot
    fileio.write_report(out_path, doc)


def cmd_reconstruct_state(cfg: RunConfig, counts_path: str, out_path: str) -> None:
    if cfg.state is None:
        raise ConfigError("state", "a target state is required for state reconstruction")
    records = fileio.read_counts(counts_path)
    _require_complete(records, 9)
    settings = canonical_settings()
    target = projector_of(cfg.state)

    def fidelity_of(recs) -> float:
        rho = qst_linear_inversion(state_probabilities_from_counts(recs), settings)
        return state_fidelity(project_to_physical_state(rho), target)

    rho_raw = qst_linear_inversion(state_probabilities_from_counts(records), settings)
    rho_phys = project_to_physical_state(rho_raw)
    doc = {
        "report": "state",
        "config": cfg.echo,
        "target_state": fileio.vector_to_pairs(cfg.state),
        "rho": fileio.matrix_to_pairs(rho_phys),
        "rho_raw_trace": float(np.trace(rho_raw).real),
        "min_eigenvalue_pre_projection": float(np.linalg.eigvalsh(rho_raw).min()),
        "min_eigenvalue_post_projection": float(np.linalg.eigvalsh(rho_phys).min()),
        "state_fidelity_vs_target": state_fidelity(rho_phys, target),
    }
    boot = _bootstrap(records, cfg, fidelity_of)
    if boot is not None:
        doc["bootstrap"] = boot
    fileio.write_report(out_path, doc)


def cmd_modes(cfg: RunConfig, out_dir: str, written: list) -> None:
    if cfg.state is None:
        raise ConfigError("state", "a state is required for mode export")
    os.makedirs(out_dir, exist_ok=True)
    mask = superposition_field(cfg.state, cfg.optics)
    fourier = lens_fourier(mask)
    image = lens_fourier(fourier)
    for plane, field in (("mask", mask), ("fourier", fourier), ("image", image)):
        for kind, values in (
            ("intensity", np.abs(field.samples) ** 2),
            ("phase", phase_mask_of(field)),
        ):
            path = os.path.join(out_dir, f"{plane}_{kind}.txt")
            written.append(path)
            fileio.write_grid(path, values, cfg.optics.extent)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oamtomo",
        description="Simulate and reconstruct qutrit storage tomography experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, counts=False):
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", help="output path (overrides config output section)")
        p.add_argument("--seed", type=int, help="override source.seed")
        p.add_argument("--mode", choices=MEASUREMENT_MODES, help="override measurement_mode")
        if counts:
            p.add_argument("--counts", required=True, help="counts file to reconstruct from")

    common(sub.add_parser("simulate", help="generate a coincidence counts file"))
    common(sub.add_parser("reconstruct-process", help="reconstruct the process matrix"),
           counts=True)
    common(sub.add_parser("reconstruct-state", help="reconstruct a stored state"), counts=True)
    modes = sub.add_parser("modes", help="export mask/Fourier/image plane grids")
    common(modes)
    modes.add_argument("--state", help="state name or JSON amplitude list (overrides config)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    written: list = []
    try:
        cfg = load_config(args.config, seed=args.seed, mode=args.mode)
        if args.command == "modes" and args.state is not None:
            try:
                spec = json.loads(args.state)
            except json.JSONDecodeError:
                spec = args.state
            cfg = dataclasses.replace(cfg, state=parse_state(spec, cfg.dimension))

        if args.command == "simulate":
            out = args.out or cfg.counts_path
            if not out:
                raise ConfigError("output.counts", "no output path given (config or --out)")
            written.append(out)
            cmd_simulate(cfg, out)
        elif args.command == "reconstruct-process":
            out = args.out or cfg.report_path
            if not out:
                raise ConfigError("output.report", "no output path given (config or --out)")
            written.append(out)
            cmd_reconstruct_process(cfg, args.counts, out)
        elif args.command == "reconstruct-state":
            out = args.out or cfg.report_path
            if not out:
                raise ConfigError("output.report", "no output path given (config or --out)")
            written.append(out)
            cmd_reconstruct_state(cfg, args.counts, out)
        else:
            out = args.out or cfg.grids_dir
            if not out:
                raise ConfigError("output.grids", "no output directory given (config or --out)")
            cmd_modes(cfg, out, written)
        return 0
    except ConfigReadError as exc:
        _fail(written, f"config: {exc}")
        return EXIT_BAD_CONFIG
    except ConfigError as exc:
        _fail(written, f"invalid configuration: {exc}")
        return EXIT_BAD_PARAMS
    except DegenerateDataError as exc:
        _fail(written, f"degenerate counts: {exc}")
        return EXIT_DEGENERATE
    except (IncompleteSettingsError, fileio.CountsFileError, FileNotFoundError) as exc:
        _fail(written, f"counts: {exc}")
        return EXIT_INCOMPLETE
    except ValueError as exc:
        _fail(written, f"invalid parameters: {exc}")
        return EXIT_BAD_PARAMS


def _fail(written, message: str) -> None:
    print(f"oamtomo: {message}", file=sys.stderr)
    for path in written:
        try:
            os.remove(path)
        except OSError:
            pass


if __name__ == "__main__":
    sys.exit(main())
