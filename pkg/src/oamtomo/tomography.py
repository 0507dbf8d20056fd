"""State and process tomography over the 9-input x 9-projector scheme.

Forward direction: exact projection probabilities for a channel given as
Kraus operators or as a process matrix.  Inverse direction: linear-inversion
reconstruction of density matrices (from 9 probabilities) and process
matrices (from the full 81-entry table), followed by eigenvalue clamping to
restore physicality.  Reconstruction parameterizes the unknown directly by a
real Hermitian coordinate vector, so inverted matrices are Hermitian by
construction and the linear systems are real-valued.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .counts import subtract_background
from .qudit import (
    OperatorBasis,
    KrausChannel,
    apply_channel_chi,
    apply_channel_kraus,
    canonical_input_states,
    gell_mann_basis,
    projector_of,
)


class IncompleteSettingsError(ValueError):
    """A counts collection does not cover the required settings exactly once."""


class DegenerateDataError(ValueError):
    """Corrected counts cannot be normalized (non-positive basis-row sum)."""


@dataclass(frozen=True)
class MeasurementSettings:
    """Input states, measurement projectors, and the operator basis.

    The first three projectors must resolve the identity (the orthonormal
    OAM basis), which is what makes per-input count normalization exact for
    trace-preserving channels, and the projector set must be linearly
    independent so linear inversion has a unique solution.
    """

    inputs: np.ndarray      # (n, d) state vectors, one per row
    projectors: np.ndarray  # (n, d, d) rank-1 Hermitian projectors
    basis: OperatorBasis

    def __post_init__(self):
        d = self.basis.dim
        n = self.inputs.shape[0]
        if self.inputs.shape != (n, d) or self.projectors.shape != (n, d, d):
            raise ValueError("settings arrays have inconsistent shapes")
        if np.abs(self.projectors[:3].sum(axis=0) - np.eye(d)).max() > 1e-12:
            raise ValueError("first three projectors do not sum to the identity")
        gram = np.einsum("iab,jba->ij", self.projectors, self.projectors).real
        if np.linalg.matrix_rank(gram, tol=1e-10) != n:
            raise ValueError("projector set is linearly dependent")

    @property
    def n_settings(self) -> int:
        return self.inputs.shape[0]


def canonical_settings() -> MeasurementSettings:
    """The qutrit scheme: nine canonical states used both as inputs and projectors."""
    states = canonical_input_states()
    projectors = np.stack([projector_of(s) for s in states])
    return MeasurementSettings(states, projectors, gell_mann_basis(3))


def hermitian_basis(n: int) -> np.ndarray:
    """Orthonormal real-coordinate basis of Hermitian n x n matrices.

    Order: the n diagonal units, then for each pair a < b the real and
    imaginary off-diagonal elements (E_ab + E_ba)/sqrt(2) and
    i(E_ba - E_ab)/sqrt(2).
    """
    out = np.zeros((n * n, n, n), dtype=complex)
    k = 0
    for a in range(n):
        out[k, a, a] = 1.0
        k += 1
    r = 1.0 / np.sqrt(2.0)
    for a in range(n):
        for b in range(a + 1, n):
            out[k, a, b] = r
            out[k, b, a] = r
            k += 1
            out[k, a, b] = -1.0j * r
            out[k, b, a] = 1.0j * r
            k += 1
    return out


def predict_probabilities(channel, settings: MeasurementSettings) -> np.ndarray:
    """Exact probability table p[j, i] = Tr(mu_i E(|psi_j><psi_j|)).

    channel may be a KrausChannel or a process matrix (d^2 x d^2 array)
    expressed in settings.basis.
    """
    rho_in = np.stack([projector_of(s) for s in settings.inputs])
    if isinstance(channel, KrausChannel):
        rho_out = np.stack([apply_channel_kraus(channel, r) for r in rho_in])
    else:
        rho_out = np.stack([apply_channel_chi(channel, settings.basis, r) for r in rho_in])
    return np.einsum("iab,jba->ji", settings.projectors, rho_out).real


def _normalized_rows(corrected: np.ndarray) -> np.ndarray:
    norms = corrected[:, :3].sum(axis=1)
    if np.any(norms <= 0.0):
        bad = int(np.flatnonzero(norms <= 0.0)[0]) + 1
        raise DegenerateDataError(
            f"input {bad}: corrected counts for the basis projectors sum to {norms[bad - 1]!r}"
        )
    return corrected / norms[:, None]


def _corrected_table(records, n_inputs: int) -> np.ndarray:
    corrected = subtract_background(records)
    table = np.full((n_inputs, 9), np.nan)
    for rec, c in zip(records, corrected):
        j, i = rec.input_index, rec.meas_index
        if not (1 <= j <= n_inputs and 1 <= i <= 9):
            raise IncompleteSettingsError(f"setting ({j}, {i}) is out of range")
        if not np.isnan(table[j - 1, i - 1]):
            raise IncompleteSettingsError(f"duplicate record for setting ({j}, {i})")
        table[j - 1, i - 1] = c
    if np.isnan(table).any():
        j, i = np.argwhere(np.isnan(table))[0] + 1
        raise IncompleteSettingsError(f"missing record for setting ({j}, {i})")
    return table


def probabilities_from_counts(records) -> np.ndarray:
    """Probability table from 81 coincidence records.

    Counts are background-subtracted (clamped at zero) and each input row is
    normalized by the summed counts of the three orthonormal-basis projectors,
    which resolve the identity.  The result is insensitive to per-input flux
    drift and to any common efficiency factor.
    """
    return _normalized_rows(_corrected_table(records, 9))


def state_probabilities_from_counts(records) -> np.ndarray:
    """Length-9 projection probabilities from the single-input record set."""
    js = {rec.input_index for rec in records}
    if len(js) > 1:
        raise IncompleteSettingsError(f"state-mode records mix input indices {sorted(js)}")
    shifted = [
        type(rec)(1, rec.meas_index, rec.raw_counts, rec.background_counts) for rec in records
    ]
    return _normalized_rows(_corrected_table(shifted, 1))[0]


def qst_linear_inversion(probabilities, settings: MeasurementSettings) -> np.ndarray:
    """Hermitian matrix rho with Tr(mu_i rho) = p_i for all projectors.

    Least-squares over the real Hermitian coordinates; the output is not yet
    guaranteed physical (see project_to_physical_state).
    """
    p = np.asarray(probabilities, dtype=float).reshape(-1)
    if p.size != settings.n_settings:
        raise ValueError(f"expected {settings.n_settings} probabilities, got {p.size}")
    d = settings.basis.dim
    hb = hermitian_basis(d)
    design = np.einsum("iab,Kba->iK", settings.projectors, hb).real
    coeff, _, rank, _ = np.linalg.lstsq(design, p, rcond=None)
    if rank < d * d:
        raise ValueError("projector set is singular; state is not identifiable")
    return np.einsum("K,Kab->ab", coeff, hb)


def qpt_linear_inversion(probabilities, settings: MeasurementSettings) -> np.ndarray:
    """Hermitian process matrix reproducing a full probability table.

    Solves p[j, i] = sum_mn chi_mn Tr(mu_i op_m rho_j op_n^dag) as 81 real
    equations in the 81 real Hermitian coordinates of chi, by least squares.
    The canonical settings give a well-conditioned square system; a
    rank-deficient design matrix raises.
    """
    n = settings.n_settings
    p = np.asarray(probabilities, dtype=float)
    if p.shape != (n, n):
        raise ValueError(f"expected a {n} x {n} probability table, got shape {p.shape}")
    lam = settings.basis.operators
    rho_in = np.stack([projector_of(s) for s in settings.inputs])
    transfer = np.einsum("iab,mbc,jcd,nad->jimn", settings.projectors, lam, rho_in, lam.conj())
    hb = hermitian_basis(lam.shape[0])
    design = np.einsum("jimn,Kmn->jiK", transfer, hb).real.reshape(n * n, -1)
    coeff, _, rank, _ = np.linalg.lstsq(design, p.reshape(-1), rcond=None)
    if rank < hb.shape[0]:
        raise ValueError("rank-deficient tomography design matrix")
    return np.einsum("K,Kmn->mn", coeff, hb)


def _clamped_eigs(matrix, label: str):
    matrix = np.asarray(matrix, dtype=complex)
    if np.abs(matrix - matrix.conj().T).max() > 1e-8:
        raise ValueError(f"{label} is not Hermitian within 1e-8")
    w, v = np.linalg.eigh(0.5 * (matrix + matrix.conj().T))
    return np.clip(w, 0.0, None), v


def project_to_physical_state(rho) -> np.ndarray:
    """Nearest-physical density matrix: clamp negative eigenvalues, renormalize."""
    w, v = _clamped_eigs(rho, "density matrix")
    total = w.sum()
    if total <= 0.0:
        raise ValueError("no positive eigenvalues; cannot form a physical state")
    return (v * (w / total)) @ v.conj().T


def project_to_physical_process(chi) -> np.ndarray:
    """PSD process matrix: clamp negative eigenvalues, restore the input trace."""
    chi = np.asarray(chi, dtype=complex)
    trace_in = np.trace(chi).real
    w, v = _clamped_eigs(chi, "process matrix")
    total = w.sum()
    if total <= 1e-12 or trace_in <= 1e-12:
        raise ValueError("process matrix trace vanished under physicality projection")
    return (v * (w * (trace_in / total))) @ v.conj().T


def ideal_storage_chi(basis: OperatorBasis) -> np.ndarray:
    """Process matrix of perfect storage: weight 1 on the identity operator."""
    n = basis.dim ** 2
    chi = np.zeros((n, n), dtype=complex)
    chi[0, 0] = 1.0
    return chi
