"""Qudit states, operator bases, and quantum channels.

Dense complex linear algebra for d-level systems: state vectors and density
matrices, the identity-plus-Gell-Mann operator basis used to expand channels,
conversion between the Kraus and process-matrix representations of a channel,
and Uhlmann fidelities for states and processes.

For d = 3 the computational basis is the OAM triple (|L>, |G>, |R>) carrying
winding numbers +1, 0, -1.  Channels may be trace-decreasing (a lossy storage
step keeps the algebra valid); fidelities normalize traces internally.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BASIS_LABELS = ("L", "G", "R")

# sqrt(machine epsilon) scale; eigenvalues above -CLAMP are treated as zero
_EIG_CLAMP = 1e-8
_HERM_ATOL = 1e-8


def state_vector(amplitudes, normalize: bool = False) -> np.ndarray:
    """Return a validated complex state vector.

    Args:
        amplitudes: sequence of d >= 2 complex amplitudes.
        normalize: if True, rescale to unit norm instead of requiring it.

    Raises:
        ValueError: dimension < 2, zero vector, or (with normalize=False)
            norm deviating from 1 by more than 1e-12.
    """
    psi = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if psi.size < 2:
        raise ValueError("state dimension must be >= 2")
    norm = float(np.linalg.norm(psi))
    if norm == 0.0:
        raise ValueError("zero state vector")
    if normalize:
        return psi / norm
    if abs(norm - 1.0) > 1e-12:
        raise ValueError(f"state vector norm {norm!r} is not 1 within 1e-12")
    return psi


def projector_of(psi) -> np.ndarray:
    """Rank-1 projector |psi><psi| of a normalized state vector."""
    psi = state_vector(psi)
    return np.outer(psi, psi.conj())


def canonical_input_states(d: int = 3) -> np.ndarray:
    """The nine canonical qutrit states used for preparation and analysis.

    Returns a (9, 3) array; row k is the state indexed k+1 in 1-based
    convention.  Rows 1-3 are the OAM basis |L>, |G>, |R>; rows 4-9 are the
    six equal-weight two-mode superpositions (two real, four with a relative
    +i phase) that complete an informationally complete projector set.

    Only defined for d = 3.
    """
    if d != 3:
        raise ValueError(f"canonical input states are only defined for d=3, got d={d}")
    s = 1.0 / np.sqrt(2.0)
    return np.array(
        [
            [1, 0, 0],
            [0, 1, 0],
            [0, 0, 1],
            [s, s, 0],
            [0, s, s],
            [1j * s, s, 0],
            [0, s, 1j * s],
            [s, 0, s],
            [s, 0, 1j * s],
        ],
        dtype=complex,
    )


@dataclass(frozen=True)
class OperatorBasis:
    """Ordered Hermitian operator basis with the identity in slot 0.

    operators has shape (dim**2, dim, dim); operators[0] is the identity and
    the rest are the traceless generators, mutually orthogonal under the
    Hilbert-Schmidt inner product with Tr(op_a @ op_a) = 2 for a >= 1.
    """

    dim: int
    operators: np.ndarray

    def __post_init__(self):
        n = self.dim * self.dim
        if self.operators.shape != (n, self.dim, self.dim):
            raise ValueError("operator stack shape does not match dimension")


def gell_mann_basis(d: int) -> OperatorBasis:
    """Identity plus the d**2 - 1 generalized Gell-Mann matrices.

    Ordering: for each two-level subspace size m = 2..d, the symmetric and
    antisymmetric off-diagonal pairs (j, m) for j < m, followed by the
    diagonal generator of that subspace.  For d = 2 this yields {I, X, Y, Z};
    for d = 3 the familiar eight Gell-Mann matrices in their standard order.
    """
    if d < 2:
        raise ValueError(f"operator basis requires dimension >= 2, got {d}")
    ops = [np.eye(d, dtype=complex)]
    for m in range(2, d + 1):
        for j in range(1, m):
            sym = np.zeros((d, d), dtype=complex)
            sym[j - 1, m - 1] = sym[m - 1, j - 1] = 1.0
            anti = np.zeros((d, d), dtype=complex)
            anti[j - 1, m - 1] = -1.0j
            anti[m - 1, j - 1] = 1.0j
            ops.append(sym)
            ops.append(anti)
        diag = np.zeros(d, dtype=complex)
        diag[: m - 1] = 1.0
        diag[m - 1] = -(m - 1)
        ops.append(np.sqrt(2.0 / (m * (m - 1))) * np.diag(diag))
    return OperatorBasis(d, np.stack(ops))


@dataclass(frozen=True)
class KrausChannel:
    """A quantum channel as a set of Kraus operators.

    Trace-decreasing channels are accepted (sum_k K_k^dag K_k <= I within
    tolerance); storage losses then show up as output traces below 1.
    """

    kraus: tuple

    def __post_init__(self):
        if len(self.kraus) == 0:
            raise ValueError("channel needs at least one Kraus operator")
        ks = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        d = ks[0].shape[0]
        for k in ks:
            if k.shape != (d, d):
                raise ValueError("Kraus operators must be square matrices of equal dimension")
        total = sum(k.conj().T @ k for k in ks)
        top = float(np.linalg.eigvalsh(total).max())
        if top > 1.0 + 1e-10:
            raise ValueError(f"channel is trace-increasing: max eig of sum K^dag K = {top!r}")
        object.__setattr__(self, "kraus", ks)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]


def identity_channel(d: int = 3) -> KrausChannel:
    """The perfect storage channel rho -> rho."""
    return KrausChannel((np.eye(d, dtype=complex),))


def unitary_channel(u) -> KrausChannel:
    """Channel rho -> U rho U^dag for a single unitary U."""
    return KrausChannel((np.asarray(u, dtype=complex),))


def phase_rotation_channel(theta: float, d: int = 3) -> KrausChannel:
    """Unitary channel diag(1, ..., 1, e^{i theta}) phasing the last basis state."""
    u = np.eye(d, dtype=complex)
    u[d - 1, d - 1] = np.exp(1j * theta)
    return KrausChannel((u,))


def _weyl_operators(d: int):
    """Shift/clock unitaries X^a Z^b, the standard qudit 'Pauli' set."""
    omega = np.exp(2j * np.pi / d)
    shift = np.zeros((d, d), dtype=complex)
    for i in range(d):
        shift[(i + 1) % d, i] = 1.0
    clock = np.diag(omega ** np.arange(d))
    out = []
    for a in range(d):
        for b in range(d):
            out.append(np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b))
    return out


def depolarizing_channel(p: float, d: int = 3) -> KrausChannel:
    """Channel rho -> (1 - p) rho + p I/d with d**2 Kraus operators."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing strength must be in [0, 1], got {p!r}")
    weyl = _weyl_operators(d)
    ks = [np.sqrt(1.0 - p + p / d**2) * weyl[0]]
    ks += [np.sqrt(p) / d * w for w in weyl[1:]]
    return KrausChannel(tuple(ks))


def dephasing_channel(p: float, d: int = 3) -> KrausChannel:
    """Channel damping every off-diagonal element by (1 - p); diagonals kept.

    Implemented as a clock-operator mixture: rho -> (1 - p) rho
    + (p/d) sum_k Z^k rho Z^-k.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"dephasing strength must be in [0, 1], got {p!r}")
    omega = np.exp(2j * np.pi / d)
    clock = np.diag(omega ** np.arange(d))
    ks = [np.sqrt(1.0 - p + p / d) * np.eye(d, dtype=complex)]
    ks += [np.sqrt(p / d) * np.linalg.matrix_power(clock, k) for k in range(1, d)]
    return KrausChannel(tuple(ks))


def random_cptp_channel(d: int, n_kraus: int = 3, rng=None) -> KrausChannel:
    """Random trace-preserving channel from a Haar-random isometry."""
    rng = np.random.default_rng(rng)
    g = rng.standard_normal((d * n_kraus, d)) + 1j * rng.standard_normal((d * n_kraus, d))
    q, _ = np.linalg.qr(g)
    return KrausChannel(tuple(q[i * d : (i + 1) * d] for i in range(n_kraus)))


def random_density_matrix(d: int, rng=None) -> np.ndarray:
    """Random full-rank density matrix (normalized Ginibre product)."""
    rng = np.random.default_rng(rng)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def apply_channel_kraus(channel: KrausChannel, rho) -> np.ndarray:
    """sum_k K_k rho K_k^dag.  Output trace <= input trace for valid channels."""
    rho = np.asarray(rho, dtype=complex)
    d = channel.dim
    if rho.shape != (d, d):
        raise ValueError(f"density matrix shape {rho.shape} does not match channel dimension {d}")
    out = np.zeros_like(rho)
    for k in channel.kraus:
        out += k @ rho @ k.conj().T
    return out


def chi_from_kraus(channel: KrausChannel, basis: OperatorBasis) -> np.ndarray:
    """Process matrix of a Kraus channel in the given operator basis.

    Expands K_k = sum_m a_km op_m with a_km = Tr(op_m K_k) / Tr(op_m^2) and
    returns chi_mn = sum_k a_km conj(a_kn), which is Hermitian and PSD and
    reproduces the channel through apply_channel_chi.
    """
    if basis.dim != channel.dim:
        raise ValueError("operator basis dimension does not match channel")
    lam = basis.operators
    norms = np.einsum("mab,mba->m", lam, lam).real
    kstack = np.stack(channel.kraus)
    a = np.einsum("mab,kba->km", lam, kstack) / norms
    return a.T @ a.conj()


def apply_channel_chi(chi, basis: OperatorBasis, rho) -> np.ndarray:
    """Apply a process matrix: rho -> sum_mn chi_mn op_m rho op_n^dag."""
    chi = np.asarray(chi, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    d = basis.dim
    n = d * d
    if chi.shape != (n, n):
        raise ValueError(f"process matrix shape {chi.shape} does not match basis size {n}")
    if rho.shape != (d, d):
        raise ValueError(f"density matrix shape {rho.shape} does not match dimension {d}")
    lam = basis.operators
    return np.einsum("mn,mab,bc,ndc->ad", chi, lam, rho, lam.conj())


def matrix_sqrt_psd(h) -> np.ndarray:
    """Hermitian PSD square root via eigendecomposition.

    Eigenvalues in [-1e-8, 0) are clamped to zero; anything lower raises.
    """
    h = np.asarray(h, dtype=complex)
    if np.abs(h - h.conj().T).max() > _HERM_ATOL:
        raise ValueError("matrix is not Hermitian within 1e-8")
    h = 0.5 * (h + h.conj().T)
    w, v = np.linalg.eigh(h)
    if w.min() < -_EIG_CLAMP:
        raise ValueError(f"matrix is not PSD: min eigenvalue {w.min()!r}")
    w = np.clip(w, 0.0, None)
    s = (v * np.sqrt(w)) @ v.conj().T
    return 0.5 * (s + s.conj().T)


def _uhlmann(a, b) -> float:
    """[Tr sqrt(sqrt(a) b sqrt(a))]^2 for trace-1 Hermitian PSD inputs."""
    sa = matrix_sqrt_psd(a)
    if np.abs(b - b.conj().T).max() > _HERM_ATOL:
        raise ValueError("matrix is not Hermitian within 1e-8")
    if np.linalg.eigvalsh(b).min() < -_EIG_CLAMP:
        raise ValueError("matrix is not PSD within tolerance")
    inner = sa @ b @ sa
    w = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    w = np.clip(w, 0.0, None)
    f = float(np.sqrt(w).sum() ** 2)
    return min(max(f, 0.0), 1.0)


def state_fidelity(rho1, rho2) -> float:
    """Uhlmann fidelity of two density matrices, in [0, 1].

    Traces are renormalized internally when within 10% of 1; larger
    deviations raise (the input is then not a near-physical state).
    """
    out = []
    for rho in (rho1, rho2):
        rho = np.asarray(rho, dtype=complex)
        t = np.trace(rho).real
        if abs(t - 1.0) > 0.1:
            raise ValueError(f"density matrix trace {t!r} deviates from 1 by more than 10%")
        out.append(rho / t)
    return _uhlmann(out[0], out[1])


def process_fidelity(chi, chi_ideal) -> float:
    """Uhlmann fidelity of two process matrices after trace normalization."""
    out = []
    for c in (chi, chi_ideal):
        c = np.asarray(c, dtype=complex)
        t = np.trace(c).real
        if t <= 1e-12:
            raise ValueError("process matrix has non-positive trace")
        out.append(c / t)
    return _uhlmann(out[0], out[1])
