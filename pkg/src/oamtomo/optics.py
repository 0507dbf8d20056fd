"""Sampled-field model of OAM mode preparation and the 4-f projection chain.

All lengths are dimensionless grid units; physical scalings (lens focal
lengths, wavelength, the far-field arm) only rescale coordinates and cancel
in coupling probabilities, so they are not simulated.  The mode family is
Laguerre-Gauss with radial index 0: amplitude (sqrt(2) r / w)^|l| e^{-r^2/w^2}
e^{i l phi}, the standard OAM eigenmodes with closed-form overlaps.

lens_fourier is a centered, unitary 2-D DFT: one ideal lens focal-plane
transform.  Two of them (four_f_image) reproduce the input with coordinates
inverted, which is why measurement masks are conjugated relative to the
preparation masks.  By default configurations use the grid's self-Fourier
waist, for which a fundamental Gaussian is shape-invariant under
lens_fourier and mode fields stay equally well resolved in every plane.

Reference hardware values from the modeled experiment (beam waist 2.5 mm,
300 mm lenses, 1920x1080 phase-only SLMs, 2.5 m far-field arm) are
documentation metadata only; see EXPERIMENT_REFERENCE.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .qudit import state_vector

EXPERIMENT_REFERENCE = {
    "beam_waist_mm": 2.5,
    "lens_focal_length_mm": 300.0,
    "slm_resolution": (1920, 1080),
    "farfield_arm_m": 2.5,
}

# winding numbers of the qutrit basis (|L>, |G>, |R>)
MODE_WINDINGS = (1, 0, -1)

_MAX_WINDING = 5


def self_fourier_waist(grid_size: int, extent: float) -> float:
    """Waist for which a Gaussian is invariant under the grid's unitary DFT."""
    return 2.0 * extent / np.sqrt(np.pi * grid_size)


@dataclass(frozen=True)
class OpticsConfig:
    """Grid geometry and mode waists.

    grid_size N samples per axis over [-extent, extent); waist is the
    LG-family waist, fiber_waist the far-field collection Gaussian's waist.
    """

    grid_size: int
    extent: float
    waist: float
    fiber_waist: float

    def __post_init__(self):
        n = self.grid_size
        if n < 128 or (n & (n - 1)) != 0:
            raise ValueError(f"grid_size must be a power of two >= 128, got {n}")
        if self.extent <= 0:
            raise ValueError("extent must be positive")
        if self.waist <= 0 or self.fiber_waist <= 0:
            raise ValueError("waists must be positive")
        if self.waist > self.extent / 4.0:
            raise ValueError(
                f"waist {self.waist!r} exceeds extent/4 = {self.extent / 4.0!r} (aliasing guard)"
            )

    @classmethod
    def matched(cls, grid_size: int = 512, extent: float = 1.0) -> "OpticsConfig":
        """Self-Fourier configuration: mode and fiber waists both at the DFT fixed point."""
        w = self_fourier_waist(grid_size, extent)
        return cls(grid_size, extent, w, w)

    @property
    def step(self) -> float:
        return 2.0 * self.extent / self.grid_size

    @property
    def cell_area(self) -> float:
        return self.step * self.step

    def axis(self) -> np.ndarray:
        return (np.arange(self.grid_size) - self.grid_size // 2) * self.step

    def meshgrid(self):
        x = self.axis()
        return np.meshgrid(x, x, indexing="xy")

    def conjugate_waist(self, waist: float) -> float:
        """Waist of the unitary-DFT image of a Gaussian of the given waist."""
        return self_fourier_waist(self.grid_size, self.extent) ** 2 / waist


@dataclass(frozen=True)
class FieldGrid:
    """Sampled complex transverse field over a square grid."""

    samples: np.ndarray
    extent: float

    def __post_init__(self):
        s = self.samples
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise ValueError("field samples must form a square grid")
        if not np.isfinite(s).all():
            raise ValueError("field contains non-finite samples")

    @property
    def grid_size(self) -> int:
        return self.samples.shape[0]

    @property
    def cell_area(self) -> float:
        step = 2.0 * self.extent / self.grid_size
        return step * step

    def power(self) -> float:
        return float((np.abs(self.samples) ** 2).sum() * self.cell_area)


def _check_geometry(a: FieldGrid, b) -> None:
    if isinstance(b, FieldGrid):
        same = a.samples.shape == b.samples.shape and a.extent == b.extent
    else:
        same = a.samples.shape == np.shape(b)
    if not same:
        raise ValueError("grid geometries do not match")


def _lg_profile(l: int, cfg: OpticsConfig) -> np.ndarray:
    """Unnormalized LG(p=0, l) samples; the vortex factor is the polynomial
    (x + i sign(l) y)^|l|, exact at grid zeros."""
    xx, yy = cfg.meshgrid()
    field = np.exp(-(xx * xx + yy * yy) / cfg.waist**2).astype(complex)
    if l != 0:
        field *= ((np.sqrt(2.0) / cfg.waist) * (xx + 1j * np.sign(l) * yy)) ** abs(l)
    return field


def _normalized(samples: np.ndarray, cfg: OpticsConfig) -> FieldGrid:
    norm = np.sqrt((np.abs(samples) ** 2).sum() * cfg.cell_area)
    if norm == 0.0:
        raise ValueError("cannot normalize a zero field")
    return FieldGrid(samples / norm, cfg.extent)


def oam_mode_field(l: int, cfg: OpticsConfig) -> FieldGrid:
    """Unit-power Laguerre-Gauss p=0 mode with winding number l."""
    if abs(l) > _MAX_WINDING:
        raise ValueError(f"|l| <= {_MAX_WINDING} supported, got l={l}")
    return _normalized(_lg_profile(l, cfg), cfg)


def gaussian_field(waist: float, cfg: OpticsConfig) -> FieldGrid:
    """Unit-power fundamental Gaussian of the given waist."""
    if waist <= 0:
        raise ValueError("waist must be positive")
    xx, yy = cfg.meshgrid()
    return _normalized(np.exp(-(xx * xx + yy * yy) / waist**2).astype(complex), cfg)


def superposition_field(state, cfg: OpticsConfig) -> FieldGrid:
    """Unit-power field of a qutrit state over the (l=+1, 0, -1) mode triple."""
    psi = state_vector(state)
    if psi.size != 3:
        raise ValueError("superposition fields are defined for 3-component states")
    total = np.zeros((cfg.grid_size, cfg.grid_size), dtype=complex)
    for c, l in zip(psi, MODE_WINDINGS):
        if c != 0:
            total += c * oam_mode_field(l, cfg).samples
    return _normalized(total, cfg)


def phase_mask_of(field: FieldGrid) -> np.ndarray:
    """Entrywise argument in (-pi, pi]; the argument of 0 is taken as 0."""
    mask = np.angle(field.samples)
    mask[mask == -np.pi] = np.pi
    return mask


def apply_phase_mask(field: FieldGrid, mask: np.ndarray, conjugate: bool = False) -> FieldGrid:
    """Multiply by e^{+i mask} (or e^{-i mask} with conjugate=True)."""
    _check_geometry(field, mask)
    sign = -1.0 if conjugate else 1.0
    return FieldGrid(field.samples * np.exp(1j * sign * mask), field.extent)


def lens_fourier(field: FieldGrid) -> FieldGrid:
    """Centered unitary 2-D DFT: one ideal lens focal-plane transform."""
    s = field.samples
    out = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(s))) / s.shape[0]
    return FieldGrid(out, field.extent)


def farfield(field: FieldGrid) -> FieldGrid:
    """Fraunhofer propagation: a single focal-plane transform.

    The residual quadratic phase of far-field diffraction is dropped; it
    cancels against the centered collection Gaussian in coupling magnitudes.
    """
    return lens_fourier(field)


def four_f_image(field: FieldGrid) -> FieldGrid:
    """Two successive lens transforms: the parity-inverted input field."""
    return lens_fourier(lens_fourier(field))


def parity_flip(field: FieldGrid) -> FieldGrid:
    """Coordinate inversion (x, y) -> (-x, -y) on the centered grid.

    Exactly the index permutation realized by a squared DFT; the row/column
    at the grid edge (whose mirror falls off the grid) maps to itself.
    """
    flipped = np.roll(np.flip(field.samples, axis=(0, 1)), 1, axis=(0, 1))
    return FieldGrid(flipped, field.extent)


def fiber_overlap(field: FieldGrid, cfg: OpticsConfig) -> complex:
    """Coupling amplitude into the collection Gaussian of waist fiber_waist."""
    if field.grid_size != cfg.grid_size or field.extent != cfg.extent:
        raise ValueError("grid geometries do not match")
    g = gaussian_field(cfg.fiber_waist, cfg)
    return complex((field.samples * g.samples.conj()).sum() * cfg.cell_area)


def winding_number(field: FieldGrid, radius: float) -> int:
    """Net phase winding around a centered circle of the given radius."""
    if radius <= 0 or radius >= field.extent:
        raise ValueError("radius must lie inside the grid")
    n = field.grid_size
    step = 2.0 * field.extent / n
    theta = np.linspace(0.0, 2.0 * np.pi, 720, endpoint=False)
    ix = np.clip(np.rint(radius * np.cos(theta) / step).astype(int) + n // 2, 0, n - 1)
    iy = np.clip(np.rint(radius * np.sin(theta) / step).astype(int) + n // 2, 0, n - 1)
    phases = np.angle(field.samples[iy, ix])
    diffs = np.diff(np.concatenate([phases, phases[:1]]))
    wrapped = (diffs + np.pi) % (2.0 * np.pi) - np.pi
    return int(round(wrapped.sum() / (2.0 * np.pi)))


def _parity_state(state: np.ndarray) -> np.ndarray:
    """Amplitudes of the parity-flipped field: each mode picks up (-1)^l."""
    signs = np.array([(-1.0) ** l for l in MODE_WINDINGS])
    return state * signs


def _conversion_field(meas_state: np.ndarray, cfg: OpticsConfig) -> np.ndarray:
    """Complex mask converting the image-plane measurement mode into the
    far-field fiber's back-propagated Gaussian.

    Built analytically as conj(flipped mode field) / Gaussian so the
    exponential factors combine before evaluation; requires the
    back-propagated fiber waist to be at least the mode waist, otherwise
    the mask amplitude would diverge faster than the fields decay.
    """
    w = cfg.waist
    w_conj = cfg.conjugate_waist(cfg.fiber_waist)
    if w_conj < w * (1.0 - 1e-12):
        raise ValueError(
            "ideal mode conversion needs a back-propagated fiber waist >= mode waist; "
            f"got {w_conj!r} < {w!r}"
        )
    xx, yy = cfg.meshgrid()
    rr = xx * xx + yy * yy
    mask = np.zeros_like(xx, dtype=complex)
    for c, l in zip(_parity_state(meas_state), MODE_WINDINGS):
        if c == 0:
            continue
        amp = np.sqrt(2.0 / (np.pi * w * w * factorial(abs(l))))
        poly = ((np.sqrt(2.0) / w) * (xx - 1j * np.sign(l) * yy)) ** abs(l) if l else 1.0
        mask += np.conj(c) * amp * poly
    gauss_peak = np.sqrt(2.0 / np.pi) / w_conj
    mask *= np.exp(rr * (1.0 / w_conj**2 - 1.0 / w**2)) / gauss_peak
    return mask


def optical_projection_probability(
    input_state, meas_state, cfg: OpticsConfig, modulation: str = "ideal"
) -> float:
    """Probability of the full physical projection chain.

    Pipeline: prepare the input field (exact superposition for "ideal", a
    phase-only hologram on a Gaussian carrier for "phase_only"), image it
    through the 4-f system, apply the measurement conversion for the
    parity-flipped target mode (full complex mask for "ideal", conjugate
    phase mask for "phase_only"), propagate to the far field and couple into
    the collection Gaussian.

    With ideal modulation this reproduces |<meas|input>|^2 up to grid
    discretization error.
    """
    if modulation not in ("ideal", "phase_only"):
        raise ValueError(f"modulation must be 'ideal' or 'phase_only', got {modulation!r}")
    psi_in = state_vector(input_state)
    psi_meas = state_vector(meas_state)
    if psi_in.size != 3 or psi_meas.size != 3:
        raise ValueError("projection chain is defined for 3-component states")

    if modulation == "ideal":
        field = superposition_field(psi_in, cfg)
    else:
        carrier = gaussian_field(cfg.waist, cfg)
        field = apply_phase_mask(carrier, phase_mask_of(superposition_field(psi_in, cfg)))

    field = four_f_image(field)

    if modulation == "ideal":
        field = FieldGrid(field.samples * _conversion_field(psi_meas, cfg), cfg.extent)
    else:
        flipped = superposition_field(_parity_state(psi_meas), cfg)
        field = apply_phase_mask(field, phase_mask_of(flipped), conjugate=True)

    return abs(fiber_overlap(farfield(field), cfg)) ** 2
