"""Fourier representation of fields on the circle and the free propagator.

Fields carry complex Fourier coefficients over a symmetric integer mode band.
The physical sampling grid is oversampled enough that cubic products of
band-limited fields are exact after truncation back to the band, so algebraic
identities between spectral and physical-space computations hold to roundoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TorusGrid",
    "SpectralField",
    "CutoffFamily",
    "CUTOFFS",
    "to_spectral",
    "to_physical",
    "physical_values",
    "project_dyadic",
    "free_evolve",
    "sobolev_norm",
    "bracket",
    "dyadic_block",
    "block_bounds",
    "smooth_step",
]


def smooth_step(x):
    """C-infinity ramp: 0 for x <= 0, 1 for x >= 1, strictly monotone between.

    Built from exp(-1/x) mollifiers, so it is infinitely flat at both ends.
    """
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        rising = np.where(x > 0.0, np.exp(-1.0 / np.where(x > 0.0, x, 1.0)), 0.0)
        falling = np.where(x < 1.0, np.exp(-1.0 / np.where(x < 1.0, 1.0 - x, 1.0)), 0.0)
    return rising / (rising + falling)


def bracket(n):
    """Japanese bracket <n> = sqrt(1 + n^2), smooth at 0."""
    n = np.asarray(n, dtype=float)
    return np.sqrt(1.0 + n * n)


def dyadic_block(n: int) -> int:
    """Dyadic block index k with |n| in I_k (I_0 = {0}, I_k = [2^(k-1), 2^k))."""
    a = abs(int(n))
    if a < 1:
        return 0
    return a.bit_length()


def block_bounds(k: int) -> tuple[int, int]:
    """Inclusive integer magnitude range of the dyadic block I_k."""
    if k < 0:
        raise ValueError("dyadic block index must be >= 0")
    if k == 0:
        return (0, 0)
    return (2 ** (k - 1), 2**k - 1)


@dataclass(frozen=True)
class TorusGrid:
    """Mode band and physical sampling for 2*pi-periodic fields.

    Parameters
    ----------
    n_modes : even int
        Size of the symmetric band n in [-n_modes/2, n_modes/2).  The
        n = -n_modes/2 slot is kept identically zero so the band is symmetric
        about 0; the effective band is |n| <= n_modes/2 - 1.
    n_phys : int, optional
        Number of physical sample points x_j = 2*pi*j/n_phys.  Defaults to
        2*n_modes, which makes cubic products of band-limited fields exact
        after truncation back to the band.  Values down to ceil(3*n_modes/2)
        are accepted (that floor only dealiases quadratic products exactly).
    """

    n_modes: int
    n_phys: int = 0

    def __post_init__(self) -> None:
        if self.n_modes < 2 or self.n_modes % 2 != 0:
            raise ValueError("n_modes must be a positive even integer")
        if self.n_phys == 0:
            object.__setattr__(self, "n_phys", 2 * self.n_modes)
        if self.n_phys < math.ceil(1.5 * self.n_modes):
            raise ValueError("n_phys must be at least ceil(3*n_modes/2)")

        modes = np.arange(-self.n_modes // 2, self.n_modes // 2)
        modes.setflags(write=False)
        x = 2.0 * np.pi * np.arange(self.n_phys) / self.n_phys
        x.setflags(write=False)
        pos = np.mod(modes, self.n_phys)
        pos.setflags(write=False)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "_band_pos", pos)

    @property
    def max_mode(self) -> int:
        """Largest retained |n|."""
        return self.n_modes // 2 - 1

    @property
    def max_block(self) -> int:
        """Largest dyadic block index with content in the band."""
        return dyadic_block(self.max_mode)

    def mode_index(self, n: int) -> int:
        """Position of mode n in the coefficient array."""
        if not (-self.n_modes // 2 <= n < self.n_modes // 2):
            raise ValueError(f"mode {n} outside band [{-self.n_modes // 2}, {self.n_modes // 2})")
        return n + self.n_modes // 2


@dataclass(frozen=True)
class SpectralField:
    """Complex Fourier coefficients of a field over a grid's mode band.

    Coefficients are stored in mode order -n_modes/2 .. n_modes/2 - 1 and are
    immutable after construction; the -n_modes/2 slot is forced to zero.
    """

    grid: TorusGrid
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = np.array(self.coeffs, dtype=np.complex128, copy=True)
        if c.shape != (self.grid.n_modes,):
            raise ValueError(f"expected {self.grid.n_modes} coefficients, got shape {c.shape}")
        c[0] = 0.0
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, grid: TorusGrid) -> "SpectralField":
        return cls(grid, np.zeros(grid.n_modes, dtype=np.complex128))

    @classmethod
    def from_modes(cls, grid: TorusGrid, amplitudes: dict[int, complex]) -> "SpectralField":
        c = np.zeros(grid.n_modes, dtype=np.complex128)
        for n, a in amplitudes.items():
            c[grid.mode_index(n)] = a
        return cls(grid, c)

    def with_coeffs(self, coeffs: np.ndarray) -> "SpectralField":
        return SpectralField(self.grid, coeffs)

    def coeff(self, n: int) -> complex:
        return complex(self.coeffs[self.grid.mode_index(n)])


def to_spectral(samples: np.ndarray, grid: TorusGrid) -> SpectralField:
    """Forward transform of physical samples, truncated to the mode band.

    Normalized so that u(x) = sum_n coeffs[n] e^{inx}; Parseval then reads
    (1/2pi) integral |u|^2 dx = sum |coeffs|^2.
    """
    samples = np.asarray(samples, dtype=np.complex128)
    if samples.shape != (grid.n_phys,):
        raise ValueError(f"expected {grid.n_phys} physical samples, got shape {samples.shape}")
    spectrum = np.fft.fft(samples) / grid.n_phys
    return SpectralField(grid, spectrum[grid._band_pos])


def physical_values(field: SpectralField, n_points: int) -> np.ndarray:
    """Evaluate a band-limited field on a uniform grid of n_points samples."""
    grid = field.grid
    if n_points < grid.n_modes:
        raise ValueError("n_points must be at least n_modes to resolve the band")
    buf = np.zeros(n_points, dtype=np.complex128)
    buf[np.mod(grid.modes, n_points)] = field.coeffs
    return np.fft.ifft(buf) * n_points


def to_physical(field: SpectralField) -> np.ndarray:
    """Inverse transform onto the grid's physical sampling points."""
    return physical_values(field, field.grid.n_phys)


def project_dyadic(field: SpectralField, k: int, mode: str = "exact_Pk") -> SpectralField:
    """Sharp dyadic frequency projection.

    mode "exact_Pk" keeps the block I_k, "leq" keeps the union of blocks
    0..k (|n| < 2^k), "geq" keeps blocks k and above.
    """
    if k < 0:
        raise ValueError("dyadic index k must be >= 0")
    absn = np.abs(field.grid.modes)
    if mode == "exact_Pk":
        lo, hi = block_bounds(k)
        mask = (absn >= lo) & (absn <= hi)
    elif mode == "leq":
        mask = absn < 2**k
    elif mode == "geq":
        mask = absn >= 2 ** (k - 1) if k >= 1 else np.ones_like(absn, dtype=bool)
    else:
        raise ValueError(f"unknown projection mode {mode!r}")
    return field.with_coeffs(np.where(mask, field.coeffs, 0.0))


def free_evolve(field: SpectralField, t: float, dispersion_exponent: int = 2) -> SpectralField:
    """Apply the free propagator: coefficient n picks up the phase e^{i n^p t}.

    p = 2 is the Schroedinger dispersion, p = 4 the fourth-order analogue.
    An isometry on every Sobolev norm.
    """
    if dispersion_exponent not in (2, 4):
        raise ValueError("dispersion_exponent must be 2 or 4")
    n = field.grid.modes.astype(float)
    phase = np.exp(1j * (n**dispersion_exponent) * t)
    return field.with_coeffs(field.coeffs * phase)


def sobolev_norm(field: SpectralField, s: float) -> float:
    """H^s norm (sum <n>^{2s} |coeff|^2)^{1/2} with the Japanese bracket."""
    w = bracket(field.grid.modes) ** (2.0 * s)
    with np.errstate(over="ignore"):
        return float(np.sqrt(np.sum(w * np.abs(field.coeffs) ** 2)))


@dataclass(frozen=True)
class CutoffFamily:
    """Smooth Littlewood-Paley cutoffs on the real line.

    eta0 is an even smooth bump equal to 1 on [-plateau, plateau] and
    supported on [-support, support]; eta(x) = eta0(x) - eta0(2x) and
    eta_j(x) = eta(2^{-j} x), so supp eta_j is {5/8 * 2^j <= |x| <= 8/5 * 2^j}.
    """

    plateau: float = 1.25
    support: float = 1.6

    def eta0(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        return smooth_step((self.support - np.abs(xi)) / (self.support - self.plateau))

    def eta(self, xi) -> np.ndarray:
        return self.eta0(xi) - self.eta0(2.0 * np.asarray(xi, dtype=float))

    def eta_j(self, j: int, xi) -> np.ndarray:
        return self.eta(np.asarray(xi, dtype=float) * 2.0 ** (-j))

    def eta_leq(self, ell: int, xi) -> np.ndarray:
        """Low-modulation cutoff eta0(2^{-ell} x).

        The literal telescoped sum of eta_j over j <= ell vanishes at x = 0;
        this version equals 1 there so that the bins eta_leq(0, .), eta_1,
        eta_2, ... partition unity.
        """
        return self.eta0(np.asarray(xi, dtype=float) * 2.0 ** (-ell))


CUTOFFS = CutoffFamily()
