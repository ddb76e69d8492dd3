"""Discrete space-time norms: weighted spectra, dyadic modulation norms,
short-time restriction norms, and Strichartz/embedding probes.

Everything here works on windowed surrogates: a trajectory is multiplied by a
smooth compactly supported taper, transformed per mode in time, and the norms
are evaluated on the resulting (mode, modulation-frequency) table.  No
infimum over extensions is attempted, so trajectory-based values are
upper-bound surrogates of the continuum norms.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .dynamics import Trajectory
from .spectral import (
    CUTOFFS,
    TorusGrid,
    block_bounds,
    bracket,
    physical_values,
    smooth_step,
)

__all__ = [
    "ResolutionError",
    "TimeWindow",
    "EtaWindow",
    "NormSpec",
    "SpaceTimeSpectrum",
    "spacetime_transform",
    "xsb_norm",
    "xk_norm",
    "xk1_ratio",
    "ShortTimeNorms",
    "short_time_norms",
    "energy_norm",
    "strichartz_probe",
    "StrichartzStats",
    "embedding_probe",
    "saturation_search",
    "XK1_CONSTANT",
]

# Sharp constant in the discrete l1-in-tau embedding: each modulation bin has
# support measure at most (16/5) * 2^j, and Cauchy-Schwarz does the rest.
XK1_CONSTANT = math.sqrt(16.0 / 5.0)


class ResolutionError(ValueError):
    """Raised when the time grid cannot resolve the requested modulations."""


@dataclass(frozen=True)
class TimeWindow:
    """Smooth taper supported on [t_start, t_end], equal to 1 on the middle
    `plateau` fraction, with C-infinity edges."""

    t_start: float
    t_end: float
    plateau: float = 0.5

    def __post_init__(self) -> None:
        if not (self.t_end > self.t_start):
            raise ValueError("window must have positive length")
        if not (0.0 < self.plateau < 1.0):
            raise ValueError("plateau fraction must be in (0, 1)")

    @property
    def rise(self) -> float:
        return 0.5 * (self.t_end - self.t_start) * (1.0 - self.plateau)

    @property
    def bandwidth(self) -> float:
        """Characteristic spectral scale, reciprocal of the edge rise time."""
        return 1.0 / self.rise

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        up = smooth_step((t - self.t_start) / self.rise)
        down = smooth_step((self.t_end - t) / self.rise)
        return up * down


@dataclass(frozen=True)
class EtaWindow:
    """The standard smooth bump rescaled in time: t -> eta0(scale * (t - center)).

    Support is |t - center| <= 1.6 / scale with plateau |t - center| <= 1.25 / scale.
    """

    center: float
    scale: float

    @property
    def rise(self) -> float:
        return (CUTOFFS.support - CUTOFFS.plateau) / self.scale

    @property
    def bandwidth(self) -> float:
        return 1.0 / self.rise

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return CUTOFFS.eta0(self.scale * (t - self.center))


@dataclass(frozen=True)
class NormSpec:
    """Parameters of the short-time norm family."""

    s: float
    alpha: float
    T: float
    b: float = 0.5

    def __post_init__(self) -> None:
        if self.T <= 0:
            raise ValueError("T must be positive")
        if self.alpha > 1.0:
            warnings.warn(
                "window exponent alpha > 1 is outside the intended regime", stacklevel=2
            )


@dataclass(frozen=True)
class SpaceTimeSpectrum:
    """Doubly transformed data indexed by (mode n, modulation frequency tau).

    data[i, k] is the windowed temporal Fourier transform of mode modes[i]
    evaluated at taus[k]; taus is uniform and ascending.
    """

    modes: np.ndarray
    taus: np.ndarray
    data: np.ndarray
    window: object | None = None

    def __post_init__(self) -> None:
        modes = np.asarray(self.modes, dtype=np.int64)
        taus = np.asarray(self.taus, dtype=float)
        data = np.asarray(self.data, dtype=np.complex128)
        if data.shape != (modes.size, taus.size):
            raise ValueError("data must have shape (n_modes, n_taus)")
        if taus.size < 2:
            raise ValueError("need at least two modulation samples")
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "taus", taus)
        object.__setattr__(self, "data", data)

    @property
    def tau_spacing(self) -> float:
        return float(self.taus[1] - self.taus[0])

    @property
    def j_max(self) -> int:
        """Smallest j with eta0(2^-j sigma) = 1 across the whole grid, so the
        modulation bins 0..j_max partition unity on every sample."""
        sigma_max = float(np.max(np.abs(self.sigma_matrix()))) if self.modes.size else 1.0
        return max(2, math.ceil(math.log2(max(sigma_max / CUTOFFS.plateau, 1.0))))

    def sigma_matrix(self) -> np.ndarray:
        """Modulation sigma = tau - n^2 per (mode, tau) sample."""
        return self.taus[None, :] - (self.modes.astype(float) ** 2)[:, None]

    def energy(self) -> float:
        """Squared l2-in-n, L2-in-tau mass (matches the windowed signal's
        space-time L2 mass by Plancherel)."""
        return float(np.sum(np.abs(self.data) ** 2) * self.tau_spacing)

    def restrict_block(self, k: int) -> "SpaceTimeSpectrum":
        lo, hi = block_bounds(k)
        mask = (np.abs(self.modes) >= lo) & (np.abs(self.modes) <= hi)
        return SpaceTimeSpectrum(self.modes[mask], self.taus, self.data[mask], self.window)

    def reweighted(self, weights: np.ndarray) -> "SpaceTimeSpectrum":
        return SpaceTimeSpectrum(self.modes, self.taus, self.data * weights, self.window)


def _guard_bin(n_abs_max: int, window) -> int:
    bw = 2.0 * math.pi / getattr(window, "rise", 1.0)
    return max(3, math.ceil(math.log2(4.0 * (n_abs_max**2 + bw))))


def _transform_core(
    times: np.ndarray,
    coeffs: np.ndarray,
    modes: np.ndarray,
    window,
    pad_factor: int,
) -> SpaceTimeSpectrum:
    dt = float(times[1] - times[0])
    n_abs_max = int(np.max(np.abs(modes))) if modes.size else 0
    tau_max = math.pi / dt
    j_req = _guard_bin(n_abs_max, window)
    if tau_max < n_abs_max**2 + 2.0**j_req:
        needed = math.pi / (n_abs_max**2 + 2.0**j_req)
        raise ResolutionError(
            f"time step {dt:.3g} cannot resolve modulations up to "
            f"{n_abs_max**2 + 2.0 ** j_req:.3g}; need dt <= {needed:.3g}"
        )
    n_pad = 1 << max(1, int(pad_factor * times.size - 1)).bit_length()
    w = np.asarray(window(times), dtype=float)
    weighted = coeffs * w[:, None]
    spectrum = np.fft.fft(weighted, n=n_pad, axis=0) * dt
    taus = 2.0 * math.pi * np.fft.fftfreq(n_pad, d=dt)
    spectrum *= np.exp(-1j * taus * times[0])[:, None]
    order = np.argsort(taus)
    return SpaceTimeSpectrum(modes, taus[order], spectrum[order].T, window)


def spacetime_transform(
    traj: Trajectory,
    window,
    pad_factor: int = 4,
    allow_overhang: bool = False,
) -> SpaceTimeSpectrum:
    """Windowed per-mode temporal Fourier transform of a trajectory.

    The window must be supported inside the trajectory's interval (data
    outside the stored samples is treated as zero, which is only a valid
    extension when the window already vanishes there).
    """
    t0, t1 = float(traj.times[0]), float(traj.times[-1])
    if not allow_overhang:
        ws, we = getattr(window, "t_start", None), getattr(window, "t_end", None)
        margin = 1e-9 * max(1.0, abs(t1 - t0))
        if ws is not None and (ws < t0 - margin or we > t1 + margin):
            raise ValueError("window support must lie inside the trajectory interval")
    return _transform_core(traj.times, traj.coeffs, traj.grid.modes, window, pad_factor)


def xsb_norm(sp: SpaceTimeSpectrum, s: float, b: float) -> float:
    """Weighted space-time norm ( sum <n>^2s <tau - n^2>^2b |data|^2 dtau )^(1/2).

    At s = b = 0 this is the space-time L2 norm of the windowed signal.
    """
    wn = bracket(sp.modes) ** (2.0 * s)
    wsig = bracket(sp.sigma_matrix()) ** (2.0 * b)
    total = np.sum(wn[:, None] * wsig * np.abs(sp.data) ** 2) * sp.tau_spacing
    return float(np.sqrt(total))


def xk_norm(sp: SpaceTimeSpectrum, k: int, b: float = 0.5, return_detail: bool = False):
    """Dyadic modulation norm: sum_j 2^(jb) || eta_j(tau - n^2) f ||_(l2 L2).

    Modes are restricted to the dyadic block I_k.  The lowest bin uses the
    full bump eta0 so the bins partition unity; j runs to the coverage limit
    of the tau grid and the unpartitioned remainder is reported in the
    detail dictionary (it vanishes when the grid is fully covered).
    """
    block = sp.restrict_block(k)
    if block.modes.size == 0 or not np.any(block.data):
        return (0.0, {"terms": {}, "tail": 0.0}) if return_detail else 0.0
    sigma = block.sigma_matrix()
    sq = np.abs(block.data) ** 2 * block.tau_spacing
    j_max = block.j_max
    terms: dict[int, float] = {}
    total = 0.0
    partition = np.zeros_like(sigma)
    for j in range(0, j_max + 1):
        eta = CUTOFFS.eta0(sigma) if j == 0 else CUTOFFS.eta_j(j, sigma)
        partition += eta
        term = float(np.sqrt(np.sum(eta**2 * sq)))
        terms[j] = 2.0 ** (j * b) * term
        total += terms[j]
    tail = float(np.sqrt(np.sum((1.0 - np.clip(partition, 0.0, 1.0)) ** 2 * sq)))
    if return_detail:
        return total, {"terms": terms, "tail": tail}
    return total


def xk1_ratio(sp: SpaceTimeSpectrum, k: int) -> float:
    """Ratio || integral |f| dtau ||_(l2_n) / ||f||_(X_k); bounded by XK1_CONSTANT."""
    block = sp.restrict_block(k)
    if block.modes.size == 0 or not np.any(block.data):
        return 0.0
    num = float(np.sqrt(np.sum(np.sum(np.abs(block.data), axis=1) ** 2))) * block.tau_spacing
    den = xk_norm(sp, k)
    return num / den if den > 0 else 0.0


@dataclass(frozen=True)
class ShortTimeNorms:
    """Per-block and aggregated short-time restriction norms."""

    s: float
    alpha: float
    fk: dict
    nk: dict
    f_aggregate: float
    n_aggregate: float
    energy: float

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "alpha": self.alpha,
            "fk": {str(k): v for k, v in self.fk.items()},
            "nk": {str(k): v for k, v in self.nk.items()},
            "f_aggregate": self.f_aggregate,
            "n_aggregate": self.n_aggregate,
            "energy": self.energy,
        }


def energy_norm(traj: Trajectory, s: float) -> float:
    """Block-wise sup-in-time energy:
    ( ||P_0 u(0)||^2 + sum_k 2^(2sk) sup_t ||P_k u(t)||^2 )^(1/2),
    with the sup over stored instants and the mean-square spatial norm."""
    grid = traj.grid
    absn = np.abs(grid.modes)
    total = 0.0
    for k in range(grid.max_block + 1):
        lo, hi = block_bounds(k)
        mask = (absn >= lo) & (absn <= hi)
        if not np.any(mask):
            continue
        masses = np.sum(np.abs(traj.coeffs[:, mask]) ** 2, axis=1)
        if k == 0:
            total += float(masses[0])
        else:
            total += 2.0 ** (2.0 * s * k) * float(np.max(masses))
    return math.sqrt(total)


def short_time_norms(traj: Trajectory, nspec: NormSpec, pad_factor: int = 4) -> ShortTimeNorms:
    """Short-time restriction norms of a trajectory.

    For each dyadic block k the trajectory is windowed on the time scale
    2^(-[alpha k]) at centers spaced a quarter of that scale apart, the
    dyadic modulation norm is evaluated per window (with the resolvent
    weight for the N-flavor), and the sup over centers is taken.  Aggregates
    are the 2^(sk)-weighted l2 sums over blocks.
    """
    grid = traj.grid
    times = traj.times
    t0, t1 = float(times[0]), float(times[-1])
    dt = traj.dt
    absn = np.abs(grid.modes)
    fk: dict[int, float] = {}
    nk: dict[int, float] = {}

    for k in range(grid.max_block + 1):
        lo, hi = block_bounds(k)
        mask = (absn >= lo) & (absn <= hi)
        block_modes = grid.modes[mask]
        block_coeffs = traj.coeffs[:, mask]
        if block_modes.size == 0 or not np.any(block_coeffs):
            fk[k] = 0.0
            nk[k] = 0.0
            continue
        jk = int(math.floor(nspec.alpha * k))
        scale = 2.0**jk
        width = 2.0 * CUTOFFS.support / scale
        if width < 8.0 * dt:
            raise ResolutionError(
                f"block k={k}: window width {width:.3g} underflows the time grid; "
                f"need dt <= {width / 8.0:.3g}"
            )
        spacing = 2.0 ** (-(jk + 2))
        centers = np.arange(t0, t1 + 0.5 * spacing, spacing)
        best_f = 0.0
        best_n = 0.0
        for center in centers:
            window = EtaWindow(float(center), scale)
            sp = _transform_core(times, block_coeffs, block_modes, window, pad_factor)
            best_f = max(best_f, xk_norm(sp, k, b=nspec.b))
            weight = 1.0 / (sp.sigma_matrix() + 1j * scale)
            best_n = max(best_n, xk_norm(sp.reweighted(weight), k, b=nspec.b))
        fk[k] = best_f
        nk[k] = best_n

    f_aggregate = math.sqrt(sum(2.0 ** (2.0 * nspec.s * k) * v**2 for k, v in fk.items()))
    n_aggregate = math.sqrt(sum(2.0 ** (2.0 * nspec.s * k) * v**2 for k, v in nk.items()))
    return ShortTimeNorms(
        s=nspec.s,
        alpha=nspec.alpha,
        fk=fk,
        nk=nk,
        f_aggregate=f_aggregate,
        n_aggregate=n_aggregate,
        energy=energy_norm(traj, nspec.s),
    )


def _integral_abs_power(traj: Trajectory, power: int, time_weights: np.ndarray) -> float:
    """integral over x and t of w(t)^power |u|^power, exact in x for the band."""
    grid = traj.grid
    n_points = grid.n_phys if power <= 4 else 4 * grid.n_modes
    values = np.empty(traj.n_times)
    for m in range(traj.n_times):
        u = physical_values(traj.state(m), n_points)
        values[m] = (2.0 * math.pi / n_points) * float(np.sum(np.abs(u) ** power))
    return float(simpson(values * time_weights**power, x=traj.times))


@dataclass(frozen=True)
class StrichartzStats:
    p: int
    rows: list
    max_ratio: float
    mean_ratio: float
    quantile_50: float
    quantile_90: float

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "rows": self.rows,
            "max_ratio": self.max_ratio,
            "mean_ratio": self.mean_ratio,
            "quantile_50": self.quantile_50,
            "quantile_90": self.quantile_90,
        }


def strichartz_probe(samples, p: int, window: TimeWindow | None = None) -> StrichartzStats:
    """Ratio statistics for the two periodic Strichartz inequalities.

    p = 4: || w u ||_L4(x,t) over the modulation norm of the same windowed
    signal at weight (s, b) = (0, 3/8).  p = 6: the space-time L6 norm of a
    (free) sample over the plain L2 norm of its initial data, with the length
    of the spectral support interval reported per sample.
    """
    if p not in (4, 6):
        raise ValueError("p must be 4 or 6")
    rows = []
    ratios = []
    for traj in samples:
        if not np.any(traj.coeffs):
            continue
        if p == 4:
            win = window or TimeWindow(traj.times[0], traj.times[-1], plateau=0.5)
            weights = np.asarray(win(traj.times), dtype=float)
            num = _integral_abs_power(traj, 4, weights) ** 0.25
            sp = spacetime_transform(traj, win)
            den = xsb_norm(sp, 0.0, 0.375)
            if den == 0.0:
                continue
            row = {"ratio": num / den}
        else:
            ones = np.ones_like(traj.times)
            num = _integral_abs_power(traj, 6, ones) ** (1.0 / 6.0)
            phi = traj.initial_state
            den = math.sqrt(2.0 * math.pi * float(np.sum(np.abs(phi.coeffs) ** 2)))
            if den == 0.0:
                continue
            support = np.flatnonzero(np.abs(phi.coeffs) > 0)
            band_length = int(
                traj.grid.modes[support[-1]] - traj.grid.modes[support[0]] + 1
            )
            row = {"ratio": num / den, "band_length": band_length}
        rows.append(row)
        ratios.append(row["ratio"])
    if not ratios:
        raise ValueError("no usable (nonzero) samples")
    arr = np.array(ratios)
    return StrichartzStats(
        p=p,
        rows=rows,
        max_ratio=float(arr.max()),
        mean_ratio=float(arr.mean()),
        quantile_50=float(np.quantile(arr, 0.5)),
        quantile_90=float(np.quantile(arr, 0.9)),
    )


def embedding_probe(corpus, nspec: NormSpec, window: TimeWindow | None = None) -> dict:
    """Two embedding ratios per corpus sample.

    (a) the l1-in-tau ratio per dyadic block, asserted to stay below the
    sharp constant sqrt(16/5) (plus 1e-6 float slack); (b) the ratio of
    sup-in-time H^s norm to the aggregated short-time norm.
    """
    rows = []
    for traj in corpus:
        if not np.any(traj.coeffs):
            continue
        win = window or TimeWindow(traj.times[0], traj.times[-1], plateau=0.5)
        sp = spacetime_transform(traj, win)
        block_ratios = {}
        for k in range(traj.grid.max_block + 1):
            r = xk1_ratio(sp, k)
            if r > 0:
                block_ratios[k] = r
        max_block_ratio = max(block_ratios.values()) if block_ratios else 0.0
        if max_block_ratio > XK1_CONSTANT + 1e-6:
            raise AssertionError(
                f"l1-in-tau ratio {max_block_ratio} exceeds the sharp constant {XK1_CONSTANT}"
            )
        stn = short_time_norms(traj, nspec)
        sup_hs = max(
            math.sqrt(
                float(np.sum(bracket(traj.grid.modes) ** (2 * nspec.s) * np.abs(traj.coeffs[m]) ** 2))
            )
            for m in range(traj.n_times)
        )
        rows.append(
            {
                "xk1_ratio_max": max_block_ratio,
                "xk1_ratios": block_ratios,
                "sup_hs_over_f": sup_hs / stn.f_aggregate if stn.f_aggregate > 0 else 0.0,
            }
        )
    return {
        "rows": rows,
        "xk1_ratio_max": max((r["xk1_ratio_max"] for r in rows), default=0.0),
        "xk1_constant": XK1_CONSTANT,
    }


def saturation_search(
    widths: np.ndarray | None = None, tau_spacing: float = 1.0 / 512.0
) -> tuple[float, float]:
    """Near-maximizer of the l1-in-tau ratio within the lowest modulation bin.

    Scans flat profiles supported on |tau| <= a for a just past the bump
    plateau; returns (best width, best ratio).  The best ratio lands within a
    few percent of the sharp constant sqrt(16/5).
    """
    if widths is None:
        widths = np.linspace(CUTOFFS.plateau, CUTOFFS.support, 141)
    taus = np.arange(-4.0, 4.0 + tau_spacing / 2, tau_spacing)
    best = (0.0, 0.0)
    for a in widths:
        profile = (np.abs(taus) <= a).astype(complex)
        sp = SpaceTimeSpectrum(np.array([0]), taus, profile[None, :])
        ratio = xk1_ratio(sp, 0)
        if ratio > best[1]:
            best = (float(a), ratio)
    return best
