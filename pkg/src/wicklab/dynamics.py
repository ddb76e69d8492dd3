"""Equation family on the circle and pseudospectral time integration.

The five models share the form

    i u_t - u_xx (or + u_xxxx) +/- (|u|^2 - gamma * avg|u|^2) u = 0,

with gamma = 0 for the plain cubic equations, gamma = 2 for the Wick-ordered
ones, and free gamma for the renormalized family.  Integration is done in the
interaction representation: the linear phase is carried exactly by the free
propagator and a classical 4th-order Runge-Kutta step handles the remaining
nonlinear rotation, which avoids stiffness from the n^2 (and n^4) phases.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .spectral import SpectralField, TorusGrid, free_evolve

__all__ = [
    "Model",
    "EquationSpec",
    "Trajectory",
    "BlowUpError",
    "nonlinearity",
    "full_nonlinearity",
    "rhs",
    "solve",
    "mass",
    "interaction_frame",
    "free_trajectory",
]

# Relative mass drift beyond which the integrator aborts.
MASS_DRIFT_ABORT = 1e-2


class Model(str, enum.Enum):
    CUBIC = "cubic"
    WICK = "wick"
    GAMMA = "gamma"
    FOURTH_ORDER = "fourth_order"
    WICK_FOURTH_ORDER = "wick_fourth_order"


_GAMMA_BY_MODEL = {
    Model.CUBIC: 0.0,
    Model.WICK: 2.0,
    Model.FOURTH_ORDER: 0.0,
    Model.WICK_FOURTH_ORDER: 2.0,
}


@dataclass(frozen=True)
class EquationSpec:
    """Which model to integrate, the nonlinearity sign, and its gamma."""

    model: Model = Model.WICK
    sign: str = "defocusing"
    gamma_value: float | None = None

    def __post_init__(self) -> None:
        model = Model(self.model)
        object.__setattr__(self, "model", model)
        if self.sign not in ("defocusing", "focusing"):
            raise ValueError("sign must be 'defocusing' or 'focusing'")
        if model is Model.GAMMA:
            if self.gamma_value is None:
                raise ValueError("gamma_value is required for the gamma-family model")
        elif self.gamma_value is not None and self.gamma_value != _GAMMA_BY_MODEL[model]:
            raise ValueError(f"model {model.value} fixes gamma = {_GAMMA_BY_MODEL[model]}")

    @property
    def gamma(self) -> float:
        if self.model is Model.GAMMA:
            return float(self.gamma_value)
        return _GAMMA_BY_MODEL[self.model]

    @property
    def dispersion_exponent(self) -> int:
        if self.model in (Model.FOURTH_ORDER, Model.WICK_FOURTH_ORDER):
            return 4
        return 2

    @property
    def sign_value(self) -> float:
        return 1.0 if self.sign == "defocusing" else -1.0


class BlowUpError(RuntimeError):
    """Raised when the integrator detects non-finite data or mass runaway."""

    def __init__(self, step_index: int, time: float, message: str):
        super().__init__(f"blow-up at step {step_index} (t = {time:.6g}): {message}")
        self.step_index = step_index
        self.time = time


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered spectral states with uniform step, all on one grid.

    coeffs has shape (n_times, n_modes); row m is the lab-frame state at
    times[m].
    """

    times: np.ndarray
    coeffs: np.ndarray
    grid: TorusGrid
    spec: EquationSpec | None = None

    def __post_init__(self) -> None:
        times = np.array(self.times, dtype=float, copy=True)
        coeffs = np.array(self.coeffs, dtype=np.complex128, copy=True)
        if times.ndim != 1 or times.size < 2:
            raise ValueError("a trajectory needs at least two instants")
        steps = np.diff(times)
        if not np.allclose(steps, steps[0], rtol=1e-12, atol=1e-12 * max(1.0, abs(steps[0]))):
            raise ValueError("trajectory time grid must be uniform")
        if coeffs.shape != (times.size, self.grid.n_modes):
            raise ValueError("coefficient array shape does not match times/grid")
        times.setflags(write=False)
        coeffs.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def n_times(self) -> int:
        return int(self.times.size)

    def state(self, index: int) -> SpectralField:
        return SpectralField(self.grid, self.coeffs[index])

    @property
    def initial_state(self) -> SpectralField:
        return self.state(0)

    @property
    def final_state(self) -> SpectralField:
        return self.state(-1)


def mass(field: SpectralField) -> float:
    """Mean-square mass avg|u|^2 = sum_n |coeff|^2."""
    return float(np.sum(np.abs(field.coeffs) ** 2))


def _cubic_coeffs(coeffs: np.ndarray, grid: TorusGrid) -> np.ndarray:
    """Exact band coefficients of |u|^2 u via the oversampled physical grid."""
    buf = np.zeros(grid.n_phys, dtype=np.complex128)
    buf[grid._band_pos] = coeffs
    u = np.fft.ifft(buf) * grid.n_phys
    w = u * np.conj(u) * u
    return (np.fft.fft(w) / grid.n_phys)[grid._band_pos]


def nonlinearity(field: SpectralField, spec: EquationSpec):
    """Split the renormalized cubic nonlinearity into its three pieces.

    Returns (nonres, res, mean_term) where res is the diagonal sum with
    coefficients |u_n|^2 u_n, mean_term = gamma * avg|u|^2 * u, and nonres is
    the off-diagonal rest, recovered from the exact identity

        |u|^2 u = nonres + 2 * avg|u|^2 * u - res.

    The model's full nonlinearity is then nonres - res + (2 - gamma) * mu * u.
    """
    c = field.coeffs
    mu = mass(field)
    res = np.abs(c) ** 2 * c
    cubic = _cubic_coeffs(c, field.grid)
    nonres = cubic - 2.0 * mu * c + res
    mean_term = spec.gamma * mu * c
    make = field.with_coeffs
    return make(nonres), make(res), make(mean_term)


def full_nonlinearity(field: SpectralField, spec: EquationSpec) -> SpectralField:
    """(|u|^2 - gamma * avg|u|^2) u, dealiased, truncated to the band."""
    c = field.coeffs
    cubic = _cubic_coeffs(c, field.grid)
    return field.with_coeffs(cubic - spec.gamma * mass(field) * c)


def rhs(field: SpectralField, t: float, spec: EquationSpec) -> SpectralField:
    """Time derivative of the interaction-representation coefficients.

    `field` holds a(t) = S(-t) u(t); the linear phases enter only through
    exact conjugation with the free propagator, never through the ODE step.
    """
    p = spec.dispersion_exponent
    u = free_evolve(field, t, p)
    nl = full_nonlinearity(u, spec)
    back = free_evolve(nl, -t, p)
    return field.with_coeffs(spec.sign_value * 1j * back.coeffs)


def solve(
    u0: SpectralField,
    spec: EquationSpec,
    T: float,
    dt: float,
    store_stride: int = 1,
) -> Trajectory:
    """Integrate from u0 over [0, T] and return the lab-frame trajectory.

    Classical RK4 on the interaction-frame coefficients with the dispersion
    handled by the exact integrating factor.  dt must divide T; choose dt
    small enough that dt times the fastest retained nonlinear rotation rate
    (roughly the mass for the renormalized models, and the largest phase
    2*n_max^2 for interactions one cares to resolve) stays well below 1.

    Negative T integrates backwards.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    n_steps = int(round(abs(T) / dt))
    if n_steps < 1 or abs(n_steps * dt - abs(T)) > 1e-9 * max(1.0, abs(T)):
        raise ValueError("T/dt must be a positive integer (within 1e-9)")
    if store_stride < 1 or n_steps % store_stride != 0:
        raise ValueError("store_stride must divide the number of steps")

    grid = u0.grid
    gamma = spec.gamma
    sigma = spec.sign_value
    pos = grid._band_pos
    npow = grid.modes.astype(float) ** spec.dispersion_exponent
    h = dt if T > 0 else -dt
    # Galerkin projection onto the symmetric band: the -n_modes/2 slot stays 0.
    band_mask = np.ones(grid.n_modes)
    band_mask[0] = 0.0

    def deriv(a: np.ndarray, t: float) -> np.ndarray:
        phase = np.exp(1j * npow * t)
        u = a * phase
        buf = np.zeros(grid.n_phys, dtype=np.complex128)
        buf[pos] = u
        uph = np.fft.ifft(buf) * grid.n_phys
        cubic = (np.fft.fft(uph * np.conj(uph) * uph) / grid.n_phys)[pos]
        mu = np.sum(np.abs(u) ** 2).real
        return sigma * 1j * np.conj(phase) * band_mask * (cubic - gamma * mu * u)

    n_stored = n_steps // store_stride + 1
    out = np.empty((n_stored, grid.n_modes), dtype=np.complex128)
    times = np.empty(n_stored)
    a = u0.coeffs.copy()
    out[0] = a
    times[0] = 0.0
    mass0 = float(np.sum(np.abs(a) ** 2))

    for m in range(n_steps):
        t = m * h
        with np.errstate(over="ignore", invalid="ignore"):
            k1 = deriv(a, t)
            k2 = deriv(a + 0.5 * h * k1, t + 0.5 * h)
            k3 = deriv(a + 0.5 * h * k2, t + 0.5 * h)
            k4 = deriv(a + h * k3, t + h)
            a = a + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

        if not np.all(np.isfinite(a.view(float))):
            raise BlowUpError(m, t + h, "non-finite coefficient")
        if mass0 > 0.0:
            drift = abs(float(np.sum(np.abs(a) ** 2)) - mass0) / mass0
            if drift > MASS_DRIFT_ABORT:
                raise BlowUpError(m, t + h, f"relative mass drift {drift:.3e}")

        step = m + 1
        if step % store_stride == 0:
            t_next = step * h
            out[step // store_stride] = a * np.exp(1j * npow * t_next)
            times[step // store_stride] = t_next

    return Trajectory(times, out, grid, spec)


def interaction_frame(traj: Trajectory, inverse: bool = False) -> Trajectory:
    """Strip (or restore) the free phases: a(t) = S(-t) u(t) per instant.

    Preserves every Sobolev norm pointwise in time; applying the transform
    and then its inverse reproduces the trajectory exactly.
    """
    p = traj.spec.dispersion_exponent if traj.spec is not None else 2
    npow = traj.grid.modes.astype(float) ** p
    sgn = 1.0 if inverse else -1.0
    phases = np.exp(sgn * 1j * np.outer(traj.times, npow))
    return Trajectory(traj.times, traj.coeffs * phases, traj.grid, traj.spec)


def free_trajectory(
    u0: SpectralField, T: float, dt: float, dispersion_exponent: int = 2
) -> Trajectory:
    """Trajectory of the free propagator applied to u0 (no nonlinearity)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    n_steps = int(round(abs(T) / dt))
    if n_steps < 1 or abs(n_steps * dt - abs(T)) > 1e-9 * max(1.0, abs(T)):
        raise ValueError("T/dt must be a positive integer (within 1e-9)")
    h = dt if T > 0 else -dt
    times = h * np.arange(n_steps + 1)
    npow = u0.grid.modes.astype(float) ** dispersion_exponent
    coeffs = u0.coeffs[None, :] * np.exp(1j * np.outer(times, npow))
    return Trajectory(times, coeffs, u0.grid, None)
