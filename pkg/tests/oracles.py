"""Independent brute-force oracles used across the test suite.

Everything here is deliberately naive: literal loops over all index tuples
with the defining constraints checked one by one, kept structurally separate
from the production code paths they certify.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import simpson


def bracket(n: float) -> float:
    return float(np.sqrt(1.0 + n * n))


def cubic_convolution(coeffs: np.ndarray, modes: np.ndarray) -> np.ndarray:
    """Direct triple sum for the coefficients of |u|^2 u on the band."""
    index = {int(n): i for i, n in enumerate(modes)}
    out = np.zeros_like(coeffs)
    for i1, n1 in enumerate(modes):
        for i2, n2 in enumerate(modes):
            for i3, n3 in enumerate(modes):
                n = int(n1) - int(n2) + int(n3)
                if n in index:
                    out[index[n]] += coeffs[i1] * np.conj(coeffs[i2]) * coeffs[i3]
    return out


def quadruple_list(limit: int, cap_filter: str, cap: int) -> list[tuple[int, int, int, int]]:
    """All non-resonant zero-sum quadruples with |n_i| <= limit, filtered by cap.

    cap_filter 'all_leq': every |n_i| <= cap; 'max_gt': max |n_i| > cap.
    Built by looping all four indices and checking the zero-sum constraint,
    the O(M^4) way.
    """
    quads = []
    rng = range(-limit, limit + 1)
    for n1 in rng:
        for n2 in rng:
            for n3 in rng:
                for n4 in rng:
                    if n1 - n2 + n3 - n4 != 0:
                        continue
                    if n2 == n1 or n2 == n3:
                        continue
                    if cap_filter == "all_leq" and max(abs(n1), abs(n2), abs(n3), abs(n4)) > cap:
                        continue
                    if cap_filter == "max_gt" and max(abs(n1), abs(n2), abs(n3), abs(n4)) <= cap:
                        continue
                    quads.append((n1, n2, n3, n4))
    return quads


def psi(quad: tuple[int, int, int, int], s: float) -> float:
    n1, n2, n3, n4 = quad
    return (
        bracket(n1) ** (2 * s)
        - bracket(n2) ** (2 * s)
        + bracket(n3) ** (2 * s)
        - bracket(n4) ** (2 * s)
    )


def phi(quad: tuple[int, int, int, int]) -> int:
    n1, n2, n3, n4 = quad
    return n4 * n4 - n1 * n1 + n2 * n2 - n3 * n3


def _gather_product(u: np.ndarray, quad, index, slot1=None) -> complex:
    n1, n2, n3, n4 = quad
    first = slot1[index[n1]] if slot1 is not None else u[index[n1]]
    return first * np.conj(u[index[n2]]) * u[index[n3]] * np.conj(u[index[n4]])


def quartic_flux_bruteforce(traj, s: float, cap: int) -> float:
    """Quadruple-loop + fine-grid Simpson evaluation of the quartic flux."""
    modes = traj.grid.modes
    index = {int(n): i for i, n in enumerate(modes)}
    quads = quadruple_list(traj.grid.max_mode, "all_leq", cap)
    weights = [psi(q, s) for q in quads]
    vals = np.empty(traj.n_times, dtype=complex)
    for m in range(traj.n_times):
        u = traj.coeffs[m]
        vals[m] = sum(w * _gather_product(u, q, index) for q, w in zip(quads, weights))
    sigma = traj.spec.sign_value if traj.spec is not None else 1.0
    return sigma * float(np.real(-0.5j * simpson(vals, x=traj.times)))


def boundary_correction_bruteforce(field, s: float, cap: int) -> float:
    modes = field.grid.modes
    index = {int(n): i for i, n in enumerate(modes)}
    quads = quadruple_list(field.grid.max_mode, "max_gt", cap)
    u = field.coeffs
    total = sum(psi(q, s) / phi(q) * _gather_product(u, q, index) for q in quads)
    return float(np.real(0.5 * total))


def sextic_remainder_bruteforce(traj, s: float, cap: int) -> tuple[float, float]:
    """Septuple-structure enumeration: outer capped quadruples, inner triples."""
    modes = traj.grid.modes
    index = {int(n): i for i, n in enumerate(modes)}
    limit = traj.grid.max_mode
    outer = quadruple_list(limit, "max_gt", cap)
    rng = range(-limit, limit + 1)

    cascade_vals = np.empty(traj.n_times, dtype=complex)
    diagonal_vals = np.empty(traj.n_times, dtype=complex)
    for m in range(traj.n_times):
        u = traj.coeffs[m]
        inner = np.zeros_like(u)
        for n5 in rng:
            for n6 in rng:
                for n7 in rng:
                    if n6 == n5 or n6 == n7:
                        continue
                    n1 = n5 - n6 + n7
                    if abs(n1) <= limit:
                        inner[index[n1]] += u[index[n5]] * np.conj(u[index[n6]]) * u[index[n7]]
        casc = 0.0 + 0.0j
        diag = 0.0 + 0.0j
        for q in outer:
            w = psi(q, s) / phi(q)
            casc += w * _gather_product(u, q, index, slot1=inner)
            diag += w * _gather_product(u, q, index, slot1=np.abs(u) ** 2 * u)
        cascade_vals[m] = casc
        diagonal_vals[m] = diag
    cascade = 2.0 * float(np.imag(simpson(cascade_vals, x=traj.times)))
    diagonal = -2.0 * float(np.imag(simpson(diagonal_vals, x=traj.times)))
    return cascade, diagonal


def oscillatory_pairing_1d(window, spatial_value: complex, rate: float, t0: float, t1: float) -> float:
    """|integral of e^{-i rate t} w(t) c dt| by fine composite Simpson."""
    t = np.linspace(t0, t1, 20001)
    vals = np.exp(-1j * rate * t) * np.asarray(window(t), dtype=complex) * spatial_value
    return float(np.abs(simpson(vals, x=t)))
