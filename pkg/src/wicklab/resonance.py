"""Exact integer algebra of four-wave interaction phases on the lattice.

Quadruples (n1, n2, n3, n4) with n1 - n2 + n3 - n4 = 0 index the cubic
interactions.  The second-order phase 2(n4 - n1)(n4 - n3) and its fourth-order
analogue vanish exactly when n4 = n1 or n4 = n3; everything here is integer
arithmetic with no tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import bracket

__all__ = [
    "FrequencyQuadruple",
    "phase",
    "phase_factored",
    "sobolev_symbol",
    "verify_identities",
    "IdentityAuditReport",
    "classify_support",
    "SupportClassification",
    "SIMILAR_FACTOR",
    "DOMINANCE_FACTOR",
]

# a ~ b iff ratios stay within this factor; a >> b iff a > DOMINANCE_FACTOR * b.
SIMILAR_FACTOR = 4.0
DOMINANCE_FACTOR = 16.0

_SCALAR_RANGE = 2**30


@dataclass(frozen=True)
class FrequencyQuadruple:
    """Zero-sum integer frequency quadruple n1 - n2 + n3 - n4 = 0."""

    n1: int
    n2: int
    n3: int
    n4: int

    def __post_init__(self) -> None:
        if self.n1 - self.n2 + self.n3 - self.n4 != 0:
            raise ValueError("quadruple must satisfy n1 - n2 + n3 - n4 = 0")

    @property
    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.n1, self.n2, self.n3, self.n4)

    @property
    def magnitudes(self) -> tuple[int, ...]:
        """Decreasing rearrangement of |n_i|."""
        return tuple(sorted((abs(self.n1), abs(self.n2), abs(self.n3), abs(self.n4)), reverse=True))

    @property
    def is_resonant(self) -> bool:
        return self.n4 == self.n1 or self.n4 == self.n3


def _check_range(q: FrequencyQuadruple) -> None:
    if max(abs(v) for v in q.as_tuple) > _SCALAR_RANGE:
        raise OverflowError("frequencies beyond 2^30 are outside the supported range")


def phase(q: FrequencyQuadruple, dispersion_exponent: int = 2) -> int:
    """Interaction phase of a quadruple, exact integer.

    For dispersion exponent 2 this is n4^2 - n1^2 + n2^2 - n3^2; for exponent
    4 it is -n4^4 + n1^4 - n2^4 + n3^4.  Both the power-sum form and the
    factored form are evaluated and must agree.
    """
    _check_range(q)
    n1, n2, n3, n4 = q.as_tuple
    if dispersion_exponent == 2:
        value = n4 * n4 - n1 * n1 + n2 * n2 - n3 * n3
    elif dispersion_exponent == 4:
        value = -(n4**4) + n1**4 - n2**4 + n3**4
    else:
        raise ValueError("dispersion_exponent must be 2 or 4")
    factored = phase_factored(q, dispersion_exponent)
    if value != factored:
        raise ArithmeticError(f"phase forms disagree on {q.as_tuple}: {value} != {factored}")
    return value


def phase_factored(q: FrequencyQuadruple, dispersion_exponent: int = 2) -> int:
    """Factored form of the interaction phase, exposing the resonant zeros."""
    _check_range(q)
    n1, n2, n3, n4 = q.as_tuple
    if dispersion_exponent == 2:
        return 2 * (n4 - n1) * (n4 - n3)
    if dispersion_exponent == 4:
        bulk = n1 * n1 + n2 * n2 + n3 * n3 + n4 * n4 + 2 * (n1 + n3) ** 2
        return -(n4 - n1) * (n4 - n3) * bulk
    raise ValueError("dispersion_exponent must be 2 or 4")


def sobolev_symbol(q: FrequencyQuadruple, s: float) -> float:
    """Antisymmetrized Sobolev weight <n1>^2s - <n2>^2s + <n3>^2s - <n4>^2s."""
    b = bracket(np.array(q.as_tuple, dtype=float)) ** (2.0 * s)
    return float(b[0] - b[1] + b[2] - b[3])


@dataclass(frozen=True)
class IdentityAuditReport:
    """Outcome of an exhaustive zero-sum sweep of the phase identities."""

    radius: int
    quadruples_checked: int
    counts: dict
    failures: list

    @property
    def total_failures(self) -> int:
        return sum(c["failed"] for c in self.counts.values())

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "quadruples_checked": self.quadruples_checked,
            "counts": self.counts,
            "failures": [list(f) for f in self.failures],
            "total_failures": self.total_failures,
        }


_AUDIT_CHECKS = (
    "phase2_forms_agree",
    "phase4_forms_agree",
    "phase2_zero_iff_resonant",
    "phase4_zero_iff_resonant",
    "phase4_dominates_phase2",
)


def verify_identities(box_radius: int, max_failures: int = 100) -> IdentityAuditReport:
    """Exhaustively audit the phase identities over |n_i| <= box_radius.

    Checks, exactly in 64-bit integer arithmetic: both algebraic forms of the
    second- and fourth-order phases agree; each phase vanishes iff n4 = n1 or
    n4 = n3; and |fourth-order phase| >= |second-order phase| with constant 1.
    """
    if not (1 <= box_radius <= 256):
        raise ValueError("box_radius must be between 1 and 256")
    r = box_radius
    vals = np.arange(-r, r + 1, dtype=np.int64)
    n2g, n3g = np.meshgrid(vals, vals, indexing="ij")
    n2f = n2g.ravel()
    n3f = n3g.ravel()

    checked = 0
    failed = {name: 0 for name in _AUDIT_CHECKS}
    failures: list[tuple] = []

    for n1 in vals:
        n4 = n1 - n2f + n3f
        keep = np.abs(n4) <= r
        if not np.any(keep):
            continue
        n2 = n2f[keep]
        n3 = n3f[keep]
        n4 = n4[keep]
        checked += int(n4.size)

        phi_sum = n4 * n4 - n1 * n1 + n2 * n2 - n3 * n3
        phi_fac = 2 * (n4 - n1) * (n4 - n3)
        phi4_sum = -(n4**4) + n1**4 - n2**4 + n3**4
        phi4_fac = -(n4 - n1) * (n4 - n3) * (n1 * n1 + n2 * n2 + n3 * n3 + n4 * n4 + 2 * (n1 + n3) ** 2)
        resonant = (n4 == n1) | (n4 == n3)

        bad = {
            "phase2_forms_agree": phi_sum != phi_fac,
            "phase4_forms_agree": phi4_sum != phi4_fac,
            "phase2_zero_iff_resonant": (phi_sum == 0) != resonant,
            "phase4_zero_iff_resonant": (phi4_sum == 0) != resonant,
            "phase4_dominates_phase2": np.abs(phi4_sum) < np.abs(phi_sum),
        }
        for name, mask in bad.items():
            count = int(np.count_nonzero(mask))
            if count:
                failed[name] += count
                for idx in np.flatnonzero(mask)[: max(0, max_failures - len(failures))]:
                    failures.append((name, int(n1), int(n2[idx]), int(n3[idx]), int(n4[idx])))

    counts = {name: {"checked": checked, "failed": failed[name]} for name in _AUDIT_CHECKS}
    return IdentityAuditReport(box_radius, checked, counts, failures)


@dataclass(frozen=True)
class SupportClassification:
    """Frequency-pattern class of a quadruple with its comparison data."""

    case: str
    phi_abs: int
    n1_star: int
    comparison: float | None
    ratio: float | None
    psi: float


def _similar(a: int, b: int) -> bool:
    return a <= SIMILAR_FACTOR * b and b <= SIMILAR_FACTOR * a


def _dominates(a: int, b: int) -> bool:
    return a > DOMINANCE_FACTOR * b


def classify_support(q: FrequencyQuadruple, s: float) -> SupportClassification:
    """Classify the magnitude pattern of a non-resonant quadruple.

    Cases, with |n| read as |n4|:
      (i)   one of {n1, n3} rides with n4 and dominates the other two;
            comparison n1* |n2 - n_low| where n_low is the remaining odd slot.
      (ii)  |n4| ~ |n2| dominating |n1|, |n3|; comparison (n1*)^2.
      (iii) exactly one frequency small, the other three comparable;
            comparison (n1*)^2.
      (iv)  |phase| < n1* (nearly resonant); all four are then comparable.
    Thresholds: ~ means within a factor of 4, dominance means > 16x.
    """
    psi = sobolev_symbol(q, s)
    phi_abs = abs(phase(q))
    a1, a2, a3, a4 = (abs(v) for v in q.as_tuple)
    n1_star = max(a1, a2, a3, a4)

    def result(case: str, comparison: float | None) -> SupportClassification:
        ratio = phi_abs / comparison if comparison else None
        return SupportClassification(case, phi_abs, n1_star, comparison, ratio, psi)

    if phi_abs == 0:
        return SupportClassification("resonant", 0, n1_star, None, None, psi)

    if phi_abs < n1_star:
        return result("iv", float(n1_star))

    # (i): high pair {n4, n3} over low pair {n1, n2}, or its n1 <-> n3 image.
    if _similar(a4, a3) and _dominates(min(a4, a3), a1) and _dominates(min(a4, a3), a2):
        return result("i", float(n1_star * abs(q.n2 - q.n1)))
    if _similar(a4, a1) and _dominates(min(a4, a1), a3) and _dominates(min(a4, a1), a2):
        return result("i", float(n1_star * abs(q.n2 - q.n3)))

    # (ii): high pair {n4, n2} over {n1, n3}.
    if _similar(a4, a2) and _dominates(min(a4, a2), a1) and _dominates(min(a4, a2), a3):
        return result("ii", float(n1_star) ** 2)

    # (iii): a single dominated frequency, the other three mutually comparable.
    mags = [a1, a2, a3, a4]
    for low in range(4):
        highs = [m for i, m in enumerate(mags) if i != low]
        if all(_dominates(h, mags[low]) for h in highs) and all(
            _similar(x, y) for x in highs for y in highs
        ):
            return result("iii", float(n1_star) ** 2)

    return SupportClassification("generic", phi_abs, n1_star, None, None, psi)
