"""wicklab: a spectral laboratory for the cubic NLS on the circle and its
Wick-ordered renormalization."""

from .spectral import (
    CUTOFFS,
    CutoffFamily,
    SpectralField,
    TorusGrid,
    bracket,
    free_evolve,
    project_dyadic,
    sobolev_norm,
    to_physical,
    to_spectral,
)
from .dynamics import (
    BlowUpError,
    EquationSpec,
    Model,
    Trajectory,
    free_trajectory,
    interaction_frame,
    mass,
    nonlinearity,
    rhs,
    solve,
)
from .gauge import (
    gauge_equivalence_residual,
    gauge_transform,
    oscillation_experiment,
)
from .resonance import (
    FrequencyQuadruple,
    classify_support,
    phase,
    phase_factored,
    sobolev_symbol,
    verify_identities,
)
from .energy import (
    ModifiedEnergyLedger,
    boundary_correction,
    cap_exponent,
    modified_energy_ledger,
    quartic_flux,
    sextic_remainder,
    symbol_bound_sweep,
    window_exponent,
)
from .norms import (
    NormSpec,
    SpaceTimeSpectrum,
    TimeWindow,
    embedding_probe,
    energy_norm,
    short_time_norms,
    spacetime_transform,
    strichartz_probe,
    xk_norm,
    xsb_norm,
)

__version__ = "0.1.0"

__all__ = [
    "BlowUpError",
    "CUTOFFS",
    "CutoffFamily",
    "EquationSpec",
    "FrequencyQuadruple",
    "Model",
    "ModifiedEnergyLedger",
    "NormSpec",
    "SpaceTimeSpectrum",
    "SpectralField",
    "TimeWindow",
    "TorusGrid",
    "Trajectory",
    "boundary_correction",
    "bracket",
    "cap_exponent",
    "classify_support",
    "embedding_probe",
    "energy_norm",
    "free_evolve",
    "free_trajectory",
    "gauge_equivalence_residual",
    "gauge_transform",
    "interaction_frame",
    "mass",
    "modified_energy_ledger",
    "nonlinearity",
    "oscillation_experiment",
    "phase",
    "phase_factored",
    "project_dyadic",
    "quartic_flux",
    "rhs",
    "sextic_remainder",
    "short_time_norms",
    "sobolev_norm",
    "sobolev_symbol",
    "solve",
    "spacetime_transform",
    "strichartz_probe",
    "symbol_bound_sweep",
    "to_physical",
    "to_spectral",
    "verify_identities",
    "window_exponent",
    "xk_norm",
    "xsb_norm",
]
