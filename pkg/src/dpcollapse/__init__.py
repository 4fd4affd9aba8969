"""Collapse times of spatially superposed finite crystals under the
Diosi-Penrose model: linear-scaling lattice sums, analytic bounds,
scaling laws and colored-noise extensions."""

from .analytics import (
    BoundBracket,
    BoundInterval,
    SquarePlate,
    bound_bracket,
    far_field_delta_e,
    far_field_tau,
    fit_plateau_prefactor,
    plateau_delta_e,
    refine_lower_bounds,
    square_plate_summary,
)
from .constants import G_NEWTON, HBAR, TAU_OBS
from .dynamics import (
    CoherenceConfig,
    ColoredNoiseModel,
    coherence_elements,
    coherence_neglect_h,
    colored_collapse_time,
    g_exponential,
    tau_colored,
    tau_white,
)
from .kernel import (
    BruteForceCapError,
    CollapseResult,
    SuperpositionConfig,
    TermBudgetError,
    delta_e_brute,
    delta_e_brute_grid,
    delta_e_brute_sweep,
    delta_e_fast,
    pair_kernel,
)
from .lattice import (
    BasisAtom,
    DistanceEntry,
    Lattice,
    build_cubic_lattice,
    build_graphene_sheet,
    build_square_lattice,
    build_stacked_graphene,
    distance_domain,
    domain_entry_count,
)

__version__ = "0.1.0"
