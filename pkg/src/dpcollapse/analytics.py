"""Closed-form estimates and bounds on the decoherence energy.

For a monoatomic square plate (step a, side L = N_1 a, separation d > L) the
energy gap can be bracketed analytically per R_eff interval; the brackets are
loose by construction but sandwich the numerics everywhere except close to the
interval edges at L and (d - L)/2, where a monotonicity refinement substitutes
a better lower estimate.  A dimensional plateau law and the far-field
second-order asymptote complete the standalone estimators.
"""

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .constants import G_NEWTON, HBAR, SQRT_PI

__all__ = [
    "BoundInterval",
    "BoundBracket",
    "SquarePlate",
    "square_plate_summary",
    "bound_bracket",
    "refine_lower_bounds",
    "plateau_delta_e",
    "far_field_delta_e",
    "far_field_tau",
    "fit_plateau_prefactor",
    "ETA_PLUS",
    "ETA_MINUS",
    "epsilon_bounds",
]

ETA_PLUS = 2.0 * math.log(3.0 + 2.0 * math.sqrt(2.0))  # ~3.5
ETA_MINUS = math.asinh(1.0)  # ~0.9

# Gamma(D/2) for the only dimensionalities the plateau law supports.
_GAMMA_HALF_D = {2: 1.0, 3: SQRT_PI / 2.0}


class BoundInterval(enum.Enum):
    """Which R_eff interval selected the bracket expressions."""

    BELOW_A = "BelowA"
    A_TO_L = "AToL"
    L_TO_HALF_D_MINUS_L = "LToHalfDmL"
    MID_D = "MidD"
    HALF_D_PLUS_2L_TO_D = "HalfDp2LToD"
    ABOVE_D = "AboveD"


@dataclass(frozen=True)
class BoundBracket:
    """Analytic lower/upper bounds on the energy gap at one R_eff."""

    r_eff: float
    lower: float
    upper: float
    interval: BoundInterval

    @property
    def inverted(self):
        """True where the verbatim bound expressions cross (a known artefact
        of the second interval's upper bound); diagnostic, not an error."""
        return self.upper < self.lower

    def contains(self, value):
        return self.lower <= value <= self.upper


@dataclass(frozen=True)
class SquarePlate:
    """Minimal geometry summary the bracket formulas need."""

    n_atoms: int
    a: float
    m: float
    L: float


def square_plate_summary(lat):
    """Validate that `lat` is a monoatomic square plate and summarise it.

    The brackets were derived only for that case; anything else is rejected.
    """
    if lat.dimension != 2 or len(lat.basis) != 1:
        raise ValueError("bounds are derived for a monoatomic 2D square lattice only")
    (a1, a2) = (np.asarray(v, float) for v in lat.primitive_vectors)
    if abs(a1 @ a2) > 1e-12 * (a1 @ a1) or not math.isclose(a1 @ a1, a2 @ a2):
        raise ValueError("bounds require orthogonal, equal-length primitive vectors")
    if lat.extents[0] != lat.extents[1]:
        raise ValueError("bounds require a square plate (equal extents)")
    a = float(np.hypot(*a1))
    return SquarePlate(
        n_atoms=lat.n_atoms, a=a, m=lat.basis[0].mass, L=lat.extents[0] * a
    )


def epsilon_bounds(d, L):
    """(eps_minus, eps_plus): erf(q^{-1})/q^{-1} and erf(q)/q with
    q = (d - L)/(d + 2L); for d = 4L they evaluate to ~0.5 and ~1."""
    q = (d - L) / (d + 2.0 * L)
    return math.erf(1.0 / q) * q, math.erf(q) / q


def _geometric_factor(r_eff, a, L):
    """Overcount correction for pairs outside the plate in the near-field
    integral estimate (square of side 2 R_eff vs annulus of radii a, 2 R_eff)."""
    return (L * L / (L * L + 4.0 * L * r_eff + math.pi * r_eff * r_eff)) * (
        4.0 * r_eff * r_eff / (math.pi * (4.0 * r_eff * r_eff - a * a))
    )


def bound_bracket(plate, d, r_eff):
    """Bracket the energy gap of a monoatomic square plate at one R_eff.

    `plate` is a SquarePlate (or a Lattice, validated and summarised first).
    Interval selection is half-open with ties resolved toward the lower-R_eff
    row.  For the last two intervals the bracket degenerates to the exact
    second-order asymptote.
    """
    if not isinstance(plate, SquarePlate):
        plate = square_plate_summary(plate)
    if d <= plate.L:
        raise ValueError(f"bounds assume d > L, got d={d}, L={plate.L}")
    if r_eff <= 0:
        raise ValueError(f"r_eff must be positive, got {r_eff}")

    n = float(plate.n_atoms)
    a = plate.a
    L = plate.L
    n32 = n * math.sqrt(n)
    self_term = n / (SQRT_PI * r_eff)
    bulk = n * n / (SQRT_PI * r_eff)

    if r_eff <= a:
        interval = BoundInterval.BELOW_A
        lower = self_term + ETA_MINUS * n32 / a - n * n / (d - L)
        upper = self_term + ETA_PLUS * n32 / a - n * n / (d + L)
    elif r_eff <= L:
        interval = BoundInterval.A_TO_L
        fg = _geometric_factor(r_eff, a, L)
        lower = (
            self_term
            + ETA_MINUS * n32 / a
            - n * n / (d - L)
            + 4.0 * n * r_eff / (SQRT_PI * a * a)
            - (2.0 * math.pi * n / a) * fg * (2.0 * r_eff / a - 1.0)
        )
        upper = (
            self_term
            + ETA_PLUS * n32 / a
            - n * n / (d + L)
            + (4.0 * n * r_eff / (a * a)) * (1.0 / SQRT_PI - 1.0)
        )
    elif r_eff <= 0.5 * (d - L):
        interval = BoundInterval.L_TO_HALF_D_MINUS_L
        lower = bulk - n * n / (d - L)
        upper = bulk - n * n / (d + 2.0 * L)
    elif r_eff <= 0.5 * (d + 2.0 * L):
        interval = BoundInterval.MID_D
        eps_minus, eps_plus = epsilon_bounds(d, L)
        lower = bulk - eps_plus * n * n / (2.0 * r_eff)
        upper = bulk - eps_minus * n * n / (2.0 * r_eff)
    else:
        interval = (
            BoundInterval.HALF_D_PLUS_2L_TO_D if r_eff <= d else BoundInterval.ABOVE_D
        )
        exact = n * n * d * d / (12.0 * SQRT_PI * r_eff**3)
        lower = upper = exact

    scale = 8.0 * math.pi * G_NEWTON * plate.m**2
    return BoundBracket(
        r_eff=r_eff, lower=scale * lower, upper=scale * upper, interval=interval
    )


def refine_lower_bounds(brackets, edges=(), edge_factor=3.0):
    """Monotonicity refinement of a bracket list.

    The energy gap decreases with R_eff, so every lower bound can be lifted to
    the best lower bound seen at any larger R_eff.  The closed-form lower
    expressions are known to overshoot the true value close to the interval
    edges at L and (d - L)/2; passing those edge R_eff values via `edges`
    treats every raw lower within a factor `edge_factor` of an edge as
    unreliable and substitutes the bound carried down from larger R_eff
    instead (keeping the raw value only when nothing larger is available).
    Returns a new list in the input order.
    """
    def _near_edge(r):
        return any(e / edge_factor <= r <= e * edge_factor for e in edges)

    order = sorted(range(len(brackets)), key=lambda i: brackets[i].r_eff)
    refined = list(brackets)
    running = -math.inf
    for i in reversed(order):
        b = brackets[i]
        if not _near_edge(b.r_eff):
            running = max(running, b.lower)
            lower = running
        else:
            lower = running if math.isfinite(running) else b.lower
        refined[i] = replace(b, lower=lower)
    return refined


def plateau_delta_e(dimension, n_atoms, a, m):
    """Plateau estimate of the energy gap at R_eff ~ a for a monoatomic
    lattice in D dimensions: proportional to N^((2D-1)/D)."""
    if dimension not in (2, 3):
        raise ValueError(
            f"plateau law needs D in (2, 3), got {dimension} "
            "(the derivation divides by D - 1)"
        )
    if n_atoms < 1:
        raise ValueError("n_atoms must be at least 1")
    dim = dimension
    return (
        (8.0 * math.pi * G_NEWTON * m * m / a)
        * (math.pi ** (dim / 2.0) / _GAMMA_HALF_D[dim])
        * float(n_atoms) ** ((2.0 * dim - 1.0) / dim)
        / (2.0 ** (dim - 2.0) * (dim - 1.0))
    )


def far_field_delta_e(n_atoms, m, d, r_eff):
    """Second-order asymptote (2/3) sqrt(pi) G m^2 N^2 d^2 / r_eff^3."""
    return (
        (2.0 / 3.0) * SQRT_PI * G_NEWTON * m * m
        * float(n_atoms) ** 2 * d * d / r_eff**3
    )


def far_field_tau(n_atoms, m, d, r_eff, L=None):
    """Collapse time from the far-field asymptote; valid for
    r_eff >= (d + 2L)/2 (checked when L is provided)."""
    if L is not None and r_eff < 0.5 * (d + 2.0 * L):
        raise ValueError(
            f"far-field formula needs r_eff >= (d + 2L)/2 = "
            f"{0.5 * (d + 2.0 * L):.4g} m, got {r_eff:.4g} m"
        )
    return HBAR / far_field_delta_e(n_atoms, m, d, r_eff)


def fit_plateau_prefactor(n_values, delta_e_values, dimension):
    """Least-squares prefactor C of C * N^((2D-1)/D) through kernel output.

    Used for lattices (graphene) whose plateau constant has no closed form;
    the exponent is held fixed at the dimensional value.
    """
    n_arr = np.asarray(n_values, dtype=float)
    de_arr = np.asarray(delta_e_values, dtype=float)
    if n_arr.size == 0 or n_arr.size != de_arr.size:
        raise ValueError("need matching, non-empty N and delta_e arrays")
    slope = (2.0 * dimension - 1.0) / dimension
    return float(np.exp(np.mean(np.log(de_arr) - slope * np.log(n_arr))))
