"""Physical constants (SI, CODATA 2018) and shared defaults."""

import math

HBAR = 1.054571817e-34  # J s
G_NEWTON = 6.67430e-11  # m^3 kg^-1 s^-2
ATOMIC_MASS_KG = 1.66053906660e-27

CARBON_MASS_KG = 12.0 * ATOMIC_MASS_KG

GRAPHENE_STEP = 2.46e-10  # m, graphene lattice step
GRAPHITE_INTERLAYER = 3.35e-10  # m, default AA-stacking spacing

TAU_OBS = 0.01  # s, resolution time of the human eye
EXPERIMENTAL_R0_FLOOR = 4e-10  # m, strongest current experimental lower bound

SQRT_PI = math.sqrt(math.pi)
