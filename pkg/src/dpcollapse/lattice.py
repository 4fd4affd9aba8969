"""Finite crystal lattices and their weighted distance domain.

A finite lattice with extents N_1..N_D and a K-atom basis has N = K * prod(N_i)
atoms and N^2 ordered atom pairs.  Because every pair separation is a lattice
vector plus a basis-offset difference, the N^2 pairs collapse onto
prod(2 N_i - 1) * |D_b| distance classes, each carrying an integer multiplicity
weight.  Streaming those classes instead of the pairs is what turns the O(N^2)
double sum into an O(N) weighted sum.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .constants import CARBON_MASS_KG, GRAPHENE_STEP, GRAPHITE_INTERLAYER

__all__ = [
    "BasisAtom",
    "Lattice",
    "DistanceEntry",
    "build_graphene_sheet",
    "build_square_lattice",
    "build_cubic_lattice",
    "build_stacked_graphene",
    "distance_domain",
    "domain_entry_count",
]


@dataclass(frozen=True)
class BasisAtom:
    """One atom of the unit-cell basis: offset in meters, mass in kg."""

    offset: tuple
    mass: float
    radius: float = 0.0


@dataclass(frozen=True)
class Lattice:
    """Immutable finite crystal: primitive vectors, basis, cell extents.

    dimension is 2 or 3; primitive_vectors is a D-tuple of D-vectors (meters);
    extents is the cell count along each primitive direction.
    """

    dimension: int
    primitive_vectors: tuple
    basis: tuple
    extents: tuple

    def __post_init__(self):
        d = self.dimension
        if d not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {d}")
        vecs = np.asarray(self.primitive_vectors, dtype=float)
        if vecs.shape != (d, d):
            raise ValueError(f"need {d} primitive vectors of length {d}, got shape {vecs.shape}")
        gram = vecs @ vecs.T
        if np.linalg.det(gram) <= 1e-12 * float(np.prod(np.diag(gram))):
            raise ValueError("primitive vectors are linearly dependent")
        if len(self.extents) != d:
            raise ValueError(f"need {d} extents, got {len(self.extents)}")
        for n in self.extents:
            if int(n) != n or n < 1:
                raise ValueError(f"extents must be positive integers, got {self.extents}")
        if not self.basis:
            raise ValueError("basis must contain at least one atom")
        for atom in self.basis:
            if len(atom.offset) != d:
                raise ValueError("basis offset dimension mismatch")
            if atom.mass <= 0:
                raise ValueError(f"atom mass must be positive, got {atom.mass}")
            if atom.radius < 0:
                raise ValueError(f"atom radius must be non-negative, got {atom.radius}")

    @property
    def n_cells(self):
        return math.prod(self.extents)

    @property
    def n_atoms(self):
        return len(self.basis) * self.n_cells

    @property
    def side_lengths(self):
        """Physical side lengths N_i * |a_i| along each primitive direction."""
        return tuple(
            n * math.hypot(*v) for n, v in zip(self.extents, self.primitive_vectors)
        )

    @property
    def longest_side(self):
        return max(self.side_lengths)

    def total_mass(self):
        return self.n_cells * sum(atom.mass for atom in self.basis)

    def basis_pair_classes(self):
        """Merged basis-offset differences c = b_alpha - b_beta.

        Classes with identical offset vector, mass product and mean squared
        radius are merged with summed multiplicity (graphene: the null offset
        appears for both same-atom pairs and carries weight 2).  Returned
        sorted by offset for a deterministic enumeration order.
        """
        classes = {}
        for a, b in itertools.product(self.basis, repeat=2):
            c = tuple(x - y for x, y in zip(a.offset, b.offset))
            key = (c, a.mass * b.mass, 0.5 * (a.radius**2 + b.radius**2))
            classes[key] = classes.get(key, 0) + 1
        return sorted(
            (c, w, mp, r2) for (c, mp, r2), w in classes.items()
        )

    def atom_positions(self):
        """Explicit (N, D) positions, masses and squared radii, lexicographic
        in (n_1, .., n_D, basis index).  Only for brute-force-sized lattices."""
        vecs = np.asarray(self.primitive_vectors, dtype=float)
        grids = np.meshgrid(*[np.arange(n) for n in self.extents], indexing="ij")
        cells = np.stack([g.ravel() for g in grids], axis=1) @ vecs
        offs = np.asarray([a.offset for a in self.basis], dtype=float)
        pos = (cells[:, None, :] + offs[None, :, :]).reshape(-1, self.dimension)
        mass = np.tile([a.mass for a in self.basis], self.n_cells)
        rad2 = np.tile([a.radius**2 for a in self.basis], self.n_cells)
        return pos, mass, rad2


@dataclass(frozen=True)
class DistanceEntry:
    """One class of the distance domain: separation vector, integer
    multiplicity, and the mass product / mean squared radius of its pair."""

    r: tuple
    weight: int
    mass_product: float
    mean_sq_radius: float = 0.0


def build_graphene_sheet(n1, n2):
    """Graphene sheet of n1 x n2 unit cells (two carbon atoms per cell)."""
    a = GRAPHENE_STEP
    return Lattice(
        dimension=2,
        primitive_vectors=((a, 0.0), (0.5 * a, 0.5 * math.sqrt(3.0) * a)),
        basis=(
            BasisAtom((0.0, 0.0), CARBON_MASS_KG),
            BasisAtom((0.5 * a, math.sqrt(3.0) / 6.0 * a), CARBON_MASS_KG),
        ),
        extents=(n1, n2),
    )


def build_square_lattice(n1, n2, a, m):
    """Monoatomic square lattice, step a (m), atom mass m (kg)."""
    if a <= 0:
        raise ValueError(f"lattice step must be positive, got {a}")
    return Lattice(
        dimension=2,
        primitive_vectors=((a, 0.0), (0.0, a)),
        basis=(BasisAtom((0.0, 0.0), m),),
        extents=(n1, n2),
    )


def build_cubic_lattice(n1, n2, n3, a, m):
    """Monoatomic simple cubic lattice, step a (m), atom mass m (kg)."""
    if a <= 0:
        raise ValueError(f"lattice step must be positive, got {a}")
    return Lattice(
        dimension=3,
        primitive_vectors=((a, 0.0, 0.0), (0.0, a, 0.0), (0.0, 0.0, a)),
        basis=(BasisAtom((0.0, 0.0, 0.0), m),),
        extents=(n1, n2, n3),
    )


def build_stacked_graphene(n1, n2, n3, interlayer=GRAPHITE_INTERLAYER):
    """AA-stacked graphene layers with the given interlayer spacing (m)."""
    if interlayer <= 0:
        raise ValueError(f"interlayer spacing must be positive, got {interlayer}")
    sheet = build_graphene_sheet(n1, n2)
    vecs = tuple(v + (0.0,) for v in sheet.primitive_vectors) + ((0.0, 0.0, interlayer),)
    basis = tuple(
        BasisAtom(atom.offset + (0.0,), atom.mass, atom.radius) for atom in sheet.basis
    )
    return Lattice(dimension=3, primitive_vectors=vecs, basis=basis, extents=(n1, n2, n3))


def domain_entry_count(lat):
    """Number of streamed distance classes: prod(2 N_i - 1) * |merged D_b|."""
    return math.prod(2 * n - 1 for n in lat.extents) * len(lat.basis_pair_classes())


def distance_domain(lat):
    """Yield every DistanceEntry of the lattice, lexicographic in
    (n_1, .., n_D, basis class).

    The domain is streamed, never materialised: at paper scale it has ~1e11
    entries.  Sum of weights over the stream is exactly N^2 (integer).
    """
    vecs = lat.primitive_vectors
    classes = lat.basis_pair_classes()
    ranges = [range(-(n - 1), n) for n in lat.extents]
    for idx in itertools.product(*ranges):
        w_cell = math.prod(n - abs(i) for n, i in zip(lat.extents, idx))
        base = [
            sum(i * v[k] for i, v in zip(idx, vecs)) for k in range(lat.dimension)
        ]
        for c, omega, mass_product, r2 in classes:
            yield DistanceEntry(
                r=tuple(b + ck for b, ck in zip(base, c)),
                weight=omega * w_cell,
                mass_product=mass_product,
                mean_sq_radius=r2,
            )
