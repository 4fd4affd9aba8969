"""Decoherence energy of a superposed crystal.

The pair kernel is

    f(r, R_eff, d) = erf(|r| / 2 R_eff) / |r| - erf(|d - r| / 2 R_eff) / |d - r|

and the decoherence energy of a lattice displaced by d against itself is
8 pi G * sum over atom pairs of m_i m_j f(r_ij, R_eff, d).  Two evaluation
routes are provided: `delta_e_fast` consumes the weighted distance domain
(linear in N) and `delta_e_brute` performs the direct O(N^2) double sum over
explicit atom positions; the second exists purely as an independent oracle
for the first.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from .constants import G_NEWTON, HBAR, SQRT_PI

__all__ = [
    "SuperpositionConfig",
    "CollapseResult",
    "TermBudgetError",
    "BruteForceCapError",
    "pair_kernel",
    "delta_e_fast",
    "delta_e_brute",
    "delta_e_brute_sweep",
    "delta_e_brute_grid",
]

DEFAULT_TERM_BUDGET = 1e12
BRUTE_CAP = 200_000

# Calibrated on the numba core; only used for the refusal message.
_SECONDS_PER_TERM = 2.5e-8

# Below this argument (relative to R_eff) the erf ratio switches to its
# two-term Taylor series; keeps the r=0 term exact without branching on 0.
_SERIES_SWITCH = 1e-6


class TermBudgetError(RuntimeError):
    """Refusal to start a run whose kernel-evaluation count exceeds the budget."""


class BruteForceCapError(RuntimeError):
    """Refusal to run the quadratic oracle above its verified size range."""


@dataclass(frozen=True)
class SuperpositionConfig:
    """Separation vector d (meters), smearing length r0 (meters) and optional
    wavepacket width sigma (meters, used only by the dynamics module)."""

    d: tuple
    r0: float
    sigma: float = None

    def __post_init__(self):
        if self.r0 <= 0:
            raise ValueError(f"r0 must be positive, got {self.r0}")
        if self.sigma is not None and self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    @property
    def d_norm(self):
        return math.hypot(*self.d)

    def r_eff(self, mean_sq_radius=0.0):
        """Effective smearing radius for a pair with the given mean squared
        intrinsic radius (R_a^2 + R_b^2) / 2; reduces to r0 for point nuclei."""
        return math.sqrt(self.r0**2 + mean_sq_radius)


@dataclass(frozen=True)
class CollapseResult:
    """Energy gap and collapse time for one parameter point."""

    delta_e: float
    tau: float
    n_atoms: int
    term_count: int

    @classmethod
    def from_delta_e(cls, delta_e, n_atoms, term_count):
        tau = HBAR / delta_e if delta_e > 0 else math.inf
        return cls(delta_e=delta_e, tau=tau, n_atoms=n_atoms, term_count=term_count)


def _erf_over_x(x, r_eff):
    """erf(x / 2 r_eff) / x, with the series limit for small x."""
    if x < _SERIES_SWITCH * r_eff:
        return (1.0 - x * x / (12.0 * r_eff * r_eff)) / (SQRT_PI * r_eff)
    return math.erf(x / (2.0 * r_eff)) / x


def pair_kernel(r, r_eff, d):
    """Evaluate f(r, R_eff, d) in 1/meters for D-vectors r and d."""
    if r_eff <= 0:
        raise ValueError(f"r_eff must be positive, got {r_eff}")
    r1 = math.hypot(*r)
    r2 = math.hypot(*(dk - rk for dk, rk in zip(d, r)))
    return _erf_over_x(r1, r_eff) - _erf_over_x(r2, r_eff)


# ---------------------------------------------------------------------------
# fast path: weighted sum over the distance domain

@njit(cache=True, nogil=True)
def _domain_chunk_sum(n1_lo, n1_hi, n1_ext, n2_ext, n3_ext,
                      a1, a2, a3, cvecs, omegas, mprods, reffs, d):
    """Weighted kernel sum over the contiguous n1-range [n1_lo, n1_hi).

    Neumaier-compensated accumulation; n2/n3/basis-class loops are in
    lexicographic order so the result is reproducible term for term.
    """
    s = 0.0
    comp = 0.0
    nclass = cvecs.shape[0]
    dx, dy, dz = d[0], d[1], d[2]
    inv_sqrt_pi = 1.0 / math.sqrt(math.pi)
    for n1 in range(n1_lo, n1_hi):
        w1 = float(n1_ext - abs(n1))
        b1x = n1 * a1[0]
        b1y = n1 * a1[1]
        b1z = n1 * a1[2]
        for n2 in range(-(n2_ext - 1), n2_ext):
            w12 = w1 * (n2_ext - abs(n2))
            b2x = b1x + n2 * a2[0]
            b2y = b1y + n2 * a2[1]
            b2z = b1z + n2 * a2[2]
            for n3 in range(-(n3_ext - 1), n3_ext):
                w = w12 * (n3_ext - abs(n3))
                bx = b2x + n3 * a3[0]
                by = b2y + n3 * a3[1]
                bz = b2z + n3 * a3[2]
                for g in range(nclass):
                    rx = bx + cvecs[g, 0]
                    ry = by + cvecs[g, 1]
                    rz = bz + cvecs[g, 2]
                    re = reffs[g]
                    r1 = math.sqrt(rx * rx + ry * ry + rz * rz)
                    if r1 < _SERIES_SWITCH * re:
                        t1 = (1.0 - r1 * r1 / (12.0 * re * re)) * inv_sqrt_pi / re
                    else:
                        t1 = math.erf(r1 / (2.0 * re)) / r1
                    qx = dx - rx
                    qy = dy - ry
                    qz = dz - rz
                    r2 = math.sqrt(qx * qx + qy * qy + qz * qz)
                    if r2 < _SERIES_SWITCH * re:
                        t2 = (1.0 - r2 * r2 / (12.0 * re * re)) * inv_sqrt_pi / re
                    else:
                        t2 = math.erf(r2 / (2.0 * re)) / r2
                    term = w * omegas[g] * mprods[g] * (t1 - t2)
                    # Neumaier update
                    t = s + term
                    if abs(s) >= abs(term):
                        comp += (s - t) + term
                    else:
                        comp += (term - t) + s
                    s = t
    return s + comp


def _domain_arrays(lat, cfg):
    """Pack lattice geometry into the 3D-padded arrays the numba core wants."""
    dim = lat.dimension
    vecs = np.zeros((3, 3))
    vecs[:dim, :dim] = np.asarray(lat.primitive_vectors, dtype=float)
    extents = list(lat.extents) + [1] * (3 - dim)
    classes = lat.basis_pair_classes()
    cvecs = np.zeros((len(classes), 3))
    omegas = np.empty(len(classes))
    mprods = np.empty(len(classes))
    reffs = np.empty(len(classes))
    for i, (c, omega, mp, r2) in enumerate(classes):
        cvecs[i, :dim] = c
        omegas[i] = omega
        mprods[i] = mp
        reffs[i] = cfg.r_eff(r2)
    d = np.zeros(3)
    d[:dim] = cfg.d
    return vecs, extents, cvecs, omegas, mprods, reffs, d


def _chunk_ranges(n1_ext, term_count):
    """Contiguous n1-ranges for parallel consumption.

    The decomposition depends only on the lattice, never on the worker
    count, so results are bitwise identical for any number of workers.
    """
    span = 2 * n1_ext - 1
    n_chunks = int(min(span, 1024, max(1, term_count // 65536)))
    edges = np.linspace(-(n1_ext - 1), n1_ext, n_chunks + 1).astype(np.int64)
    return [(int(lo), int(hi)) for lo, hi in zip(edges[:-1], edges[1:]) if hi > lo]


def delta_e_fast(lat, cfg, workers=1, *, term_budget=DEFAULT_TERM_BUDGET,
                 allow_long=False, progress=None):
    """Decoherence energy via the O(N) weighted lattice sum.

    Raises TermBudgetError (with a runtime estimate) instead of silently
    starting a multi-day run when the kernel-evaluation count exceeds
    `term_budget` and `allow_long` is not set.
    """
    if len(cfg.d) != lat.dimension:
        raise ValueError(
            f"separation vector has {len(cfg.d)} components for a "
            f"{lat.dimension}D lattice"
        )
    from .lattice import domain_entry_count

    term_count = domain_entry_count(lat)
    if term_count > term_budget and not allow_long:
        est = term_count * _SECONDS_PER_TERM
        raise TermBudgetError(
            f"{term_count:.3g} kernel evaluations exceed the budget of "
            f"{term_budget:.3g} (estimated runtime {est:.0f} s); "
            f"raise the budget or set allow_long to proceed"
        )

    vecs, extents, cvecs, omegas, mprods, reffs, d = _domain_arrays(lat, cfg)
    a1, a2, a3 = vecs[0], vecs[1], vecs[2]
    chunks = _chunk_ranges(extents[0], term_count)

    def run(chunk):
        lo, hi = chunk
        return _domain_chunk_sum(lo, hi, extents[0], extents[1], extents[2],
                                 a1, a2, a3, cvecs, omegas, mprods, reffs, d)

    if workers <= 1 or len(chunks) == 1:
        partials = []
        for i, chunk in enumerate(chunks):
            partials.append(run(chunk))
            if progress is not None:
                progress((i + 1) / len(chunks))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run, chunk) for chunk in chunks]
            partials = []
            for i, fut in enumerate(futures):
                partials.append(fut.result())
                if progress is not None:
                    progress((i + 1) / len(futures))

    # combine per-chunk sums in ascending chunk order, again compensated
    s = 0.0
    comp = 0.0
    for p in partials:
        t = s + p
        if abs(s) >= abs(p):
            comp += (s - t) + p
        else:
            comp += (p - t) + s
        s = t
    delta_e = 8.0 * math.pi * G_NEWTON * (s + comp)
    return CollapseResult.from_delta_e(delta_e, lat.n_atoms, term_count)


# ---------------------------------------------------------------------------
# brute-force oracle: direct double sum over atom positions

@njit(cache=True, nogil=True)
def _brute_row_sums(pos, mass, rad2, r0s, ds, uniform):
    """Per-atom row sums of the double sum, for a whole (d, r0) grid at once.

    Pair geometry is computed once per (i, j) and shared across the grid;
    each entry still is the plain direct sum, independent of any lattice
    structure.  Returns an (N, len(ds), len(r0s)) array of row sums.
    """
    n = pos.shape[0]
    nk = r0s.shape[0]
    nd = ds.shape[0]
    dim = pos.shape[1]
    rows = np.zeros((n, nd, nk))
    inv_sqrt_pi = 1.0 / math.sqrt(math.pi)
    acc = np.zeros((nd, nk))
    t1 = np.empty(nk)
    re = np.empty(nk)
    half_inv_re = np.empty(nk)
    series_lim = np.empty(nk)
    small = np.empty(nk)
    for k in range(nk):
        re[k] = math.sqrt(r0s[k] * r0s[k] + rad2[0])
        half_inv_re[k] = 0.5 / re[k]
        series_lim[k] = _SERIES_SWITCH * re[k]
        small[k] = inv_sqrt_pi / re[k]
    drv = np.empty(dim)
    for i in range(n):
        for m in range(nd):
            for k in range(nk):
                acc[m, k] = 0.0
        # pairs (i, j) and (j, i) share the self distance |r|; their cross
        # distances are |d - r| and |d + r|, so both orders are folded into
        # one visit of j > i (the diagonal j == i handled by the j == i case)
        for j in range(i, n):
            r1sq = 0.0
            for c in range(dim):
                drv[c] = pos[i, c] - pos[j, c]
                r1sq += drv[c] * drv[c]
            r1 = math.sqrt(r1sq)
            inv_r1 = 1.0 / r1 if r1 > 0.0 else 0.0
            mm = mass[i] * mass[j]
            if not uniform:
                mean_r2 = 0.5 * (rad2[i] + rad2[j])
                for k in range(nk):
                    re[k] = math.sqrt(r0s[k] * r0s[k] + mean_r2)
                    half_inv_re[k] = 0.5 / re[k]
                    series_lim[k] = _SERIES_SWITCH * re[k]
                    small[k] = inv_sqrt_pi / re[k]
            for k in range(nk):
                if r1 < series_lim[k]:
                    t1[k] = (1.0 - r1sq / (12.0 * re[k] * re[k])) * small[k]
                else:
                    t1[k] = math.erf(r1 * half_inv_re[k]) * inv_r1
            for m in range(nd):
                r2msq = 0.0
                r2psq = 0.0
                for c in range(dim):
                    qm = ds[m, c] - drv[c]
                    qp = ds[m, c] + drv[c]
                    r2msq += qm * qm
                    r2psq += qp * qp
                r2m = math.sqrt(r2msq)
                inv_r2m = 1.0 / r2m if r2m > 0.0 else 0.0
                for k in range(nk):
                    if r2m < series_lim[k]:
                        t2 = (1.0 - r2msq / (12.0 * re[k] * re[k])) * small[k]
                    else:
                        t2 = math.erf(r2m * half_inv_re[k]) * inv_r2m
                    acc[m, k] += mm * (t1[k] - t2)
                if j > i:
                    r2p = math.sqrt(r2psq)
                    inv_r2p = 1.0 / r2p if r2p > 0.0 else 0.0
                    for k in range(nk):
                        if r2p < series_lim[k]:
                            t2 = (1.0 - r2psq / (12.0 * re[k] * re[k])) \
                                * small[k]
                        else:
                            t2 = math.erf(r2p * half_inv_re[k]) * inv_r2p
                        acc[m, k] += mm * (t1[k] - t2)
        for m in range(nd):
            for k in range(nk):
                rows[i, m, k] = acc[m, k]
    return rows


def _neumaier_total(values):
    s = 0.0
    comp = 0.0
    for v in values:
        t = s + v
        if abs(s) >= abs(v):
            comp += (s - t) + v
        else:
            comp += (v - t) + s
        s = t
    return s + comp


def delta_e_brute_grid(lat, d_values, r0_values, *, cap=BRUTE_CAP, force=False,
                       perm=None):
    """Direct O(N^2) evaluation over a whole (d, r0) grid, sharing pair
    geometry across every grid point.

    Returns a list (one per d) of lists (one per r0) of CollapseResult.
    `perm` optionally permutes the atom enumeration order (used to
    demonstrate summation-order robustness).
    """
    n = lat.n_atoms
    if n > cap and not force:
        raise BruteForceCapError(
            f"N={n} exceeds the brute-force cap of {cap} (quadratic cost, "
            f"{n * n:.2g} pairs); pass force=True to override"
        )
    pos, mass, rad2 = lat.atom_positions()
    if perm is not None:
        pos, mass, rad2 = pos[perm], mass[perm], rad2[perm]
    ds = np.asarray(d_values, dtype=float)
    if ds.ndim != 2 or ds.shape[1] != lat.dimension:
        raise ValueError("separation vectors must have shape (n_d, dimension)")
    r0s = np.asarray(r0_values, dtype=float)
    uniform = bool(np.all(rad2 == rad2[0]))
    rows = _brute_row_sums(pos, mass, rad2, r0s, ds, uniform)
    results = []
    for m in range(ds.shape[0]):
        per_d = []
        for k in range(len(r0s)):
            delta_e = 8.0 * math.pi * G_NEWTON * _neumaier_total(rows[:, m, k])
            per_d.append(CollapseResult.from_delta_e(delta_e, n, n * n))
        results.append(per_d)
    return results


def delta_e_brute_sweep(lat, d, r0_values, *, cap=BRUTE_CAP, force=False, perm=None):
    """Direct O(N^2) evaluation for a whole r0 grid at one separation.

    Returns one CollapseResult per r0 value.
    """
    dvec = np.asarray(d, dtype=float)
    if dvec.shape != (lat.dimension,):
        raise ValueError("separation vector dimension mismatch")
    return delta_e_brute_grid(
        lat, dvec[None, :], r0_values, cap=cap, force=force, perm=perm
    )[0]


def delta_e_brute(lat, cfg, *, cap=BRUTE_CAP, force=False, perm=None):
    """Direct O(N^2) double sum over explicit atom positions (oracle path)."""
    if len(cfg.d) != lat.dimension:
        raise ValueError(
            f"separation vector has {len(cfg.d)} components for a "
            f"{lat.dimension}D lattice"
        )
    return delta_e_brute_sweep(
        lat, cfg.d, [cfg.r0], cap=cap, force=force, perm=perm
    )[0]
