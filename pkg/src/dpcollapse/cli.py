"""Command-line front end: sweeps, bound tables, oracle checks, benchmarks.

All physics lives in the library modules; this file only parses run configs
(JSON plus flag overrides, every length with an explicit unit suffix), drives
the kernels and serialises CSV.  Exit codes: 0 run complete, 10 sweep found
no tau_obs crossing (a result, not an error), 2 config error, 3 term-budget
refusal.
"""

import csv
import json
import math
import sys
import time

import click
import numpy as np

from . import analytics, dynamics, kernel, lattice
from .constants import TAU_OBS
from .units import UnitError, parse_length

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_NO_CROSSING = 10

CSV_HEADER = [
    "r0_m", "r_eff_m", "n_atoms", "d_m", "delta_e_J", "tau_s",
    "tau_obs_ratio", "bound_lower_J", "bound_upper_J", "wall_ms", "term_count",
]

BENCH_HEADER = ["n_atoms", "method", "wall_ms", "term_count"]

COLORED_HEADER = [
    "omega_c_rad_s", "delta_e_J", "t_s", "g_s", "tau_white_s",
    "tau_colored_s", "t_star_s",
]

COHERENCE_HEADER = [
    "t_s", "k1", "k2", "k3", "coherence_sum", "coherence_neglect_h", "tau_white_s",
]


class ConfigError(Exception):
    pass


def _fmt(value):
    if value is None or value == "":
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row.get(col)) for col in header])


def read_csv(path, expected_header):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigError(f"{path}: empty CSV") from None
        if header != expected_header:
            raise ConfigError(
                f"{path}: unexpected header {header}; expected {expected_header}"
            )
        rows = []
        for raw in reader:
            rows.append({
                col: (None if cell == "" else float(cell))
                for col, cell in zip(header, raw)
            })
        return rows


def load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _get(cfg, section, key, default=None):
    return cfg.get(section, {}).get(key, default)


def _length(cfg, section, key, default=None):
    raw = _get(cfg, section, key)
    if raw is None:
        if default is not None:
            return default
        raise ConfigError(f"missing required field {section}.{key}")
    try:
        return parse_length(raw)
    except UnitError as exc:
        raise ConfigError(f"{section}.{key}: {exc}") from exc


def build_lattice_from_config(cfg):
    preset = _get(cfg, "lattice", "preset")
    custom = _get(cfg, "lattice", "custom")
    if custom is not None:
        return _build_custom_lattice(custom)
    if preset is None:
        raise ConfigError("missing required field lattice.preset")
    n1 = int(_get(cfg, "lattice", "n1", 1))
    n2 = int(_get(cfg, "lattice", "n2", n1))
    try:
        if preset == "graphene":
            return lattice.build_graphene_sheet(n1, n2)
        if preset == "square":
            a = _length(cfg, "lattice", "a")
            m = _get(cfg, "lattice", "mass_kg")
            if m is None:
                raise ConfigError("missing required field lattice.mass_kg")
            return lattice.build_square_lattice(n1, n2, a, float(m))
        if preset == "cubic":
            a = _length(cfg, "lattice", "a")
            m = _get(cfg, "lattice", "mass_kg")
            if m is None:
                raise ConfigError("missing required field lattice.mass_kg")
            n3 = int(_get(cfg, "lattice", "n3", n1))
            return lattice.build_cubic_lattice(n1, n2, n3, a, float(m))
        if preset == "stacked-graphene":
            n3 = int(_get(cfg, "lattice", "n3", 1))
            interlayer = _length(
                cfg, "lattice", "interlayer", lattice.GRAPHITE_INTERLAYER
            )
            return lattice.build_stacked_graphene(n1, n2, n3, interlayer)
    except ValueError as exc:
        raise ConfigError(f"lattice: {exc}") from exc
    raise ConfigError(
        f"unknown lattice.preset {preset!r}; "
        "expected graphene, square, cubic or stacked-graphene"
    )


def _build_custom_lattice(custom):
    try:
        vecs = tuple(
            tuple(parse_length(x) for x in v) for v in custom["primitive_vectors"]
        )
        basis = tuple(
            lattice.BasisAtom(
                offset=tuple(parse_length(x) for x in atom["offset"]),
                mass=float(atom["mass_kg"]),
                radius=parse_length(atom.get("radius", "0A")),
            )
            for atom in custom["basis"]
        )
        return lattice.Lattice(
            dimension=int(custom["dimension"]),
            primitive_vectors=vecs,
            basis=basis,
            extents=tuple(int(n) for n in custom["extents"]),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"lattice.custom: missing or malformed field ({exc})") from exc
    except (UnitError, ValueError) as exc:
        raise ConfigError(f"lattice.custom: {exc}") from exc


def resolve_d(cfg, lat):
    """Resolve superposition.d ("4L" multiples or a suffixed length) into a
    separation vector along the configured axis (default: along a1)."""
    raw = _get(cfg, "superposition", "d")
    if raw is None:
        raise ConfigError("missing required field superposition.d")
    text = str(raw).strip()
    if text.endswith("L"):
        try:
            mult = float(text[:-1]) if text[:-1] else 1.0
        except ValueError:
            raise ConfigError(f"superposition.d: cannot parse multiplier in {raw!r}") from None
        d_norm = mult * lat.longest_side
    else:
        try:
            d_norm = parse_length(text)
        except UnitError as exc:
            raise ConfigError(f"superposition.d: {exc}") from exc
    if d_norm <= 0:
        raise ConfigError(f"superposition.d must be positive, got {raw!r}")
    axis = int(_get(cfg, "superposition", "d_axis", 0))
    if not 0 <= axis < lat.dimension:
        raise ConfigError(f"superposition.d_axis must be in [0, {lat.dimension})")
    d = [0.0] * lat.dimension
    d[axis] = d_norm
    return tuple(d)


def r0_grid(cfg):
    r0_min = _length(cfg, "sweep", "r0_min")
    r0_max = _length(cfg, "sweep", "r0_max")
    points = int(_get(cfg, "sweep", "points", 2))
    if not r0_min < r0_max:
        raise ConfigError(f"sweep.r0_min must be < sweep.r0_max")
    if points < 2:
        raise ConfigError("sweep.points must be >= 2")
    return np.logspace(math.log10(r0_min), math.log10(r0_max), points)


def _exec_params(cfg, workers, allow_long):
    if workers is None:
        workers = int(_get(cfg, "exec", "workers", 1))
    if allow_long is None:
        allow_long = bool(_get(cfg, "exec", "allow_long", False))
    budget = float(_get(cfg, "exec", "term_budget", kernel.DEFAULT_TERM_BUDGET))
    return workers, allow_long, budget


def _mean_sq_radius(lat):
    return sum(a.radius**2 for a in lat.basis) / len(lat.basis)


def _maybe_bracket(lat, d_norm, r_eff):
    try:
        plate = analytics.square_plate_summary(lat)
        return analytics.bound_bracket(plate, d_norm, r_eff)
    except ValueError:
        return None


def _ticker(enabled):
    if not enabled:
        return None
    state = {"last": -1}

    def cb(frac):
        pct = int(frac * 100)
        if pct != state["last"]:
            state["last"] = pct
            print(f"\r{pct:3d}%", end="", file=sys.stderr, flush=True)

    return cb


@click.group()
def main():
    """Collapse-time engine for superposed finite crystals."""


def _config_option(fn):
    return click.option(
        "--config", "-c", "config_path", type=click.Path(exists=True),
        help="JSON run config; flags override file values.",
    )(fn)


@main.command()
@_config_option
@click.option("--out", type=click.Path(), default=None, help="Output CSV path.")
@click.option("--workers", type=int, default=None)
@click.option("--allow-long", is_flag=True, default=None)
@click.option("--from-csv", type=click.Path(exists=True), default=None,
              help="Re-emit an existing sweep CSV instead of recomputing.")
def sweep(config_path, out, workers, allow_long, from_csv):
    """Sweep the smearing length R0 and report tau against tau_obs."""
    try:
        cfg = load_config(config_path)
        out = out or _get(cfg, "out", "path", "sweep.csv")
        if from_csv is not None:
            rows = read_csv(from_csv, CSV_HEADER)
            write_csv(out, CSV_HEADER, rows)
            taus = [r["tau_s"] for r in rows if r["tau_s"] is not None]
        else:
            lat = build_lattice_from_config(cfg)
            d = resolve_d(cfg, lat)
            grid = r0_grid(cfg)
            workers, allow_long, budget = _exec_params(cfg, workers, allow_long)
            d_norm = math.hypot(*d)
            msr = _mean_sq_radius(lat)
            ticker = _ticker(lattice.domain_entry_count(lat) * len(grid) > 1e9)
            rows = []
            for r0 in grid:
                scfg = kernel.SuperpositionConfig(d=d, r0=float(r0))
                t0 = time.perf_counter()
                res = kernel.delta_e_fast(
                    lat, scfg, workers=workers,
                    term_budget=budget, allow_long=allow_long, progress=ticker,
                )
                wall_ms = (time.perf_counter() - t0) * 1e3
                r_eff = scfg.r_eff(msr)
                bracket = _maybe_bracket(lat, d_norm, r_eff)
                rows.append({
                    "r0_m": r0, "r_eff_m": r_eff, "n_atoms": res.n_atoms,
                    "d_m": d_norm, "delta_e_J": res.delta_e, "tau_s": res.tau,
                    "tau_obs_ratio": res.tau / TAU_OBS,
                    "bound_lower_J": bracket.lower if bracket else None,
                    "bound_upper_J": bracket.upper if bracket else None,
                    "wall_ms": None, "term_count": res.term_count,
                })
                if ticker:
                    print(file=sys.stderr)
            write_csv(out, CSV_HEADER, rows)
            taus = [r["tau_s"] for r in rows]
    except ConfigError as exc:
        raise SystemExit(_config_fail(exc))
    except kernel.TermBudgetError as exc:
        click.echo(f"refused: {exc}", err=True)
        raise SystemExit(EXIT_BUDGET)
    crossing = any(t <= TAU_OBS for t in taus)
    click.echo(
        f"wrote {out}: min tau = {min(taus):.4g} s, "
        + ("crossing below tau_obs exists" if crossing
           else "all tau > tau_obs (classicality not guaranteed)")
    )
    raise SystemExit(EXIT_OK if crossing else EXIT_NO_CROSSING)


def _config_fail(exc):
    click.echo(f"config error: {exc}", err=True)
    return EXIT_CONFIG


@main.command("oracle-check")
@_config_option
@click.option("--points", type=int, default=5, help="R0 grid points.")
@click.option("--threshold", type=float, default=1e-10, show_default=True)
def oracle_check(config_path, points, threshold):
    """Compare the fast weighted sum against the O(N^2) brute-force oracle."""
    try:
        cfg = load_config(config_path)
        lat = build_lattice_from_config(cfg)
        d = resolve_d(cfg, lat)
        grid = r0_grid(cfg)[:points] if "sweep" in cfg else np.logspace(-10, -7, points)
        brute = kernel.delta_e_brute_sweep(lat, d, grid)
    except ConfigError as exc:
        raise SystemExit(_config_fail(exc))
    except kernel.BruteForceCapError as exc:
        click.echo(f"refused: {exc}", err=True)
        raise SystemExit(EXIT_BUDGET)
    worst = 0.0
    for r0, bres in zip(grid, brute):
        fres = kernel.delta_e_fast(lat, kernel.SuperpositionConfig(d=d, r0=float(r0)))
        rel = abs(fres.delta_e - bres.delta_e) / abs(bres.delta_e)
        worst = max(worst, rel)
        click.echo(f"r0 = {r0:.4g} m: rel. deviation = {rel:.3e}")
    ok = worst <= threshold
    click.echo(f"max rel. deviation {worst:.3e} ({'PASS' if ok else 'FAIL'} at {threshold:g})")
    raise SystemExit(EXIT_OK if ok else 1)


@main.command("bench-scaling")
@click.option("--out", type=click.Path(), default="bench.csv")
@click.option("--fast-n", default="1e4,1e5,1e6,1e7,1e8",
              help="Comma-separated atom counts for the fast path.")
@click.option("--brute-n", default=None,
              help="Comma-separated atom counts for the brute path (optional).")
def bench_scaling(out, fast_n, brute_n):
    """Wall-time scaling of both summation routes on graphene sheets."""
    rows = []
    for label, spec in (("fast", fast_n), ("brute", brute_n)):
        if not spec:
            continue
        n_values = [float(x) for x in spec.split(",")]
        for n_target in n_values:
            n_side = max(1, round(math.sqrt(n_target / 2.0)))
            lat = lattice.build_graphene_sheet(n_side, n_side)
            d = (4.0 * lat.longest_side, 0.0)
            scfg = kernel.SuperpositionConfig(d=d, r0=1e-10)
            if label == "fast":
                kernel.delta_e_fast(lattice.build_graphene_sheet(2, 2),
                                    kernel.SuperpositionConfig(d=d, r0=1e-10))
                t0 = time.perf_counter()
                res = kernel.delta_e_fast(lat, scfg, allow_long=True)
            else:
                kernel.delta_e_brute(lattice.build_graphene_sheet(2, 2),
                                     kernel.SuperpositionConfig(d=d, r0=1e-10))
                t0 = time.perf_counter()
                res = kernel.delta_e_brute(lat, scfg)
            wall_ms = (time.perf_counter() - t0) * 1e3
            rows.append({"n_atoms": res.n_atoms, "method": label,
                         "wall_ms": wall_ms, "term_count": res.term_count})
            click.echo(f"{label}: N = {res.n_atoms}, {wall_ms:.3g} ms", err=True)
    write_csv(out, BENCH_HEADER, rows)
    for label in ("fast", "brute"):
        pts = [(r["n_atoms"], r["wall_ms"]) for r in rows if r["method"] == label]
        if len(pts) >= 2:
            slope = np.polyfit(*np.log10(np.array(pts).T), 1)[0]
            click.echo(f"{label} log-log slope: {slope:.3f}")
    click.echo(f"wrote {out}")


@main.command()
@_config_option
@click.option("--out", type=click.Path(), default=None)
@click.option("--refine/--no-refine", default=True,
              help="Monotonicity refinement of the lower bounds.")
@click.option("--numerics/--no-numerics", default=True,
              help="Add the numerical energy column at desk scale.")
def bounds(config_path, out, refine, numerics):
    """Analytic bound brackets over an R_eff grid for a square plate."""
    try:
        cfg = load_config(config_path)
        out = out or _get(cfg, "out", "path", "bounds.csv")
        lat = build_lattice_from_config(cfg)
        try:
            plate = analytics.square_plate_summary(lat)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        d = resolve_d(cfg, lat)
        d_norm = math.hypot(*d)
        grid = r0_grid(cfg)
        brackets = [analytics.bound_bracket(plate, d_norm, float(r)) for r in grid]
        if refine:
            edges = (plate.L, 0.5 * (d_norm - plate.L))
            brackets = analytics.refine_lower_bounds(brackets, edges=edges)
        desk_scale = numerics and lattice.domain_entry_count(lat) * len(grid) <= 2e8
        rows = []
        for r_eff, bracket in zip(grid, brackets):
            row = {
                "r0_m": r_eff, "r_eff_m": r_eff, "n_atoms": lat.n_atoms,
                "d_m": d_norm, "bound_lower_J": bracket.lower,
                "bound_upper_J": bracket.upper,
            }
            if desk_scale:
                res = kernel.delta_e_fast(
                    lat, kernel.SuperpositionConfig(d=d, r0=float(r_eff))
                )
                row.update({
                    "delta_e_J": res.delta_e, "tau_s": res.tau,
                    "tau_obs_ratio": res.tau / TAU_OBS,
                    "term_count": res.term_count,
                })
            rows.append(row)
        write_csv(out, CSV_HEADER, rows)
    except ConfigError as exc:
        raise SystemExit(_config_fail(exc))
    click.echo(f"wrote {out}")


@main.command()
@_config_option
@click.option("--out", type=click.Path(), default=None)
@click.option("--delta-e-J", "delta_e_override", type=float, default=None,
              help="Skip the lattice computation and use this energy gap.")
@click.option("--omega-c", default=None,
              help="Comma-separated cutoff grid in rad/s (overrides config).")
def colored(config_path, out, delta_e_override, omega_c):
    """Colored-noise timescales over an Omega_C grid."""
    try:
        cfg = load_config(config_path)
        out = out or _get(cfg, "out", "path", "colored.csv")
        if delta_e_override is not None:
            delta_e = delta_e_override
        else:
            lat = build_lattice_from_config(cfg)
            d = resolve_d(cfg, lat)
            r0 = _length(cfg, "sweep", "r0_min")
            delta_e = kernel.delta_e_fast(
                lat, kernel.SuperpositionConfig(d=d, r0=r0)
            ).delta_e
        if omega_c is not None:
            grid = [float(x) for x in omega_c.split(",")]
        else:
            raw = _get(cfg, "noise", "omega_c")
            if raw is None:
                raise ConfigError("missing required field noise.omega_c")
            grid = [math.inf if raw == "white" else float(raw)]
    except ConfigError as exc:
        raise SystemExit(_config_fail(exc))
    base = dynamics.tau_white(delta_e)
    rows = []
    for w in grid:
        noise = dynamics.ColoredNoiseModel(omega_c=w)
        t_star = dynamics.colored_collapse_time(delta_e, noise)
        rows.append({
            "omega_c_rad_s": w, "delta_e_J": delta_e, "t_s": base,
            "g_s": dynamics.g_exponential(base, noise),
            "tau_white_s": base,
            "tau_colored_s": dynamics.tau_colored(delta_e, base, noise),
            "t_star_s": t_star,
        })
    write_csv(out, COLORED_HEADER, rows)
    click.echo(f"wrote {out}")


@main.command()
@_config_option
@click.option("--out", type=click.Path(), default=None)
@click.option("--t-frac", default="1e-3",
              help="Comma-separated times as fractions of M sigma^2 / hbar.")
def coherence(config_path, out, t_frac):
    """Coherence elements of the two-Gaussian superposition over time."""
    try:
        cfg = load_config(config_path)
        out = out or _get(cfg, "out", "path", "coherence.csv")
        lat = build_lattice_from_config(cfg)
        d = resolve_d(cfg, lat)
        sigma = _length(cfg, "superposition", "sigma")
        r0 = _length(cfg, "sweep", "r0_min")
        res = kernel.delta_e_fast(lat, kernel.SuperpositionConfig(d=d, r0=r0))
        mass = lat.total_mass()
        d_norm = math.hypot(*d)
        fracs = [float(x) for x in t_frac.split(",")]
    except ConfigError as exc:
        raise SystemExit(_config_fail(exc))
    spread = mass * sigma**2 / dynamics.HBAR
    rows = []
    for frac in fracs:
        ccfg = dynamics.CoherenceConfig(
            total_mass=mass, sigma=sigma, d=d_norm,
            delta_e=res.delta_e, t=frac * spread,
        )
        k1, k2, k3, total = dynamics.coherence_elements(ccfg)
        rows.append({
            "t_s": ccfg.t, "k1": k1, "k2": k2, "k3": k3,
            "coherence_sum": total,
            "coherence_neglect_h": dynamics.coherence_neglect_h(ccfg),
            "tau_white_s": dynamics.tau_white(res.delta_e),
        })
    write_csv(out, COHERENCE_HEADER, rows)
    click.echo(f"wrote {out}")


if __name__ == "__main__":
    main()
