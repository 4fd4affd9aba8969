"""CLI behavior: config parsing, CSV contracts, exit codes, determinism."""

import json
import math

import pytest
from click.testing import CliRunner

from dpcollapse.cli import (
    CSV_HEADER,
    EXIT_BUDGET,
    EXIT_CONFIG,
    EXIT_NO_CROSSING,
    EXIT_OK,
    main,
    read_csv,
)
from dpcollapse.units import UnitError, parse_length


def test_parse_length_units():
    assert parse_length("4A") == pytest.approx(4e-10)
    assert parse_length("2.5nm") == pytest.approx(2.5e-9)
    assert parse_length("3um") == pytest.approx(3e-6)
    assert parse_length("0.1mm") == pytest.approx(1e-4)
    assert parse_length("1e-6 m") == pytest.approx(1e-6)


def test_parse_length_rejects_bare_numbers():
    for bad in ("4", "1e-10", "", "4 Angstrom", "nm", "4 kg"):
        with pytest.raises(UnitError):
            parse_length(bad)


def _write_config(path, **overrides):
    cfg = {
        "lattice": {"preset": "graphene", "n1": 6, "n2": 6},
        "superposition": {"d": "4L"},
        "sweep": {"r0_min": "1A", "r0_max": "100A", "points": 5},
    }
    for key, val in overrides.items():
        cfg[key] = val
    path.write_text(json.dumps(cfg))
    return path


def test_sweep_csv_contract(tmp_path):
    cfg = _write_config(tmp_path / "run.json")
    out = tmp_path / "sweep.csv"
    runner = CliRunner()
    result = runner.invoke(main, ["sweep", "-c", str(cfg), "--out", str(out)],
                           standalone_mode=False)
    assert result.exit_code in (EXIT_OK, EXIT_NO_CROSSING)
    rows = read_csv(out, CSV_HEADER)
    assert len(rows) == 5
    assert out.read_text().splitlines()[0] == ",".join(CSV_HEADER)
    for row in rows:
        assert row["n_atoms"] == 72
        assert row["delta_e_J"] > 0
        assert row["tau_s"] == pytest.approx(
            1.054571817e-34 / row["delta_e_J"], rel=1e-12
        )
        assert row["tau_obs_ratio"] == pytest.approx(row["tau_s"] / 0.01, rel=1e-12)
    # R0 grid is log-spaced between the configured bounds
    assert rows[0]["r0_m"] == pytest.approx(1e-10)
    assert rows[-1]["r0_m"] == pytest.approx(1e-8)


def test_sweep_no_crossing_exit_code(tmp_path):
    """A tiny lattice never collapses within tau_obs: exit code 10."""
    cfg = _write_config(tmp_path / "run.json")
    out = tmp_path / "sweep.csv"
    result = CliRunner().invoke(main, ["sweep", "-c", str(cfg), "--out", str(out)])
    assert result.exit_code == EXIT_NO_CROSSING


def test_sweep_is_byte_deterministic(tmp_path):
    cfg = _write_config(tmp_path / "run.json")
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    runner = CliRunner()
    runner.invoke(main, ["sweep", "-c", str(cfg), "--out", str(out1)])
    runner.invoke(main, ["sweep", "-c", str(cfg), "--out", str(out2)])
    assert out1.read_bytes() == out2.read_bytes()


def test_sweep_from_csv_reemits(tmp_path):
    cfg = _write_config(tmp_path / "run.json")
    out = tmp_path / "sweep.csv"
    runner = CliRunner()
    runner.invoke(main, ["sweep", "-c", str(cfg), "--out", str(out)])
    re_out = tmp_path / "re.csv"
    result = runner.invoke(
        main, ["sweep", "--from-csv", str(out), "--out", str(re_out)]
    )
    assert result.exit_code in (EXIT_OK, EXIT_NO_CROSSING)
    assert re_out.read_bytes() == out.read_bytes()


def test_config_error_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"lattice": {"preset": "nonsense"}}))
    result = CliRunner().invoke(main, ["sweep", "-c", str(bad)])
    assert result.exit_code == EXIT_CONFIG
    missing_unit = _write_config(
        tmp_path / "nounit.json",
        sweep={"r0_min": "1", "r0_max": "100A", "points": 3},
    )
    result = CliRunner().invoke(main, ["sweep", "-c", str(missing_unit)])
    assert result.exit_code == EXIT_CONFIG


def test_budget_refusal_exit_code(tmp_path):
    cfg = _write_config(tmp_path / "run.json", exec={"term_budget": 10})
    result = CliRunner().invoke(
        main, ["sweep", "-c", str(cfg), "--out", str(tmp_path / "x.csv")]
    )
    assert result.exit_code == EXIT_BUDGET


def test_oracle_check_passes(tmp_path):
    cfg = _write_config(tmp_path / "run.json")
    result = CliRunner().invoke(main, ["oracle-check", "-c", str(cfg)])
    assert result.exit_code == EXIT_OK
    assert "PASS" in result.output


def test_bounds_command(tmp_path):
    cfg = _write_config(
        tmp_path / "run.json",
        lattice={"preset": "square", "n1": 30, "n2": 30,
                 "a": "1A", "mass_kg": 2e-26},
        superposition={"d": "50L"},
        sweep={"r0_min": "0.3A", "r0_max": "300A", "points": 12},
    )
    out = tmp_path / "bounds.csv"
    result = CliRunner().invoke(main, ["bounds", "-c", str(cfg), "--out", str(out)])
    assert result.exit_code == 0
    rows = read_csv(out, CSV_HEADER)
    assert len(rows) == 12
    for row in rows:
        assert row["bound_lower_J"] is not None
        assert row["bound_upper_J"] is not None
        assert row["delta_e_J"] > 0  # desk scale includes numerics


def test_bounds_rejects_non_square(tmp_path):
    cfg = _write_config(tmp_path / "run.json")  # graphene
    result = CliRunner().invoke(
        main, ["bounds", "-c", str(cfg), "--out", str(tmp_path / "b.csv")]
    )
    assert result.exit_code == EXIT_CONFIG


def test_colored_command(tmp_path):
    out = tmp_path / "colored.csv"
    result = CliRunner().invoke(main, [
        "colored", "--delta-e-J", "1e-32",
        "--omega-c", "1e2,1e4,1e6", "--out", str(out),
    ])
    assert result.exit_code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 4
    header = lines[0].split(",")
    rows = [dict(zip(header, (float(x) for x in ln.split(",")))) for ln in lines[1:]]
    base = 1.054571817e-34 / 1e-32
    t_stars = [r["t_star_s"] for r in rows]
    assert all(t > base for t in t_stars)
    assert all(a > b for a, b in zip(t_stars, t_stars[1:]))


def test_coherence_command(tmp_path):
    cfg = _write_config(
        tmp_path / "run.json",
        superposition={"d": "4L", "sigma": "1A"},
    )
    out = tmp_path / "coh.csv"
    result = CliRunner().invoke(main, [
        "coherence", "-c", str(cfg), "--t-frac", "1e-4,1e-3", "--out", str(out),
    ])
    assert result.exit_code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 3


def test_float_serialisation_roundtrips(tmp_path):
    cfg = _write_config(tmp_path / "run.json")
    out = tmp_path / "sweep.csv"
    CliRunner().invoke(main, ["sweep", "-c", str(cfg), "--out", str(out)])
    rows = read_csv(out, CSV_HEADER)
    # %.17g guarantees exact float round-trip
    raw = out.read_text().splitlines()[1].split(",")
    assert float(raw[4]) == rows[0]["delta_e_J"]


def test_bench_scaling_writes_method_column(tmp_path):
    out = tmp_path / "bench.csv"
    result = CliRunner().invoke(main, [
        "bench-scaling", "--out", str(out),
        "--fast-n", "1e2,1e3", "--brute-n", "1e2",
    ])
    assert result.exit_code == 0, result.output
    lines = out.read_text().splitlines()
    assert lines[0] == "n_atoms,method,wall_ms,term_count"
    methods = [ln.split(",")[1] for ln in lines[1:]]
    assert methods == ["fast", "fast", "brute"]
