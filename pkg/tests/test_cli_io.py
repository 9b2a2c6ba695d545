import filecmp
import json
import math
import os

import numpy as np
import pytest

from breather_forge import decay_rate_fit
from breather_forge.cli_io import (ConfigError, ConfigWarning,
                                   field_from_spectrum_csv, load_manifest,
                                   parse_config, run_command,
                                   serialize_config)

MINIMAL = "omega = 2.2\n"

FULL = """\
# flagship configuration
omega = 2.2
grid.n_sites = 64
grid.n_harmonics = 16
potential.quartic = 1.0
solver.parity = odd
solver.seed_amplitude = 0.8
solver.seed_width = 1.0
"""


def test_parse_minimal_document_applies_defaults():
    config = parse_config(MINIMAL)
    assert config.grid.omega == 2.2
    assert config.grid.n_sites == 64
    assert config.grid.n_harmonics == 16
    assert config.strategy == "hybrid"
    assert config.seed == (None, 1.0)


def test_parse_empty_document_requires_omega():
    with pytest.raises(ConfigError, match="omega"):
        parse_config("")


def test_parse_warns_inside_phonon_band():
    with pytest.warns(ConfigWarning, match="band edge"):
        parse_config("omega = 1.0\n")


def test_parse_rejects_unknown_keys_with_line_numbers():
    with pytest.raises(ConfigError, match="line 3"):
        parse_config("omega = 2.2\n\nsolver.turbo = yes\n")


def test_parse_rejects_duplicates_and_ranges():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config("omega = 2.2\nomega = 2.3\n")
    with pytest.raises(ConfigError, match="even"):
        parse_config("omega = 2.2\ngrid.n_sites = 63\n")
    with pytest.raises(ConfigError, match="parity"):
        parse_config("omega = 2.2\nsolver.parity = sideways\n")
    with pytest.raises(ConfigError, match="positive"):
        parse_config("omega = -1.0\n")


def test_config_round_trip_fixpoint():
    config = parse_config(FULL)
    text = serialize_config(config)
    assert parse_config(text) == config
    assert serialize_config(parse_config(text)) == text


def test_bounds_command_prints_exact_values(capsys):
    rc = run_command(["bounds", "--omega2", "12", "--lambda", "0", "--beta", "1"])
    out = capsys.readouterr().out
    assert rc == 0
    assert repr((4.0 / 3.0) ** 0.5) in out
    assert repr((4.0 / 3.0) ** (1.0 / 3.0)) in out
    assert "nonres_ok = True" in out


def test_bounds_command_mixed_potential_exit_code(capsys):
    rc = run_command(["bounds", "--omega2", "12", "--cubic", "1", "--quartic", "1"])
    assert rc == 3


def test_usage_errors_exit_one():
    assert run_command(["frobnicate"]) == 1
    assert run_command(["solve", "--omega"]) == 1


def test_solve_harmonic_exits_two(tmp_path, capsys):
    rc = run_command(["solve", "--omega", "2.5", "--out", str(tmp_path / "out")])
    assert rc == 2
    assert "collapsed_to_zero" in capsys.readouterr().out


def test_solve_resonant_exits_three(tmp_path, capsys):
    rc = run_command(["solve", "--omega", "1.5", "--quartic", "1",
                      "--out", str(tmp_path / "out")])
    assert rc == 3


@pytest.fixture(scope="module")
def solved_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("solve")
    conf = out / "bf.conf"
    conf.write_text(FULL)
    rc = run_command(["solve", "--config", str(conf), "--out", str(out / "run"),
                      "--dump-nu"])
    assert rc == 0
    return out / "run"


def test_artifacts_present_and_csv_well_formed(solved_dir):
    names = ["manifest.json", "trace.csv", "profile.csv", "samples.csv",
             "spectrum.csv", "decay.csv", "nu_table.csv"]
    for name in names:
        assert (solved_dir / name).exists()
    raw = (solved_dir / "profile.csv").read_bytes()
    first, rest = raw.split(b"\r\n", 1)
    assert first == b"n,max_abs_amplitude,log_amplitude"
    assert rest  # data rows follow, RFC-style line endings throughout


def test_manifest_round_trip(solved_dir):
    manifest = load_manifest(str(solved_dir / "manifest.json"))
    assert manifest["schema_version"] == 1
    rebuilt = json.loads(json.dumps(manifest))
    assert rebuilt == manifest
    assert manifest["result"]["status"] == "converged"
    assert set(manifest["artifact_paths"]) >= {"trace.csv", "profile.csv",
                                               "samples.csv", "spectrum.csv",
                                               "decay.csv"}


def test_spectrum_reload_is_exact(solved_dir, flagship_result):
    config = parse_config(load_manifest(str(solved_dir / "manifest.json"))["config_echo"])
    field = field_from_spectrum_csv(str(solved_dir / "spectrum.csv"), config.grid)
    assert np.array_equal(field.coeffs, flagship_result.field.coeffs)


def test_decay_file_slope_matches_fit(solved_dir, flagship_result):
    lam_eff, _ = decay_rate_fit(flagship_result)
    rows = (solved_dir / "decay.csv").read_text().strip().splitlines()[1:]
    parsed = [tuple(float(v) for v in line.split(",")) for line in rows]
    finite = [(d, f) for d, _, f in parsed if math.isfinite(f)]
    (d1, f1), (d2, f2) = finite[0], finite[-1]
    slope = (f2 - f1) / (d2 - d1)
    assert slope == pytest.approx(-lam_eff, rel=1e-12)


def test_verify_passes_on_fresh_manifest(solved_dir, capsys):
    rc = run_command(["verify", "--manifest", str(solved_dir / "manifest.json")])
    out = capsys.readouterr().out
    assert rc == 0
    assert "FAIL" not in out
    assert "reproducible_trace: PASS" in out


def test_integrate_from_manifest(solved_dir, tmp_path, capsys):
    rc = run_command(["integrate", "--manifest", str(solved_dir / "manifest.json"),
                      "--periods", "3", "--steps-per-period", "256",
                      "--out", str(tmp_path)])
    assert rc == 0
    report = json.loads((tmp_path / "trajectory.json").read_text())
    assert report["period_return_error"] < 1e-3
    assert report["energy_drift"] < 1e-8


def test_zero_field_result_emits_valid_files(tmp_path):
    rc = run_command(["solve", "--omega", "2.5", "--out", str(tmp_path / "z")])
    assert rc == 2
    manifest = load_manifest(str(tmp_path / "z" / "manifest.json"))
    assert manifest["result"]["x0_norm"] <= 1e-8
    profile = (tmp_path / "z" / "profile.csv").read_text().splitlines()
    assert profile[0] == "n,max_abs_amplitude,log_amplitude"
    assert len(profile) == 1 + 64


def test_sweep_command(tmp_path, capsys):
    rc = run_command(["sweep", "--omega-from", "2.6", "--omega-to", "2.4",
                      "--steps", "3", "--quartic", "1", "--n-sites", "32",
                      "--harmonics", "8", "--seed-amplitude", "0.8",
                      "--out", str(tmp_path / "sw")])
    assert rc == 0
    lines = (tmp_path / "sw" / "sweep.csv").read_text().strip().splitlines()
    assert lines[0] == "omega,status,x0_norm,fp_residual"
    assert len(lines) == 4
    for idx in range(3):
        assert (tmp_path / "sw" / f"point_{idx:03d}" / "manifest.json").exists()


def test_two_runs_are_file_identical(tmp_path):
    conf = tmp_path / "small.conf"
    conf.write_text("omega = 2.6\ngrid.n_sites = 32\ngrid.n_harmonics = 8\n"
                    "potential.quartic = 1.0\nsolver.seed_amplitude = 0.8\n")
    assert run_command(["solve", "--config", str(conf), "--out", str(tmp_path / "a")]) == 0
    assert run_command(["solve", "--config", str(conf), "--out", str(tmp_path / "b")]) == 0
    for name in os.listdir(tmp_path / "a"):
        assert filecmp.cmp(tmp_path / "a" / name, tmp_path / "b" / name, shallow=False)
