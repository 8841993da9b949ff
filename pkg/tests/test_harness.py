"""Benchmark harness: config parsing, presets, reports, comparison, CLI."""

from __future__ import annotations

import numpy as np
import pytest

from wrkit.errors import (
    IncompatibleGrids,
    InconsistentSpecs,
    ParseError,
    UnknownKey,
    ValidationError,
)
from wrkit.grids import make_partition, make_time_grid
from wrkit.harness import (
    build_guesses,
    compare_methods,
    interface_error,
    load_config,
    preset_names,
    preset_text,
    run_experiment,
    with_out_dir,
)
from wrkit.harness.cli import main
from wrkit.methods import Method, WrConfig, dnwr_run, guess_grids, make_run_grids

from conftest import heat_problem

MINIMAL_HEAT = """\
model = heat1d
interval = 0, 5
partition = 0, 2.5, 5
dx = 0.05
dt = 0.02
T = 0.2
nu = 1
"""

TINY_WAVE = """\
model = wave1d
interval = 0, 5
partition = 0, 1, 1.5, 3, 4, 5
c = 1
dx = 0.02
dt = 0.02
T = 0.5
left = t2
right = t2exp
guess = t2
theta = 0.5
tol = 1e-10
"""


def test_minimal_config_defaults():
    spec = load_config(MINIMAL_HEAT)
    assert spec.model == "heat1d"
    assert spec.interval == (0.0, 5.0)
    assert spec.partition == (0.0, 2.5, 5.0)
    assert spec.n_subdomains == 2
    assert spec.nu == 1.0
    assert spec.config.method is Method.DNWR
    assert spec.config.theta_resolved == 0.5
    assert spec.config.tol == 1e-10
    assert spec.config.max_iters == 50
    assert spec.guess == "zero"
    assert spec.initial == "zero" and spec.left == "zero" and spec.right == "zero"
    assert spec.zero_data


def test_parse_error_reports_line_number():
    with pytest.raises(ParseError) as exc:
        load_config("model = heat1d\nnot a pair\n")
    assert exc.value.lineno == 2
    with pytest.raises(ParseError):
        load_config("model = heat1d\nmodel = wave1d\n")  # duplicate
    with pytest.raises(ParseError):
        load_config("= heat1d\n")


def test_unknown_key_rejected():
    with pytest.raises(UnknownKey):
        load_config(MINIMAL_HEAT + "colour = blue\n")


def test_validation_failures():
    with pytest.raises(ValidationError):
        load_config(MINIMAL_HEAT.replace("heat1d", "heat3d"))
    with pytest.raises(ValidationError):  # nu missing
        load_config(MINIMAL_HEAT.replace("nu = 1\n", ""))
    with pytest.raises(ValidationError):  # theta out of range
        load_config(MINIMAL_HEAT + "theta = 1.5\n")
    with pytest.raises(ValidationError):  # unknown method
        load_config(MINIMAL_HEAT + "method = magic\n")
    with pytest.raises(ValidationError):  # 2D-only guess on a 1D model
        load_config(MINIMAL_HEAT + "guess = tsin\n")
    with pytest.raises(ValidationError):  # boundary off the dx lattice
        load_config(MINIMAL_HEAT.replace("0, 2.5, 5", "0, 2.43, 5"))
    with pytest.raises(ValidationError):  # wave-only key on heat
        load_config(MINIMAL_HEAT + "c = 1\n")
    with pytest.raises(ValidationError):  # 2D-only key on 1D model
        load_config(MINIMAL_HEAT + "dy = 0.1\n")
    with pytest.raises(ValidationError):  # overlap only for classical Schwarz
        load_config(MINIMAL_HEAT + "overlap_cells = 2\n")
    with pytest.raises(ValidationError):  # robin_p only for Robin Schwarz
        load_config(MINIMAL_HEAT + "robin_p = 1\n")
    with pytest.raises(ValidationError):  # unknown data preset
        load_config(MINIMAL_HEAT + "left = bogus\n")
    with pytest.raises(ValidationError):  # CFL above one
        load_config(TINY_WAVE.replace("dx = 0.02", "dx = 0.01"))


def test_per_subdomain_dt_lengths():
    text = TINY_WAVE.replace("dt = 0.02", "dt = 0.02, 0.02, 0.02, 0.02, 0.02")
    spec = load_config(text)
    assert spec.dt_list() == (0.02,) * 5
    bad = TINY_WAVE.replace("dt = 0.02", "dt = 0.02, 0.02")
    with pytest.raises(ValidationError):
        load_config(bad)


def test_all_shipped_presets_validate():
    names = preset_names()
    assert len(names) >= 14
    for name in names:
        spec = load_config(preset_text(name))
        assert spec.label == name
    with pytest.raises(ValidationError):
        preset_text("fig_does_not_exist")


def test_random_guess_is_seeded_and_compatible():
    part = make_partition((0.0, 2.5, 5.0))
    tg = make_time_grid(1.0, 0.1)
    a = build_guesses("random(7)", (tg,), None)
    b = build_guesses("random(7)", (tg,), None)
    c = build_guesses("random(8)", (tg,), None)
    assert np.array_equal(a[0].samples, b[0].samples)
    assert not np.array_equal(a[0].samples, c[0].samples)
    assert a[0].samples[0] == 0.0  # compatible with zero initial data
    assert np.max(np.abs(a[0].samples)) <= 1.0
    with pytest.raises(ValidationError):
        build_guesses("random(x)", (tg,), None)


def test_t2_guess_samples():
    tg = make_time_grid(1.0, 0.25)
    (g,) = build_guesses("t2", (tg,), None)
    np.testing.assert_allclose(g.samples, tg.times**2, rtol=1e-15)


def run_tiny(tmp_path, text=MINIMAL_HEAT + "label = tiny\nguess = t2\n"):
    spec = load_config(text)
    return spec, run_experiment(spec, out_dir=str(tmp_path))


def test_run_experiment_writes_csv_and_manifest(tmp_path):
    spec, report = run_tiny(tmp_path)
    csv_file = tmp_path / "tiny.csv"
    manifest = tmp_path / "tiny_manifest.txt"
    assert csv_file.exists() and manifest.exists()
    lines = csv_file.read_text().strip().splitlines()
    header = lines[0].split(",")
    assert header[:2] == ["iteration", "err_max"]
    assert "err_if_1" in header
    assert len(lines) - 1 == report.iterations
    assert report.initial_error > 0
    body = manifest.read_text()
    assert "tiny" in body and "heat1d" in body


def test_rerun_is_byte_identical(tmp_path):
    _, first = run_tiny(tmp_path)
    text1 = (tmp_path / "tiny.csv").read_bytes()
    _, second = run_tiny(tmp_path)
    assert (tmp_path / "tiny.csv").read_bytes() == text1
    assert first.max_errors == second.max_errors


def test_zero_data_run_has_single_row(tmp_path):
    spec, report = run_tiny(tmp_path, MINIMAL_HEAT + "label = nilcase\n")
    assert report.iterations == 1
    assert report.max_errors[0] == 0.0
    assert report.converged_at == 1


def test_heat_preset_bound_column(tmp_path):
    # The shipped short-window heat preset carries the envelope overlay
    # and the measured error never crosses it.
    spec = load_config(preset_text("fig_heat_5sub_T0p2"))
    report = run_experiment(with_out_dir(spec, str(tmp_path)))
    assert report.bound is not None
    assert len(report.bound) == report.iterations
    for err, bnd in zip(report.max_errors, report.bound):
        assert err <= bnd
    header = (tmp_path / "fig_heat_5sub_T0p2.csv").read_text().splitlines()[0]
    assert header.endswith(",bound")


def test_interface_error_against_zero_reference():
    # A zero problem keeps the g(t) = t^2 guess error exactly measurable:
    # the initial distance to the zero reference is max t^2 = T^2.
    spec = load_config(MINIMAL_HEAT + "guess = t2\n")
    assert spec.zero_data
    report = run_experiment(spec, out_dir=None)
    assert report.initial_error == pytest.approx(0.2**2, rel=1e-12)


def test_interface_error_identical_traces():
    prob = heat_problem()
    part = make_partition((0.0, 2.5, 5.0))
    grids = make_run_grids(part, 0.05, 0.5, 0.02)
    cfg = WrConfig(method=Method.DNWR, tol=1e-12, max_iters=40)
    gg = guess_grids(part, grids, cfg)
    hist = dnwr_run(
        prob, part, grids, cfg, build_guesses("t2", gg, None)
    )
    report = interface_error(hist, hist.final_traces)
    assert report.errors[-1][0] == 0.0
    assert report.converged_at is not None


def test_interface_error_rejects_mismatched_shapes():
    prob = heat_problem()
    part = make_partition((0.0, 2.5, 5.0))
    grids = make_run_grids(part, 0.05, 0.5, 0.02)
    cfg = WrConfig(method=Method.DNWR, tol=1e-12, max_iters=2)
    gg = guess_grids(part, grids, cfg)
    hist = dnwr_run(prob, part, grids, cfg, build_guesses("t2", gg, None))
    with pytest.raises(IncompatibleGrids):
        interface_error(hist, [hist.final_traces[0], hist.final_traces[0]])


COMPARE_BASE = """\
model = heat1d
interval = 0, 5
partition = 0, 2.5, 5
dx = 0.05
dt = 0.02
T = 0.5
nu = 1
initial = parabola
left = t2
right = texp
tol = 1e-6
max_iters = 120
"""


def test_compare_methods_table(tmp_path):
    specs = [
        load_config(COMPARE_BASE + "method = dnwr\nlabel = cmp_dnwr\n"),
        load_config(COMPARE_BASE + "method = nnwr\nlabel = cmp_nnwr\n"),
        load_config(
            COMPARE_BASE + "method = swr_classical\noverlap_cells = 1\nlabel = cmp_swr\n"
        ),
    ]
    table = compare_methods(specs, out_dir=str(tmp_path))
    assert [row.method for row in table.rows] == ["dnwr", "nnwr", "swr_classical"]
    for row in table.rows:
        assert row.iterations >= 1
        assert row.final_error < 1e-6
    out = tmp_path / "compare_cmp_dnwr.csv"
    assert out.exists()
    assert out.read_text().splitlines()[0] == "label,method,iterations,converged,final_err"


def test_compare_methods_rejects_mismatched_setups():
    a = load_config(COMPARE_BASE + "method = dnwr\nlabel = a\n")
    b = load_config(
        COMPARE_BASE.replace("T = 0.5", "T = 1.0") + "method = nnwr\nlabel = b\n"
    )
    with pytest.raises(InconsistentSpecs):
        compare_methods([a, b])
    with pytest.raises(InconsistentSpecs):
        compare_methods([])


def test_cli_run_and_preset(tmp_path, capsys):
    cfg = tmp_path / "tiny.cfg"
    cfg.write_text(MINIMAL_HEAT + "guess = t2\n")
    rc = main(["run", "--config", str(cfg), "--out", str(tmp_path / "runs")])
    assert rc == 0
    out = capsys.readouterr().out
    assert "iterations" in out
    assert (tmp_path / "runs" / "tiny.csv").exists()

    rc = main(["preset", "--list"])
    assert rc == 0
    listing = capsys.readouterr().out
    assert "fig_wave_twostep" in listing and "cmp2d_3sub_nnwr" in listing


def test_cli_bound_subcommand(capsys):
    rc = main(
        [
            "bound",
            "--kind",
            "heat-equal",
            "--params",
            "count=5",
            "h=1",
            "nu=1",
            "T=2",
            "kmax=3",
        ]
    )
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "k,bound"
    assert lines[1].startswith("0,")
    assert len(lines) == 5

    rc = main(["bound", "--kind", "wave-steps", "--params", "T=5", "widths=1,0.5,1.5,1,1", "c=1"])
    assert rc == 0
    assert capsys.readouterr().out.strip() == "11"


def test_cli_error_paths(tmp_path, capsys):
    rc = main(["run", "--config", str(tmp_path / "missing.cfg")])
    assert rc == 2
    assert "error:" in capsys.readouterr().err

    bad = tmp_path / "bad.cfg"
    bad.write_text("model = heat1d\nwat\n")
    rc = main(["run", "--config", str(bad)])
    assert rc == 2
    assert "error:" in capsys.readouterr().err

    rc = main(["preset", "no_such_preset"])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_cli_compare(tmp_path, capsys):
    files = []
    for name, extra in (
        ("a.cfg", "method = dnwr\nlabel = cli_dnwr\n"),
        ("b.cfg", "method = nnwr\nlabel = cli_nnwr\n"),
    ):
        f = tmp_path / name
        f.write_text(COMPARE_BASE + extra)
        files.append(str(f))
    rc = main(["compare", "--configs", *files, "--out", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "cli_dnwr" in out and "cli_nnwr" in out
