import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ergodic_hjb.cli import main
from ergodic_hjb.grid import field_from_csv
from ergodic_hjb.reports import ConfigError, RunConfig, dumps, emit_reports, parse_config
from ergodic_hjb.solver import solve_discounted
from ergodic_hjb.sweep import run_sweep


def test_empty_config_defaults():
    c = parse_config("{}")
    assert (c.nx, c.n_xi, c.seed) == (256, 32, 42)
    assert c.schedule == tuple(0.5 ** k for k in range(15))
    assert c.tolerances == {"solve_tol": 1e-9, "c_tol": 1e-3, "gamma_tol": 1e-12}


def test_geometric_schedule():
    c = parse_config('{"schedule": {"alpha0": 1, "ratio": 0.5, "count": 3}}')
    assert list(c.schedule) == [1.0, 0.5, 0.25]


@pytest.mark.parametrize("text, fragment", [
    ('{"kernel": {"name": "sin-product", "a": 2}}', "kernel: kernel bound violated"),
    ('{"model": {"name": "power-m", "m": 0.5}}', "model: (A1) requires m > 1"),
    ('{"model": "hamilton"}', "model.name: unknown model"),
    ('{"nx": 3}', "nx/n_xi: grid too coarse"),
    ('{"nx": 2.5}', "nx: expected an integer"),
    ('{"schedule": [1, 2]}', "schedule: must be strictly decreasing"),
    ('{"schedule": {"ratio": 1.5}}', "schedule.ratio"),
    ('{"schedule": {"count": 1}}', "schedule.count"),
    ('{"tolerances": {"solve_tol": -1}}', "tolerances.solve_tol"),
    ('{"colour": 1}', "unknown keys"),
    ('[1, 2]', "top level"),
    ('{"nx": ', "malformed"),
])
def test_config_errors_are_path_qualified(text, fragment):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert fragment in str(info.value)


config_docs = st.fixed_dictionaries({}, optional={
    "model": st.sampled_from([{"name": "quad-eikonal", "g": "measurable"},
                              {"name": "power-m", "m": 2.5}, "zero-cost"]),
    "kernel": st.sampled_from([{"name": "sin-product", "a": 0.25}, "two-band", "constant"]),
    "nx": st.integers(4, 64),
    "n_xi": st.integers(2, 16),
    "schedule": st.one_of(
        st.lists(st.floats(1e-6, 10), min_size=1, max_size=5, unique=True).map(
            lambda xs: sorted(xs, reverse=True)),
        st.fixed_dictionaries({"alpha0": st.floats(0.1, 2), "ratio": st.floats(0.1, 0.9),
                               "count": st.integers(2, 6)})),
    "seed": st.integers(0, 1000),
})


@given(config_docs)
@settings(max_examples=40, deadline=None)
def test_config_round_trip(doc):
    c = parse_config(json.dumps(doc))
    assert parse_config(dumps(c.to_dict())) == c


def _config(tmp_path, **doc):
    doc.setdefault("nx", 32)
    doc.setdefault("n_xi", 4)
    doc.setdefault("schedule", {"alpha0": 1, "ratio": 0.5, "count": 4})
    doc["output"] = str(tmp_path)
    return parse_config(json.dumps(doc))


def test_zero_cost_metrics_rows(tmp_path):
    c = _config(tmp_path, model="zero-cost", kernel="constant")
    _, model, kernel = c.build()
    emit_reports(run_sweep(model, kernel, c.schedule), c)
    lines = (tmp_path / "metrics.csv").read_text().splitlines()
    assert lines[0] == "alpha,sup_alpha_v,sup_on_Z,lip_x,sup_theta,cauchy_increment,xi_modulus"
    for line in lines[1:]:
        values = line.split(",")[1:]
        assert all(v in ("", "0.0") for v in values)
    assert lines[1].split(",")[5] == ""


def test_sweep_artifacts(tmp_path):
    c = _config(tmp_path)
    _, model, kernel = c.build()
    rep = run_sweep(model, kernel, c.schedule)
    paths = emit_reports(rep, c)
    names = sorted(p.name for p in paths)
    assert "sweep_report.json" in names and "limit_field.csv" in names
    assert {"lip_x.dat", "sup_on_Z.dat", "xi_modulus.dat"} <= set(names)
    doc = json.loads((tmp_path / "sweep_report.json").read_text())
    assert parse_config(json.dumps(doc["config"])) == c
    assert "runtime_ms" not in json.dumps(doc)
    limit = field_from_csv((tmp_path / "limit_field.csv").read_text())
    np.testing.assert_array_equal(limit.values, rep.limit_field.values)
    dat = (tmp_path / "lip_x.dat").read_text().splitlines()
    assert dat[0] == "# alpha lip_x" and len(dat[1].split()) == 2
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert {a["path"] for a in manifest["artifacts"]} == set(names) - {"manifest.json"}


def test_solve_artifacts(tmp_path):
    c = _config(tmp_path)
    _, model, kernel = c.build()
    v, rep = solve_discounted(model, kernel, 0.25)
    emit_reports(rep, c, v)
    assert (tmp_path / "field.csv").exists()
    assert json.loads((tmp_path / "solve_report.json").read_text())["alpha"] == 0.25


def test_identical_runs_identical_manifests(tmp_path):
    digests = []
    for _ in range(2):
        c = _config(tmp_path)
        _, model, kernel = c.build()
        emit_reports(run_sweep(model, kernel, c.schedule), c)
        digests.append((tmp_path / "manifest.json").read_bytes())
    assert digests[0] == digests[1]


def test_unwritable_output_names_directory(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    c = _config(tmp_path / "file" / "out")
    _, model, kernel = c.build()
    with pytest.raises(OSError, match="out"):
        emit_reports(run_sweep(model, kernel, [1.0]), c)


def test_cli_oracle():
    assert main(["oracle"]) == 0


def test_cli_kernel_check(capsys):
    assert main(["kernel-check", "--kernel", "two-band", "--nxi", "64"]) == 0
    assert json.loads(capsys.readouterr().out)["rayleigh"] == pytest.approx(1.0)


def test_cli_validate(tmp_path, capsys):
    assert main(["validate", "--model", "power-m", "--nx", "64"]) == 0
    assert json.loads(capsys.readouterr().out)["A3"]["passed"]


def test_cli_solve(tmp_path):
    out, rep = tmp_path / "v.csv", tmp_path / "r.json"
    code = main(["solve", "--alpha", "0.1", "--model", "quad-eikonal", "--kernel",
                 "affine-eta", "--nx", "64", "--nxi", "8", "--tol", "1e-10",
                 "--out", str(out), "--report", str(rep)])
    assert code == 0
    assert field_from_csv(out.read_text()).values.min() >= -1e-9
    assert json.loads(rep.read_text())["config"]["tolerances"]["solve_tol"] == 1e-10


def test_cli_sweep(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"nx": 64, "n_xi": 8, "output": str(tmp_path / "out")}))
    assert main(["sweep", "--config", str(cfg)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["ergodic_c"] == 0.0 and summary["bound_chain"]
    assert (tmp_path / "out" / "manifest.json").exists()


def test_cli_sweep_short_schedule_fails(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"nx": 32, "n_xi": 4, "schedule": [1, 0.5],
                               "output": str(tmp_path / "out")}))
    assert main(["sweep", "--config", str(cfg)]) == 1


def test_cli_bad_config(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{"kernel": {"name": "sin-product", "a": 2}}')
    assert main(["validate", "--config", str(cfg)]) == 2
    assert "kernel bound violated" in capsys.readouterr().err


def test_cli_requires_subcommand():
    with pytest.raises(SystemExit):
        main([])
