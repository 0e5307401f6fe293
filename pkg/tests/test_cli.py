import json
import math
import os

import numpy as np
import pytest
import yaml

from vortexkg import cli
from vortexkg import fields as fl
from vortexkg import filament as fm
from vortexkg.model import HelixSpec

CONFIGS = os.path.join(os.path.dirname(__file__), os.pardir, "configs")


def load(name):
    with open(os.path.join(CONFIGS, name)) as fh:
        return yaml.safe_load(fh)


def test_ledger_scenario(tmp_path):
    man = cli.run_config(load("ledger.yaml"), tmp_path)
    rep = json.load(open(tmp_path / "ledger" / "report.json"))["result"]
    assert rep["closures"]["GroupVelocity"]["ratio"] == 0.25
    assert rep["closures"]["Frequency"]["ratio"] == pytest.approx(1.0, abs=1e-15)
    assert {f["path"] for f in man["files"]} == {"series/ledger.csv", "report.json"}


def test_dispersion_scenario(tmp_path):
    cli.run_config(load("dispersion_wave.yaml"), tmp_path)
    lines = open(tmp_path / "dispersion-wave" / "series" / "dispersion.csv").read().splitlines()
    assert lines[0] == "k,omega_measured,omega_predicted,rel_err"
    assert len(lines) == 5
    assert max(float(r.split(",")[3]) for r in lines[1:]) <= 1e-10


def test_invalid_config_writes_nothing(tmp_path):
    raw = load("dispersion_wave.yaml")
    raw["grid"]["n"] = 63
    with pytest.raises(cli.ConfigError, match="even"):
        cli.run_config(raw, tmp_path)
    assert os.listdir(tmp_path) == []


@pytest.mark.parametrize("patch,msg", [
    ({"schema_version": 2}, "schema_version"),
    ({"scenario": "nope"}, "unknown scenario"),
    ({"backend": "gpu"}, "backend"),
    ({"params": {"c": -1.0}}, "params"),
    ({"name": "../escape"}, "plain directory"),
    ({"time": {"dt": 0.0}}, "positive"),
    ({"options": {"equation": "heat"}}, "equation"),
    ({"options": {"k": [0.5]}}, "not a grid wavenumber"),
])
def test_validation_errors(tmp_path, patch, msg):
    raw = load("dispersion_wave.yaml")
    raw.update(patch)
    with pytest.raises(cli.ConfigError, match=msg):
        cli.run_config(raw, tmp_path)
    assert os.listdir(tmp_path) == []


def test_scenario_specific_fail_fast(tmp_path):
    raw = load("field_kg_fd.yaml")
    raw["time"]["dt"] = 0.2
    with pytest.raises(cli.ConfigError, match="leapfrog unstable"):
        cli.validate(raw)
    raw = load("lia_helix.yaml")
    raw["time"]["dt"] = 0.1
    with pytest.raises(cli.ConfigError, match="LIA step too large"):
        cli.validate(raw)
    raw = load("linearization.yaml")
    raw["options"]["a_over_L"] = [0.02]
    with pytest.raises(cli.ConfigError):
        cli.validate(raw)


def test_runtime_error_leaves_no_manifest(tmp_path, monkeypatch):
    def broken(cfg):
        def run(w):
            w.table("partial", ["a"], [(1,)])
            raise RuntimeError("boom")
        return run

    monkeypatch.setitem(cli.SCENARIOS, "ledger", (broken, "broken"))
    with pytest.raises(RuntimeError):
        cli.run_config(load("ledger.yaml"), tmp_path)
    assert os.path.exists(tmp_path / "ledger" / "series" / "partial.csv")
    assert not os.path.exists(tmp_path / "ledger" / "manifest.json")


def test_refuses_to_overwrite(tmp_path):
    cli.run_config(load("ledger.yaml"), tmp_path)
    with pytest.raises(cli.ConfigError, match="not empty"):
        cli.run_config(load("ledger.yaml"), tmp_path)


def test_emit_series_row_counts(tmp_path):
    g = fl.make_grid(16, 2 * math.pi)
    f = fl.ComplexField(g, np.exp(1j * g.x))
    cli.emit_series([f], tmp_path / "f.csv")
    assert len(open(tmp_path / "f.csv").read().splitlines()) == 17
    hist = fm.evolve_lia(fm.make_helix_curve(HelixSpec(0.01, 1.0), 2 * math.pi, 16), 0.001, 100, 0.5,
                         cadence=10)
    cli.emit_series(hist, tmp_path / "c.csv")
    rows = open(tmp_path / "c.csv").read().splitlines()
    assert rows[0] == "t,j,x,y,z"
    assert len({r.split(",")[0] for r in rows[1:]}) == 11
    assert len(rows) == 1 + 11 * 16
    with pytest.raises(ValueError):
        cli.emit_series([], tmp_path / "e.csv")
    with pytest.raises(OSError):
        cli.emit_series([f], tmp_path / "missing" / "f.csv")


def test_series_round_trip(tmp_path):
    g = fl.make_grid(8, 1.0)
    vals = np.exp(1j * np.pi / 3 * np.arange(8)) / 7.0
    cli.emit_series([fl.ComplexField(g, vals, t=1 / 3)], tmp_path / "f.csv")
    rows = [r.split(",") for r in open(tmp_path / "f.csv").read().splitlines()[1:]]
    assert float(rows[0][0]) == 1 / 3
    assert np.array_equal([complex(float(r[3]), float(r[4])) for r in rows], vals)


def test_manifest_digests(tmp_path):
    man = cli.run_config(load("field_wave_helix.yaml"), tmp_path)
    run = tmp_path / "field-wave-helix"
    listed = {f["path"] for f in man["files"]}
    on_disk = {os.path.relpath(os.path.join(d, f), run) for d, _, fs in os.walk(run) for f in fs}
    assert on_disk - listed == {"manifest.json"}
    for f in man["files"]:
        assert cli._digest(run / f["path"]) == f["sha256"]
    stored = json.load(open(run / "manifest.json"))
    assert stored["config"]["scenario"] == "field-run" and stored["version"]


def test_determinism(tmp_path):
    for name in ("field_kg_fd.yaml", "biot_savart.yaml"):
        a = cli.run_config(load(name), tmp_path / "a")
        b = cli.run_config(load(name), tmp_path / "b")
        assert [f["sha256"] for f in a["files"]] == [f["sha256"] for f in b["files"]]


def test_main_verbs(tmp_path, capsys):
    assert cli.main(["list-scenarios"]) == 0
    assert "soliton" in capsys.readouterr().out
    cfg = os.path.join(CONFIGS, "ledger.yaml")
    assert cli.main(["validate", cfg]) == 0
    assert cli.main(["--out", str(tmp_path), "run", cfg]) == 0
    assert cli.main(["--out", str(tmp_path), "run", cfg]) == 2
    assert "not empty" in capsys.readouterr().err
    assert cli.main(["--out", str(tmp_path), "run", "--force", cfg]) == 0
    bad = tmp_path / "bad.yaml"
    bad.write_text("schema_version: 1\nscenario: ledger\ngrid: {n: 9}\n")
    assert cli.main(["validate", str(bad)]) == 2
    bad.write_text("schema_version: [1\n")
    assert cli.main(["validate", str(bad)]) == 2
    assert cli.main(["validate", str(tmp_path / "none.yaml")]) == 2


def test_every_example_config_validates():
    names = sorted(f for f in os.listdir(CONFIGS) if f.endswith(".yaml"))
    scen = {cli.validate(load(n))[0].scenario for n in names}
    assert scen == set(cli.SCENARIOS)
