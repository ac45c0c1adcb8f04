import json

import numpy as np
import pytest
import yaml

from micropolar import artifacts
from micropolar.cli import main
from micropolar.config import RunConfig, load_config
from micropolar.oracles import forward_pattern
from micropolar.profiles import build_composite
from micropolar.riemann import EndStates, solve_pattern
from micropolar.thermo import ThermoState

SMALL = ["--override", "grid.L=40", "--override", "grid.n=128", "--override", "time.T_final=2",
         "--override", "time.snapshot_cadence=1", "--override", "time.diagnostic_cadence=0.5"]


def _states_args(left, right):
    out = []
    for side, s in (("left", left), ("right", right)):
        for k in ("v", "u", "theta"):
            out += ["--override", f"end_states.{side}.{k}={getattr(s, k)!r}"]
    return out


# ---------------------------------------------------------------- config


def test_config_roundtrip(tmp_path):
    cfg = load_config(None, ["grid.n=1024", "perturbation.fields.omega=false", "diagnostics.alpha=0.7"])
    path = tmp_path / "c.yaml"
    path.write_text(cfg.to_yaml())
    again = load_config(path)
    assert again == cfg
    assert again.to_yaml() == cfg.to_yaml()


def test_config_partial_file_and_overrides(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text(yaml.safe_dump({"grid": {"n": 512}, "end_states": {"right": {"theta": 1.05}}}))
    cfg = load_config(path, ["time.T_final=3.5"])
    assert cfg.grid.n == 512 and cfg.grid.L == RunConfig().grid.L
    assert cfg.end_states.right.theta == 1.05 and cfg.end_states.right.v == RunConfig().end_states.right.v
    assert cfg.time.T_final == 3.5


@pytest.mark.parametrize("bad", ["time.T_final=0", "profiles.bvp_tol=-1", "gas.gamma=1", "grid.nope=3",
                                 "diagnostics.fit_t_max=0.5", "grid.n=8"])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        load_config(None, [bad])


def test_config_malformed_override():
    with pytest.raises(ValueError):
        load_config(None, ["grid.n"])


def test_non_power_of_two_warns(caplog):
    with caplog.at_level("WARNING"):
        load_config(None, ["grid.n=1000"])
    assert "power of two" in caplog.text


def test_shipped_configs_load():
    from pathlib import Path

    root = Path(__file__).resolve().parents[1] / "configs"
    assert load_config(root / "default.yaml") == RunConfig()
    assert load_config(root / "quick.yaml").grid.n == 512


# ---------------------------------------------------------------- riemann


def test_cli_riemann_contact_only(capsys):
    rc = main(["riemann"] + _states_args(ThermoState(1.0, 0.3, 1.0), ThermoState(1.2, 0.3, 1.2)))
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    s = out["strengths"]
    assert s["rarefaction_minus"] == pytest.approx(0.0, abs=1e-12)
    assert s["rarefaction_plus"] == pytest.approx(0.0, abs=1e-12)
    assert s["contact"] == pytest.approx(0.2, abs=1e-12)
    assert out["admissible"] is True


def test_cli_riemann_forward_constructed(params, capsys, tmp_path):
    fp = forward_pattern(params, ThermoState(1.0, 0.0, 1.0), 1.15, 1.05, expansion_right=1.03)
    rc = main(["riemann", "--out", str(tmp_path)] + _states_args(fp.end.left, fp.end.right))
    assert rc == 0
    out = json.loads((tmp_path / "pattern.json").read_text())
    for key, want in (("mid_left", fp.mid_left), ("mid_right", fp.mid_right)):
        got = out[key]
        assert (got["v"], got["u"], got["theta"]) == pytest.approx((want.v, want.u, want.theta), abs=1e-8)


def test_cli_riemann_shock_exit_code(capsys):
    rc = main(["riemann", "--override", "end_states.right.u=-0.3"])
    assert rc == 2
    assert "pattern mismatch" in capsys.readouterr().err


def test_cli_invalid_config_exit_code(capsys):
    assert main(["riemann", "--override", "gas.kappa=-1"]) == 1


def test_cli_output_env(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv("MICROPOLAR_OUT", str(tmp_path / "env"))
    assert main(["riemann"]) == 0
    assert (tmp_path / "env" / "pattern.json").exists()


# ---------------------------------------------------------------- profile


def test_cli_profile_constant_columns(tmp_path, capsys):
    s = ThermoState(1.5, 0.2, 1.2)
    rc = main(["profile", "dump", "--out", str(tmp_path), "--t", "0,3", "--nx", "51"] + _states_args(s, s))
    assert rc == 0
    tab = artifacts.read_csv(tmp_path / "profile.csv")
    np.testing.assert_allclose(tab["V"], 1.5, atol=1e-15)
    np.testing.assert_allclose(tab["U"], 0.2, atol=1e-15)
    np.testing.assert_allclose(tab["Theta"], 1.2, atol=1e-15)
    for c in ("V_x", "U_x", "Theta_x"):
        np.testing.assert_allclose(tab[c], 0.0, atol=1e-13)


def test_cli_profile_far_fields(config, tmp_path, capsys):
    rc = main(["profile", "--out", str(tmp_path), "--t", "0,50", "--x-min", "-150", "--x-max", "150", "--nx", "3"])
    assert rc == 0
    tab = artifacts.read_csv(tmp_path / "profile.csv")
    l, r = config.end_states.left, config.end_states.right
    for i in (0, 3):
        assert (tab["V"][i], tab["U"][i], tab["Theta"][i]) == pytest.approx((l.v, l.u, l.theta), abs=1e-8)
    for i in (2, 5):
        assert (tab["V"][i], tab["U"][i], tab["Theta"][i]) == pytest.approx((r.v, r.u, r.theta), abs=1e-8)


def test_cli_profile_roundtrip_bitwise(params, pattern, composite, tmp_path, capsys):
    rc = main(["profile", "--out", str(tmp_path), "--t", "0,0.5,7", "--x-min", "-12.3", "--x-max", "17", "--nx", "257"])
    assert rc == 0
    tab = artifacts.read_csv(tmp_path / "profile.csv")
    assert tuple(tab) == artifacts.PROFILE_COLUMNS
    for t in np.unique(tab["t"]):
        sel = tab["t"] == t
        vals = composite.evaluate(float(t), tab["x"][sel])
        for c in artifacts.PROFILE_COLUMNS[2:]:
            np.testing.assert_array_equal(tab[c][sel], getattr(vals, c))


def test_cli_profile_stdout(capsys):
    assert main(["profile", "--nx", "4", "--wave", "contact"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == ",".join(artifacts.PROFILE_COLUMNS)
    assert len(lines) == 5


# ---------------------------------------------------------------- simulate


def test_cli_simulate_artifacts_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--out", str(a)] + SMALL) == 0
    assert main(["simulate", "--out", str(b)] + SMALL) == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    assert "norms.csv" in names and "summary.json" in names and "metadata.json" in names
    assert artifacts.snapshot_name(2.0) in names
    for name in names:
        if name != "metadata.json":
            assert (a / name).read_bytes() == (b / name).read_bytes(), name
    snap = artifacts.read_csv(a / artifacts.snapshot_name(1.0))
    assert tuple(snap) == artifacts.SNAPSHOT_COLUMNS and snap["x"].size == 128
    norms = artifacts.read_csv(a / "norms.csv")
    np.testing.assert_allclose(norms["t"], np.arange(0, 2.01, 0.5))
    summary = json.loads((a / "summary.json").read_text())
    assert summary["config"]["grid"]["n"] == 128
    assert "created" not in json.dumps(summary)


def test_cli_simulate_boundary_error(tmp_path, capsys):
    assert main(["simulate", "--out", str(tmp_path)] + SMALL + ["--override", "grid.L=3"]) == 1


# ---------------------------------------------------------------- verify


def test_cli_verify_subset(tmp_path, capsys):
    rc = main(["verify", "--checks", "pattern,kernel,riemann", "--out", str(tmp_path)])
    assert rc == 0
    report = json.loads((tmp_path / "verdict.json").read_text())
    assert report["passed"] is True
    assert [c["name"] for c in report["checks"]] == ["pattern", "kernel", "riemann"]
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 3


def test_cli_verify_delta_above_cap(tmp_path, capsys):
    rc = main(["verify", "--checks", "pattern", "--out", str(tmp_path), "--override", "end_states.delta_cap=0.05"])
    assert rc == 1
    report = json.loads((tmp_path / "verdict.json").read_text())
    assert report["passed"] is False
    assert "pattern mismatch" in report["checks"][0]["message"]


def test_cli_verify_unknown_check():
    with pytest.raises(KeyError):
        main(["verify", "--checks", "bogus"])


# ---------------------------------------------------------------- artifacts


def test_csv_shortest_roundtrip(tmp_path):
    vals = np.array([0.1, 1 / 3, 1e-300, -2.5e17, 7.0])
    path = artifacts.write_csv(tmp_path / "f.csv", ("a",), {"a": vals})
    assert path.read_text().splitlines()[1:] == [repr(float(v)) for v in vals]
    np.testing.assert_array_equal(artifacts.read_csv(path)["a"], vals)


def test_json_non_finite(tmp_path):
    path = artifacts.write_json(tmp_path / "x.json", {"a": np.float64("nan"), "b": np.int64(3), "c": np.bool_(True)})
    assert json.loads(path.read_text()) == {"a": "nan", "b": 3, "c": True}
