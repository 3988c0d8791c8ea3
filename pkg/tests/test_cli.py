"""End-to-end command tests: schema gate, exit codes, deterministic files."""

import csv
import json

import pytest

from dynperc.cli import main, validate_config
from dynperc.errors import SchemaError
from dynperc.limits import dense_limit_constant


def write_config(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


THETA_CONFIG = {
    "geometry": {"intensity": 1.0, "radius": 1.0, "box_side": 5.0},
    "mc": {"replications": 60},
    "seeds": {"master": 31},
}


# -- schema ------------------------------------------------------------------


def test_validate_accepts_known_sections():
    validate_config(THETA_CONFIG)


def test_validate_rejects_unknown_section():
    with pytest.raises(SchemaError, match="geomtry"):
        validate_config({"geomtry": {}})


def test_validate_rejects_unknown_key():
    with pytest.raises(SchemaError, match="geometry.radius_x"):
        validate_config({"geometry": {"radius_x": 1.0}})


def test_validate_rejects_bool_masquerading_as_number():
    with pytest.raises(SchemaError, match="boolean"):
        validate_config({"mc": {"replications": True}})


def test_validate_rejects_wrong_types():
    with pytest.raises(SchemaError):
        validate_config({"geometry": {"radius": "one"}})
    with pytest.raises(SchemaError):
        validate_config({"geometry": [1, 2]})
    with pytest.raises(SchemaError):
        validate_config([])


# -- exit codes --------------------------------------------------------------


def test_missing_config_exits_3(tmp_path):
    assert main(["estimate-theta", "--out", str(tmp_path)]) == 3


def test_invalid_json_exits_3(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["estimate-theta", "--config", str(bad), "--out", str(tmp_path)]) == 3


def test_missing_required_key_exits_3(tmp_path):
    cfg = write_config(tmp_path, "c.json", {"geometry": {"intensity": 1.0}, "seeds": {"master": 1}})
    assert main(["estimate-theta", "--config", cfg, "--out", str(tmp_path)]) == 3


def test_invalid_parameter_exits_3(tmp_path):
    payload = {**THETA_CONFIG, "geometry": {"intensity": -1.0, "radius": 1.0, "box_side": 5.0}}
    cfg = write_config(tmp_path, "c.json", payload)
    assert main(["estimate-theta", "--config", cfg, "--out", str(tmp_path)]) == 3


def test_bad_thread_env_exits_3(tmp_path, monkeypatch):
    monkeypatch.setenv("DYNPERC_THREADS", "lots")
    cfg = write_config(tmp_path, "c.json", THETA_CONFIG)
    assert main(["estimate-theta", "--config", cfg, "--out", str(tmp_path)]) == 3


def test_unknown_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2


# -- runs --------------------------------------------------------------------


def test_estimate_theta_writes_row_and_manifest(tmp_path):
    cfg = write_config(tmp_path, "c.json", THETA_CONFIG)
    out = tmp_path / "run"
    assert main(["estimate-theta", "--config", cfg, "--out", str(out)]) == 0
    rows = read_rows(out / "estimates.csv")
    assert rows[1][0] == "theta_M"
    assert 0.0 <= float(rows[1][1]) <= 1.0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["subcommand"] == "estimate-theta"
    assert manifest["master_seed"] == 31
    assert manifest["outputs"] == ["estimates.csv"]


def test_seed_flag_overrides_config(tmp_path):
    cfg = write_config(tmp_path, "c.json", THETA_CONFIG)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["estimate-theta", "--config", cfg, "--out", str(a), "--seed", "99"]) == 0
    assert main(["estimate-theta", "--config", cfg, "--out", str(b)]) == 0
    va = read_rows(a / "estimates.csv")[1][1]
    vb = read_rows(b / "estimates.csv")[1][1]
    assert va != vb
    assert json.loads((a / "manifest.json").read_text())["master_seed"] == 99


TWO_SCALE_CONFIG = {
    "model": {"horizon": 10.0},
    "geometry": {"intensity": 1.0, "radius": 1.0, "box_side": 5.0},
    "grid": {"n_t": 12},
    "mc": {"replications": 8},
    "seeds": {"master": 5},
}


def test_simulate_two_scale_thread_count_does_not_change_bytes(tmp_path):
    cfg = write_config(tmp_path, "c.json", TWO_SCALE_CONFIG)
    one, many = tmp_path / "one", tmp_path / "many"
    assert main(["simulate-two-scale", "--config", cfg, "--out", str(one), "--threads", "1"]) == 0
    assert main(["simulate-two-scale", "--config", cfg, "--out", str(many), "--threads", "2"]) == 0
    assert (one / "samples.csv").read_bytes() == (many / "samples.csv").read_bytes()
    assert (one / "pairings.csv").read_bytes() == (many / "pairings.csv").read_bytes()


def test_rerun_from_manifest_reproduces_bytes(tmp_path):
    # the manifest's recorded config and seed are enough to rebuild the run
    cfg = write_config(tmp_path, "c.json", TWO_SCALE_CONFIG)
    first = tmp_path / "first"
    assert main(["simulate-two-scale", "--config", cfg, "--out", str(first), "--seed", "77"]) == 0
    manifest = json.loads((first / "manifest.json").read_text())
    replay_cfg = write_config(tmp_path, "replay.json", manifest["config"])
    replay = tmp_path / "replay"
    args = ["simulate-two-scale", "--config", replay_cfg, "--out", str(replay), "--seed", str(manifest["master_seed"])]
    assert main(args) == 0
    for name in manifest["outputs"]:
        assert (replay / name).read_bytes() == (first / name).read_bytes()


def test_grid_points_flag_overrides_config(tmp_path):
    cfg = write_config(tmp_path, "c.json", TWO_SCALE_CONFIG)
    out = tmp_path / "run"
    assert main(["simulate-two-scale", "--config", cfg, "--out", str(out), "--grid-points", "5"]) == 0
    rows = read_rows(out / "samples.csv")
    assert len(rows) == 1 + 8 * 5


def test_sample_limit_dense_is_closed_form(tmp_path):
    payload = {"scaling": {"theta": 0.5, "c0": 1.0, "mu": 1.0}, "seeds": {"master": 1}}
    cfg = write_config(tmp_path, "c.json", payload)
    out = tmp_path / "run"
    assert main(["sample-limit", "dense", "--config", cfg, "--out", str(out)]) == 0
    rows = read_rows(out / "estimates.csv")
    assert float(rows[1][1]) == pytest.approx(dense_limit_constant(0.5, 1.0, 1.0))


def test_compare_against_self_is_zero(tmp_path):
    payload = {"scaling": {"theta": 0.5, "c0": 1.0, "mu": 1.0}, "mc": {"replications": 200}, "seeds": {"master": 2}}
    cfg = write_config(tmp_path, "c.json", payload)
    out = tmp_path / "draws"
    assert main(["sample-limit", "sparse", "--config", cfg, "--out", str(out)]) == 0
    pairings = str(out / "pairings.csv")
    cmp_out = tmp_path / "cmp"
    assert main(["compare", pairings, pairings, "--out", str(cmp_out)]) == 0
    rows = read_rows(cmp_out / "distances.csv")
    by_name = {r[0]: float(r[1]) for r in rows[1:]}
    assert by_name["ks[1]"] == 0.0
    assert by_name["w1[1]"] == 0.0


def test_compare_rejects_malformed_pairings(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("wrong,header,here\n0,1,0.5\n")
    assert main(["compare", str(bad), str(bad), "--out", str(tmp_path)]) == 3


def test_compare_rejects_empty_pairings(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("replication_id,g_name,value\n")
    assert main(["compare", str(empty), str(empty), "--out", str(tmp_path)]) == 3


def test_estimate_phase_rows_conserve_intensity(tmp_path):
    payload = {
        "geometry": {"intensity": 2.0},
        "grid": {"n_t": 4},
        "mc": {"replications": 200},
        "seeds": {"master": 3},
    }
    cfg = write_config(tmp_path, "c.json", payload)
    out = tmp_path / "run"
    assert main(["estimate-phase", "--config", cfg, "--out", str(out)]) == 0
    rows = read_rows(out / "estimates.csv")[1:]
    assert len(rows) == 8
    slow = {r[0].split("[")[1]: float(r[1]) for r in rows if r[0].startswith("lambda_s")}
    fast = {r[0].split("[")[1]: float(r[1]) for r in rows if r[0].startswith("lambda_f")}
    for key in slow:
        assert slow[key] + fast[key] == 2.0


def test_selfcheck_passes(tmp_path):
    assert main(["selfcheck", "--out", str(tmp_path)]) == 0
