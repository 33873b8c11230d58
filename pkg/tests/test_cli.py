"""CLI surface: exit codes, flags, report files, gen round trips."""

import json


from paracoh.cli import main
from paracoh.config import config_to_json
from tests.test_harness import _small_config


def _write_config(tmp_path, cfg):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config_to_json(cfg)))
    return str(path)


def test_verify_invariants_ok(tmp_path, capsys):
    code = main(["verify-invariants", "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "verify-invariants.json").exists()
    assert (tmp_path / "verify-invariants.invariance.csv").exists()
    out = capsys.readouterr().out
    assert "verify-invariants: ok" in out


def test_solve_top_ok_and_seed_flag(tmp_path):
    cfg_path = _write_config(tmp_path, _small_config(k=8))
    code = main(
        ["solve-top", "--config", cfg_path, "--seed", "9", "--out", str(tmp_path)]
    )
    assert code == 0
    doc = json.loads((tmp_path / "solve-top.json").read_text())
    assert doc["seed"] == 9


def test_solve_form_flags(tmp_path):
    cfg_path = _write_config(tmp_path, _small_config(k=8))
    assert main(
        ["solve-form", "--config", cfg_path, "--degree", "1", "--out", str(tmp_path)]
    ) == 0
    # degree d rejected as a config error
    assert main(
        ["solve-form", "--config", cfg_path, "--degree", "2", "--out", str(tmp_path)]
    ) == 1


def test_obstruction_exit_code(tmp_path):
    # a component whose generated input is replaced by an obstructed one
    import paracoh as pc
    from paracoh.serialize import save_tensor
    from paracoh.params import MultiParam, default_window
    from paracoh.tensor import phi_tensor

    cfg = _small_config(k=8)
    cfg_path = _write_config(tmp_path, cfg)
    inputs = []
    for comp in cfg.components:
        mp = MultiParam(comp.factors)
        wins = tuple(default_window(p, 8) for p in mp.factors)
        ft = phi_tensor(mp, pc.valid_tags(mp)[0], wins)
        path = tmp_path / f"{comp.label}.json"
        save_tensor(path, ft)
        inputs.append(str(path))
    argv = ["solve-top", "--config", cfg_path, "--out", str(tmp_path)]
    for p in inputs:
        argv += ["--input", p]
    assert main(argv) == 3


def test_config_error_exit_codes(tmp_path):
    missing = tmp_path / "nope.json"
    assert main(["solve-top", "--config", str(missing)]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{\"components\": []}")
    assert main(["verify-invariants", "--config", str(bad)]) == 1
    # usage errors are remapped off exit code 2
    assert main(["solve-form"]) == 1
    assert main(["no-such-command"]) == 1


def test_gen_then_solve(tmp_path, capsys):
    cfg_path = _write_config(tmp_path, _small_config(k=8))
    out = tmp_path / "inputs"
    assert main(["gen", "--config", cfg_path, "--kind", "tensor", "--out", str(out)]) == 0
    paths = capsys.readouterr().out.strip().splitlines()
    assert len(paths) == 3
    argv = ["solve-top", "--config", cfg_path, "--out", str(tmp_path)]
    for p in paths:
        argv += ["--input", p]
    assert main(argv) == 0


def test_sweep_bounds_cli(tmp_path):
    cfg_path = _write_config(tmp_path, _small_config(k=8))
    assert main(["sweep-bounds", "--config", cfg_path, "--out", str(tmp_path)]) == 0
    assert (tmp_path / "sweep-bounds.dist_order_principal.csv").exists()
    lines = (tmp_path / "sweep-bounds.dist_order_principal.csv").read_text().splitlines()
    assert lines[0] == "param,value,bound,ratio"


def test_t_flag_parsing(tmp_path):
    cfg_path = _write_config(tmp_path, _small_config(k=8))
    assert main(["solve-top", "--config", cfg_path, "--t", "1,3", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "solve-top.json").read_text())
    ratios = doc["components"][0]["sobolev_ratios"]
    assert set(ratios) == {"1.0", "3.0"}
    assert main(["solve-top", "--config", cfg_path, "--t", "abc"]) == 1
