import json

import pytest

from cosetwalk.cli import EXIT_BUDGET, EXIT_CHECK, EXIT_CONFIG, EXIT_OK, main


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


WALK = {"command": "walk", "group": {"kind": "free", "rank": 2},
        "subgroup": {"family": "cyclic", "base": "a"},
        "params": {"n_max": 7, "alphas": [2, 0.5], "q_list": ["2", "4/3"]}}


def test_walk_outputs_and_determinism(tmp_path):
    cfg = write(tmp_path / "w.json", WALK)
    for out in ("o1", "o2"):
        assert main(["walk", "--config", cfg, "--out", str(tmp_path / out)]) == EXIT_OK
    for name in ("walk.csv", "walk.json"):
        assert (tmp_path / "o1" / name).read_bytes() == (tmp_path / "o2" / name).read_bytes()
    rows = (tmp_path / "o1" / "walk.csv").read_text().splitlines()
    assert rows[0] == "n,support_size,H,H_alpha_2,H_alpha_0.5,qnorm_2,qnorm_1.33333"
    assert len(rows) == 1 + 7
    rep = json.loads((tmp_path / "o1" / "walk.json").read_text())
    assert rep["checks_passed"] and rep["mode"] == "exact" and len(rep["config_digest"]) == 16


def test_float_flag(tmp_path):
    cfg = write(tmp_path / "w.json", WALK)
    assert main(["walk", "--config", cfg, "--float", "--out", str(tmp_path)]) == EXIT_OK
    assert json.loads((tmp_path / "walk.json").read_text())["mode"] == "float"


def test_classify_free(tmp_path, capsys):
    code = main(["classify-free", "--rank", "2", "--gens", "a", "b^2", "bab^-1",
                 "--out", str(tmp_path)])
    assert code == EXIT_OK
    rep = json.loads((tmp_path / "classify.json").read_text())
    assert rep["index"] == 2 and rep["rank"] == 3
    assert (tmp_path / "stallings.dot").read_text().startswith("digraph")
    assert "SLC_yes_finite_index" in capsys.readouterr().out


def test_verify_and_report(tmp_path):
    assert main(["verify", "aj-dominance", "--no-timing", "--out", str(tmp_path)]) == EXIT_OK
    first = (tmp_path / "verify-aj-dominance.json").read_bytes()
    assert main(["verify", "aj-dominance", "--no-timing", "--out", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "verify-aj-dominance.json").read_bytes() == first
    assert main(["report", "--out", str(tmp_path)]) == EXIT_OK
    rep = json.loads((tmp_path / "report.json").read_text())
    assert "verify-aj-dominance.json" in rep["json"]


def test_growth_and_spectral(tmp_path):
    g = write(tmp_path / "g.json", {"command": "growth", "group": {"kind": "named", "name": "heisenberg"},
                                    "subgroup": {"family": "cyclic", "base": "[[1,1,0],[0,1,0],[0,0,1]]"},
                                    "params": {"radius": 9, "intersections": [[[1, 0, 0], [0, 1, 1], [0, 0, 1]]]}})
    assert main(["growth", "--config", g, "--out", str(tmp_path)]) == EXIT_OK
    rep = json.loads((tmp_path / "growth.json").read_text())
    assert rep["verdict"]["verdict"] == "ConsistentViaSubexpSchreier"
    s = write(tmp_path / "s.json", {"command": "spectral", "exact": False,
                                    "params": {"n_max": 8, "q_list": ["2", "3/2"]}})
    assert main(["spectral", "--config", s, "--out", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "profile.csv").read_text().startswith("q,p,r_q,stderr,minus_p_log_rq")


def test_norms(tmp_path):
    n = write(tmp_path / "n.json", {"group": {"kind": "free", "rank": 3},
                                    "subgroup": {"family": "free_gens", "generators": ["a", "b"]},
                                    "params": {"family": {"kind": "free_factor", "radii": [1, 2]},
                                               "witness": {"kind": "polynomial", "C_h": 1, "s1": 0}}})
    assert main(["norms", "--config", n, "--out", str(tmp_path)]) == EXIT_OK
    assert json.loads((tmp_path / "norms.json").read_text())["verdict"].startswith("refuted")


@pytest.mark.parametrize("argv", [
    ["walk"],
    ["verify", "nope"],
    ["classify-free", "--rank", "2", "--gens", "a2"],
    ["walk", "--threads", "0", "--config", "__CFG__"],
])
def test_config_errors(tmp_path, argv):
    cfg = write(tmp_path / "w.json", WALK)
    argv = [cfg if a == "__CFG__" else a for a in argv]
    assert main(argv + ["--out", str(tmp_path)]) == EXIT_CONFIG


def test_bad_json_file(tmp_path):
    (tmp_path / "bad.json").write_text("{\n  nope")
    assert main(["walk", "--config", str(tmp_path / "bad.json"), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_budget_exit(tmp_path):
    cfg = write(tmp_path / "b.json", {"group": {"kind": "free", "rank": 2}, "params": {"radius": 20},
                                      "budget_elems": 500})
    assert main(["growth", "--config", cfg, "--out", str(tmp_path)]) == EXIT_BUDGET


def test_check_failure_exit(tmp_path, monkeypatch):
    import cosetwalk.cli as cli
    from cosetwalk.verifiers import Check, VerifierReport
    monkeypatch.setattr(cli, "verify_named_example",
                        lambda eid, **kw: VerifierReport(eid, [Check("x", "fail")], 0))
    assert main(["verify", "aj-dominance", "--out", str(tmp_path)]) == EXIT_CHECK
