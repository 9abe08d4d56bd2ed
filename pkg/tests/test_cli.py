import csv
import json

from wsnloc.cli import dispatch, read_config_file
from wsnloc.network import Point2, true_distance


def run(argv):
    return dispatch(list(argv))


def test_gen_writes_scenario_and_measurements(tmp_path):
    out = tmp_path / "net.json"
    assert run(["gen", "--n", "5", "--m", "3", "--seed", "4", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert set(doc) == {"scenario", "measurements"}
    assert doc["scenario"]["n"] == 5 and doc["scenario"]["m"] == 3
    assert doc["measurements"]["edges"]


def test_gen_rerun_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["gen", "--n", "6", "--m", "3", "--seed", "1", "--dmax", "0.6"]
    assert run(argv + ["--out", str(a)]) == 0
    assert run(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_to_stdout(capsys):
    assert run(["gen", "--n", "3", "--m", "2", "--seed", "0", "--dmax", "1.5"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["scenario"]["seed"] == 0


def test_default_flags_match_typical_values(capsys):
    # defaults: n=15 m=5 gamma_p=3 sigma_db=3.5 eps=0.01 dmax=0.5 seed=0
    assert run(["gen"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["scenario"]["n"] == 15
    assert doc["scenario"]["m"] == 5
    assert doc["scenario"]["d_max"] == 0.5
    assert doc["scenario"]["seed"] == 0
    from wsnloc.cli import _DEFAULTS
    assert (_DEFAULTS["gamma_p"], _DEFAULTS["sigma_db"], _DEFAULTS["epsilon"]) == (3.0, 3.5, 0.01)
    assert _DEFAULTS["trials"] == 50


def test_solve_roundtrip_and_error_scoring(tmp_path):
    net = tmp_path / "net.json"
    res = tmp_path / "res.json"
    assert run(["gen", "--n", "5", "--m", "4", "--seed", "2", "--dmax", "1.5",
                "--sigma-db", "0", "--eps", "0", "--out", str(net)]) == 0
    assert run(["solve", "--in", str(net), "--method", "proposed", "--out", str(res)]) == 0
    result = json.loads(res.read_text())
    truth = [Point2(*p) for p in json.loads(net.read_text())["scenario"]["unknowns"]]
    est = [Point2(*p) for p in result["positions"]]
    assert max(true_distance(p, q) for p, q in zip(est, truth)) < 1e-3
    assert result["method"] == "proposed"


def test_solve_methods_agree_on_sparse_network(tmp_path):
    net = tmp_path / "net.json"
    assert run(["gen", "--n", "15", "--m", "5", "--seed", "0", "--dmax", "0.3",
                "--out", str(net)]) == 0
    outs = {}
    for method in ("proposed", "plain"):
        res = tmp_path / f"{method}.json"
        assert run(["solve", "--in", str(net), "--method", method, "--out", str(res)]) == 0
        outs[method] = json.loads(res.read_text())
    assert outs["proposed"]["C"] <= 0.3
    assert outs["proposed"]["kappa"] == 0.0
    for p, q in zip(outs["proposed"]["positions"], outs["plain"]["positions"]):
        assert true_distance(Point2(*p), Point2(*q)) < 1e-5


def test_bench_and_plot(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("sweep = sigma_db\nvalues = 1, 4\ntrials = 2\nseed = 3\nname = cliexp\n")
    prefix = tmp_path / "cliexp"
    assert run(["bench", "--config", str(cfg), "--n", "6", "--m", "3",
                "--out", str(prefix), "--svg"]) == 0

    with open(f"{prefix}_trials.csv", newline="") as fh:
        trials = list(csv.reader(fh))
    assert len(trials) == 1 + 2 * 2 * 2
    with open(f"{prefix}_summary.csv", newline="") as fh:
        summary = list(csv.reader(fh))
    assert len(summary) == 1 + 2 * 2
    assert summary[1][0] == "cliexp"
    for suffix in ("_rmse.svg", "_box.svg"):
        assert open(f"{prefix}{suffix}").read().startswith("<svg ")

    for kind in ("rmse", "box"):
        out = tmp_path / f"{kind}.svg"
        assert run(["plot", "--in", f"{prefix}_summary.csv", "--kind", kind,
                    "--out", str(out)]) == 0
        assert out.read_text().startswith("<svg ")


def test_bench_flag_overrides_file(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("sweep = sigma_db\nvalues = 2\ntrials = 3\nname = ov\n")
    prefix = tmp_path / "ov"
    assert run(["bench", "--config", str(cfg), "--n", "5", "--m", "3",
                "--trials", "1", "--out", str(prefix)]) == 0
    with open(f"{prefix}_trials.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 1 + 1 * 1 * 2  # one value, one trial, two methods


def test_bench_json_config(tmp_path):
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps({
        "sweep": "m", "values": [3, 4], "trials": 1, "n": 6,
        "methods": ["plain"], "name": "jsoncfg",
    }))
    prefix = tmp_path / "jsoncfg"
    assert run(["bench", "--config", str(cfg), "--out", str(prefix)]) == 0
    with open(f"{prefix}_summary.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert [r[1] for r in rows[1:]] == ["3", "4"]
    assert {r[2] for r in rows[1:]} == {"plain"}


def test_bench_rerun_byte_identical(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("sweep = epsilon\nvalues = 0, 0.02\ntrials = 2\nname = det\n")
    blobs = []
    for tag in ("x", "y"):
        prefix = tmp_path / tag
        assert run(["bench", "--config", str(cfg), "--n", "5", "--m", "3",
                    "--out", str(prefix)]) == 0
        blobs.append((open(f"{prefix}_trials.csv", "rb").read(),
                      open(f"{prefix}_summary.csv", "rb").read()))
    assert blobs[0] == blobs[1]


def test_jobs_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("WSNLOC_JOBS", "2")
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("sweep = sigma_db\nvalues = 2\ntrials = 2\nname = envjobs\n")
    prefix = tmp_path / "envjobs"
    assert run(["bench", "--config", str(cfg), "--n", "5", "--m", "3",
                "--out", str(prefix)]) == 0
    assert open(f"{prefix}_summary.csv").read().count("\n") == 3


def test_config_file_parsing(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(
        "# comment\n"
        "swept_parameter = d_max\n"
        "values = 0.4, 0.5\n"
        "base_seed = 9\n"
        "methods = proposed\n"
        "dmax = 0.5\n"
    )
    parsed = read_config_file(str(cfg))
    assert parsed["sweep"] == "d_max"
    assert parsed["values"] == [0.4, 0.5]
    assert parsed["seed"] == 9
    assert parsed["methods"] == ["proposed"]
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense_key = 1\n")
    try:
        read_config_file(str(bad))
    except ValueError as exc:
        assert "nonsense_key" in str(exc)
    else:
        raise AssertionError("unknown key accepted")


def test_error_paths(tmp_path, capsys):
    assert run(["solve", "--in", str(tmp_path / "missing.json")]) == 1
    assert "error:" in capsys.readouterr().err
    assert run(["gen", "--n", "0", "--m", "2"]) == 1
    assert "error:" in capsys.readouterr().err
    assert run(["gen", "--frobnicate"]) == 2
    assert run(["bench"]) == 1  # no sweep given
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["solve", "--in", str(bad)]) == 1
