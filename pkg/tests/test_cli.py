import json

import pytest

from pswg.cli import main
from pswg.genmodel import save_graph

from conftest import make_hand_instance


def _gen_args(path, n="1024", seed="7"):
    return ["generate", "--n", n, "--c", "4", "--alpha", "2", "--dbar", "1",
            "--seed", seed, "--graph-out", str(path)]


def test_generate_is_deterministic(tmp_path, capsys):
    p1, p2 = tmp_path / "a.pswg", tmp_path / "b.pswg"
    assert main(_gen_args(p1)) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["n_nodes"] > 0
    assert summary["graph_out"] == str(p1)
    assert main(_gen_args(p2)) == 0
    assert p1.read_bytes() == p2.read_bytes()


def test_generate_rejects_degenerate_parameters(tmp_path, capsys):
    rc = main(_gen_args(tmp_path / "g.pswg", n="16"))
    assert rc == 2
    assert "shortcut range empty" in capsys.readouterr().err


def test_route_self_is_zero_hops(tmp_path, capsys):
    path = tmp_path / "g.pswg"
    assert main(_gen_args(path)) == 0
    capsys.readouterr()
    rc = main(["route", "--graph-in", str(path), "--source", "5", "--dest", "5"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["hops_total"] == 0 and out["status"] == "delivered"


def test_route_hand_instance(tmp_path, capsys):
    path = tmp_path / "hand.pswg"
    save_graph(make_hand_instance(), path)
    rc = main(["route", "--graph-in", str(path), "--source", "0", "--dest", "3",
               "--trace"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    out = json.loads(lines[0])
    assert out["hops_total"] == 3
    assert out["path"] == [0, 1, 2, 3]
    assert out["hops_shortcut"] == 1
    assert len(lines) == 1 + out["hops_total"]  # one trace line per hop


def test_route_both_algorithms_agree_on_hand_instance(tmp_path, capsys):
    path = tmp_path / "hand.pswg"
    save_graph(make_hand_instance(), path)
    for algo in ("approx_greedy", "pure_greedy"):
        rc = main(["route", "--graph-in", str(path), "--source", "0",
                   "--dest", "3", "--algo", algo])
        assert rc == 0
        assert json.loads(capsys.readouterr().out)["hops_total"] == 3


def test_route_corrupt_header(tmp_path, capsys):
    path = tmp_path / "bad.pswg"
    good = tmp_path / "good.pswg"
    save_graph(make_hand_instance(), good)
    lines = good.read_text().splitlines()
    lines[0] = "pswg what is this"
    path.write_text("\n".join(lines) + "\n")
    rc = main(["route", "--graph-in", str(path)])
    assert rc == 2
    assert "line 1" in capsys.readouterr().err


def test_route_missing_file(tmp_path, capsys):
    rc = main(["route", "--graph-in", str(tmp_path / "nope.pswg")])
    assert rc == 2
    assert capsys.readouterr().err.startswith("error:")


def test_sweep_single_cell_csv(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    args = ["sweep", "--n-grid", "1024", "--seeds", "1", "--pairs", "1",
            "--out", str(out)]
    assert main(args) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 2  # header + exactly one data row
    assert lines[0].startswith("n,seed,trial,")
    first = out.read_bytes()
    assert main(args) == 0
    assert out.read_bytes() == first


def test_sweep_malformed_grid(capsys):
    rc = main(["sweep", "--n-grid", "abc"])
    assert rc == 2
    assert "n-grid" in capsys.readouterr().err


def test_sweep_all_cells_failing_exits_2(tmp_path, capsys):
    rc = main(["sweep", "--n-grid", "16", "--seeds", "1", "--pairs", "1",
               "--out", str(tmp_path / "s.csv")])
    assert rc == 2
    assert "all trials failed" in capsys.readouterr().err


def test_sweep_fit_report(tmp_path, capsys):
    rc = main(["sweep", "--n-grid", "256,512,1024,2048", "--seeds", "2",
               "--pairs", "10", "--fit", "polylog", "--out", str(tmp_path / "s.csv")])
    assert rc == 0
    report = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert report["model"] == "polylog"
    assert report["hop_exponent_threshold"] is None  # alpha = 2
    assert report["b"] > 0


def test_verify_model_suite(capsys):
    rc = main(["verify", "--suite", "model", "--n", "512", "--seeds", "1"])
    out = capsys.readouterr().out
    assert rc == 0, out
    assert "fast_sampler == exact_sampler" in out
    assert "FAIL" not in out
    assert "all checks passed" in out


def test_verify_routing_suite(capsys):
    rc = main(["verify", "--suite", "routing", "--n", "1024", "--seed", "1"])
    out = capsys.readouterr().out
    assert rc == 0, out
    assert "hand instance" in out and "FAIL" not in out
