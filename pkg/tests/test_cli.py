"""Command-line behavior: exit codes, formats, and output routing."""

import json
import math

import pytest

from pentaspin import SpinState, marginals_from_state, regular_pentagram
from pentaspin.cli import main

SQRT5 = math.sqrt(5.0)

AXIS_EVAL = json.dumps({
    "state": {"re": [0, 0, 1], "im": [0, 0, 0]},
    "pentagram": "regular",
})


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_eval_regular_axis_violates(capsys):
    code, out, _ = run(capsys, "eval", "--input", AXIS_EVAL)
    report = json.loads(out)
    assert code == 3
    assert report["verdict"] == "violates"
    assert report["K"] == pytest.approx(SQRT5, abs=1e-12)
    assert report["kcbs_spin_form"] == pytest.approx(5.0 - SQRT5, abs=1e-12)
    assert report["correlation_form"] == pytest.approx(5.0 - 4.0 * SQRT5,
                                                       abs=1e-12)
    assert report["gram_max"] == pytest.approx(SQRT5, abs=1e-12)
    for p in report["per_leg"]:
        assert p == pytest.approx(1.0 / SQRT5, abs=1e-12)


def test_eval_coherent_state_is_classical(capsys):
    r = 1.0 / math.sqrt(2.0)
    inp = json.dumps({"state": {"re": [r, 0, 0], "im": [0, r, 0]}})
    code, out, _ = run(capsys, "eval", "--input", inp)
    assert code == 0
    assert json.loads(out)["verdict"] == "classical-compatible"


def test_eval_chain_pentagram_input(capsys):
    inp = json.dumps({
        "state": {"re": [0, 0, 1], "im": [0, 0, 0]},
        "pentagram": {"l1": [0, 0, 1], "t": [0.9, 0.9, 0.9]},
    })
    code, out, _ = run(capsys, "eval", "--input", inp)
    assert code in (0, 3)
    assert "K" in json.loads(out)


def test_eval_denormalized_state_needs_flag(capsys):
    inp = json.dumps({"state": {"re": [0, 0, 2], "im": [0, 0, 0]}})
    code, _, err = run(capsys, "eval", "--input", inp)
    assert code == 2
    assert "error" in err
    code, out, _ = run(capsys, "eval", "--normalize", "--input", inp)
    assert code == 3
    assert json.loads(out)["K"] == pytest.approx(SQRT5, abs=1e-12)


def test_eval_csv(capsys):
    code, out, _ = run(capsys, "eval", "--format", "csv", "--input", AXIS_EVAL)
    assert code == 3
    lines = out.strip().splitlines()
    assert len(lines) == 2
    assert lines[0].split(",")[0] == "K"
    assert lines[1].split(",")[4] == "violates"


def test_eval_float_formatting_is_17g(capsys):
    _, out, _ = run(capsys, "eval", "--input", AXIS_EVAL)
    # 17 significant digits round-trip doubles exactly
    assert "2.2360679774997898" in out


def test_certify_quantum_exact(capsys):
    code, out, _ = run(capsys, "certify", "--mode", "exact", "--input",
                       AXIS_EVAL)
    report = json.loads(out)
    assert code == 3
    assert report["verdict"] == "infeasible"
    assert report["mode"] == "exact"
    assert "/" in report["margin"]
    assert report["violated"]["class"] == "nontrivial"
    # the echoed model is the float input; rationalization is internal
    assert report["model"]["mode"] == "float"


def test_certify_emitted_model_recertifies(capsys):
    code, out, _ = run(capsys, "certify", "--mode", "exact", "--input",
                       AXIS_EVAL)
    model_json = json.dumps(json.loads(out)["model"])
    code2, out2, _ = run(capsys, "certify", "--input", model_json)
    assert code == code2 == 3
    assert json.loads(out2)["verdict"] == "infeasible"


def test_certify_classical_tables(capsys):
    contexts = [[0, 1], [1, 2], [2, 3], [3, 4], [0, 4]]
    tables = {
        str(k): {"--": "1/4", "-+": "1/4", "+-": "1/4", "++": "1/4"}
        for k in range(5)
    }
    inp = json.dumps({
        "n": 5, "contexts": contexts, "mode": "exact", "tables": tables,
    })
    code, out, _ = run(capsys, "certify", "--input", inp)
    report = json.loads(out)
    assert code == 0
    assert report["verdict"] == "feasible"
    assert report["witness"] is not None


def test_certify_borderline_blend_is_indeterminate(capsys):
    quantum = marginals_from_state(regular_pentagram(), SpinState(0, 0, 1.0))
    t = 3.0 / (4.0 * SQRT5 - 5.0)
    tables = {}
    for k, cm in enumerate(quantum.marginals):
        enc = {}
        for key, v in cm.table.items():
            sign = "".join("-" if s == -1 else "+" for s in key)
            enc[sign] = t * v + (1.0 - t) * 0.25
        tables[str(k)] = enc
    inp = json.dumps({
        "n": 5,
        "contexts": [[0, 1], [1, 2], [2, 3], [3, 4], [0, 4]],
        "mode": "float",
        "tables": tables,
    })
    code, out, _ = run(capsys, "certify", "--input", inp)
    assert code == 4
    assert json.loads(out)["verdict"] == "indeterminate"


def test_certify_rejects_csv(capsys):
    code, _, err = run(capsys, "certify", "--format", "csv", "--input",
                       AXIS_EVAL)
    assert code == 2
    assert "JSON only" in err


def test_malformed_input(capsys):
    code, _, err = run(capsys, "eval", "--input", '{"state": [1, 2')
    assert code == 2
    assert err.startswith("error")
    code, _, err = run(capsys, "certify", "--input", '{"nothing": 1}')
    assert code == 2


def test_cone_pentagram5(capsys):
    code, out, _ = run(capsys, "cone", "--input", "pentagram5")
    report = json.loads(out)
    assert code == 0
    assert report["counts"] == {"trivial": 20, "nontrivial": 16, "total": 36}
    classes = {r["class"] for r in report["rays"]}
    assert classes == {"trivial", "nontrivial"}
    assert report["structure"]["n"] == 5


def test_cone_custom_structure(capsys):
    inp = json.dumps({"n": 2, "contexts": [[0, 1]]})
    code, out, _ = run(capsys, "cone", "--input", inp)
    report = json.loads(out)
    assert code == 0
    assert report["counts"] == {"trivial": 4, "nontrivial": 0, "total": 4}


def test_cone_rejects_csv(capsys):
    code, _, err = run(capsys, "cone", "--format", "csv", "--input",
                       "pentagram5")
    assert code == 2
    assert "JSON only" in err


def test_search_state_deterministic(capsys):
    inp = json.dumps({
        "state": {"re": [0, 0, 1], "im": [0, 0, 0]},
        "config": {"restarts": 6, "max_iterations": 200},
    })
    code, out1, _ = run(capsys, "search", "--seed", "11", "--input", inp)
    assert code == 0
    code, out2, _ = run(capsys, "search", "--seed", "11", "--input", inp)
    assert out1 == out2
    report = json.loads(out1)
    assert report["config"]["seed"] == 11
    assert report["best_K"] == pytest.approx(SQRT5, abs=1e-5)


def test_search_scan_csv(capsys):
    inp = json.dumps({
        "concurrences": [0.3],
        "config": {"restarts": 4, "max_iterations": 150},
    })
    code, out, _ = run(capsys, "search", "--seed", "5", "--format", "csv",
                       "--input", inp)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "concurrence,phi,best_K,violation,violated,regular_K"
    assert len(lines) == 2


def test_search_requires_seed(capsys):
    with pytest.raises(SystemExit):
        main(["search", "--input", "{}"])


def test_biphoton_plan(capsys):
    inp = json.dumps({"true_rate": 0.44721, "threshold": 0.4,
                      "confidence": 0.95})
    code, out, _ = run(capsys, "biphoton", "plan", "--input", inp)
    report = json.loads(out)
    assert code == 0
    assert report["trials"] == 287
    # floats serialize at 17 significant digits
    assert "0.40000000000000002" in out


def test_biphoton_simulate_deterministic(capsys):
    inp = json.dumps({"rate": 0.4472, "trials": 500})
    code, out1, _ = run(capsys, "biphoton", "simulate", "--seed", "3",
                        "--input", inp)
    assert code == 0
    _, out2, _ = run(capsys, "biphoton", "simulate", "--seed", "3",
                     "--input", inp)
    assert out1 == out2
    report = json.loads(out1)
    assert 0 <= report["coincidences"] <= 500
    assert report["ci"][0] <= report["estimate"] <= report["ci"][1]


def test_biphoton_sweep_rows(capsys):
    delta = math.acos(5.0 ** -0.25)
    inp = json.dumps({
        "angles": [0.0, delta], "trials": 400, "visibility": 0.98,
    })
    code, out, _ = run(capsys, "biphoton", "sweep", "--seed", "9",
                       "--input", inp)
    report = json.loads(out)
    assert code == 0
    rows = report["sweep"]
    assert len(rows) == 2
    assert rows[0]["predicted"] == pytest.approx(0.98 + 0.02 / 4.0)
    assert rows[1]["predicted"] == pytest.approx(
        0.98 / SQRT5 + 0.02 / 4.0, abs=1e-12
    )


def test_output_file_and_env_dir(tmp_path, monkeypatch, capsys):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "eval", "--input", AXIS_EVAL,
                       "--output", str(target))
    assert code == 3
    assert out == ""
    assert json.loads(target.read_text())["verdict"] == "violates"

    outdir = tmp_path / "routed"
    outdir.mkdir()
    monkeypatch.setenv("PENTASPIN_OUTPUT_DIR", str(outdir))
    code, _, _ = run(capsys, "eval", "--input", AXIS_EVAL,
                     "--output", "bare.json")
    assert code == 3
    assert (outdir / "bare.json").exists()


def test_input_from_file(tmp_path, capsys):
    src = tmp_path / "in.json"
    src.write_text(AXIS_EVAL)
    code, out, _ = run(capsys, "eval", "--input", str(src))
    assert code == 3
    assert json.loads(out)["verdict"] == "violates"


def test_missing_input_file(capsys):
    code, _, err = run(capsys, "eval", "--input", "no/such/file.json")
    assert code == 2
    assert "error" in err


def test_seed_validation_is_argparse_level(capsys):
    with pytest.raises(SystemExit):
        main(["search", "--seed", "-1", "--input", "{}"])
