import json

import numpy as np
import pytest

from cieig.cli import main
from cieig.predictions import load_prediction
from cieig.problems import read_dataset


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "ds"
    assert main(["gen", "--problem", "thermal", "--grid", "10",
                 "--seed", "1", "--out", str(path)]) == 0
    assert main(["truth", "--in", str(path)]) == 0
    return path


def test_gen_and_truth(dataset):
    pencil, field, truth = read_dataset(dataset)
    assert pencil.n == 100
    assert truth is not None and truth.m == 4


def test_gen_all_problems(tmp_path):
    for prob in ("thermal", "em", "plate"):
        out = tmp_path / prob
        assert main(["gen", "--problem", prob, "--grid", "5",
                     "--seed", "2", "--out", str(out)]) == 0
        pencil, _, _ = read_dataset(out)
        assert pencil.n == 25


def test_scout_writes_prediction(dataset, tmp_path):
    pred_path = tmp_path / "pred.json"
    assert main(["scout", "--in", str(dataset), "--method", "lanczos",
                 "--k", "60", "--out", str(pred_path)]) == 0
    pred = load_prediction(pred_path)
    assert pred.m == 4
    assert pred.source == "scout-ritz"


def test_contour_solve_round_trip(dataset, tmp_path):
    contours_path = tmp_path / "contours.json"
    result_path = tmp_path / "result.json"
    assert main(["contour", "--in", str(dataset), "--strategy", "kde",
                 "--nmin", "1", "--out", str(contours_path)]) == 0
    assert main(["solve", "--in", str(dataset),
                 "--contours", str(contours_path),
                 "--tol", "1e-10", "--out", str(result_path)]) == 0
    doc = json.loads(result_path.read_text())
    _, _, truth = read_dataset(dataset)
    got = np.asarray(doc["eigenvalues"])
    assert np.allclose(np.sort(got)[:truth.m], truth.eigenvalues, rtol=1e-8)


def test_bench_and_report(dataset, tmp_path):
    report_path = tmp_path / "report.json"
    csv_path = tmp_path / "report.csv"
    json2_path = tmp_path / "report2.json"
    assert main(["bench", "--in", str(dataset),
                 "--strategies", "oracle-kde", "--tols", "1e-8",
                 "--seeds", "1", "--out", str(report_path)]) == 0
    assert main(["report", "--in", str(report_path), "--csv", str(csv_path),
                 "--json", str(json2_path)]) == 0
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "problem_id,strategy,tolerance,metric,value"
    assert len(lines) > 1


def test_missing_dataset_exit_code(tmp_path):
    assert main(["truth", "--in", str(tmp_path / "nope")]) == 2


def test_bad_prediction_exit_code(dataset, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({
        "schema_version": 1, "problem_id": "p", "source": "eno",
        "values": [3.0, 1.0],
    }))
    assert main(["contour", "--in", str(dataset), "--strategy", "kde",
                 "--pred", str(bad), "--out", str(tmp_path / "c.json")]) == 4


def test_solver_error_exit_code(dataset, tmp_path):
    contours_path = tmp_path / "empty.json"
    contours_path.write_text(json.dumps({"contours": [{
        "shape": "circle", "center": [1e6, 0.0], "radius": 1.0,
        "expected_count": 1, "source": "manual",
    }]}))
    assert main(["solve", "--in", str(dataset),
                 "--contours", str(contours_path)]) == 3
