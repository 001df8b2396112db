import io
import math
import pathlib
import zipfile

import pytest

import elicit

E2E = pathlib.Path(__file__).resolve().parents[1] / "fixtures" / "e2e"


def test_fit_normal_quartiles():
    j = {"minimum": -2.326, "q25": -0.6745, "median": 0.0, "q75": 0.6745, "maximum": 2.326}
    out = elicit.fit(j, family="normal")
    assert out["family"] == "normal"
    assert abs(out["params"]["mean"]) < 0.01
    assert abs(out["params"]["sd"] - 1.0) < 0.02


def test_fit_rejects_misordered_quantiles():
    j = {"minimum": 0, "q25": 2, "median": 1, "q75": 3, "maximum": 4}
    with pytest.raises(elicit.ElicitError) as info:
        elicit.fit(j)
    assert info.value.code == "quantile_order"


def test_pool_of_identical_normals():
    n = {"family": "normal", "params": {"mean": 1.0, "sd": 2.0}}
    out = elicit.pool([n, n], method="linear")
    assert out["weights"]["weights"] == [0.5, 0.5]
    assert abs(out["summary"]["median"] - 1.0) < 1e-6


def test_calibration_helpers():
    assert elicit.relative_entropy([0, 0, 0, 1], [0.25] * 4) == pytest.approx(math.log(4))
    assert elicit.calibration_score(0.0, 10) == 1.0
    with pytest.raises(elicit.ElicitError):
        elicit.relative_entropy([1, 0], [1.0, 0.0])


def test_classical_method_on_fixture():
    w = elicit.cm_weights(E2E / "seeds.csv", alpha=0.05)
    assert w["weights"]["expert_ids"] == ["expert1", "expert2", "expert3"]
    assert sum(w["weights"]["weights"]) == pytest.approx(1.0)
    folds = elicit.crossval(E2E / "seeds.csv", consensus_csv=E2E / "shelf.csv")
    assert len(folds["folds"]) == 10
    assert all("shelf" in f for f in folds["folds"])


def test_expert_view_has_no_truths():
    assert "truth" not in str(elicit.dataset(E2E / "seeds.csv"))
    assert "truth" in str(elicit.dataset(E2E / "seeds.csv", facilitator=True))


def test_scores_and_correlations():
    n = {"family": "normal", "params": {"mean": 0.0, "sd": 1.0}}
    table = elicit.scores([{"id": "a", "distributions": [n]}], [{"question_id": "q", "truth": 0.0}])
    row = table["rows"][0]
    assert row["logarithmic"] == pytest.approx(0.918939, abs=1e-6)
    assert row["quadratic"] == pytest.approx(0.515789, abs=1e-6)
    m = elicit.correlations(
        [{"id": "a", "medians": [1, 2, 3]}, {"id": "b", "medians": [3, 2, 1]}], [0, 0, 0]
    )
    assert m["matrix"][0][1] == pytest.approx(-1.0)


def test_checks_patient_sample():
    out = elicit.checks({"eta": 0.5, "psi": 0.5, "theta1": 0.8, "theta2": 0.6, "theta3": 0.1})
    assert out["patient_sample"]["counts"] == [50, 25, 25]


def test_bundle_is_a_valid_zip():
    data = elicit.bundle({"session.json": "{}\n", "scores/table.csv": "id,brier\nCM,1.0\n"})
    with zipfile.ZipFile(io.BytesIO(data)) as z:
        assert z.testzip() is None
        assert z.read("scores/table.csv") == b"id,brier\nCM,1.0\n"
