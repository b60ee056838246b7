import json
import math
import os

import numpy as np
import pytest

import qmerge


def bell():
    return qmerge.maximally_entangled(2)


def test_bell_entropies():
    s = bell()
    assert s.dims == [2, 2]
    assert s.parties == ["A", "B"]
    assert qmerge.conditional_entropy(s) == pytest.approx(-1.0, abs=1e-9)
    assert qmerge.coherent_information(s) == pytest.approx(1.0, abs=1e-9)
    assert qmerge.mutual_info_env(s) == pytest.approx(0.0, abs=1e-9)


def test_state_validation():
    with pytest.raises(ValueError):
        qmerge.State(np.array([[1.0, 0.0], [0.0, 0.5]]), [2], ["A"])
    rho = np.diag([0.7, 0.3]).astype(complex)
    s = qmerge.State(rho, [2], ["A"])
    assert np.allclose(s.matrix, rho)
    assert qmerge.von_neumann_entropy(s) == pytest.approx(-(0.7 * math.log2(0.7) + 0.3 * math.log2(0.3)))


def test_partial_trace_of_bell_is_maximally_mixed():
    rho_a = qmerge.partial_trace(bell(), [0])
    assert np.allclose(rho_a.matrix, np.eye(2) / 2)


def test_trivial_instrument_gives_coherent_information():
    s = bell()
    assert qmerge.d1_rate(s, [[np.eye(2)]]) == pytest.approx(qmerge.coherent_information(s), abs=1e-12)


def test_rates_reports():
    xs = qmerge.StateSet([bell()], ["bell"])
    r = qmerge.compound_merging_cost(xs)
    assert r["quantity"] == "merging_cost"
    assert r["value"] == pytest.approx(-1.0, abs=1e-9)
    d = qmerge.distillation_rate_lower_bound(xs, restarts=2)
    assert d["value"] >= d["baseline"] - 1e-6


def test_hull_distance_zero():
    zero = qmerge.State(np.diag([1.0, 0.0]).astype(complex), [2], ["A"])
    one = qmerge.State(np.diag([0.0, 1.0]).astype(complex), [2], ["A"])
    value, weights = qmerge.distance_to_hull(np.eye(2) / 2, qmerge.StateSet([zero, one]))
    assert value < 1e-6
    assert weights == pytest.approx([0.5, 0.5], abs=1e-3)


def test_entropy_bins_sum_to_one():
    s = qmerge.State(np.diag([0.9, 0.1]).astype(complex), [2], ["A"])
    rows = qmerge.entropy_bin_probabilities(s, 4, 0.25)
    assert sum(r[3] for r in rows) == pytest.approx(1.0, abs=1e-9)
    assert qmerge.misbin_probability(s, 10, 0.25) < qmerge.misbin_probability(s, 4, 0.25)


def test_robustification_and_example_gap():
    r = qmerge.check_robustification(2, 3, [1.0, 0.9, 0.95, 1.0, 1.0, 0.9, 1.0, 1.0])
    assert r["pass"] is True
    g = qmerge.rate_gap_report(bell(), 2)
    assert g["gaps"] == pytest.approx([1.0, 1.0], abs=1e-6)


def test_cli_roundtrip():
    data = os.environ.get("QMERGE_DATA_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "data"))
    code, out, err = qmerge.run_cli(["rates", "--set", os.path.join(data, "bell_set.json")])
    assert code == 0, err
    assert json.loads(out)["merging_cost"]["value"] == pytest.approx(-1.0, abs=1e-9)
    code, _, err = qmerge.run_cli(["rates"])
    assert code == 2


def test_parse_error_is_value_error():
    with pytest.raises(qmerge.ParseError):
        qmerge.state_from_json('{"dims": [2], "parties": ["A"], "matrix": [1, 2, 3]}')
