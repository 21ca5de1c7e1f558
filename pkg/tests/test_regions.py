"""Rate-region evaluation tests against frozen example values."""

import numpy as np
import pytest

from qgc import presets, regions
from qgc.errors import ValidationError
from qgc.prob import CondPmf, JointPmf, Pmf
from qgc.regions import AuxSpec, MacConfig, SourcePairConfig
from qgc.zring import Modulus

MOD4 = Modulus(2, 2)


def test_sum_source_construction():
    src = presets.sum_source()
    sum_law = src.sum_law()
    assert sum_law.probs == pytest.approx((0.06, 0.54, 0.04, 0.36), abs=1e-12)
    for name in ("x1", "x2"):
        assert src.joint.marginal_pmf(name).probs == pytest.approx(
            (0.25,) * 4, abs=1e-12
        )


def test_km_example_rates_frozen():
    src = presets.sum_source()
    res = regions.km_qgc_rate(src, presets.km_example_aux())
    assert res.values["r1"] == pytest.approx(1.66518, abs=1e-4)
    assert res.values["sum_rate"] == pytest.approx(3.33036, abs=1e-4)
    bl = regions.km_baselines(src)
    assert bl["unstructured"] == pytest.approx(3.43989, abs=1e-4)
    assert bl["linear_embed"] == pytest.approx(4.12213, abs=1e-4)
    assert bl["group"] == pytest.approx(3.88377, abs=1e-4)


def test_km_degenerate_denominator_flagged():
    src = presets.sum_source()
    # point-mass index letters: zero-entropy denominators at every level
    aux = AuxSpec(
        Pmf((1.0,)),
        {"w1": (Pmf.point_mass(0, 4),), "w2": (Pmf.point_mass(0, 4),)},
    )
    res = regions.km_qgc_rate(src, aux)
    assert res.values["r1"] == float("inf")
    assert any("degenerate" in f for f in res.flags)


def test_comp_mac_example_rates_frozen():
    mac = presets.adder_mac()
    aux = presets.comp_mac_example_aux()
    res = regions.comp_mac_uniform_input_rate(mac, aux)
    assert res.values["r1"] == pytest.approx(0.33481, abs=1e-4)
    general = regions.comp_mac_qgc_rate(mac, aux)
    assert general.values["r1"] == pytest.approx(res.values["r1"], abs=1e-12)


def test_comp_mac_baselines_frozen():
    bl = regions.comp_mac_baselines(presets.adder_mac())
    assert bl["unstructured_sym"] == pytest.approx(0.27997, abs=1e-3)
    assert bl["linear_embed_sym"] == pytest.approx(0.079, abs=0.01)
    assert bl["group_sym"] == pytest.approx(0.05811, abs=1e-3)


def test_mac_states_trace_frozen():
    res = regions.mac_states_sum_rate(presets.mac_states_example())
    assert float(res.trace["h_vsum_given_q"]) == pytest.approx(1.5, abs=1e-12)
    assert float(res.trace["h_zsum_given_yq"]) == pytest.approx(0.0, abs=1e-12)
    assert float(res.trace["penalty"]) == pytest.approx(1.5, abs=1e-12)
    assert res.values["sum_rate"] == pytest.approx(0.5, abs=1e-12)


def test_mac_states_cost_caps_enforced():
    cfg = presets.mac_states_example()
    # shrinking the cost cap below the scheme's expected cost must fail
    import dataclasses

    bad = dataclasses.replace(cfg, cost1=np.array([1.0, 1.0, 1.0, 1.0]))
    with pytest.raises(ValidationError):
        regions.mac_states_sum_rate(bad)


def test_gp_outer_check_frozen():
    out = regions.gp_example_outer_check()
    assert out["verdict"] is True
    assert float(out["reduced_margin"]) == pytest.approx(0.4555, abs=1e-3)
    assert float(out["empirical_max"]) == pytest.approx(0.2715, abs=1e-3)
    assert float(out["noiseless_max"]) == pytest.approx(1.0, abs=1e-9)


def test_optimizer_determinism_and_improvement():
    src = presets.sum_source()

    def evaluate(aux):
        return regions.km_qgc_rate(src, aux).values.get("sum_rate", float("inf"))

    def build(point):
        law = Pmf(tuple(point[0]))
        return AuxSpec(Pmf((1.0,)), {"w1": (law,), "w2": (law,)})

    a = regions.optimize_aux(evaluate, build, [4], maximize=False)
    b = regions.optimize_aux(evaluate, build, [4], maximize=False)
    assert a.values == b.values
    assert a.values["objective"] <= 3.33036 + 1e-6


def test_uniform_marginal_requirement():
    table = np.zeros((4, 4))
    table[0, 0] = 1.0
    src = SourcePairConfig(MOD4, JointPmf(("x1", "x2"), table))
    # degenerate joint still evaluates; sum law is the point mass
    assert src.sum_law().probs[0] == pytest.approx(1.0)


def test_table_rows_shapes():
    assert len(presets.table1_rows()) == 4
    assert sum(r["probability"] for r in presets.table1_rows()) == pytest.approx(1.0)
