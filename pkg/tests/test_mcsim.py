"""Monte Carlo harness tests: deterministic seeding, bounds, small runs."""

import numpy as np
import pytest

from qgc import mcsim, presets
from qgc.prob import JointPmf, Pmf
from qgc.zring import Modulus

MOD4 = Modulus(2, 2)
NOISE = (0.06, 0.54, 0.04, 0.36)


def _packing_joint():
    table = np.array(
        [[0.25 * NOISE[(y - x) % 4] for y in range(4)] for x in range(4)]
    )
    return JointPmf(("x", "y"), table)


def _covering_joint():
    return JointPmf(("x", "xhat"), np.array([[0.4, 0.3, 0.2, 0.1]]))


def test_wilson_interval():
    p, lo, hi = mcsim.wilson_interval(0, 400)
    assert p == 0.0 and lo == 0.0 and hi > 0.0
    p, lo, hi = mcsim.wilson_interval(200, 400)
    assert p == pytest.approx(0.5)
    assert lo < 0.5 < hi
    assert hi - lo < 0.12


def test_covering_bound_frozen():
    cfg = mcsim.CoveringSimConfig(
        mod=MOD4, joint=_covering_joint(), n=12, k=3,
        u_pmf=Pmf.uniform(4), eps_u=4.0, eps=1.0, trials=1,
    )
    assert mcsim.covering_bound(cfg) == pytest.approx(0.15364, abs=1e-4)


def test_packing_bound_frozen():
    cfg = mcsim.PackingSimConfig(
        mod=MOD4, joint=_packing_joint(), n=8, k=2,
        u_pmf=Pmf.uniform(4), eps_u=4.0, eps=1.0, trials=1,
    )
    assert mcsim.packing_bound(cfg) == pytest.approx(0.05811, abs=1e-4)


def test_covering_good_configuration():
    cfg = mcsim.CoveringSimConfig(
        mod=MOD4, joint=_covering_joint(), n=12, k=3,
        u_pmf=Pmf.uniform(4), eps_u=4.0, eps=1.0, trials=100, seed=0,
    )
    rep = mcsim.empirical_covering(cfg)
    assert rep.rates["failure"][0] == 0.0
    assert rep.realized["margin"] > 0.3


def test_covering_violation_detected():
    joint = JointPmf(("x", "xhat"), np.array([[0.7, 0.1, 0.1, 0.1]]))
    cfg = mcsim.CoveringSimConfig(
        mod=MOD4, joint=joint, n=16, k=3,
        u_pmf=Pmf.uniform(4), eps_u=4.0, eps=1.0, trials=200, seed=0,
    )
    rep = mcsim.empirical_covering(cfg)
    assert rep.rates["failure"][0] > 0.1


def test_packing_contrast():
    low = mcsim.PackingSimConfig(
        mod=MOD4, joint=_packing_joint(), n=12, k=2,
        u_pmf=Pmf.uniform(4), eps_u=4.0, eps=1.0, trials=200, seed=0,
    )
    high = mcsim.PackingSimConfig(
        mod=MOD4, joint=_packing_joint(), n=8, k=5,
        u_pmf=Pmf.uniform(4), eps_u=4.0, eps=1.0, trials=200, seed=0,
    )
    rep_low = mcsim.empirical_packing(low)
    rep_high = mcsim.empirical_packing(high)
    assert rep_low.counts["false_candidates"] == 0
    assert rep_high.counts["false_candidates"] > rep_low.counts["false_candidates"]


def test_comp_mac_sim_noiseless_success():
    mac = presets.noiseless_adder_mac()
    cfg = mcsim.CompMacSimConfig(
        mod=MOD4, channel=mac.channel, n=4, k=1, l=1,
        u_pmf=Pmf.uniform(4), v_pmf=Pmf.uniform(4),
        eps_u=4.0, eps_v=4.0, eps_x=4.0, eps_y=16.0,
        trials=100, seed=0,
    )
    rep = mcsim.simulate_comp_mac(cfg)
    assert rep.rates["success_given_unique"][0] == 1.0
    assert rep.counts["success"] == rep.counts["enc_ok"]


def test_km_sim_report_structure_and_determinism():
    cfg = mcsim.KmSimConfig(
        source=presets.sum_source(), n=8, k=2, l=15,
        w_pmf=Pmf((0.95, 0.05, 0.0, 0.0)),
        eps_w=1.8, eps_d=3.7, eps_x=4.0, eps_z=0.5,
        trials=30, seed=0,
    )
    rep1 = mcsim.simulate_km(cfg)
    rep2 = mcsim.simulate_km(cfg)
    assert rep1.counts == rep2.counts
    assert rep1.trials == 30
    # error bookkeeping partitions the trials, then the encoder-ok trials
    assert (
        rep1.counts["e1"] + rep1.counts["e2"] + rep1.counts["enc_ok"]
    ) == rep1.trials
    assert rep1.counts["ed"] + rep1.counts["success"] == rep1.counts["enc_ok"]
    assert rep1.counts["ed"] == (
        rep1.counts["ed_no_candidate"]
        + rep1.counts["ed_multiple"]
        + rep1.counts["ed_wrong_unique"]
    )


def test_seed_changes_counts():
    cfg0 = mcsim.CoveringSimConfig(
        mod=MOD4, joint=JointPmf(("x", "xhat"), np.array([[0.7, 0.1, 0.1, 0.1]])),
        n=16, k=3, u_pmf=Pmf.uniform(4), eps_u=4.0, eps=1.0, trials=50, seed=0,
    )
    import dataclasses

    cfg1 = dataclasses.replace(cfg0, seed=1)
    r0 = mcsim.empirical_covering(cfg0)
    r1 = mcsim.empirical_covering(cfg1)
    assert r0.counts != r1.counts or r0.rates != r1.rates


def test_report_serialization():
    cfg = mcsim.CoveringSimConfig(
        mod=MOD4, joint=_covering_joint(), n=8, k=2,
        u_pmf=Pmf.uniform(4), eps_u=4.0, eps=1.0, trials=20, seed=0,
    )
    rep = mcsim.empirical_covering(cfg)
    d = rep.to_dict()
    assert {"scheme", "trials", "counts", "rates", "realized"} <= set(d)
