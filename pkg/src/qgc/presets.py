"""Built-in example configurations used by the CLI and the test suite.

Everything here is constructed from first principles on ``Z_4``: an
additive-noise law with a skew parameter ``delta``, a source pair whose sum
is distributed like that noise, a modular-adder channel with the same noise,
and a noiseless state-dependent adder channel with zero-cost input
constraints.
"""

from __future__ import annotations

from typing import Dict, Tuple

import numpy as np

from .prob import CondPmf, JointPmf, Pmf
from .regions import AuxSpec, MacConfig, MacStatesConfig, SourcePairConfig
from .zring import Modulus

MOD4 = Modulus(2, 2)
DEFAULT_DELTA = 0.6


def noise_pmf(delta: float = DEFAULT_DELTA) -> Pmf:
    """Skewed additive-noise law on ``Z_4``.

    Mass ``delta`` splits 10/90 between letters 0 and 1; mass ``1 - delta``
    splits 10/90 between letters 2 and 3.
    """
    return Pmf(
        (0.1 * delta, 0.9 * delta, 0.1 * (1 - delta), 0.9 * (1 - delta))
    )


def sum_source(delta: float = DEFAULT_DELTA) -> SourcePairConfig:
    """Source pair on ``Z_4^2`` with ``P(x1, x2) = noise(x1 + x2) / 4``.

    Both marginals are uniform and the modular sum is distributed like the
    noise law.
    """
    noise = noise_pmf(delta)
    table = np.zeros((4, 4))
    for a in range(4):
        for b in range(4):
            table[a, b] = noise[(a + b) % 4] / 4.0
    return SourcePairConfig(MOD4, JointPmf(("x1", "x2"), table))


def binary_aux(p_one: float, names: Tuple[str, ...]) -> AuxSpec:
    """Trivial-selector auxiliary with each named law ``(1-p, p, 0, 0)``."""
    law = Pmf((1.0 - p_one, p_one, 0.0, 0.0))
    return AuxSpec(Pmf((1.0,)), {name: (law,) for name in names})


def km_example_aux(p_one: float = 0.05) -> AuxSpec:
    """Index-letter laws for the sum-compression example."""
    return binary_aux(p_one, ("w1", "w2"))


def adder_mac(delta: float = DEFAULT_DELTA) -> MacConfig:
    """Modular-adder channel ``Y = X1 + X2 + N`` on ``Z_4``."""
    noise = noise_pmf(delta)
    rows = []
    for a in range(4):
        for b in range(4):
            rows.append(Pmf(tuple(noise[(y - a - b) % 4] for y in range(4))))
    return MacConfig(MOD4, CondPmf(tuple(rows)))


def comp_mac_example_aux(p_one: float = 0.05) -> AuxSpec:
    """Index-letter laws for the channel-computation example.

    The same binary law drives both the rate numerators (``v``) and the
    penalty denominators (``w``).
    """
    return binary_aux(p_one, ("v1", "v2", "w1", "w2"))


def noiseless_adder_mac() -> MacConfig:
    """Deterministic channel ``Y = X1 + X2`` on ``Z_4``."""
    rows = []
    for a in range(4):
        for b in range(4):
            rows.append(Pmf.point_mass((a + b) % 4, 4))
    return MacConfig(MOD4, CondPmf(tuple(rows)))


def mac_states_example() -> MacStatesConfig:
    """Noiseless state-adder channel with zero-cost input constraints.

    ``Y = X1 + X2 + S1 + S2`` with uniform independent states; encoder 1
    may only use inputs ``{0, 2}`` and encoder 2 only ``{0, 1}`` (cost cap
    0).  The embedded scheme laws put ``Z_i`` uniform on a zero-cost coset
    of the state (``{s, s+2}`` for encoder 1, ``{s, s+1}`` for encoder 2)
    with ``X_i = Z_i - S_i``, and uniform binary code-index laws.
    """
    m = 4
    channel = np.zeros((m, m, m, m, m))
    for x1 in range(m):
        for x2 in range(m):
            for s1 in range(m):
                for s2 in range(m):
                    channel[x1, x2, s1, s2, (x1 + x2 + s1 + s2) % m] = 1.0
    cost1 = np.array([0.0, 1.0, 0.0, 1.0])  # inputs {1, 3} forbidden
    cost2 = np.array([0.0, 0.0, 1.0, 1.0])  # inputs {2, 3} forbidden

    def z_rows(offset: int) -> CondPmf:
        rows = []
        for s in range(m):
            probs = [0.0] * m
            probs[s % m] = 0.5
            probs[(s + offset) % m] = 0.5
            rows.append(Pmf(tuple(probs)))
        return CondPmf(tuple(rows))

    def x_rows() -> CondPmf:
        rows = []
        for z in range(m):
            for s in range(m):
                rows.append(Pmf.point_mass((z - s) % m, m))
        return CondPmf(tuple(rows))

    v_law = Pmf((0.5, 0.5, 0.0, 0.0))
    return MacStatesConfig(
        mod=MOD4,
        state1=Pmf.uniform(m),
        state2=Pmf.uniform(m),
        channel=channel,
        cost1=cost1,
        cost2=cost2,
        tau1=0.0,
        tau2=0.0,
        q_probs=Pmf((1.0,)),
        v1=(v_law,),
        v2=(v_law,),
        z1=(z_rows(2),),
        z2=(z_rows(1),),
        x1=(x_rows(),),
        x2=(x_rows(),),
    )


def table1_rows(delta: float = DEFAULT_DELTA) -> list:
    """The noise law as (letter, probability) rows."""
    noise = noise_pmf(delta)
    return [{"letter": a, "probability": noise[a]} for a in range(4)]
