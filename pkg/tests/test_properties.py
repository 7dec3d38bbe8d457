"""Randomized end-to-end properties across the scenario space.

The energy bound is a proved inequality for every certified scenario, so
any randomized violation is a bug; the scenarios are seeded and therefore
reproducible.
"""

import warnings

import numpy as np

from crmadapt import (Polynomial, RationalTransfer, Scenario, SignalSpec,
                      SprPreconditionError, design_gain, simulate,
                      tracking_error_energy_bound)
from crmadapt.simengine import compile_scenario


def _random_rd1_scenario(rng):
    n = int(rng.integers(1, 3))
    zeros = -rng.uniform(0.5, 3.0, n - 1)
    poles = rng.uniform(-3.0, 0.8, n)  # possibly unstable plant
    kp = rng.uniform(0.5, 3.0) * rng.choice([-1.0, 1.0])
    plant = RationalTransfer(kp, Polynomial.from_roots(zeros),
                             Polynomial.from_roots(poles))
    ref_zeros = -rng.uniform(0.5, 3.0, n - 1)
    ref_poles = -rng.uniform(0.5, 3.0, n)
    ref = RationalTransfer(float(rng.uniform(0.5, 2.0)),
                           Polynomial.from_roots(ref_zeros),
                           Polynomial.from_roots(ref_poles))
    targets = -rng.uniform(2.0, 6.0, n)
    ell = design_gain(ref, targets)
    signal = SignalSpec(kind="multisine",
                        components=((1.0, float(rng.uniform(0.2, 0.8)), 0.0),
                                    (0.6, float(rng.uniform(1.0, 3.0)), 1.0)))
    return Scenario(plant=plant, reference=ref, family="crm_n1",
                    ell=tuple(ell), gamma=float(rng.uniform(1.0, 10.0)),
                    signal=signal, T=30.0, h=1e-3)


def test_randomized_certified_scenarios_respect_the_bound():
    rng = np.random.default_rng(20260808)
    done = 0
    while done < 5:
        sc = _random_rd1_scenario(rng)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                cs = compile_scenario(sc)
        except (SprPreconditionError, ValueError):
            continue
        trace = simulate(cs)
        assert np.all(np.isfinite(trace["y"]))
        assert np.max(trace["theta_norm"]) < 1e3
        rep = tracking_error_energy_bound(cs, trace)
        assert rep.satisfied, (sc.plant, sc.ell, rep.analytic_value,
                               rep.empirical_value)
        done += 1
