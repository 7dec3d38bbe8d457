"""Frozen numeric baselines from the first verified runs.

Integration is deterministic, so these values pin the exact behavior of
the reference scenarios; a drift here means the numerics changed, not
just a tolerance.
"""

import numpy as np
import pytest

from crmadapt import simulate, tracking_error_energy_bound

from helpers import example1_scenario


@pytest.fixture(scope="module")
def first_order_run():
    sc = example1_scenario(T=100.0, h=1e-3)
    return sc, simulate(sc)


def test_tracking_error_energy_baseline(first_order_run):
    _, trace = first_order_run
    assert trace.l2_squared("ey") == pytest.approx(0.012500009458916266,
                                                   rel=1e-9)


def test_terminal_error_baseline(first_order_run):
    _, trace = first_order_run
    tail = float(np.max(np.abs(trace["ey"][-10000:])))
    assert tail == pytest.approx(2.3898549805778657e-11, rel=1e-6, abs=1e-12)


def test_energy_bound_value_baseline(first_order_run):
    sc, trace = first_order_run
    rep = tracking_error_energy_bound(sc, trace)
    assert rep.analytic_value == pytest.approx(0.0125, rel=1e-12)


def test_closed_over_open_energy_ratio_baseline(first_order_run):
    from dataclasses import replace
    sc, trace = first_order_run
    open_trace = simulate(replace(sc, ell=(0.0,)))
    ratio = trace.l2_squared("ey") / open_trace.l2_squared("ey")
    assert ratio == pytest.approx(0.10000006926059492, rel=1e-9)
