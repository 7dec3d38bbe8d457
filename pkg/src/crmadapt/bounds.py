"""Executable closed-form L2 performance bounds checked against traces.

Each evaluator returns a BoundReport pairing the analytic value with the
empirical norm integrated from a SimTrace. The bounds are proved
inequalities: a violation on a certified scenario is a bug signal, and the
test suite fails on any unsatisfied report.

The Lyapunov-based bounds take their decay rate and P matrix from a
certificate produced by ``kyp_solve``, which certifies the largest
feasible rate not above the slowest modal decay. The kernel-based bounds
for the augmented family use the modal decay itself together with the
sampled envelope constant of the matrix exponential.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .kyp import KypInfeasible, KypSolution, kyp_solve
from .lintf import RationalTransfer, decay_rate
from .matching import bezout_match
from .realize import observer_canonical
from .simengine import CompiledScenario, SimTrace, compile_scenario

__all__ = [
    "BoundReport",
    "CertificateUnavailable",
    "exp_envelope_constant",
    "exp_kernels",
    "filter_samples",
    "tracking_error_energy_bound",
    "augmented_error_energy_bounds",
    "swapping_error_energy_bound",
    "filtered_swap_and_tracking_bounds",
    "all_bound_reports",
]


class CertificateUnavailable(RuntimeError):
    """The bound cannot be evaluated (missing certificate or wrong family)."""


@dataclass(frozen=True)
class BoundReport:
    """One analytic bound against its empirical counterpart.

    ``satisfied`` allows the empirical value a quadrature tolerance of
    ``10 h^2 max(1, analytic)``: trapezoidal energy integrals carry an
    O(h^2) error, and scenarios with full parameter convergence meet some
    bounds with equality, so a raw strict comparison would test quadrature
    noise rather than the inequality. Real violations are orders of
    magnitude larger than this allowance.
    """

    bound_name: str
    analytic_value: float
    empirical_value: float
    satisfied: bool
    inputs: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "bound_name": self.bound_name,
            "analytic_value": self.analytic_value,
            "empirical_value": self.empirical_value,
            "satisfied": self.satisfied,
            "inputs": {k: (float(v) if np.isscalar(v) else v)
                       for k, v in self.inputs.items()},
        }


def _report(name, analytic, empirical, inputs, h) -> BoundReport:
    tol = 10.0 * h * h * max(1.0, abs(float(analytic)))
    inputs = dict(inputs)
    inputs["numeric_tolerance"] = tol
    return BoundReport(name, float(analytic), float(empirical),
                       bool(empirical <= analytic + tol), inputs)


# ---------------------------------------------------------------------------
# kernels and envelope constants
# ---------------------------------------------------------------------------

def exp_kernels(f1: float, mu: float, t: float, tau: float) -> tuple[float, float]:
    """The two exponential decay kernels exp(-f1 (t-tau)), exp(-mu (t-tau))."""
    if t < tau:
        raise ValueError("kernels require t >= tau")
    dt = t - tau
    return float(np.exp(-f1 * dt)), float(np.exp(-mu * dt))


def exp_envelope_constant(A: np.ndarray, mu: float, *, horizon_factor: float = 50.0,
                          samples: int = 2048) -> float:
    """Smallest sampled constant with ||exp(A t)|| <= const * exp(-mu t).

    Samples the envelope on t in [0, horizon_factor/mu] and never returns
    less than one.
    """
    A = np.asarray(A, dtype=float)
    if not np.all(np.linalg.eigvals(A).real < 0.0):
        raise ValueError("envelope constant requires a Hurwitz matrix")
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    T = horizon_factor / mu
    dt = T / (samples - 1)
    step = expm(A * dt)
    Phi = np.eye(A.shape[0])
    best = 1.0
    for k in range(samples):
        val = np.linalg.norm(Phi, 2) * np.exp(mu * k * dt)
        if val > best:
            best = val
        Phi = step @ Phi
    return float(best)


def filter_samples(tf: RationalTransfer, u: np.ndarray, h: float) -> np.ndarray:
    """Filter a sampled signal through a strictly proper transfer function.

    Uses the exact first-order-hold discretization of the observer
    canonical realization at the sample step, starting from rest.
    """
    ssm = observer_canonical(tf)
    n = ssm.order
    M = np.zeros((n + 2, n + 2))
    M[:n, :n] = ssm.A
    M[:n, n] = ssm.b
    M[n, n + 1] = 1.0
    E = expm(M * h)
    Ad = E[:n, :n]
    g1 = E[:n, n]
    g2 = E[:n, n + 1]
    b_now = g1 - g2 / h
    b_next = g2 / h
    x = np.zeros(n)
    y = np.empty(u.size)
    c = ssm.c
    y[0] = 0.0
    for k in range(u.size - 1):
        x = Ad @ x + b_now * u[k] + b_next * u[k + 1]
        y[k + 1] = c @ x
    return y


# ---------------------------------------------------------------------------
# certificate plumbing
# ---------------------------------------------------------------------------

def _error_model_certificate(cs: CompiledScenario) -> KypSolution:
    tf = cs.spr_tf if cs.family in ("crm_high_known", "crm_high_unknown") else cs.error_tf
    if cs.family == "orm_n1":
        tf = cs.ref_prime_tf
    model = observer_canonical(tf)
    mu_req = decay_rate(tf.den)
    try:
        return kyp_solve(model, mu_req)
    except KypInfeasible as exc:
        raise CertificateUnavailable(str(exc)) from exc


def _matched_vector(cs: CompiledScenario) -> np.ndarray:
    matched = bezout_match(cs.plant_tf,
                           RationalTransfer(cs.km, cs.ref_prime_tf.num,
                                            cs.ref_prime_tf.den),
                           lam=cs.lam)
    include_gain = cs.family != "crm_high_known"
    return matched.vector(include_gain=include_gain)


def _phi0(cs: CompiledScenario) -> np.ndarray:
    return np.asarray(cs.theta0, dtype=float) - _matched_vector(cs)


def _require_rest_ics(cs: CompiledScenario):
    if any(v != 0.0 for v in cs.x_p0) or any(v != 0.0 for v in cs.x_m0):
        raise CertificateUnavailable(
            "bounds are evaluated for rest initial conditions of the plant "
            "and reference model")


# ---------------------------------------------------------------------------
# bound evaluators
# ---------------------------------------------------------------------------

def tracking_error_energy_bound(sc, trace: SimTrace) -> BoundReport:
    """Energy bound on the tracking error for the relative-degree-1 families.

    analytic:  (1/2 mu) [ (lmax/lmin) ||e(0)||^2 + |kp| ||phi(0)||^2 / (gamma lmin) ]
    empirical: integral of ey^2 over the horizon.

    ||e(0)|| is the initial minimal error state in output units (zero for
    the rest initial conditions required here). The parameter-error term
    carries |kp| as a factor: the Lyapunov function that the update law
    actually decreases is e'Pe + phi'phi/(gamma |kp|) in the coordinates
    where the plant gain sits at the output, and unwinding e_y = kp c'e
    multiplies the energy through by kp^2. Scenarios with full parameter
    convergence meet this value with equality, which pins the constant.
    """
    cs = sc if isinstance(sc, CompiledScenario) else compile_scenario(sc)
    if cs.family not in ("orm_n1", "crm_n1"):
        raise CertificateUnavailable("tracking-error bound applies to the "
                                     "relative-degree-1 families")
    _require_rest_ics(cs)
    cert = _error_model_certificate(cs)
    phi0 = _phi0(cs)
    kp = abs(cs.plant_tf.gain)
    lmin, lmax = cert.lambda_min, cert.lambda_max
    e0 = 0.0
    analytic = (1.0 / (2.0 * cert.mu)) * (
        (lmax / lmin) * e0 ** 2
        + kp * float(phi0 @ phi0) / (cs.gamma * lmin))
    empirical = trace.l2_squared("ey")
    return _report("tracking_error_energy", analytic, empirical, {
        "mu": cert.mu, "lambda_max_P": lmax, "lambda_min_P": lmin,
        "gamma": cs.gamma, "abs_kp": kp, "e0_norm": e0,
        "phi0_norm": float(np.linalg.norm(phi0)),
    }, trace.h)


def augmented_error_energy_bounds(sc, trace: SimTrace) -> tuple[BoundReport, BoundReport]:
    """Energy bounds on the augmented error and the tuning rate
    for the known-gain augmented family.

    analytic (error):  (1/2 mu) [ (lmax/lmin) ||e(0)||^2 + ||phi(0)||^2 / (gamma lmin) ]
    analytic (rate):   (1/2) [ gamma^2 lmax ||e(0)||^2 + gamma ||phi(0)||^2 ]
    """
    cs = sc if isinstance(sc, CompiledScenario) else compile_scenario(sc)
    if cs.family != "crm_high_known":
        raise CertificateUnavailable("augmented-error bounds apply to the "
                                     "known-gain family")
    _require_rest_ics(cs)
    cert = _error_model_certificate(cs)
    phi0 = _phi0(cs)
    phi0_sq = float(phi0 @ phi0)
    lmin, lmax = cert.lambda_min, cert.lambda_max
    e0 = 0.0
    gamma = cs.gamma
    ea_bound = (1.0 / (2.0 * cert.mu)) * (
        (lmax / lmin) * e0 ** 2 + phi0_sq / (gamma * lmin))
    td_bound = 0.5 * (gamma ** 2 * lmax * e0 ** 2 + gamma * phi0_sq)
    inputs = {"mu": cert.mu, "lambda_max_P": lmax, "lambda_min_P": lmin,
              "gamma": gamma, "e0_norm": e0,
              "phi0_norm": float(np.sqrt(phi0_sq))}
    ea_emp = trace.l2_squared("ea")
    td_emp = trace.l2_squared("thetadot_norm")
    return (_report("augmented_error_energy", ea_bound, ea_emp, inputs, trace.h),
            _report("tuning_rate_energy", td_bound, td_emp, inputs, trace.h))


def _first_order_filter_pole(cs: CompiledScenario) -> float:
    f_poles = cs.scenario.f_poles
    if len(f_poles) != 1:
        raise CertificateUnavailable(
            "kernel bounds require the first-order regressor filter")
    return float(f_poles[0])


def swapping_error_energy_bound(sc, trace: SimTrace) -> BoundReport:
    """Energy bound on the auxiliary (swapping) error for the known-gain
    family with a first-order regressor filter.

    analytic: 3 [ echi(0)^2/(2 f1)
                  + (echi(0)^2/(4 f1^2) + ||w||_inf^2/f1^3) ||dtheta||_2^2 ]
    """
    cs = sc if isinstance(sc, CompiledScenario) else compile_scenario(sc)
    if cs.family != "crm_high_known":
        raise CertificateUnavailable("swapping-error bound applies to the "
                                     "known-gain family")
    f1 = _first_order_filter_pole(cs)
    echi0 = float(trace["echi"][0])
    w_inf = trace.linf("omegabar_norm")
    td_sq = trace.l2_squared("thetadot_norm")
    analytic = 3.0 * (echi0 ** 2 / (2.0 * f1)
                      + (echi0 ** 2 / (4.0 * f1 ** 2) + w_inf ** 2 / f1 ** 3) * td_sq)
    empirical = trace.l2_squared("echi")
    return _report("swapping_error_energy", analytic, empirical, {
        "f1": f1, "echi0": echi0, "omegabar_inf": w_inf,
        "thetadot_l2_sq": td_sq,
    }, trace.h)


def filtered_swap_and_tracking_bounds(sc, trace: SimTrace) -> tuple[BoundReport, BoundReport]:
    """Kernel bound on the filtered swapping error and the composite
    tracking inequality ||ey||^2 <= 2 ||ea||^2 + 2 ||ezeta||^2.

    The filtered swapping error is reconstructed offline by passing the
    logged auxiliary error through the error-path filter at the trace step.
    """
    cs = sc if isinstance(sc, CompiledScenario) else compile_scenario(sc)
    if cs.family != "crm_high_known":
        raise CertificateUnavailable("kernel bounds apply to the known-gain family")
    f1 = _first_order_filter_pole(cs)
    wf = RationalTransfer(cs.km, cs.spr_tf.num, cs.spr_tf.den)
    mu = decay_rate(wf.den)
    A_err = observer_canonical(wf).A
    m_const = exp_envelope_constant(A_err, mu)

    ezeta = filter_samples(wf, trace["echi"], trace.h)
    ezeta0 = float(ezeta[0])
    echi0 = float(trace["echi"][0])
    w_inf = trace.linf("omegabar_norm")
    td_sq = trace.l2_squared("thetadot_norm")

    ez_analytic = 3.0 * m_const ** 2 * (
        ezeta0 ** 2 / (2.0 * mu)
        + (echi0 ** 2 / (4.0 * mu * f1) + w_inf ** 2 / (mu * f1 ** 2)) * td_sq)
    ez_emp = float(np.trapezoid(ezeta * ezeta, dx=trace.h))
    ez_report = _report("filtered_swapping_error_energy", ez_analytic, ez_emp, {
        "mu": mu, "f1": f1, "m_const": m_const, "ezeta0": ezeta0,
        "echi0": echi0, "omegabar_inf": w_inf, "thetadot_l2_sq": td_sq,
    }, trace.h)

    ey_emp = trace.l2_squared("ey")
    ey_analytic = 2.0 * trace.l2_squared("ea") + 2.0 * ez_emp
    ey_report = _report("tracking_error_composite", ey_analytic, ey_emp, {
        "ea_l2_sq": trace.l2_squared("ea"), "ezeta_l2_sq": ez_emp,
    }, trace.h)
    return ez_report, ey_report


def all_bound_reports(sc, trace: SimTrace) -> list[BoundReport]:
    """Every bound applicable to the scenario's family."""
    cs = sc if isinstance(sc, CompiledScenario) else compile_scenario(sc)
    reports: list[BoundReport] = []
    if cs.family in ("orm_n1", "crm_n1"):
        reports.append(tracking_error_energy_bound(cs, trace))
    elif cs.family == "crm_high_known":
        reports.extend(augmented_error_energy_bounds(cs, trace))
        if len(cs.scenario.f_poles) == 1:
            reports.append(swapping_error_energy_bound(cs, trace))
            reports.extend(filtered_swap_and_tracking_bounds(cs, trace))
    return reports
