"""Scenario validation, fixed-step integration and trace logging.

A Scenario bundles the plant truth, the reference model, the controller
family and every numeric knob of a run. ``simulate`` validates the family
preconditions (minimum phase, relative degrees, the SPR certificate of the
family's error path), integrates the fused closed loop with classical RK4
on a uniform grid, and returns an immutable SimTrace. Identical scenarios
produce bit-identical traces.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _loops
from .lintf import (RationalTransfer, SprCertificate, is_minimum_phase,
                    is_spr, relative_degree, strip_gain, tf_to_dict)
from .matching import default_lambda
from .polyalg import Polynomial

__all__ = [
    "SignalSpec",
    "Scenario",
    "SimTrace",
    "ScenarioError",
    "SprPreconditionError",
    "SimulationDiverged",
    "resolve_signal",
    "compile_scenario",
    "simulate",
    "rk4_step",
    "l2_norm",
    "linf_norm",
]

DIVERGENCE_LIMIT = 1e9


class ScenarioError(ValueError):
    """Invalid or inconsistent scenario configuration."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class SprPreconditionError(RuntimeError):
    """A required SPR certificate failed at scenario build time."""

    def __init__(self, name: str, certificate: SprCertificate):
        super().__init__(
            f"SPR precondition '{name}' failed: {certificate.reason or 'not SPR'} "
            f"(min Re = {certificate.min_real_part_margin:.3e}, "
            f"hurwitz margin = {certificate.hurwitz_margin:.3e})")
        self.name = name
        self.certificate = certificate


class SimulationDiverged(RuntimeError):
    """A state left the admissible region during integration."""

    def __init__(self, signal: str, time: float):
        super().__init__(f"divergence: |{signal}| exceeded {DIVERGENCE_LIMIT:g} "
                         f"at t = {time:.6f}")
        self.signal = signal
        self.time = time


# ---------------------------------------------------------------------------
# reference signals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SignalSpec:
    """Deterministic closed-form reference signal.

    kinds: ``step`` (amplitude), ``sine`` (amplitude, frequency rad/s,
    phase), ``multisine`` (components of (amplitude, frequency, phase)),
    ``square`` (amplitude, period).
    """

    kind: str = "step"
    amplitude: float = 1.0
    frequency: float = 1.0
    phase: float = 0.0
    period: float = 20.0
    components: tuple = ()
    offset: float = 0.0

    def to_dict(self) -> dict:
        d = {"type": self.kind, "amplitude": self.amplitude, "offset": self.offset}
        if self.kind == "sine":
            d.update(frequency=self.frequency, phase=self.phase)
        elif self.kind == "multisine":
            d["components"] = [list(c) for c in self.components]
        elif self.kind == "square":
            d["period"] = self.period
        return d


def resolve_signal(spec: SignalSpec):
    amp, off = spec.amplitude, spec.offset
    if spec.kind == "step":
        def r(t, _a=amp, _o=off):
            return _a + _o
    elif spec.kind == "sine":
        w, ph = spec.frequency, spec.phase

        def r(t, _a=amp, _w=w, _p=ph, _o=off):
            return _a * math.sin(_w * t + _p) + _o
    elif spec.kind == "multisine":
        comps = tuple((float(a), float(w), float(p)) for a, w, p in spec.components)

        def r(t, _c=comps, _o=off):
            acc = _o
            for a, w, p in _c:
                acc += a * math.sin(w * t + p)
            return acc
    elif spec.kind == "square":
        per = spec.period

        def r(t, _a=amp, _p=per, _o=off):
            return (_a if (t % _p) < 0.5 * _p else -_a) + _o
    else:
        raise ScenarioError(f"unknown signal type '{spec.kind}'", "signal.type")
    return r


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Scenario:
    """Complete description of one closed-loop run."""

    plant: RationalTransfer
    reference: RationalTransfer
    family: str
    ell: tuple = ()
    gamma: float = 1.0
    a_filter: float | None = None          # relative degree 2 filter pole
    f_poles: tuple = ()                    # augmented-family filter poles
    signal: SignalSpec = SignalSpec()
    T: float = 50.0
    h: float = 1e-3
    theta0: object = None                  # None -> zeros, "random", or values
    seed: int = 0
    k_chi0: float = 0.0
    lam: Polynomial | None = None          # regressor filter polynomial override
    x_p0: tuple = ()
    x_m0: tuple = ()
    theta_star: tuple | None = None        # enables reconstruction diagnostics


@dataclass
class CompiledScenario:
    scenario: Scenario
    family: str
    n: int
    m: int
    plant_tf: RationalTransfer       # as integrated (normalized for known-gain family)
    ref_prime_tf: RationalTransfer
    km: float
    sign_kp: float
    ell: np.ndarray
    lam: Polynomial
    gamma: float
    a_filter: float | None
    f_cols: tuple
    wf_cols: tuple
    error_tf: RationalTransfer | None
    spr_tf: RationalTransfer
    certificates: dict
    rfun: object
    theta0: list
    x_p0: list
    x_m0: list
    k_chi0: float
    theta_star_bar: tuple | None
    nsteps: int
    resolved: dict = field(default_factory=dict)
    loop: _loops.LoopSpec | None = None


def _theta_size(family: str, n: int) -> int:
    return 2 * n - 1 if family == "crm_high_known" else 2 * n


def _resolve_theta0(sc: Scenario, size: int) -> list:
    if sc.theta0 is None:
        return [0.0] * size
    if isinstance(sc.theta0, str):
        if sc.theta0 == "zeros":
            return [0.0] * size
        if sc.theta0 == "random":
            rng = np.random.default_rng(sc.seed)
            return [float(v) for v in rng.uniform(-1.0, 1.0, size)]
        raise ScenarioError(f"unknown theta0 spec '{sc.theta0}'", "theta0")
    vals = [float(v) for v in np.atleast_1d(np.asarray(sc.theta0, dtype=float))]
    if len(vals) != size:
        raise ScenarioError(f"theta0 has {len(vals)} entries, expected {size}", "theta0")
    return vals


def _tracking_error_den(ref: RationalTransfer, ell: np.ndarray) -> Polynomial:
    return ref.den - Polynomial(ell[::-1])


def compile_scenario(sc: Scenario) -> CompiledScenario:
    """Validate a scenario and assemble the integrable closed loop.

    Checks the plant assumptions (minimum phase, declared sign, relative
    degree matching the family), certifies the family's SPR precondition,
    and builds the fused derivative loop.
    """
    if sc.family not in ("orm_n1", "crm_n1", "crm_n2", "crm_high_known",
                         "crm_high_unknown"):
        raise ScenarioError(f"unknown family '{sc.family}'", "family")
    if sc.gamma <= 0.0:
        raise ScenarioError("gamma must be positive", "gamma")
    if sc.h <= 0.0 or sc.T <= 0.0:
        raise ScenarioError("T and h must be positive", "T/h")
    nsteps = int(round(sc.T / sc.h))
    if nsteps < 1 or abs(nsteps * sc.h - sc.T) > 1e-9 * max(1.0, sc.T):
        raise ScenarioError("horizon T must be an integer number of steps h", "T")

    plant, ref = sc.plant, sc.reference
    if plant.is_zero:
        raise ScenarioError("plant gain must be nonzero", "plant.k")
    if not is_minimum_phase(plant):
        raise ScenarioError("plant is not minimum phase", "plant")
    rd = relative_degree(plant)
    if relative_degree(ref) != rd:
        raise ScenarioError(
            f"reference relative degree {relative_degree(ref)} "
            f"does not match plant relative degree {rd}", "reference")

    n = plant.den.degree
    m = ref.den.degree
    ell = np.zeros(m)
    if sc.family == "orm_n1":
        if len(sc.ell) and np.any(np.asarray(sc.ell, dtype=float) != 0.0):
            raise ScenarioError("open-loop family requires a zero gain vector", "ell")
    else:
        if len(sc.ell) != m:
            raise ScenarioError(f"ell has {len(sc.ell)} entries, expected {m}", "ell")
        ell = np.asarray(sc.ell, dtype=float)

    km, ref_prime = strip_gain(ref)
    sign_kp = 1.0 if plant.gain > 0 else -1.0
    plant_run = plant
    km_run = km

    lam = sc.lam if sc.lam is not None else default_lambda(ref, n)
    if lam.degree != n - 1:
        raise ScenarioError(f"lam degree {lam.degree}, expected {n - 1}", "lam")
    if not (lam.degree == 0 or lam.is_hurwitz()):
        raise ScenarioError("lam must be Hurwitz", "lam")

    err_den = _tracking_error_den(ref, ell)
    error_tf = RationalTransfer(1.0, ref.num, err_den)
    certificates: dict[str, SprCertificate] = {}
    a_filter = sc.a_filter
    f_cols: tuple = ((),)
    wf_cols: tuple = ((), ())

    if sc.family in ("orm_n1", "crm_n1"):
        # a wrong relative degree surfaces through the SPR verdict (exit 3)
        spr_name = "W_m_prime" if sc.family == "orm_n1" else "W_e_prime"
        spr_tf = error_tf if sc.family == "crm_n1" else ref_prime
        cert = is_spr(spr_tf)
        certificates[spr_name] = cert
        if not cert.verdict:
            raise SprPreconditionError(spr_name, cert)
    elif sc.family == "crm_n2":
        if a_filter is None or a_filter <= 0.0:
            raise ScenarioError("crm_n2 requires a positive filter pole a", "filter.a")
        try:
            spr_tf = RationalTransfer(1.0, error_tf.num * Polynomial([1.0, a_filter]),
                                      error_tf.den)
        except ValueError:
            raise ScenarioError("filtered error path is improper; crm_n2 needs a "
                                "relative degree 2 plant", "family") from None
        cert = is_spr(spr_tf)
        certificates["W_e_prime_times_A"] = cert
        if not cert.verdict:
            raise SprPreconditionError("W_e_prime_times_A", cert)
    else:
        if rd < 2:
            raise ScenarioError("augmented families target relative degree >= 2",
                                "family")
        if len(sc.f_poles) != rd - 1:
            raise ScenarioError(f"filter needs {rd - 1} poles, got {len(sc.f_poles)}",
                                "filter.f")
        if any(f <= 0.0 for f in sc.f_poles):
            raise ScenarioError("filter poles must be positive", "filter.f")
        fden = Polynomial([1.0])
        for f in sc.f_poles:
            fden = fden * Polynomial([1.0, float(f)])
        spr_tf = RationalTransfer(1.0, error_tf.num * fden, error_tf.den)
        cert = is_spr(spr_tf)
        certificates["W_f_prime"] = cert
        if not cert.verdict:
            raise SprPreconditionError("W_f_prime", cert)
        f_cols = (_loops._obs_cols(RationalTransfer(1.0, Polynomial([1.0]), fden))[0],)
        wf_cols = _loops._obs_cols(spr_tf)
        if sc.family == "crm_high_known":
            # the known gain is divided out of the loop; unit gains all around
            plant_run = RationalTransfer(1.0, plant.num, plant.den)
            km_run = 1.0
            sign_kp = 1.0

    theta0 = _resolve_theta0(sc, _theta_size(sc.family, n))
    x_p0 = _pad_ic(sc.x_p0, n, "x_p0")
    x_m0 = _pad_ic(sc.x_m0, m, "x_m0")

    theta_star_bar = None
    if sc.theta_star is not None:
        tsb = [float(v) for v in sc.theta_star]
        want = _theta_size(sc.family, n)
        if len(tsb) != want:
            raise ScenarioError(f"theta_star has {len(tsb)} entries, expected {want}",
                                "theta_star")
        theta_star_bar = tuple(tsb)
    if sc.family != "crm_high_known":
        theta_star_bar = None  # reconstruction diagnostics only for the known family

    cs = CompiledScenario(
        scenario=sc, family=sc.family, n=n, m=m,
        plant_tf=plant_run, ref_prime_tf=ref_prime, km=km_run,
        sign_kp=sign_kp, ell=ell, lam=lam, gamma=sc.gamma,
        a_filter=a_filter, f_cols=f_cols, wf_cols=wf_cols,
        error_tf=error_tf, spr_tf=spr_tf, certificates=certificates,
        rfun=resolve_signal(sc.signal), theta0=theta0,
        x_p0=x_p0, x_m0=x_m0, k_chi0=float(sc.k_chi0),
        theta_star_bar=theta_star_bar, nsteps=nsteps)
    cs.resolved = _resolved_dict(cs)
    cs.loop = _loops.build_loop(cs)
    return cs


def _pad_ic(values, size, path) -> list:
    vals = [float(v) for v in values]
    if not vals:
        return [0.0] * size
    if len(vals) != size:
        raise ScenarioError(f"{path} has {len(vals)} entries, expected {size}", path)
    return vals


def _resolved_dict(cs: CompiledScenario) -> dict:
    sc = cs.scenario
    d = {
        "plant": tf_to_dict(sc.plant),
        "reference": tf_to_dict(sc.reference),
        "family": cs.family,
        "ell": [float(v) for v in cs.ell],
        "gamma": cs.gamma,
        "signal": sc.signal.to_dict(),
        "T": sc.T,
        "h": sc.h,
        "theta0": list(cs.theta0),
        "seed": sc.seed,
        "lam": cs.lam.to_list(),
        "x_p0": list(cs.x_p0),
        "x_m0": list(cs.x_m0),
    }
    if cs.family == "crm_n2":
        d["filter"] = {"a": cs.a_filter}
    elif cs.family in ("crm_high_known", "crm_high_unknown"):
        d["filter"] = {"f": [float(v) for v in sc.f_poles]}
        d["k_chi0"] = cs.k_chi0
    if cs.family == "crm_high_known":
        d["normalization"] = {
            "applied": True,
            "kp_original": float(sc.plant.gain),
            "km_original": float(sc.reference.gain),
        }
    if cs.theta_star_bar is not None:
        d["theta_star"] = list(cs.theta_star_bar)
    return d


# ---------------------------------------------------------------------------
# integration
# ---------------------------------------------------------------------------

def rk4_step(f, x: np.ndarray, t: float, h: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step of dx/dt = f(t, x)."""
    x = np.asarray(x, dtype=float)
    k1 = np.asarray(f(t, x))
    k2 = np.asarray(f(t + 0.5 * h, x + 0.5 * h * k1))
    k3 = np.asarray(f(t + 0.5 * h, x + 0.5 * h * k2))
    k4 = np.asarray(f(t + h, x + h * k3))
    out = x + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    if not np.all(np.isfinite(out)):
        raise FloatingPointError(f"non-finite state after step at t = {t:.6f}: {out}")
    return out


@dataclass(frozen=True, eq=False)
class SimTrace:
    """Uniform-grid record of one closed-loop run."""

    family: str
    h: float
    t: np.ndarray
    columns: dict
    theta: np.ndarray
    resolved: dict
    certificates: dict

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def has(self, name: str) -> bool:
        return name in self.columns

    def l2(self, name: str, upto: float | None = None) -> float:
        return l2_norm(self.columns[name], h=self.h, upto=upto)

    def l2_squared(self, name: str, upto: float | None = None) -> float:
        v = self.columns[name]
        if upto is not None:
            v = v[:int(round(upto / self.h)) + 1]
        return float(np.trapezoid(v * v, dx=self.h))

    def linf(self, name: str) -> float:
        return linf_norm(self.columns[name])

    def running_integral(self, name: str) -> np.ndarray:
        """Cumulative trapezoid of the squared signal."""
        v = self.columns[name]
        sq = v * v
        inc = 0.5 * self.h * (sq[1:] + sq[:-1])
        return np.concatenate([[0.0], np.cumsum(inc)])

    def csv_columns(self) -> list[str]:
        cols = ["t", "r", "y", "ym", "ey", "u", "theta_norm"]
        if self.family in ("crm_high_known", "crm_high_unknown"):
            cols += ["ea", "echi"]
        if self.family == "crm_high_unknown":
            cols.append("kchi")
        return cols

    def to_csv(self) -> str:
        cols = self.csv_columns()
        arrays = [self.t if c == "t" else self.columns[c] for c in cols]
        lines = [",".join(cols)]
        fmt = "%.17g"
        for i in range(self.t.size):
            lines.append(",".join(fmt % a[i] for a in arrays))
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_csv())


def simulate(sc: Scenario | CompiledScenario) -> SimTrace:
    """Integrate a scenario and log every grid point.

    Raises SimulationDiverged as soon as any state or the control value
    leaves [-1e9, 1e9], naming the first offending signal.
    """
    cs = sc if isinstance(sc, CompiledScenario) else compile_scenario(sc)
    loop = cs.loop
    rhs = loop.rhs
    outputs = loop.outputs
    nsteps = cs.nsteps
    h = cs.scenario.h
    N = len(loop.x0)

    X = list(loop.x0)
    k1 = [0.0] * N
    k2 = [0.0] * N
    k3 = [0.0] * N
    k4 = [0.0] * N
    xt = [0.0] * N

    names = loop.out_names
    cols = {name: np.empty(nsteps + 1) for name in names}
    col_arrays = [cols[name] for name in names]
    nth = loop.theta_count
    th0 = loop.theta_start
    theta_log = np.empty((nsteps + 1, nth))
    tgrid = np.empty(nsteps + 1)

    u_index = names.index("u")
    limit = DIVERGENCE_LIMIT
    state_names = loop.state_names

    def log(k, t):
        vals = outputs(t, X)
        for i, arr in enumerate(col_arrays):
            arr[k] = vals[i]
        theta_log[k] = X[th0:th0 + nth]
        tgrid[k] = t
        uv = vals[u_index]
        if not (-limit < uv < limit):
            raise SimulationDiverged("u", t)

    log(0, 0.0)
    hh = 0.5 * h
    s6 = h / 6.0
    for step in range(nsteps):
        t = step * h
        rhs(t, X, k1)
        for i in range(N):
            xt[i] = X[i] + hh * k1[i]
        rhs(t + hh, xt, k2)
        for i in range(N):
            xt[i] = X[i] + hh * k2[i]
        rhs(t + hh, xt, k3)
        for i in range(N):
            xt[i] = X[i] + h * k3[i]
        rhs(t + h, xt, k4)
        for i in range(N):
            X[i] += s6 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])
        tn = (step + 1) * h
        for i in range(N):
            v = X[i]
            if not (-limit < v < limit):
                raise SimulationDiverged(state_names[i], tn)
        log(step + 1, tn)

    return SimTrace(family=cs.family, h=h, t=tgrid, columns=cols,
                    theta=theta_log, resolved=cs.resolved,
                    certificates=cs.certificates)


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def l2_norm(values, h: float | None = None, t=None, upto: float | None = None) -> float:
    """L2 norm of a uniformly sampled signal by trapezoidal quadrature."""
    v = np.asarray(values, dtype=float)
    if h is None and t is None:
        raise ValueError("provide the step h or the time grid t")
    if h is None:
        h = float(t[1] - t[0])
    if upto is not None:
        v = v[:int(round(upto / h)) + 1]
    return float(np.sqrt(np.trapezoid(v * v, dx=h)))


def linf_norm(values) -> float:
    v = np.asarray(values, dtype=float)
    return float(np.max(np.abs(v)))


def trace_to_json(trace: SimTrace) -> str:
    return json.dumps(trace.resolved, indent=2, sort_keys=True)
