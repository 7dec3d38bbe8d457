"""State-space realizations and closed-loop reference-model construction.

The reference model integrates

    dx_m = Am x_m + bm km r - ell (y - y_m),      y_m = cm' x_m

in observer canonical form (cm is the last standard basis vector). With
that sign convention the tracking-error dynamics have state matrix
``Am + ell cm'``, whose characteristic polynomial is ``Pm(s) - L(s)`` with
``L(s) = ell[0] + ell[1] s + ...``; stabilizing gains therefore carry
negative entries, and ``design_gain`` places the error poles exactly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .lintf import RationalTransfer, strip_gain
from .polyalg import Polynomial

__all__ = [
    "StateSpaceModel",
    "ReferenceModel",
    "NonMinimalErrorModel",
    "UnstableDesignWarning",
    "observer_canonical",
    "build_reference_model",
    "error_injection_tf",
    "tracking_error_tf",
    "design_gain",
    "nonminimal_error_model",
    "ssm_to_dict",
    "ssm_from_dict",
]


class UnstableDesignWarning(UserWarning):
    """A designed error transfer function has a non-Hurwitz denominator."""


@dataclass(frozen=True, eq=False)
class StateSpaceModel:
    """Minimal (A, b, c) triple with no feedthrough."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray

    @property
    def order(self) -> int:
        return self.A.shape[0]

    def freq_response(self, s) -> complex:
        n = self.order
        return complex(self.c @ np.linalg.solve(s * np.eye(n) - self.A, self.b))


def observer_canonical(tf: RationalTransfer) -> StateSpaceModel:
    """Observer-canonical realization with the gain folded into b.

    c is the last standard basis vector, A carries ones on the first
    subdiagonal and the negated denominator coefficients in the last
    column, and b holds the reversed numerator coefficients times the gain.
    """
    n = tf.den.degree
    if n < 1:
        raise ValueError("improper transfer function")
    dc = tf.den.coef  # [1, d1, ..., dn]
    A = np.zeros((n, n))
    for i in range(1, n):
        A[i, i - 1] = 1.0
    for i in range(n):
        A[i, n - 1] = -dc[n - i]
    padded = np.zeros(n)
    padded[n - tf.num.coef.size:] = tf.num.coef
    b = tf.gain * padded[::-1].copy()
    c = np.zeros(n)
    c[n - 1] = 1.0
    return StateSpaceModel(A, b, c)


@dataclass(frozen=True, eq=False)
class ReferenceModel:
    """Observer-canonical reference model with output-error injection gain."""

    Am: np.ndarray
    bm: np.ndarray   # realizes the unit-gain part; km is applied at the input
    cm: np.ndarray
    km: float
    ell: np.ndarray

    @property
    def order(self) -> int:
        return self.Am.shape[0]

    def error_state_matrix(self) -> np.ndarray:
        """State matrix of the tracking-error dynamics, ``Am + ell cm'``."""
        return self.Am + np.outer(self.ell, self.cm)


def build_reference_model(Wm: RationalTransfer, ell) -> ReferenceModel:
    ell = np.atleast_1d(np.asarray(ell, dtype=float))
    m = Wm.den.degree
    if ell.size != m:
        raise ValueError(f"gain vector has {ell.size} entries, expected {m}")
    km, Wm_prime = strip_gain(Wm)
    ssm = observer_canonical(Wm_prime)
    return ReferenceModel(ssm.A, ssm.b, ssm.c, km, ell)


def _ell_polynomial(ell: np.ndarray) -> Polynomial:
    # L(s) = ell[0] + ell[1] s + ... + ell[m-1] s^(m-1)
    return Polynomial(ell[::-1])


def error_injection_tf(Wm: RationalTransfer, ell) -> RationalTransfer:
    """Transfer function from tracking error into the reference output.

    The entries of the gain vector map one-to-one onto the numerator
    coefficients over the reference denominator; the last entry is the
    high-frequency gain.
    """
    ell = np.atleast_1d(np.asarray(ell, dtype=float))
    if ell.size != Wm.den.degree:
        raise ValueError(f"gain vector has {ell.size} entries, expected {Wm.den.degree}")
    L = _ell_polynomial(ell)
    if L.is_zero:
        return RationalTransfer(0.0, Polynomial([1.0]), Wm.den)
    kl, Zl = L.monic_scaled()
    return RationalTransfer(kl, Zl, Wm.den)


def tracking_error_tf(Wm: RationalTransfer, ell) -> RationalTransfer:
    """Unit-gain error transfer function of the closed-loop reference model.

    Numerator: the reference zeros. Denominator: ``Pm(s) - L(s)``, the
    characteristic polynomial of ``Am + ell cm'``. A non-Hurwitz result is
    returned with a warning since a design search may pass through it.
    """
    ell = np.atleast_1d(np.asarray(ell, dtype=float))
    if ell.size != Wm.den.degree:
        raise ValueError(f"gain vector has {ell.size} entries, expected {Wm.den.degree}")
    den = Wm.den - _ell_polynomial(ell)
    if den.degree != Wm.den.degree:
        raise ValueError("error denominator lost degree; invalid gain vector")
    tf = RationalTransfer(1.0, Wm.num, den)
    if not den.is_hurwitz():
        warnings.warn("tracking-error denominator is not Hurwitz",
                      UnstableDesignWarning, stacklevel=2)
    return tf


def design_gain(Wm: RationalTransfer, target_poles) -> np.ndarray:
    """Gain vector placing the tracking-error poles at the given locations.

    The map from the gain vector to the error characteristic polynomial is
    affine and onto, so the match is exact.
    """
    targets = np.atleast_1d(np.asarray(target_poles, dtype=complex))
    m = Wm.den.degree
    if targets.size != m:
        raise ValueError(f"{targets.size} target poles given, expected {m}")
    if not np.all(targets.real < 0.0):
        raise ValueError("all target poles must have negative real parts")
    desired = Polynomial.from_roots(targets)
    L = Wm.den - desired  # degree <= m-1
    ell = np.zeros(m)
    lc = L.coef[::-1]  # ascending powers
    ell[:lc.size] = lc
    if L.is_zero:
        ell[:] = 0.0
    return ell


@dataclass(frozen=True, eq=False)
class NonMinimalErrorModel:
    """Non-minimal error dynamics used as a cross-validation oracle."""

    Ae: np.ndarray
    bmn: np.ndarray
    cmn: np.ndarray
    kp: float

    def freq_response(self, s) -> complex:
        n = self.Ae.shape[0]
        return self.kp * complex(
            self.cmn @ np.linalg.solve(s * np.eye(n) - self.Ae, self.bmn))


def nonminimal_error_model(plant: RationalTransfer, Lambda: np.ndarray,
                           b_lambda: np.ndarray, theta_star, ell,
                           Wm: RationalTransfer) -> NonMinimalErrorModel:
    """Assemble the non-minimal error state matrix for a matched loop.

    The plant block keeps its gain at the output, the regressor filters are
    wired with the matched parameters, and the reference injection enters
    through an embedding of the reference state into the observable part,
    computed from the intertwining equations and verified against the
    minimal error transfer function by the caller's tests.
    """
    kp, plant_prime = strip_gain(plant)
    p = observer_canonical(plant_prime)
    n = p.order
    nl = n - 1
    Lambda = np.asarray(Lambda, dtype=float).reshape(nl, nl)
    b_lambda = np.asarray(b_lambda, dtype=float).reshape(nl)
    k_star, th1, th0, th2 = _split_theta(theta_star, n)

    N = 3 * n - 2
    A = np.zeros((N, N))
    kpc = kp * p.c
    A[:n, :n] = p.A + np.outer(p.b * th0, kpc)
    A[:n, n:n + nl] = np.outer(p.b, th1)
    A[:n, n + nl:] = np.outer(p.b, th2)
    A[n:n + nl, :n] = np.outer(b_lambda * th0, kpc)
    A[n:n + nl, n:n + nl] = Lambda + np.outer(b_lambda, th1)
    A[n:n + nl, n + nl:] = np.outer(b_lambda, th2)
    A[n + nl:, :n] = np.outer(b_lambda, kpc)
    A[n + nl:, n + nl:] = Lambda

    bmn = np.zeros(N)
    bmn[:n] = p.b
    bmn[n:n + nl] = b_lambda
    cmn = np.zeros(N)
    cmn[:n] = p.c

    ref = build_reference_model(Wm, ell)
    G = _embedding_matrix(A, kp * cmn, ref.Am, ref.cm)
    Ae = A + np.outer(G @ ref.ell, kp * cmn)
    return NonMinimalErrorModel(Ae, bmn, cmn, kp)


def _split_theta(theta_star, n: int):
    if hasattr(theta_star, "k_star"):
        return (theta_star.k_star, np.asarray(theta_star.theta1_star, dtype=float),
                float(theta_star.theta0_star), np.asarray(theta_star.theta2_star, dtype=float))
    v = np.asarray(theta_star, dtype=float).ravel()
    if v.size != 2 * n:
        raise ValueError(f"matched parameter vector has {v.size} entries, expected {2 * n}")
    return float(v[0]), v[1:n], float(v[n]), v[n + 1:]


def _embedding_matrix(A_big: np.ndarray, c_big: np.ndarray,
                      A_small: np.ndarray, c_small: np.ndarray) -> np.ndarray:
    """Solve ``A_big T = T A_small`` with ``c_big' T = c_small'`` by least squares."""
    N = A_big.shape[0]
    m = A_small.shape[0]
    sylvester = np.kron(np.eye(m), A_big) - np.kron(A_small.T, np.eye(N))
    out_rows = np.kron(np.eye(m), c_big.reshape(1, N))
    M = np.vstack([sylvester, out_rows])
    rhs = np.concatenate([np.zeros(N * m), c_small])
    sol, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    resid = float(np.linalg.norm(M @ sol - rhs))
    if resid > 1e-7:
        raise ValueError(f"reference-state embedding failed (residual {resid:.2e})")
    return sol.reshape(m, N).T


def ssm_to_dict(ssm: StateSpaceModel) -> dict:
    return {"A": ssm.A.tolist(), "b": ssm.b.tolist(), "c": ssm.c.tolist()}


def ssm_from_dict(d: dict) -> StateSpaceModel:
    return StateSpaceModel(np.asarray(d["A"], dtype=float),
                           np.asarray(d["b"], dtype=float),
                           np.asarray(d["c"], dtype=float))
