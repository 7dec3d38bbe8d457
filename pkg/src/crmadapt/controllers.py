"""Adaptive controller families as continuous-time blocks.

Each family is expressed as pure derivative maps: given the measured
signals and the current controller state, return the control value and the
time derivatives of every adapted or filtered quantity. The simulation
engine integrates fused versions of the same equations; the functions here
are the readable reference and are cross-checked against the fused loops
in the test suite.

Families
--------
relative degree 1 :  u = theta' omega,      dtheta = -gamma sign(kp) ey omega
relative degree 2 :  u = dtheta' zeta + theta' omega,
                     dtheta = -gamma sign(kp) ey zeta,  zeta = omega / (s+a)
augmented, kp known:  u = r + theta' omega_bar, tuning driven by the
                     augmented error through the SPR-restored filter path
augmented, kp unknown: full regressor plus the adapted gain k_chi
"""

from __future__ import annotations

import numpy as np

from .realize import ReferenceModel

__all__ = [
    "FAMILIES",
    "reference_model_step",
    "regressor_step",
    "ctrl_n1",
    "ctrl_n2",
    "ctrl_highrel_known",
    "ctrl_highrel_unknown",
]

FAMILIES = ("orm_n1", "crm_n1", "crm_n2", "crm_high_known", "crm_high_unknown")


def reference_model_step(ref: ReferenceModel, x_m: np.ndarray, r: float,
                         y: float) -> tuple[np.ndarray, float]:
    """One derivative evaluation of the closed-loop reference model.

    With a zero injection gain this is the open-loop update; otherwise the
    tracking error is fed back so the error dynamics get the state matrix
    ``Am + ell cm'``.
    """
    y_m = float(ref.cm @ x_m)
    dx_m = ref.Am @ x_m + ref.bm * (ref.km * r) - ref.ell * (y - y_m)
    return dx_m, y_m


def regressor_step(Lambda: np.ndarray, b_lambda: np.ndarray,
                   omega1: np.ndarray, omega2: np.ndarray,
                   u: float, y: float) -> tuple[np.ndarray, np.ndarray]:
    """Input- and output-side filter updates."""
    return Lambda @ omega1 + b_lambda * u, Lambda @ omega2 + b_lambda * y


def ctrl_n1(theta: np.ndarray, omega: np.ndarray, e_y: float,
            gamma: float, sign_kp: float) -> tuple[float, np.ndarray]:
    """Gradient law for relative degree one.

    omega stacks [r, omega1, y, omega2]; theta carries the feedforward
    gain in its first slot.
    """
    u = float(theta @ omega)
    dtheta = -gamma * np.sign(sign_kp) * e_y * omega
    return u, dtheta


def ctrl_n2(theta: np.ndarray, omega: np.ndarray, zeta: np.ndarray,
            e_y: float, gamma: float, sign_kp: float,
            a_filter: float) -> tuple[float, np.ndarray, np.ndarray]:
    """Relative degree two: the update is computed first, then used in u."""
    dtheta = -gamma * np.sign(sign_kp) * e_y * zeta
    u = float(dtheta @ zeta + theta @ omega)
    dzeta = -a_filter * zeta + omega
    return u, dtheta, dzeta


def ctrl_highrel_known(theta_bar: np.ndarray, omega_bar: np.ndarray,
                       zeta_bar: np.ndarray, f_out_chi: float,
                       f_out_aug: float, r: float, e_y: float,
                       gamma: float) -> tuple[float, np.ndarray, float, float, float]:
    """Augmented-error law with the high-frequency gain normalized to one.

    ``f_out_chi`` is the regressor filter applied to theta' omega_bar and
    ``f_out_aug`` the SPR filter state output; both filters are integrated
    by the caller. There is no algebraic loop: the SPR filter is strictly
    proper, so the augmented error is explicit. Returns
    (u, dtheta_bar, e_a, e_chi, aug_input).
    """
    u = r + float(theta_bar @ omega_bar)
    e_chi = float(theta_bar @ zeta_bar) - f_out_chi
    e_a = e_y + f_out_aug
    dtheta_bar = -gamma * e_a * zeta_bar
    aug_input = e_chi - e_a * float(zeta_bar @ zeta_bar)
    return u, dtheta_bar, e_a, e_chi, aug_input


def ctrl_highrel_unknown(theta: np.ndarray, omega: np.ndarray,
                         zeta: np.ndarray, k_chi: float, f_out_chi: float,
                         f_out_aug: float, e_y: float, gamma: float,
                         sign_kp: float) -> tuple[float, np.ndarray, float, float, float, float]:
    """Augmented-error law with unknown high-frequency gain of known sign.

    The feedforward gain lives inside theta and the auxiliary-error gain
    k_chi is adapted alongside. Returns
    (u, dtheta, dk_chi, e_a, e_chi, aug_input).
    """
    u = float(theta @ omega)
    e_chi = float(theta @ zeta) - f_out_chi
    e_a = e_y + f_out_aug
    dtheta = -gamma * np.sign(sign_kp) * e_a * zeta
    dk_chi = -gamma * e_a * e_chi
    aug_input = k_chi * e_chi - e_a * float(zeta @ zeta)
    return u, dtheta, dk_chi, e_a, e_chi, aug_input
