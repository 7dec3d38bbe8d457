"""Ideal controller parameters via the Bezout (Diophantine) identity.

For a plant ``kp Z/P`` of order n and a reference ``km Zm/Pm`` of equal
relative degree, the matched parameters make the closed loop reproduce the
reference exactly. The regressor filter polynomial ``lam(s)`` has degree
n-1 and must contain the reference zeros; the remaining factor is free and
defaults to poles at -1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lintf import RationalTransfer
from .polyalg import Polynomial

__all__ = ["MatchedParameters", "default_lambda", "regressor_companion",
           "bezout_match"]


@dataclass(frozen=True, eq=False)
class MatchedParameters:
    """Ideal gains: feedforward k, filter taps, output gain, feedback taps."""

    k_star: float
    theta1_star: np.ndarray
    theta0_star: float
    theta2_star: np.ndarray
    condition_number: float

    def vector(self, include_gain: bool = True) -> np.ndarray:
        parts = [self.theta1_star, [self.theta0_star], self.theta2_star]
        if include_gain:
            parts.insert(0, [self.k_star])
        return np.concatenate([np.atleast_1d(np.asarray(p, dtype=float))
                               for p in parts])

    def to_dict(self) -> dict:
        return {
            "k_star": self.k_star,
            "theta1_star": [float(v) for v in self.theta1_star],
            "theta0_star": self.theta0_star,
            "theta2_star": [float(v) for v in self.theta2_star],
            "condition_number": self.condition_number,
        }


def default_lambda(Wm: RationalTransfer, n: int) -> Polynomial:
    """Monic Hurwitz filter polynomial of degree n-1 containing the
    reference zeros; the free factor places its remaining roots at -1."""
    zm = Wm.num
    extra = n - 1 - zm.degree
    if extra < 0:
        raise ValueError("reference model has more zeros than the plant "
                         "order allows for the regressor filters")
    lam = zm
    for _ in range(extra):
        lam = lam * Polynomial([1.0, 1.0])
    return lam


def regressor_companion(lam: Polynomial) -> tuple[np.ndarray, np.ndarray]:
    """Controllable-companion pair for the regressor filters.

    The state chain realizes [1, s, ..., s^(q-1)]' / lam(s), so controller
    tap vectors read off polynomial coefficients directly.
    """
    q = lam.degree
    Lam = np.zeros((q, q))
    for i in range(q - 1):
        Lam[i, i + 1] = 1.0
    for j in range(q):
        Lam[q - 1, j] = -lam.coef[q - j]
    b = np.zeros(q)
    if q:
        b[q - 1] = 1.0
    return Lam, b


def bezout_match(plant: RationalTransfer, Wm: RationalTransfer,
                 lam: Polynomial | None = None) -> MatchedParameters:
    """Solve the polynomial matching identity for the ideal parameters.

    Solves (lam - C) P - kp Z D = Z lam1 Pm with lam = Zm lam1, for C of
    degree <= n-2 and D of degree <= n-1, as a dense linear system in the
    2n-1 free coefficients. The feedforward gain is km/kp.
    """
    n = plant.den.degree
    if plant.den.degree - plant.num.degree != Wm.den.degree - Wm.num.degree:
        raise ValueError("plant and reference relative degrees differ")
    lam = lam if lam is not None else default_lambda(Wm, n)
    if lam.degree != n - 1:
        raise ValueError(f"filter polynomial degree {lam.degree}, expected {n - 1}")
    lam1, rem = _polydiv_exact(lam, Wm.num)
    if lam1 is None:
        raise ValueError("filter polynomial must contain the reference zeros; "
                         f"division remainder {rem:.2e}")

    Z, P, Pm = plant.num, plant.den, Wm.den
    kp = plant.gain
    rhs_poly = lam * P - Z * lam1 * Pm
    width = 2 * n - 1
    rhs = _pad_front(rhs_poly.coef, width)

    cols = []
    for i in range(n - 1):          # C coefficients, ascending powers
        cols.append(_pad_front(_shift(P, i).coef, width))
    for j in range(n):              # D coefficients, ascending powers
        cols.append(_pad_front((kp * _shift(Z, j)).coef, width))
    M = np.column_stack(cols)
    cond = float(np.linalg.cond(M))
    if not np.isfinite(cond) or cond > 1e12:
        raise ValueError("plant not coprime: matching system is singular "
                         f"(condition number {cond:.3e})")
    sol = np.linalg.solve(M, rhs)

    c_coeffs = sol[:n - 1]          # ascending
    d_coeffs = sol[n - 1:]          # ascending
    theta1 = c_coeffs.copy()
    theta0 = float(d_coeffs[n - 1]) if n >= 1 else 0.0
    # D(s) = theta0 lam(s) + theta2' [1, s, ..., s^(n-2)]'
    lam_asc = lam.coef[::-1]
    theta2 = d_coeffs[:n - 1] - theta0 * lam_asc[:n - 1]
    return MatchedParameters(k_star=Wm.gain / kp, theta1_star=theta1,
                             theta0_star=theta0, theta2_star=theta2,
                             condition_number=cond)


def _shift(p: Polynomial, k: int) -> Polynomial:
    """Multiply by s^k."""
    if p.is_zero:
        return p
    return Polynomial(np.concatenate([p.coef, np.zeros(k)]))


def _pad_front(coef: np.ndarray, width: int) -> np.ndarray:
    out = np.zeros(width)
    if coef.size > width:
        if np.max(np.abs(coef[:coef.size - width])) > 1e-9:
            raise ValueError("matching system degree overflow")
        coef = coef[coef.size - width:]
    out[width - coef.size:] = coef
    return out


def _polydiv_exact(num: Polynomial, den: Polynomial):
    q, r = np.polydiv(num.coef, den.coef)
    rmax = float(np.max(np.abs(r))) if np.size(r) else 0.0
    if rmax > 1e-9 * max(1.0, float(np.max(np.abs(num.coef)))):
        return None, rmax
    return Polynomial(q), 0.0
