"""Lyapunov certificates for SPR realizations (Anderson-form equations).

Solves, for a realization (A, b, c) of an SPR transfer function and a
requested decay rate mu,

    A' P + P A = -g g' - 2 mu P,      P b = c,      P = P' > 0.

The requested rate is the slowest modal decay of A, but that value is the
supremum of certifiable rates and is often not attained: for most
second-order SPR functions the constraint set becomes empty exactly at the
modal rate (Example: num (s+3), den (s+2)(s+1) is infeasible at mu = 1).
``kyp_solve`` therefore certifies the largest feasible rate not exceeding
the request, found by closed form for orders 1 and 2 and by a numeric
least-squares search above that. Every returned certificate satisfies the
equations to tight residuals, so any Lyapunov bound evaluated with it is
valid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .realize import StateSpaceModel

__all__ = ["KypSolution", "KypInfeasible", "kyp_solve"]

_P1_CAP = 1e6          # conditioning guard on the order-2 closed form
_BISECT_ITERS = 60
_RESIDUAL_TOL = 1e-8


class KypInfeasible(ValueError):
    """No certificate could be constructed (realization not SPR, or the
    numeric path failed to converge)."""


@dataclass(frozen=True, eq=False)
class KypSolution:
    """Certificate (P, g, mu) with the equation residual."""

    P: np.ndarray
    g: np.ndarray
    mu: float
    residual: float
    mu_requested: float = 0.0

    @property
    def lambda_min(self) -> float:
        return float(np.min(np.linalg.eigvalsh(self.P)))

    @property
    def lambda_max(self) -> float:
        return float(np.max(np.linalg.eigvalsh(self.P)))


def _residual(A, b, c, P, g, mu) -> tuple[float, float]:
    eq = A.T @ P + P @ A + np.outer(g, g) + 2.0 * mu * P
    return float(np.linalg.norm(eq)), float(np.linalg.norm(P @ b - c))


def _solve_order1(A, b, c, mu):
    a = float(A[0, 0])
    if b[0] == 0.0:
        return None
    P = c[0] / b[0]
    if P <= 0.0:
        return None
    gsq = -2.0 * P * (a + mu)
    if gsq < 0.0:
        return None
    return np.array([[P]]), np.array([np.sqrt(gsq)])


def _solve_order2(A, b, c, mu):
    # observer-canonical structure: A = [[0, -d2], [1, -d1]], c = [0, 1]
    if not (abs(A[0, 0]) < 1e-12 and abs(A[1, 0] - 1.0) < 1e-12
            and abs(c[0]) < 1e-12 and abs(c[1] - 1.0) < 1e-12):
        return None
    d1 = -float(A[1, 1])
    d2 = -float(A[0, 1])
    beta = float(b[1])
    if beta == 0.0:
        return None  # relative degree 2 realization, cannot be SPR
    f = float(b[0]) / beta

    # With P = [[p, -f p], [-f p, 1/beta + f^2 p]] the constraint Pb = c is
    # automatic; the Lyapunov equation reduces to a consistency quadratic in p.
    q = f * f - d2 + (d1 - 2.0 * mu) * f
    r = (d1 - mu) * f * f - d2 * f
    a2 = 4.0 * (f - mu) * r - q * q
    a1 = 4.0 * (f - mu) * (d1 - mu) / beta - 2.0 * q / beta
    a0 = -1.0 / (beta * beta)

    if abs(a2) < 1e-14 * max(1.0, abs(a1), abs(a0)):
        if a1 == 0.0:
            return None
        candidates = [-a0 / a1]
    else:
        disc = a1 * a1 - 4.0 * a2 * a0
        if disc < 0.0:
            return None
        sq = np.sqrt(disc)
        candidates = [(-a1 + sq) / (2.0 * a2), (-a1 - sq) / (2.0 * a2)]

    best = None
    for p in sorted(candidates):
        if not np.isfinite(p) or p / beta <= 0.0 or abs(p) > _P1_CAP:
            continue
        g1sq = 2.0 * p * (f - mu)
        g2sq = 2.0 * (d1 - mu) / beta + 2.0 * p * r
        g12 = -(1.0 / beta + q * p)
        if g1sq < -1e-12 or g2sq < -1e-12:
            continue
        g1 = np.sqrt(max(g1sq, 0.0))
        if g1 > 1e-9:
            g2 = g12 / g1
        else:
            if abs(g12) > 1e-7 * max(1.0, abs(q * p)):
                continue
            g2 = np.sqrt(max(g2sq, 0.0))
        P = np.array([[p, -f * p], [-f * p, 1.0 / beta + f * f * p]])
        if np.min(np.linalg.eigvalsh(P)) <= 0.0:
            continue
        g = np.array([g1, g2])
        res_eq, res_bc = _residual(A, b, c, P, g, mu)
        if res_eq <= 1e-7 and res_bc <= 1e-9:
            best = (P, g)
    return best


def _solve_generic(A, b, c, mu):
    from scipy.linalg import solve_continuous_lyapunov
    from scipy.optimize import least_squares

    m = A.shape[0]
    iu = np.triu_indices(m)

    def unpack(x):
        P = np.zeros((m, m))
        P[iu] = x[:iu[0].size]
        P = P + P.T - np.diag(np.diag(P))
        g = x[iu[0].size:]
        return P, g

    def fun(x):
        P, g = unpack(x)
        eq = A.T @ P + P @ A + np.outer(g, g) + 2.0 * mu * P
        return np.concatenate([eq[iu], (P @ b - c) * 10.0])

    try:
        P0 = solve_continuous_lyapunov(A.T, -(np.outer(c, c) + 1e-2 * np.eye(m)))
    except Exception:
        P0 = np.eye(m)
    x0 = np.concatenate([P0[iu], np.zeros(m)])
    sol = least_squares(fun, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=4000)
    P, g = unpack(sol.x)
    res_eq, res_bc = _residual(A, b, c, P, g, mu)
    if res_eq > 1e-6 or res_bc > 1e-7 or np.min(np.linalg.eigvalsh(P)) <= 0.0:
        return None
    return P, g


def kyp_solve(model: StateSpaceModel, mu: float) -> KypSolution:
    """Certificate with the largest feasible decay rate not above ``mu``.

    Raises KypInfeasible when no positive rate can be certified (the
    realization is then not SPR) or, for orders above two, when the
    numeric search finds no certificate.
    """
    A = np.asarray(model.A, dtype=float)
    b = np.asarray(model.b, dtype=float).ravel()
    c = np.asarray(model.c, dtype=float).ravel()
    m = A.shape[0]
    if mu <= 0.0:
        raise ValueError("requested decay rate must be positive")
    eigs = np.linalg.eigvals(A)
    if not np.all(eigs.real < 0.0):
        raise KypInfeasible("state matrix is not Hurwitz")

    solver = {1: _solve_order1, 2: _solve_order2}.get(m, _solve_generic)

    got = solver(A, b, c, mu)
    mu_ach = mu
    if got is None:
        lo, hi = 0.0, mu
        best = None
        iters = _BISECT_ITERS if m <= 2 else 14
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            trial = solver(A, b, c, mid)
            if trial is not None:
                best, lo = (trial, mid)
            else:
                hi = mid
        if best is None:
            raise KypInfeasible(
                "no certificate found: realization does not appear to be SPR")
        got, mu_ach = best, lo
        # step back from the supremum: the certificate can degenerate at the
        # boundary (P blows up when the feasible set is open), and 0.1% of
        # decay rate costs nothing in the bounds
        relaxed = 0.999 * lo
        trial = solver(A, b, c, relaxed)
        if trial is not None:
            got, mu_ach = trial, relaxed

    P, g = got
    res_eq, res_bc = _residual(A, b, c, P, g, mu_ach)
    if res_eq > _RESIDUAL_TOL and m > 2:
        raise KypInfeasible(f"no certificate found (residual {res_eq:.2e})")
    return KypSolution(P=P, g=g, mu=float(mu_ach), residual=res_eq,
                       mu_requested=float(mu))
