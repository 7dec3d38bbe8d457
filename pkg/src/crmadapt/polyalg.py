"""Dense real-coefficient polynomial arithmetic, highest degree first."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Polynomial", "RootReport", "coeffs_close"]


def _strip_leading_zeros(coef) -> np.ndarray:
    c = np.atleast_1d(np.asarray(coef, dtype=float)).ravel()
    if c.size == 0:
        return np.zeros(1)
    nz = np.flatnonzero(c != 0.0)
    if nz.size == 0:
        # the zero polynomial keeps an explicit single coefficient
        return np.zeros(1)
    return np.array(c[nz[0]:], dtype=float)


@dataclass(frozen=True)
class RootReport:
    """Roots of a polynomial with back-substitution residuals."""

    roots: np.ndarray
    residuals: np.ndarray
    degenerate: bool  # True when the zero polynomial was passed


class Polynomial:
    """Immutable univariate polynomial over the reals.

    Coefficients are stored highest degree first with the leading
    coefficient nonzero; the zero polynomial is represented as ``[0.0]``.
    """

    __slots__ = ("coef",)

    def __init__(self, coef):
        self.coef = _strip_leading_zeros(coef)
        self.coef.setflags(write=False)

    # -- basic queries ----------------------------------------------------

    @property
    def degree(self) -> int:
        return self.coef.size - 1

    @property
    def is_zero(self) -> bool:
        return self.coef.size == 1 and self.coef[0] == 0.0

    @property
    def is_monic(self) -> bool:
        return self.coef[0] == 1.0

    def __repr__(self) -> str:
        return f"Polynomial({self.coef.tolist()})"

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coef, other.coef
        k = max(a.size, b.size)
        out = np.zeros(k)
        out[k - a.size:] += a
        out[k - b.size:] += b
        return Polynomial(out)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (other * -1.0)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            if self.is_zero or other.is_zero:
                return Polynomial([0.0])
            return Polynomial(np.convolve(self.coef, other.coef))
        return Polynomial(self.coef * float(other))

    __rmul__ = __mul__

    def __call__(self, s):
        return np.polyval(self.coef, s)

    def monic_scaled(self) -> tuple[float, "Polynomial"]:
        """Split the leading coefficient off: ``p = k * monic``."""
        if self.is_zero:
            raise ValueError("zero polynomial has no monic form")
        k = float(self.coef[0])
        return k, Polynomial(self.coef / k)

    # -- roots ------------------------------------------------------------

    def roots(self) -> np.ndarray:
        """Roots via companion-matrix eigenvalues (empty for constants)."""
        if self.degree < 1:
            return np.zeros(0, dtype=complex)
        return np.roots(self.coef)

    def root_report(self) -> RootReport:
        if self.is_zero:
            return RootReport(np.zeros(0, dtype=complex), np.zeros(0), True)
        r = self.roots()
        res = np.abs(np.polyval(self.coef, r)) if r.size else np.zeros(0)
        return RootReport(r, res, False)

    def hurwitz_margin(self) -> float:
        """Largest real part over the roots (-inf for constants)."""
        r = self.roots()
        if r.size == 0:
            return float("-inf")
        return float(np.max(r.real))

    def is_hurwitz(self, eps: float = 1e-9) -> bool:
        return self.hurwitz_margin() < -eps

    # -- constructors / serialization -------------------------------------

    @classmethod
    def from_roots(cls, roots) -> "Polynomial":
        r = np.atleast_1d(np.asarray(roots, dtype=complex))
        if r.size == 0:
            return cls([1.0])
        c = np.poly(r)
        if np.max(np.abs(c.imag)) > 1e-9 * max(1.0, np.max(np.abs(c.real))):
            raise ValueError("root set is not closed under conjugation")
        return cls(c.real)

    def to_list(self) -> list[float]:
        return [float(v) for v in self.coef]

    @classmethod
    def from_list(cls, values) -> "Polynomial":
        return cls(values)


def coeffs_close(p: Polynomial, q: Polynomial, tol: float = 1e-12) -> bool:
    """Coefficient-wise comparison after degree alignment."""
    a, b = p.coef, q.coef
    if a.size != b.size:
        k = max(a.size, b.size)
        a = np.concatenate([np.zeros(k - a.size), a])
        b = np.concatenate([np.zeros(k - b.size), b])
    scale = max(1.0, float(np.max(np.abs(a))), float(np.max(np.abs(b))))
    return bool(np.max(np.abs(a - b)) <= tol * scale)
