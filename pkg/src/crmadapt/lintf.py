"""Rational transfer functions: gain normalization, SPR tests, decay rates.

A transfer function is stored as ``gain * num(s) / den(s)`` with monic
numerator and denominator, strictly proper. The gain is always kept as a
separate factor because its sign drives the direction of adaptive update
laws and must survive every algebraic manipulation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .polyalg import Polynomial

__all__ = [
    "RationalTransfer",
    "SprCertificate",
    "SprGrid",
    "strip_gain",
    "relative_degree",
    "is_minimum_phase",
    "is_spr",
    "decay_rate",
    "tf_to_dict",
    "tf_from_dict",
]

# default thresholds: strictness with a little float slack
EPS_SPR = 1e-9
EPS_HURWITZ = 1e-9


@dataclass(frozen=True, eq=False)
class RationalTransfer:
    """Strictly proper SISO transfer function ``gain * num/den``."""

    gain: float
    num: Polynomial
    den: Polynomial

    def __post_init__(self):
        if self.num.is_zero:
            raise ValueError("degenerate transfer function (zero numerator); "
                             "represent a zero branch with gain=0")
        if not self.num.is_monic or not self.den.is_monic:
            raise ValueError("numerator and denominator must be monic; "
                             "use RationalTransfer.from_coeffs for raw input")
        if self.num.degree >= self.den.degree:
            raise ValueError("transfer function must be strictly proper")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_coeffs(cls, num, den, gain: float = 1.0) -> "RationalTransfer":
        """Build from raw coefficient arrays, folding leading factors into gain."""
        pnum = Polynomial(num)
        pden = Polynomial(den)
        if pden.is_zero:
            raise ValueError("zero denominator")
        if pnum.is_zero:
            raise ValueError("degenerate transfer function (zero numerator)")
        kn, mnum = pnum.monic_scaled()
        kd, mden = pden.monic_scaled()
        return cls(gain * kn / kd, mnum, mden)

    # -- queries -----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.gain == 0.0

    def __call__(self, s):
        return self.gain * self.num(s) / self.den(s)

    def poles(self) -> np.ndarray:
        return self.den.roots()

    def zeros(self) -> np.ndarray:
        return self.num.roots()

    def __mul__(self, other: "RationalTransfer") -> "RationalTransfer":
        return RationalTransfer(self.gain * other.gain,
                                self.num * other.num,
                                self.den * other.den)

    def __repr__(self) -> str:
        return (f"RationalTransfer(gain={self.gain!r}, "
                f"num={self.num.to_list()}, den={self.den.to_list()})")


def strip_gain(tf: RationalTransfer) -> tuple[float, RationalTransfer]:
    """Split off the high-frequency gain, returning ``(k, unit-gain part)``.

    The product of the two return values reconstructs the input exactly.
    """
    if tf.is_zero:
        raise ValueError("degenerate transfer function")
    return tf.gain, RationalTransfer(1.0, tf.num, tf.den)


def relative_degree(tf: RationalTransfer) -> int:
    """Pole excess ``deg(den) - deg(num)``; positive for strictly proper."""
    r = tf.den.degree - tf.num.degree
    if r <= 0:
        raise ValueError("improper transfer function")
    return r


def is_minimum_phase(tf: RationalTransfer, eps: float = EPS_HURWITZ) -> bool:
    """True when every finite zero lies strictly in the open left half plane."""
    if tf.is_zero:
        raise ValueError("degenerate transfer function")
    if tf.num.degree == 0:
        return True  # no finite zeros
    return bool(np.all(tf.num.roots().real < -eps))


@dataclass(frozen=True)
class SprGrid:
    """Logarithmic frequency grid used by the SPR test."""

    omega_min: float = 1e-6
    omega_max: float = 1e6
    points: int = 4096

    def omegas(self) -> np.ndarray:
        return np.logspace(np.log10(self.omega_min),
                           np.log10(self.omega_max), self.points)


@dataclass(frozen=True)
class SprCertificate:
    """Outcome of the strict positive-realness test.

    ``min_real_part_margin`` is the grid minimum of the scale-aware
    positivity measure ``(1 + w^2) Re W(jw)``, which has a positive limit
    for a genuinely SPR relative-degree-1 function (the raw real part
    decays like 1/w^2 and would defeat any absolute threshold).
    ``limit_check`` is the minimum of ``w^2 Re W(jw)`` over the top grid
    decade, the discrete version of the infinite-frequency SPR condition.
    """

    verdict: bool
    min_real_part_margin: float
    hurwitz_margin: float
    grid_size: int
    limit_check: float
    min_real_part_raw: float = 0.0
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "min_real_part_margin": self.min_real_part_margin,
            "hurwitz_margin": self.hurwitz_margin,
            "grid_size": self.grid_size,
            "limit_check": self.limit_check,
            "min_real_part_raw": self.min_real_part_raw,
            "reason": self.reason,
        }


def is_spr(tf: RationalTransfer, grid: SprGrid | None = None,
           eps_spr: float = EPS_SPR, eps_h: float = EPS_HURWITZ) -> SprCertificate:
    """Certify strict positive realness on a dense frequency grid.

    Requires a Hurwitz denominator, relative degree one (higher relative
    degrees cannot be SPR; improper functions are not representable),
    ``(1 + w^2) Re W(jw)`` above the threshold over the whole grid, and
    ``w^2 Re W(jw)`` bounded away from zero over the top decade.
    """
    grid = grid or SprGrid()
    hmargin = tf.den.hurwitz_margin()
    w = grid.omegas()
    resp = tf(1j * w)
    re = resp.real
    min_re_raw = float(np.min(re))
    scaled = (1.0 + w * w) * re
    min_scaled = float(np.min(scaled))
    rdeg = tf.den.degree - tf.num.degree

    top = w >= grid.omega_max / 10.0
    limit_check = float(np.min(w[top] ** 2 * re[top]))

    if tf.is_zero:
        return SprCertificate(False, min_scaled, hmargin, grid.points,
                              limit_check, min_re_raw, "zero transfer function")
    if rdeg != 1:
        return SprCertificate(False, min_scaled, hmargin, grid.points,
                              limit_check, min_re_raw,
                              f"relative degree {rdeg} (SPR needs 1)")
    if not hmargin < -eps_h:
        return SprCertificate(False, min_scaled, hmargin, grid.points,
                              limit_check, min_re_raw, "denominator not Hurwitz")
    verdict = min_scaled > eps_spr and limit_check > eps_spr
    reason = "" if verdict else "real part not strictly positive on the grid"
    return SprCertificate(verdict, min_scaled, hmargin, grid.points,
                          limit_check, min_re_raw, reason)


def decay_rate(den: Polynomial) -> float:
    """Slowest modal decay ``min_i |Re lambda_i|`` of a Hurwitz polynomial."""
    if den.degree < 1:
        raise ValueError("decay rate undefined for a constant polynomial")
    r = den.roots()
    if not np.all(r.real < 0.0):
        raise ValueError("decay rate undefined: polynomial is not Hurwitz")
    return float(np.min(np.abs(r.real)))


def tf_to_dict(tf: RationalTransfer) -> dict:
    return {"k": float(tf.gain), "num": tf.num.to_list(), "den": tf.den.to_list()}


def tf_from_dict(d: dict) -> RationalTransfer:
    return RationalTransfer.from_coeffs(d["num"], d["den"], gain=float(d.get("k", 1.0)))
