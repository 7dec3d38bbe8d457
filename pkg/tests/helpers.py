"""Shared scenario builders for the test suite."""

from dataclasses import replace

from crmadapt import Polynomial, RationalTransfer, Scenario, SignalSpec
from crmadapt.bounds import _matched_vector
from crmadapt.simengine import compile_scenario

PLANT_N1 = RationalTransfer.from_coeffs([2.0], [1.0, -1.0])       # 2/(s-1)
REF_N1 = RationalTransfer.from_coeffs([1.0], [1.0, 1.0])          # 1/(s+1)
PLANT_N2 = RationalTransfer.from_coeffs([2.0], [1.0, 3.0, 1.0])
PLANT_N2_NEG = RationalTransfer.from_coeffs([-2.0], [1.0, 2.0, 0.75])
REF_N2 = RationalTransfer.from_coeffs([1.0], [1.0, 3.0, 2.0])     # 1/((s+1)(s+2))

MULTISINE = SignalSpec(kind="multisine",
                       components=((1.0, 0.4, 0.0), (0.7, 1.3, 1.0),
                                   (0.5, 2.9, 2.0)))
SQUARE = SignalSpec(kind="square", amplitude=1.0, period=10.0)


def example1_scenario(T=100.0, h=1e-3, ell=(-9.0,), gamma=10.0, theta0=None):
    return Scenario(plant=PLANT_N1, reference=REF_N1, family="crm_n1",
                    ell=ell, gamma=gamma, signal=SQUARE, T=T, h=h,
                    theta0=theta0)


def example2_known_scenario(T=200.0, h=1e-3, with_diagnostics=True):
    sc = Scenario(plant=PLANT_N2, reference=REF_N2, family="crm_high_known",
                  ell=(-6.0, -3.0), gamma=5.0, f_poles=(2.0,),
                  signal=MULTISINE, T=T, h=h)
    if with_diagnostics:
        sc = replace(sc, theta_star=tuple(_matched_vector(compile_scenario(sc))))
    return sc


def example2_unknown_scenario(T=200.0, h=1e-3):
    return Scenario(plant=PLANT_N2_NEG, reference=REF_N2,
                    family="crm_high_unknown", ell=(-6.0, -3.0), gamma=10.0,
                    f_poles=(2.0,), signal=MULTISINE, T=T, h=h)


def family_scenarios(T=50.0, h=1e-3):
    """One scenario per adaptive family, smallest sensible sizes."""
    return {
        "crm_n1": Scenario(plant=PLANT_N1, reference=REF_N1, family="crm_n1",
                           ell=(-9.0,), gamma=10.0, signal=MULTISINE, T=T, h=h),
        "crm_n2": Scenario(plant=PLANT_N2, reference=REF_N2, family="crm_n2",
                           ell=(-6.0, -3.0), gamma=1.0, a_filter=2.0,
                           signal=MULTISINE, T=T, h=h),
        "crm_high_known": Scenario(plant=PLANT_N2, reference=REF_N2,
                                   family="crm_high_known", ell=(-6.0, -3.0),
                                   gamma=5.0, f_poles=(2.0,), signal=MULTISINE,
                                   T=T, h=h),
        "crm_high_unknown": Scenario(plant=PLANT_N2_NEG, reference=REF_N2,
                                     family="crm_high_unknown",
                                     ell=(-6.0, -3.0), gamma=10.0,
                                     f_poles=(2.0,), signal=MULTISINE, T=T, h=h),
    }


def matched(sc: Scenario) -> Scenario:
    """Same scenario with the adaptive vector started at the ideal values."""
    return replace(sc, theta0=tuple(_matched_vector(compile_scenario(sc))))


def random_matched_setup(rng, n: int, rd: int):
    """Random minimum-phase plant, compatible reference and injection gain."""
    nz = n - rd
    zeros = -rng.uniform(0.5, 3.0, nz)
    poles = -rng.uniform(0.2, 3.0, n)
    kp = rng.uniform(0.5, 3.0) * rng.choice([-1.0, 1.0])
    plant = RationalTransfer(kp, Polynomial.from_roots(zeros),
                             Polynomial.from_roots(poles))
    rzeros = -rng.uniform(0.5, 3.0, n - rd)
    rpoles = -rng.uniform(0.5, 3.0, n)
    km = rng.uniform(0.5, 2.0)
    ref = RationalTransfer(km, Polynomial.from_roots(rzeros),
                           Polynomial.from_roots(rpoles))
    ell = -rng.uniform(0.0, 4.0, n)
    return plant, ref, ell


def rd3_scenarios(T=5.0, h=1e-3):
    """Relative-degree-3 pair exercising the second-order regressor filters."""
    plant = RationalTransfer.from_coeffs([2.0], [1.0, 3.0, 3.0, 1.0])
    plant_neg = RationalTransfer.from_coeffs([-2.0], [1.0, 3.0, 3.0, 1.0])
    ref = RationalTransfer.from_coeffs([1.0], [1.0, 6.0, 11.0, 6.0])
    ell = (-18.0, -15.0, -3.0)  # error poles at -2, -3, -4
    sig = SignalSpec(kind="multisine",
                     components=((1.0, 0.4, 0.0), (0.7, 1.3, 1.0)))
    return {
        "crm_high_known": Scenario(plant=plant, reference=ref,
                                   family="crm_high_known", ell=ell,
                                   gamma=3.0, f_poles=(2.5, 3.5), signal=sig,
                                   T=T, h=h),
        "crm_high_unknown": Scenario(plant=plant_neg, reference=ref,
                                     family="crm_high_unknown", ell=ell,
                                     gamma=3.0, f_poles=(2.5, 3.5), signal=sig,
                                     T=T, h=h),
    }
