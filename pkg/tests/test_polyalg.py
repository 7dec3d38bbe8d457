import numpy as np
import pytest

from crmadapt import Polynomial, coeffs_close


def test_multiply_expansion():
    p = Polynomial([1.0, 1.0]) * Polynomial([1.0, 2.0])
    assert p.to_list() == [1.0, 3.0, 2.0]


def test_add_cancels_leading_terms():
    p = Polynomial([1.0, 0.0, 1.0]) + Polynomial([-1.0, 0.0, 0.0])
    assert p.to_list() == [1.0]
    assert p.degree == 0


def test_roots_with_backsubstitution_residual():
    p = Polynomial([1.0, 4.0, 3.0])
    rep = p.root_report()
    assert not rep.degenerate
    assert sorted(rep.roots.real) == pytest.approx([-3.0, -1.0], abs=1e-12)
    assert np.max(rep.residuals) < 1e-10


def test_zero_polynomial_roots_flagged():
    rep = Polynomial([0.0]).root_report()
    assert rep.degenerate
    assert rep.roots.size == 0


def test_constant_has_no_roots():
    assert Polynomial([4.0]).roots().size == 0


def test_monic_scaled_round_trip():
    p = Polynomial([3.0, 6.0, 9.0])
    k, mono = p.monic_scaled()
    assert k == 3.0
    assert mono.is_monic
    assert coeffs_close(k * mono, p, tol=1e-15)
    with pytest.raises(ValueError):
        Polynomial([0.0]).monic_scaled()


def test_from_roots_requires_conjugate_closure():
    p = Polynomial.from_roots([-1.0 + 2.0j, -1.0 - 2.0j])
    assert p.to_list() == pytest.approx([1.0, 2.0, 5.0])
    with pytest.raises(ValueError):
        Polynomial.from_roots([-1.0 + 2.0j])


def test_hurwitz_margin():
    assert Polynomial([1.0, 3.0, 2.0]).is_hurwitz()
    assert not Polynomial([1.0, -1.0]).is_hurwitz()
    assert Polynomial([5.0]).is_hurwitz()  # vacuous


def test_evaluation_matches_factored_product():
    rng = np.random.default_rng(3)
    for _ in range(50):
        p = Polynomial(rng.normal(size=rng.integers(1, 6)))
        q = Polynomial(rng.normal(size=rng.integers(1, 6)))
        x = complex(rng.normal(), rng.normal())
        lhs = (p * q)(x)
        rhs = p(x) * q(x)
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


def test_random_roots_residuals_small():
    rng = np.random.default_rng(11)
    for _ in range(30):
        coef = rng.normal(size=rng.integers(2, 7))
        coef[0] = coef[0] if abs(coef[0]) > 0.1 else 1.0
        rep = Polynomial(coef).root_report()
        scale = np.max(np.abs(coef))
        assert np.max(rep.residuals) < 1e-7 * max(1.0, scale * 10)


def test_leading_zero_stripping():
    p = Polynomial([0.0, 0.0, 2.0, 4.0])
    assert p.to_list() == [2.0, 4.0]
    assert p.degree == 1
