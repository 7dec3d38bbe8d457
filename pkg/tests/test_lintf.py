import numpy as np
import pytest

from crmadapt import (Polynomial, RationalTransfer, SprGrid, decay_rate,
                      is_minimum_phase, is_spr, relative_degree, strip_gain,
                      tf_from_dict, tf_to_dict)


def tf(num, den, k=1.0):
    return RationalTransfer.from_coeffs(num, den, gain=k)


class TestStripGain:
    def test_leading_coefficient_read_off(self):
        k, w = strip_gain(tf([3.0, 3.0], [1.0, 1.0, 0.0]))
        assert k == 3.0
        assert w.num.to_list() == [1.0, 1.0]
        assert w.den.to_list() == [1.0, 1.0, 0.0]

    def test_identity_case(self):
        k, w = strip_gain(tf([1.0], [1.0, 2.5]))
        assert k == 1.0
        assert w.num.to_list() == [1.0]

    def test_first_order_reference_form(self):
        k, w = strip_gain(tf([1.0], [1.0, 1.0], k=4.0))
        assert k == 4.0
        assert w.num.to_list() == [1.0]
        assert w.den.to_list() == [1.0, 1.0]

    def test_round_trip_relative_error(self):
        rng = np.random.default_rng(5)
        for _ in range(60):
            n = int(rng.integers(1, 5))
            num = rng.normal(size=rng.integers(1, n + 1))
            den = rng.normal(size=n + 1)
            num[0] = num[0] or 1.0
            den[0] = den[0] or 1.0
            w = RationalTransfer.from_coeffs(num, den)
            k, wp = strip_gain(w)
            rebuilt_num = k * wp.num.coef
            ref_num = w.gain * w.num.coef
            assert np.max(np.abs(rebuilt_num - ref_num)) <= 1e-14 * max(
                1.0, np.max(np.abs(ref_num)))

    def test_zero_numerator_rejected(self):
        with pytest.raises(ValueError, match="degenerate"):
            RationalTransfer.from_coeffs([0.0], [1.0, 1.0])


class TestRelativeDegree:
    def test_first_order(self):
        assert relative_degree(tf([1.0], [1.0, 2.0])) == 1

    def test_filtered_error_path(self):
        assert relative_degree(tf([1.0, 2.0], [1.0, 6.0, 8.0])) == 1

    def test_second_order_reference(self):
        assert relative_degree(tf([1.0], [1.0, 3.0, 2.0])) == 2

    def test_improper_rejected_at_construction(self):
        with pytest.raises(ValueError, match="strictly proper"):
            RationalTransfer(1.0, Polynomial([1.0, 0.0]), Polynomial([1.0, 1.0]))


class TestMinimumPhase:
    def test_stable_zero(self):
        assert is_minimum_phase(tf([1.0, 1.0], [1.0, 3.0, 2.0]))

    def test_unstable_zero(self):
        assert not is_minimum_phase(tf([1.0, -1.0], [1.0, 3.0, 2.0]))

    def test_no_finite_zeros_vacuous(self):
        assert is_minimum_phase(tf([1.0], [1.0, 1.0, 2.0], k=3.0))


class TestSpr:
    def test_first_order_positive(self):
        cert = is_spr(tf([1.0], [1.0, 1.0]))
        assert cert.verdict
        assert cert.min_real_part_margin > 0

    def test_relative_degree_two_impossible(self):
        cert = is_spr(tf([1.0], [1.0, 1.0, 1.0]))
        assert not cert.verdict
        assert "relative degree" in cert.reason

    def test_filtered_error_function(self):
        cert = is_spr(tf([1.0, 2.0], [1.0, 6.0, 8.0]))
        assert cert.verdict
        # analytic scaled margin: (1+w^2)(16+4w^2)/|den|^2 has minimum 1/4
        assert cert.min_real_part_margin == pytest.approx(0.25, rel=1e-3)

    def test_non_hurwitz_reports_margin(self):
        cert = is_spr(tf([1.0], [1.0, -2.0]))
        assert not cert.verdict
        assert cert.hurwitz_margin == pytest.approx(2.0, abs=1e-9)

    def test_negative_gain_fails(self):
        assert not is_spr(tf([1.0], [1.0, 1.0], k=-1.0)).verdict

    def test_verdicts_stable_under_grid_refinement(self):
        rng = np.random.default_rng(2024)
        flips = 0
        for _ in range(100):
            n = int(rng.integers(1, 5))
            nz = int(rng.integers(0, n))
            num = Polynomial.from_roots(-rng.uniform(0.3, 4.0, nz)
                                        * rng.choice([-1.0, 1.0], nz))
            den = Polynomial.from_roots(-rng.uniform(0.3, 4.0, n)
                                        * rng.choice([1.0, 1.0, 1.0, -1.0], n))
            w = RationalTransfer(float(rng.uniform(-2, 2)) or 1.0, num, den)
            coarse = is_spr(w).verdict
            fine = is_spr(w, SprGrid(points=40960)).verdict
            flips += coarse != fine
        assert flips == 0


class TestDecayRate:
    def test_first_order_sum(self):
        assert decay_rate(Polynomial([1.0, 10.0])) == pytest.approx(10.0)

    def test_real_roots(self):
        assert decay_rate(Polynomial([1.0, 4.0, 3.0])) == pytest.approx(1.0)

    def test_complex_pair_uses_real_part(self):
        # roots -1 +/- 2j: slowest decay is the real part, not the modulus
        assert decay_rate(Polynomial([1.0, 2.0, 5.0])) == pytest.approx(1.0)

    def test_non_hurwitz_rejected(self):
        with pytest.raises(ValueError, match="not Hurwitz"):
            decay_rate(Polynomial([1.0, -1.0]))

    def test_minimum_over_roots_property(self):
        rng = np.random.default_rng(9)
        for _ in range(40):
            roots = -rng.uniform(0.1, 5.0, rng.integers(1, 6))
            den = Polynomial.from_roots(roots)
            mu = decay_rate(den)
            assert all(mu <= abs(r.real) + 1e-9 for r in den.roots())


def test_serialization_round_trip():
    w = tf([1.0, 2.0], [1.0, 6.0, 8.0], k=-2.5)
    w2 = tf_from_dict(tf_to_dict(w))
    assert w2.gain == w.gain
    assert w2.num.to_list() == w.num.to_list()
    assert w2.den.to_list() == w.den.to_list()
