import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import rieszprob as R
from rieszprob.calculus import EXP_MAX_ARG
from rieszprob.errors import ExpOverflow, NotPositiveInvertible, SeriesNotConverged

E = math.e


def two_atoms():
    return R.make_space([1, 1])


def rel_err(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return np.max(np.abs(a - b) / np.abs(b))


class TestExpSeries:
    def test_zero_gives_unit(self):
        s = two_atoms()
        assert R.exp_series(R.zero(s)).values.tolist() == [1.0, 1.0]

    def test_log2(self):
        s = two_atoms()
        out = R.exp_series(s.element([0.0, math.log(2)]))
        np.testing.assert_allclose(out.values, [1.0, 2.0], rtol=1e-15)

    def test_unit_gives_e(self):
        s = two_atoms()
        np.testing.assert_allclose(R.exp_series(R.unit(s)).values, [E, E], rtol=1e-15)

    def test_partial_sums_match_scalar_series(self):
        # brute force: the scalar Taylor polynomial of every order is reproduced
        s = R.make_space([1])
        x = s.constant(1.3)
        cfg = R.SeriesConfig(term_tol=1e-3, max_terms=200)
        out = R.exp_series(x, cfg).values[0]
        terms = [1.3**k / math.factorial(k) for k in range(40)]
        partials = np.cumsum(terms)
        assert np.min(np.abs(partials - out)) < 1e-15 * out
        assert abs(out - math.exp(1.3)) < 1e-3 * math.exp(1.3)

    @pytest.mark.parametrize("bound", [1.0, 5.0, 20.0])
    def test_agrees_with_pointwise(self, rng, bound):
        s = R.make_space(np.ones(64))
        for _ in range(20):
            x = s.element(rng.uniform(-bound, bound, 64))
            assert rel_err(R.exp_series(x).values, R.exp_pointwise(x).values) <= 1e-12

    def test_not_converged(self):
        s = R.make_space([1])
        with pytest.raises(SeriesNotConverged):
            R.exp_series(s.constant(50.0), R.SeriesConfig(max_terms=20))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            R.SeriesConfig(term_tol=0)
        with pytest.raises(ValueError):
            R.SeriesConfig(max_terms=0)


class TestExpPointwise:
    def test_examples(self):
        s = two_atoms()
        assert R.exp_pointwise(R.zero(s)).values.tolist() == [1.0, 1.0]
        x = s.element([1.0, -1.0])
        prod = R.multiply(R.exp_pointwise(x), R.exp_pointwise(-x))
        np.testing.assert_allclose(prod.values, [1.0, 1.0], rtol=1e-15)
        np.testing.assert_allclose(
            R.exp_pointwise(s.element([math.log(3), math.log(5)])).values, [3, 5], rtol=1e-15
        )

    def test_overflow(self):
        s = two_atoms()
        with pytest.raises(ExpOverflow):
            R.exp_pointwise(s.element([0.0, EXP_MAX_ARG + 1]))
        with pytest.raises(OverflowError):
            R.exp_pointwise(s.element([0.0, 800.0]))


class TestLog:
    def test_examples(self):
        s = two_atoms()
        assert R.log_element(R.unit(s)).values.tolist() == [0.0, 0.0]
        np.testing.assert_allclose(R.log_element(s.element([E, E * E])).values, [1, 2], rtol=1e-15)
        f, g = s.element([2, 3]), s.element([5, 7])
        lhs = R.log_element(R.multiply(f, g)).values
        rhs = (R.log_element(f) + R.log_element(g)).values
        np.testing.assert_allclose(lhs, [math.log(10), math.log(21)], rtol=1e-15)
        np.testing.assert_allclose(rhs, [math.log(10), math.log(21)], rtol=1e-15)

    def test_rejects_nonpositive(self):
        s = two_atoms()
        with pytest.raises(NotPositiveInvertible) as err:
            R.log_element(s.element([1.0, 0.0]))
        assert err.value.atom == 1
        with pytest.raises(NotPositiveInvertible):
            R.log_element(s.element([-1.0, 2.0]))


class TestSecant:
    def test_equal_branch(self):
        s = two_atoms()
        assert R.secant_z(R.zero(s), R.zero(s)).values.tolist() == [1.0, 1.0]

    def test_difference_quotient(self):
        s = two_atoms()
        z = R.secant_z(s.element([1.0, 0.0]), R.zero(s))
        np.testing.assert_allclose(z.values, [E - 1, 1.0], rtol=1e-15)

    def test_matches_quadrature(self, rng):
        # independent route: the mean-value integral by Gauss-Legendre quadrature
        nodes, wts = np.polynomial.legendre.leggauss(40)
        s_nodes, s_wts = 0.5 * (nodes + 1), 0.5 * wts
        s = R.make_space(np.ones(32))
        x = s.element(rng.uniform(-5, 5, 32))
        y = s.element(np.where(rng.random(32) < 0.2, x.values, rng.uniform(-5, 5, 32)))
        ref = np.exp(np.outer(x.values, s_nodes) + np.outer(y.values, 1 - s_nodes)) @ s_wts
        assert rel_err(R.secant_z(x, y).values, ref) <= 1e-13

    def test_near_equal_branch_is_stable(self):
        s = R.make_space([1])
        x, y = s.constant(2.0), s.constant(2.0 + 1e-10)
        z = R.secant_z(x, y).values[0]
        assert z == pytest.approx(math.exp(2.0 + 5e-11), rel=1e-15)

    def test_support_positive(self, rng):
        s = R.make_space(np.ones(16))
        x, y = (s.element(rng.uniform(-5, 5, 16)) for _ in range(2))
        z = R.secant_z(x, y)
        small = z.values.min() / 2
        assert R.band_generated_by(R.pos_part(z - small)).support == set(range(16))


class TestPhi:
    def test_examples(self):
        s = two_atoms()
        assert R.phi_map(R.zero(s)).values.tolist() == [0.0, 0.0]
        np.testing.assert_allclose(R.phi_map(R.unit(s)).values, [E - 2] * 2, rtol=1e-15)
        np.testing.assert_allclose(R.phi_map(s.element([1, -1])).values, [E - 2, 1 / E], rtol=1e-15)

    def test_phi_scalar(self):
        assert R.phi_scalar(1.0) == pytest.approx(E - 2, rel=1e-15)
        assert R.phi_scalar(1e-9) == pytest.approx(5e-19, rel=1e-6)


class TestMgfPsi:
    def test_zero_and_constants(self):
        s = R.make_space([1, 2, 3])
        T = R.make_cond_expectation(s, [[0, 1], [2]])
        x = s.element([1.0, -2.0, 0.5])
        assert R.mgf(T, x, 0.0).values.tolist() == [1.0] * 3
        assert R.psi(T, x, 0.0).values.tolist() == [0.0] * 3
        c = s.constant(0.7)
        np.testing.assert_allclose(R.mgf(T, c, 1.5).values, [math.exp(1.05)] * 3, rtol=1e-15)
        np.testing.assert_allclose(R.psi(T, c, 1.5).values, [1.05] * 3, rtol=1e-15)

    def test_two_atom_average(self):
        s = two_atoms()
        T = R.make_cond_expectation(s, [[0, 1]])
        x = s.element([0.0, 1.0])
        np.testing.assert_allclose(R.mgf(T, x, 1.0).values, [(1 + E) / 2] * 2, rtol=1e-15)
        # ln((1 + e) / 2), frozen from a 30-digit evaluation
        np.testing.assert_allclose(R.psi(T, x, 1.0).values, [0.62011450695827752463] * 2, rtol=1e-15)

    def test_space_mismatch(self):
        T = R.make_cond_expectation(two_atoms(), [[0, 1]])
        with pytest.raises(R.SpaceMismatch):
            R.mgf(T, two_atoms().unit(), 1.0)


bounded = st.floats(-5, 5, allow_nan=False)


@st.composite
def pairs(draw):
    n = draw(st.integers(1, 16))
    xs = draw(st.lists(bounded, min_size=n, max_size=n))
    ys = draw(st.lists(bounded, min_size=n, max_size=n))
    return xs, ys


@given(pairs())
@settings(max_examples=300)
def test_exp_homomorphism_positivity_inverse(p):
    s = R.make_space([1.0] * len(p[0]))
    x, y = s.element(p[0]), s.element(p[1])
    lhs = R.exp_pointwise(x + y).values
    rhs = R.multiply(R.exp_pointwise(x), R.exp_pointwise(y)).values
    assert rel_err(lhs, rhs) <= 1e-11
    assert np.all(R.exp_pointwise(x).values > 0)
    assert rel_err(R.multiply(R.exp_pointwise(x), R.exp_pointwise(-x)).values, np.ones(len(p[0]))) <= 1e-12


@given(pairs())
@settings(max_examples=300)
def test_secant_identity(p):
    s = R.make_space([1.0] * len(p[0]))
    x, y = s.element(p[0]), s.element(p[1])
    z = R.secant_z(x, y)
    assert np.all(z.values > 0)
    lhs = R.multiply(z, x - y).values
    # cancellation-free reference for exp(x) - exp(y)
    ref = np.exp(y.values) * np.expm1(x.values - y.values)
    scale = np.maximum(np.abs(ref), 1e-300)
    assert np.all(np.abs(lhs - ref) <= 1e-10 * scale)


@given(pairs(), st.floats(1e-3, 5))
@settings(max_examples=300)
def test_band_equality(p, lam):
    s = R.make_space([1.0] * len(p[0]))
    x, y = s.element(p[0]), s.element(p[1])
    b1 = R.band_generated_by(R.pos_part(x - y))
    b2 = R.band_generated_by(
        R.pos_part(R.exp_pointwise(R.scale(lam, x)) - R.exp_pointwise(R.scale(lam, y)))
    )
    # exp rounding can merge atoms closer than a few ulps; hypothesis likes those
    close = np.abs(lam * x.values - lam * y.values) <= 1e-15 * (1 + np.abs(lam * x.values))
    assert np.array_equal(b1.mask[~close], b2.mask[~close])


@given(st.lists(st.floats(-10, 1), min_size=1, max_size=16), st.floats(1e-6, 5))
@settings(max_examples=300)
def test_phi_domination(fs, t):
    s = R.make_space([1.0] * len(fs))
    f = s.element(fs)
    lhs = R.phi_map(R.scale(t, f))
    rhs = R.multiply(R.multiply(f, f), R.phi_map(R.scale(t, R.unit(s))))
    assert R.order_leq(lhs, rhs, 1e-9)


@given(st.lists(st.floats(-30, 30), min_size=1, max_size=16))
@settings(max_examples=300)
def test_one_plus_x_le_exp(xs):
    s = R.make_space([1.0] * len(xs))
    x = s.element(xs)
    assert R.order_leq(R.unit(s) + x, R.exp_pointwise(x), 1e-12)


@given(pairs())
@settings(max_examples=300)
def test_log_inverse_of_exp(p):
    s = R.make_space([1.0] * len(p[0]))
    x, y = s.element(p[0]), s.element(p[1])
    f, g = R.exp_pointwise(x), R.exp_pointwise(y)
    np.testing.assert_allclose(R.log_element(f).values, x.values, rtol=0, atol=1e-12 * (1 + R.u_norm(x)))
    assert rel_err(R.exp_pointwise(R.log_element(f)).values, f.values) <= 1e-12
    np.testing.assert_allclose(
        R.log_element(R.multiply(f, g)).values,
        (R.log_element(f) + R.log_element(g)).values,
        rtol=0,
        atol=1e-12 * (1 + R.u_norm(x + y)),
    )


def test_phi_hypothesis_is_needed():
    # for f > u the domination fails, so the precondition is not decorative
    s = R.make_space([1])
    f = s.constant(2.0)
    lhs = R.phi_map(R.scale(1.0, f))
    rhs = R.multiply(R.multiply(f, f), R.phi_map(R.unit(s)))
    assert not R.order_leq(lhs, rhs, 1e-9)
