import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from akx.algebra import (
    AlgebraElement,
    DualFunctional,
    dual_norm,
    generator,
    grassmann,
    matrix,
    pair,
    quaternion,
    random_element,
    random_functional,
    scalar,
    unit,
    weighted_seq,
    zero,
)
from akx.series import (
    ConvergenceError,
    DomainError,
    EntireFunctionRep,
    TruncationPolicy,
    a_valued_sum,
    ell2_check,
    eval_ext,
    eval_weak,
    polynomial,
    preset,
    taylor_shift,
    x_vector,
)
from conftest import ALGEBRAS


def toeplitz(A):
    """Lower-triangular Toeplitz matrix of a weighted_seq element (multiplication operator)."""
    c = A.coords
    return scipy.linalg.toeplitz(c, np.zeros_like(c))


# ---- taylor shift -------------------------------------------------------

def test_shift_exp_at_zero():
    g = taylor_shift(preset("exp"), 0)
    assert np.allclose(g[:10], [1 / math.factorial(n) for n in range(10)], rtol=0, atol=0)


def test_shift_square_at_one():
    g = taylor_shift(polynomial([0, 0, 1]), 1)
    assert np.array_equal(g, [1, 2, 1])


def test_shift_geometric_reexpansion():
    # 1/(1-z) about 1/2 is sum 2^(n+1) h^n
    g = taylor_shift(preset("geom", 400), 0.5)
    want = 2.0 ** (np.arange(20) + 1)
    assert np.allclose(g[:20], want, rtol=1e-12)


def test_shift_rejects_outside_radius():
    with pytest.raises(DomainError):
        taylor_shift(preset("geom"), 1.2)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=1, max_size=12), st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_shift_matches_direct_evaluation(coeffs, x, h):
    f = polynomial(coeffs)
    g = taylor_shift(f, x)
    direct = np.polyval(list(reversed(coeffs)), x + h)
    assert np.polyval(g[::-1], h) == pytest.approx(direct, rel=1e-9, abs=1e-9)


# ---- eval_ext -------------------------------------------------------------

def test_exp_of_nilpotent_matrix():
    r = eval_ext(preset("exp"), 0, AlgebraElement(matrix(2), [0, 1, 0, 0]))
    assert np.array_equal(r.value.as_matrix().reshape(2, 2), [[1, 1], [0, 1]])
    assert r.tail == 0.0


def test_exp_pi_i_quaternion():
    q = quaternion()
    r = eval_ext(preset("exp"), 0, generator(q, "i") * math.pi)
    assert np.max(np.abs(r.value.coords - [-1, 0, 0, 0])) <= 1e-12
    assert r.tail <= 1e-12


@pytest.mark.parametrize("key", sorted(ALGEBRAS))
def test_exp_at_zero_element(key):
    d = ALGEBRAS[key]
    r = eval_ext(preset("exp"), 1.0, zero(d))
    assert np.allclose(r.value.coords, (unit(d) * math.e).coords, rtol=1e-15)


def test_quaternion_closed_form():
    q = quaternion()
    rng = np.random.default_rng(7)
    for _ in range(50):
        x = rng.standard_normal(4)
        v = np.linalg.norm(x[1:])
        want = math.exp(x[0]) * np.concatenate([[math.cos(v)], x[1:] / v * math.sin(v)])
        r = eval_ext(preset("exp"), 0, AlgebraElement(q, x))
        assert np.max(np.abs(r.value.coords - want)) <= 1e-12


def test_real_base_required_on_real_field():
    with pytest.raises(ValueError):
        eval_ext(preset("exp"), 1j, unit(quaternion()))


def test_grassmann_body_folded():
    g = grassmann(2)
    A = AlgebraElement(g, [0.5, 1, 0, 0])  # 0.5 + e1
    r = eval_ext(preset("exp"), 0, A)
    want = math.exp(0.5) * np.array([1, 1, 0, 0])
    assert np.allclose(r.value.coords, want, rtol=1e-15)
    assert r.tail == 0.0


def test_radius_violation():
    with pytest.raises(DomainError):
        eval_ext(preset("geom"), 0.5, scalar(matrix(2), 0.6))


def test_non_convergence_reports_partial():
    pol = TruncationPolicy(order=5, tail_tol=1e-12, max_terms=8)
    with pytest.raises(ConvergenceError) as info:
        eval_ext(preset("exp"), 0, unit(matrix(2)) * 3.0, pol)
    rep = info.value.report
    assert rep is not None and not rep.converged and rep.tail > 1e-12


def test_tail_bound_is_honest():
    rng = np.random.default_rng(8)
    for _ in range(20):
        A = random_element(matrix(3), rng, 2.0)
        pol = TruncationPolicy(order=6, tail_tol=1e-3, max_terms=200)
        r = eval_ext(preset("exp"), 0, A, pol)
        err = np.linalg.norm(r.value.as_matrix().reshape(3, 3) - scipy.linalg.expm(A.as_matrix().reshape(3, 3)))
        assert err <= r.tail + 1e-13


def test_weighted_seq_large_norm_converges():
    s = weighted_seq(16, 2.0)
    rng = np.random.default_rng(9)
    for scale in (1.0, 5.0, 15.0):
        A = random_element(s, rng, scale)
        r = eval_ext(preset("exp"), 0, A, TruncationPolicy(tail_tol=1e-12 * math.exp(scale)))
        want = scipy.linalg.expm(toeplitz(A))[:, 0]
        assert r.converged
        assert np.max(np.abs(r.value.coords - want)) <= 1e-10 * math.exp(scale)


# ---- eval_weak ------------------------------------------------------------

def test_weak_unit_functional():
    m = matrix(2)
    a = DualFunctional(m, [0.5, 0, 0, 0.5])  # <a, I> = 1
    r = eval_weak(preset("sin"), 0.4, zero(m), a)
    assert r.value == pytest.approx(math.sin(0.4), rel=1e-15)


@pytest.mark.parametrize("key", sorted(ALGEBRAS))
def test_weak_matches_pairing(key):
    d = ALGEBRAS[key]
    rng = np.random.default_rng(10)
    pol = TruncationPolicy()
    for _ in range(10):
        A, a = random_element(d, rng, 1.5), random_functional(d, rng, 3.0)
        z = 0.3 if d.is_real else 0.3 - 0.2j
        w = eval_weak(preset("exp"), z, A, a, pol)
        s = eval_ext(preset("exp"), z, A, pol)
        assert abs(w.value - pair(a, s.value)) <= pol.tail_tol * (1 + dual_norm(a))


def test_weak_single_term_polynomial():
    rng = np.random.default_rng(11)
    m = matrix(2)
    A, a = random_element(m, rng), random_functional(m, rng)
    r = eval_weak(polynomial([0, 0, 1]), 0, A, a)
    M = A.as_matrix().reshape(2, 2)
    assert r.value == pytest.approx(pair(a, AlgebraElement(m, (M @ M).reshape(-1))), abs=1e-14)


# ---- x_vector and l2 ------------------------------------------------------

def test_x_vector_examples():
    m = matrix(2)
    a = DualFunctional(m, [0.5, 0, 0, 0.5])
    assert np.allclose(x_vector(a, unit(m), 5), np.ones(5))
    nil = AlgebraElement(m, [0, 1, 0, 0])
    u = x_vector(DualFunctional(m, [1, 1, 1, 1]), nil, 6)
    assert np.all(u[2:] == 0)
    q = quaternion()
    u = x_vector(DualFunctional(q, [1, 0, 0, 0]), generator(q, "i"), 6)
    assert np.allclose(u, [1, 0, -1, 0, 1, 0])


def test_ell2_examples():
    m = matrix(2)
    a = DualFunctional(m, [1, 0, 0, 1])
    A = unit(m) * (0.5 / math.sqrt(2))  # Frobenius norm 0.5
    v = ell2_check(a, A)
    assert v.verdict == "certified" and v.ratio == pytest.approx(0.25)
    s = random_element(grassmann(3), np.random.default_rng(12), 4.0, soul=True)
    assert ell2_check(DualFunctional(grassmann(3), np.ones(8)), s).verdict == "certified"
    q = quaternion()
    v = ell2_check(DualFunctional(q, [1, 0, 0, 0]), generator(q, "i") * 2.0)
    assert not v.summable


def test_ell2_bound_dominates_partial_sums():
    rng = np.random.default_rng(13)
    for _ in range(20):
        d = matrix(2)
        A, a = random_element(d, rng, 0.9), random_functional(d, rng)
        v = ell2_check(a, A)
        assert v.verdict == "certified"
        assert np.sum(np.abs(x_vector(a, A, 200)) ** 2) <= v.bound * (1 + 1e-12)


def test_a_valued_sum():
    m = matrix(2)
    rng = np.random.default_rng(14)
    A0 = random_element(m, rng)
    assert a_valued_sum([A0], [2.0]) == A0 * 2.0
    N = 15
    s = a_valued_sum([unit(m)] * N, [1 / math.factorial(n) for n in range(N)])
    assert np.allclose(s.coords, (unit(m) * math.e).coords, rtol=1e-12)
    As = [random_element(m, rng) for _ in range(8)]
    cs = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    want = sum(c * X.coords for c, X in zip(cs, As))
    assert np.allclose(a_valued_sum(As, cs).coords, want, rtol=1e-14)
    with pytest.raises(ValueError):
        a_valued_sum(As, cs[:3])


def test_function_serialization():
    f = polynomial([1, 2j, 3])
    g = EntireFunctionRep.from_dict(f.to_dict())
    assert np.array_equal(g.coeffs, f.coeffs) and g.is_entire
    h = EntireFunctionRep.from_dict(preset("geom", 50).to_dict())
    assert h.radius == 1.0
    assert EntireFunctionRep.from_dict("cos")(0.3) == pytest.approx(math.cos(0.3))
