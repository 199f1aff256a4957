import math

import numpy as np
import pytest

from akx.algebra import matrix, random_element, random_functional
from akx.jets import (
    CoefficientOperator,
    apply,
    commutator_check,
    differentiation_operator,
    extend_operator,
    fock_inner,
    identity_operator,
    jet_of,
    jet_operator,
    lift_T_A,
    lift_via_jets,
    multiplication_operator,
    weighted_adjoint,
)
from akx.series import EntireFunctionRep, eval_weak, polynomial, preset


def rand_poly(rng, deg):
    return polynomial(rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1))


def test_jet_examples():
    J = jet_of(preset("exp"), 0, 6).entries
    assert np.allclose(J, [1 / math.factorial(n) for n in range(6)], rtol=0, atol=0)
    assert np.array_equal(jet_of(polynomial([0, 0, 1]), 1, 5).entries, [1, 2, 1, 0, 0])
    S = jet_of(preset("sin"), math.pi / 2, 5).entries
    assert np.allclose(S, [1, 0, -1 / 2, 0, 1 / 24], atol=1e-15)


def test_jet_is_read_only():
    J = jet_of(preset("exp"), 0, 4)
    with pytest.raises(ValueError):
        J.entries[0] = 2


def test_shift_template():
    J = jet_of(polynomial([1]), 0, 5)
    out = apply(jet_operator("Z", 5), J)
    assert np.array_equal(out.jet.entries, [0, 1, 0, 0, 0])


def test_derivative_template_on_exp():
    N = 10
    J = jet_of(preset("exp"), 0.3, N)
    out = apply(jet_operator("S", N), J)
    assert out.clean == N - 1
    assert np.allclose(out.jet.entries[: out.clean], J.entries[: out.clean], rtol=1e-14)


def test_product_rule_template():
    rng = np.random.default_rng(1)
    z, N = 0.4 - 0.7j, 8
    f = rand_poly(rng, 10)
    out = apply(jet_operator("zI_plus_Z", N, z=z), jet_of(f, z, N))
    zf = polynomial(np.concatenate([[0], f.coeffs]))
    want = jet_of(zf, z, N).entries
    assert np.max(np.abs(out.jet.entries[: out.clean] - want[: out.clean])) <= 1e-10


def test_apply_order_mismatch():
    with pytest.raises(ValueError):
        apply(jet_operator("Z", 4), jet_of(preset("exp"), 0, 5))


def test_commutator_examples():
    c8 = commutator_check(8)
    assert c8["leading"] == 0.0
    c3 = commutator_check(3)
    assert c3["leading"] == 0.0
    assert c3["full"] > 0  # truncation corner


@pytest.mark.parametrize("N", [4, 16, 40])
def test_commutator_exact(N):
    S = jet_operator("S", N).matrix
    Z = jet_operator("Z", N).matrix
    C = S @ Z - Z @ S
    assert np.array_equal(C[: N - 1, : N - 1], np.eye(N - 1))
    assert C[N - 1, N - 1] == -(N - 1)


def test_extend_operator_examples():
    rng = np.random.default_rng(2)
    z, N, dim = 0.2 + 0.5j, 8, 16
    f = rand_poly(rng, 9)
    assert np.array_equal(extend_operator(identity_operator(dim), f, z, N).entries, jet_of(f, z, N).entries)
    mz = extend_operator(multiplication_operator(dim), f, z, N).entries
    via = apply(jet_operator("zI_plus_Z", N, z=z), jet_of(f, z, N))
    assert np.max(np.abs(mz - via.jet.entries)[: via.clean]) <= 1e-10
    dz = extend_operator(differentiation_operator(dim), f, z, N).entries
    via = apply(jet_operator("S", N), jet_of(f, z, N))
    assert np.max(np.abs(dz - via.jet.entries)[: via.clean]) <= 1e-10


def test_operator_too_small():
    with pytest.raises(ValueError):
        identity_operator(3)(polynomial([1, 2, 3, 4]))


def test_composition_matches_template_product():
    rng = np.random.default_rng(3)
    z, N, dim = -0.3 + 0.1j, 10, 24
    T = multiplication_operator(dim) @ differentiation_operator(dim)
    for _ in range(5):
        f = rand_poly(rng, 8)
        got = extend_operator(T, f, z, N).entries
        tmpl = jet_operator("zI_plus_Z", N, z=z).matrix @ jet_operator("S", N).matrix
        want = tmpl @ jet_of(f, z, N).entries
        assert np.max(np.abs(got - want)[: N - 1]) <= 1e-10


def test_fock_adjoint_of_multiplication_is_derivative():
    dim = 12
    adj = weighted_adjoint(multiplication_operator(dim))
    assert np.allclose(adj.matrix, differentiation_operator(dim).matrix, rtol=0, atol=1e-12)
    rng = np.random.default_rng(4)
    for _ in range(5):
        f, g = rand_poly(rng, 8), rand_poly(rng, 8)
        T = multiplication_operator(dim)
        lhs = fock_inner(T(f), EntireFunctionRep(g.padded(dim)))
        rhs = fock_inner(EntireFunctionRep(f.padded(dim)), weighted_adjoint(T)(g))
        assert abs(lhs - rhs) <= 1e-10 * max(1, abs(lhs))


def test_lift_examples():
    rng = np.random.default_rng(5)
    m = matrix(2)
    A, a = random_element(m, rng, 0.7), random_functional(m, rng)
    z, dim = 0.1 + 0.2j, 120
    f = preset("exp")
    from akx.algebra import dual_involution

    ident = lift_T_A(identity_operator(dim), f, z, A, a)
    assert ident.value == pytest.approx(eval_weak(f, z, A, dual_involution(a)).value, abs=1e-13)
    zero_op = CoefficientOperator(np.zeros((dim, dim)), "zero")
    assert lift_T_A(zero_op, f, z, A, a).value == 0
    d = lift_T_A(differentiation_operator(dim), f, z, A, a)
    assert d.value == pytest.approx(ident.value, abs=1e-12)
    via = lift_via_jets(differentiation_operator(dim), f, z, A, a, 40)
    assert via == pytest.approx(d.value, abs=1e-12)


def test_fock_inner_examples():
    one, zeta = polynomial([1]), polynomial([0, 1])
    assert fock_inner(one, one) == 1
    assert fock_inner(zeta, zeta) == 1
    e = preset("exp", 20)
    assert fock_inner(e, e) == pytest.approx(sum(1 / math.factorial(n) for n in range(20)), rel=1e-15)
    assert abs(fock_inner(e, e) - math.e) <= 1e-15 * 10 + 1 / math.factorial(20)
