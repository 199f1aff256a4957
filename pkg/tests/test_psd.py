import numpy as np
import pytest

from akx.algebra import DualFunctional, random_element, random_functional
from akx.psd import (
    ExtPoint,
    HermitianError,
    PlanError,
    SamplePlan,
    check_psd,
    gram,
    jet_isometry_check,
    jet_reproducing_check,
    min_eigenvalue,
    point_kernel,
)
from akx.kernels import fock, poly
from akx.series import polynomial


def test_min_eigenvalue_examples():
    assert min_eigenvalue(np.eye(5)) == pytest.approx(1, abs=1e-15)
    assert min_eigenvalue(np.diag([3.0, -2.0])) == pytest.approx(-2, abs=1e-15)
    rng = np.random.default_rng(1)
    B = rng.standard_normal((30, 12)) + 1j * rng.standard_normal((30, 12))
    assert min_eigenvalue(B.conj().T @ B) >= -1e-12


@pytest.mark.parametrize("n", [2, 7, 33, 128])
def test_min_eigenvalue_accuracy(n):
    rng = np.random.default_rng(n)
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    H = X + X.conj().T
    assert min_eigenvalue(H) == pytest.approx(np.linalg.eigvalsh(H)[0], abs=1e-11)


def test_min_eigenvalue_rejects_non_hermitian():
    with pytest.raises(HermitianError):
        min_eigenvalue(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        min_eigenvalue(np.ones((2, 3)))


def test_single_and_repeated_points():
    pts = SamplePlan("fock_matrix", seed=1, count=1).points()
    G = gram(point_kernel("fock_extended"), pts).matrix
    assert G.shape == (1, 1) and G[0, 0].real >= 0 and abs(G[0, 0].imag) <= 1e-15
    G2 = gram(point_kernel("fock_extended"), pts * 2).matrix
    rep = check_psd(G2)
    assert rep.verdict == "pass"
    assert abs(rep.min_eigenvalue) <= rep.tolerance


@pytest.mark.parametrize(
    "family,kernel",
    [
        ("fock_matrix", "fock_extended"),
        ("fock_matrix", "extended"),
        ("fock_matrix", "matrix_trace"),
        ("fock_quaternion", "fock_extended"),
        ("fock_seq", "fock_extended"),
        ("quaternion", "quaternion"),
        ("scalar", "block"),
    ],
)
def test_factorized_kernels_give_psd_grams(family, kernel):
    plan = SamplePlan(family, seed=5, count=15 if family == "quaternion" else 20)
    res = gram(point_kernel(kernel, N=30), plan.points())
    rep = check_psd(res.matrix)
    assert rep.verdict == "pass", rep
    assert rep.min_eigenvalue >= -1e-9 * max(1, np.max(np.abs(np.diag(res.matrix))))
    assert res.hermitian_defect <= 1e-10


def test_grassmann_paired_gram_psd():
    from akx.algebra import grassmann
    from akx.kernels import grassmann_closed_form

    g = grassmann(3)
    rng = np.random.default_rng(6)
    pts = [(complex(rng.uniform(-0.5, 0.5)), random_element(g, rng, 0.8, soul=True), random_functional(g, rng))
           for _ in range(12)]
    G = np.array([[grassmann_closed_form(fock(), x[0], x[1], y[0], y[1], a=x[2], b=y[2]) for y in pts] for x in pts])
    assert check_psd(G).verdict == "pass"


def test_permutation_invariance():
    pts = SamplePlan("fock_matrix", seed=7, count=16).points()
    k = point_kernel("fock_extended")
    G = gram(k, pts).matrix
    perm = np.random.default_rng(8).permutation(len(pts))
    Gp = gram(k, [pts[i] for i in perm]).matrix
    assert np.allclose(Gp, G[np.ix_(perm, perm)], rtol=0, atol=0)
    assert abs(min_eigenvalue(Gp) - min_eigenvalue(G)) <= 1e-11


def test_functional_scaling():
    pts = SamplePlan("fock_matrix", seed=9, count=8).points()
    k = point_kernel("fock_extended")
    G = gram(k, pts).matrix
    lam = 1.5 - 0.5j
    p0 = pts[0]
    pts2 = [ExtPoint(p0.z, p0.A, DualFunctional(p0.a.descriptor, p0.a.coords * lam))] + pts[1:]
    G2 = gram(k, pts2).matrix
    # <lam a, X> = conj(lam) <a, X>: row 0 scales by conj(lam), column 0 by lam
    assert np.allclose(G2[0, 1:], np.conj(lam) * G[0, 1:], rtol=1e-14)
    assert np.allclose(G2[1:, 0], lam * G[1:, 0], rtol=1e-14)
    assert check_psd(G2).verdict == "pass"


def test_gram_ell2_failure_reports_index():
    from akx.algebra import AlgebraElement, quaternion

    pts = SamplePlan("fock_quaternion", seed=1, count=3).points()
    q = quaternion()
    bad = ExtPoint(0.0, AlgebraElement(q, [0, 2, 0, 0]), DualFunctional(q, [1, 0, 0, 0]))
    with pytest.raises(PlanError, match="sample 2"):
        gram(point_kernel("fock_extended"), pts[:2] + [bad])


def test_plan_limits_and_determinism():
    with pytest.raises(PlanError):
        SamplePlan("fock_matrix", count=513)
    with pytest.raises(PlanError):
        SamplePlan("nope").points()
    a = SamplePlan("fock_matrix", seed=3, count=5).points()
    b = SamplePlan("fock_matrix", seed=3, count=5).points()
    assert all(x.z == y.z and x.A == y.A for x, y in zip(a, b))


def test_threaded_gram_is_identical(monkeypatch):
    pts = SamplePlan("fock_matrix", seed=4, count=24).points()
    k = point_kernel("fock_extended")
    monkeypatch.setenv("AKX_THREADS", "1")
    G1 = gram(k, pts).matrix
    monkeypatch.setenv("AKX_THREADS", "4")
    G4 = gram(k, pts).matrix
    assert np.array_equal(G1, G4)


def test_report_verdict_rule():
    rep = check_psd(np.diag([1.0, -1e-3]))
    assert rep.verdict == "fail"
    d = rep.to_dict()
    assert set(d) == {"size", "min_eigenvalue", "hermitian_defect", "verdict", "tolerance"}
    rep = check_psd(np.array([[1.0, 1e-3], [0.0, 1.0]]))
    assert rep.verdict == "fail" and rep.hermitian_defect == pytest.approx(1e-3)


def test_jet_isometry_examples():
    one, zeta = polynomial([1]), polynomial([0, 1])
    w = [0.0, 0.3 + 0.4j, -0.8j]
    assert jet_isometry_check([one], [one], w) <= 1e-15
    assert jet_isometry_check([zeta], [zeta], w) <= 1e-15
    rng = np.random.default_rng(10)
    polys = [polynomial(rng.standard_normal(7) + 1j * rng.standard_normal(7)) for _ in range(5)]
    ws = [complex(*rng.uniform(-0.7, 0.7, 2)) for _ in range(5)]
    assert jet_isometry_check(polys, polys, ws, N=12) <= 1e-9


def test_jet_reproducing_property():
    rng = np.random.default_rng(11)
    polys = [polynomial(rng.standard_normal(7) + 1j * rng.standard_normal(7)) for _ in range(3)]
    etas = [rng.standard_normal(6) + 1j * rng.standard_normal(6) for _ in range(3)]
    assert jet_reproducing_check(polys, etas, [0.2, -0.4j]) <= 1e-10
    assert jet_reproducing_check(polys, etas, [0.5], K=poly(8)) <= 1e-10
