import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ckthermo import (CKElement, CylinderMeasure, LocallyConstantPotential, adjoint,
                      build_transfer_matrix, cylinder_measure, embed_function, expectation_G,
                      gauge_action, kms_condition_check, kms_state, modular_flow, multiply,
                      perron, phi_beta)
from ckthermo.ck_algebra import flow, kms_suite, random_monomial
from ckthermo.errors import InadmissibleWord, ValidationError
from ckthermo.shift_space import ZeroOneMatrix

from conftest import GOLDEN, full, random_primitive

S, Ss, Pj = CKElement.S, CKElement.S_star, CKElement.P


def mono(A, text, c=1):
    return CKElement.parse(A, text, c)


def close(a, b, tol=1e-12):
    d = a - b
    return all(abs(c) <= tol for _, c in d.terms)


# -- relations and products --------------------------------------------------

def test_projection_is_idempotent(full2):
    assert Pj(full2, 1) * Pj(full2, 1) == Pj(full2, 1)


def test_orthogonal_ranges(full2):
    assert not (Ss(full2, 1) * S(full2, 2))


def test_golden_isometry_relation(golden):
    assert Ss(golden, 2) * S(golden, 2) == Pj(golden, 1)
    assert Ss(golden, 1) * S(golden, 1) == CKElement.unit(golden)


def test_partition_of_unity():
    rng = np.random.default_rng(0)
    for A in (full(2), ZeroOneMatrix.from_rows(["11", "10"]), random_primitive(rng, 3)):
        total = sum((Pj(A, j) for j in range(1, A.n + 1)), CKElement.zero(A))
        assert total == CKElement.unit(A)


def test_product_when_right_word_continues(golden):
    # (S1 S2*)(S2 S2*) equals S1 S2*: the trailing projection is absorbed
    a = mono(golden, "1|2")
    assert a * mono(golden, "2|2") == a
    assert a == mono(golden, "1,1|2,1")


def test_prefix_cases(golden):
    assert mono(golden, "1|e") * mono(golden, "e|2") == mono(golden, "1|2")
    assert mono(golden, "e|1") * mono(golden, "1,2|e") == mono(golden, "2|e")
    assert mono(golden, "e|1,2") * mono(golden, "1|e") == mono(golden, "e|2")
    assert not (mono(golden, "e|1,1") * mono(golden, "1,2|e"))


def test_inadmissible_monomial_rejected(golden):
    with pytest.raises(InadmissibleWord):
        mono(golden, "2,2|e")
    with pytest.raises(ValidationError):
        CKElement.parse(golden, "1,2")


def test_scalars_and_linear_structure(full2):
    a = mono(full2, "1|2", 2)
    assert a - a == CKElement.zero(full2)
    assert (3 * a).coefficient((1,), (2,)) == 6
    assert a + 1 == 1 + a
    assert CKElement.unit(full2) * a == a * CKElement.unit(full2) == a


# -- adjoint -------------------------------------------------------------------

def test_adjoint_examples(full2):
    assert adjoint(mono(full2, "1|2")) == mono(full2, "2|1")
    assert adjoint(CKElement.unit(full2)) == CKElement.unit(full2)
    assert adjoint((2 + 1j) * S(full2, 1)) == (2 - 1j) * Ss(full2, 1)


# -- embedding and G -------------------------------------------------------------

def test_embed_examples(full2, golden):
    assert embed_function(full2, [1.0, 0.0], 1) == Pj(full2, 1)
    assert embed_function(full2, [1.0, 1.0], 1) == CKElement.unit(full2)
    e = embed_function(golden, [1.0, 2.0, 3.0], 2)
    assert len(e) == 3
    # [2,1] = [2] on the golden mean, so its term is stored as S_2 S_2*
    assert e == mono(golden, "1,1|1,1") + 2 * mono(golden, "1,2|1,2") + 3 * mono(golden, "2,1|2,1")
    assert e.coefficient((2,), (2,)) == 3


def test_embed_is_multiplicative(golden):
    rng = np.random.default_rng(1)
    f, g = rng.random(5), rng.random(5)
    lhs = embed_function(golden, f * g, 3)
    assert close(lhs, embed_function(golden, f, 3) * embed_function(golden, g, 3))


def test_expectation_examples(full2):
    assert expectation_G(mono(full2, "1|2")) == CKElement.zero(full2)
    assert expectation_G(Pj(full2, 1)) == Pj(full2, 1)
    a = 2 * Pj(full2, 1) + 3 * mono(full2, "1|2")
    assert expectation_G(a) == 2 * Pj(full2, 1)


def test_expectation_is_bimodular(golden):
    rng = np.random.default_rng(2)
    for _ in range(30):
        a = random_monomial(golden, rng) + random_monomial(golden, rng)
        f = embed_function(golden, rng.random(3), 2)
        g = embed_function(golden, rng.random(3), 2)
        assert close(expectation_G(f * a * g), f * expectation_G(a) * g)
        assert expectation_G(expectation_G(a)) == expectation_G(a)


# -- flows ---------------------------------------------------------------------

def test_gauge_examples(full2):
    t = 0.37
    He = LocallyConstantPotential.constant(full2, math.e)
    assert close(gauge_action(S(full2, 1), He, t), np.exp(1j * t) * S(full2, 1))
    N = LocallyConstantPotential(full2, 1, [2.0, 4.0])
    for j, Nj in ((1, 2.0), (2, 4.0)):
        assert close(gauge_action(S(full2, j), N, t), Nj ** (1j * t) * S(full2, j))
    assert gauge_action(CKElement.unit(full2), N, t) == CKElement.unit(full2)


def test_gauge_group_law(golden):
    H = LocallyConstantPotential(golden, 2, [1.5, 2.5, 4.0])
    rng = np.random.default_rng(3)
    for _ in range(10):
        a = random_monomial(golden, rng)
        assert close(gauge_action(gauge_action(a, H, 0.4), H, 0.9), gauge_action(a, H, 1.3))
        assert gauge_action(a, H, 0.0) == a


def test_modular_flow_examples(full2, golden):
    beta = 0.8
    He = LocallyConstantPotential.constant(full2, math.e)
    assert close(modular_flow(S(full2, 1), He, beta), math.exp(-beta) * S(full2, 1))
    N = LocallyConstantPotential(full2, 1, [2.0, 4.0])
    assert close(modular_flow(S(full2, 2), N, beta), 4.0 ** -beta * S(full2, 2))
    H2 = LocallyConstantPotential(golden, 2, [1.5, 2.5, 4.0])
    img = modular_flow(S(golden, 1), H2, beta)
    expected = 1.5 ** -beta * mono(golden, "1,1|1") + 2.5 ** -beta * mono(golden, "1,2|2")
    assert len(img) == 2 and close(img, expected)


def test_modular_flow_constant_H_scales_by_degree(golden):
    c, beta = 3.0, 0.6
    H = LocallyConstantPotential.constant(golden, c)
    rng = np.random.default_rng(4)
    for _ in range(20):
        a = random_monomial(golden, rng)
        (m, _), = a.terms
        scale = c ** (-beta * (len(m.left) - len(m.right)))
        assert close(modular_flow(a, H, beta), scale * a)


def test_flow_is_multiplicative(golden):
    H = LocallyConstantPotential(golden, 2, [1.5, 2.5, 4.0])
    rng = np.random.default_rng(5)
    for _ in range(20):
        a, b = random_monomial(golden, rng), random_monomial(golden, rng)
        z = 0.3 + 0.2j
        assert close(flow(a * b, H, z), flow(a, H, z) * flow(b, H, z), 1e-11)


# -- measure and state ----------------------------------------------------------

def _measure(A, H, beta, k=1):
    phi = phi_beta(H, beta)
    return CylinderMeasure.from_perron(perron(build_transfer_matrix(A, phi, k)), phi, k)


def test_measure_examples(full2, golden):
    nu = _measure(full2, LocallyConstantPotential.constant(full2, math.e), math.log(2))
    assert nu((1,)) == pytest.approx(0.5, abs=1e-14)
    assert nu((1, 1)) == pytest.approx(0.25, abs=1e-14)
    assert nu(()) == 1.0
    nug = _measure(golden, LocallyConstantPotential.constant(golden, math.e), 0.0)
    assert nug((1,)) == pytest.approx(GOLDEN - 1, abs=1e-12)
    with pytest.raises(InadmissibleWord):
        nug((2, 2))


def test_measure_additivity_and_aggregation(golden):
    H = LocallyConstantPotential(golden, 2, [1.5, 2.5, 4.0])
    nu = _measure(golden, H, 0.7, k=2)
    for w in [(1,), (2,), (1, 1), (1, 2, 1), (2, 1, 1, 2)]:
        kids = sum(nu(w + (j,)) for j in (1, 2) if golden.allowed(w[-1], j))
        assert abs(nu(w) - kids) <= 1e-12
    fine = _measure(golden, H, 0.7, k=3)
    np.testing.assert_allclose(fine.aggregated(2), nu.base, atol=1e-10)
    P = perron(build_transfer_matrix(golden, phi_beta(H, 0.7), 2))
    assert cylinder_measure(P, phi_beta(H, 0.7), (1, 2, 1)) == pytest.approx(nu((1, 2, 1)))


def test_state_examples(full2, golden):
    nu = _measure(full2, LocallyConstantPotential.constant(full2, math.e), math.log(2))
    assert kms_state(Pj(full2, 1), nu) == pytest.approx(0.5, abs=1e-14)
    assert kms_state(mono(full2, "1|2"), nu) == 0
    assert kms_state(CKElement.unit(full2), nu) == 1
    He = LocallyConstantPotential.constant(golden, math.e)
    nug = _measure(golden, He, math.log(GOLDEN))
    assert kms_state(Pj(golden, 1), nug).real == pytest.approx(GOLDEN - 1, abs=1e-10)


def test_kms_scalar_example(full2):
    He = LocallyConstantPotential.constant(full2, math.e)
    beta = math.log(2)
    nu = _measure(full2, He, beta)
    r = kms_condition_check(S(full2, 1), Ss(full2, 1), He, beta, nu)
    assert r.lhs == pytest.approx(0.5) and r.rhs == pytest.approx(0.5) and r.passed
    b = mono(full2, "1,2|2")
    assert kms_condition_check(CKElement.unit(full2), b, He, beta, nu).margin == 0


def test_kms_wrong_temperature_is_detected(full2):
    He = LocallyConstantPotential.constant(full2, math.e)
    beta = math.log(2) + 0.2
    nu = _measure(full2, He, beta)
    r = kms_condition_check(S(full2, 1), Ss(full2, 1), He, beta, nu)
    assert r.margin > 1e-3 and not r.passed


def test_kms_depth_two_potential(golden):
    from ckthermo import beta_star
    H = LocallyConstantPotential(golden, 2, [1.5, 2.5, 4.0])
    res = beta_star(golden, H, 2)
    nu = CylinderMeasure.from_perron(res.perron, phi_beta(H, res.beta_star), 2)
    margins = [r.margin for r in kms_suite(golden, H, res.beta_star, nu, pairs=60, seed=9)]
    assert max(margins) <= 1e-9


def test_state_is_gauge_invariant(golden):
    H = LocallyConstantPotential(golden, 2, [1.5, 2.5, 4.0])
    nu = _measure(golden, H, 0.5, k=2)
    rng = np.random.default_rng(6)
    for _ in range(30):
        a = random_monomial(golden, rng)
        assert abs(kms_state(gauge_action(a, H, 0.8), nu) - kms_state(a, nu)) <= 1e-12


# -- algebraic laws ----------------------------------------------------------------

_seeds = st.integers(0, 2**32 - 1)


@given(_seeds)
def test_associativity(seed):
    rng = np.random.default_rng(seed)
    A = random_primitive(rng, int(rng.integers(2, 4)))
    a, b, c = (random_monomial(A, rng) for _ in range(3))
    assert (a * b) * c == a * (b * c)


@given(_seeds)
def test_involution(seed):
    rng = np.random.default_rng(seed)
    A = ZeroOneMatrix.from_rows(["11", "10"])
    a = random_monomial(A, rng) + (1 + 2j) * random_monomial(A, rng)
    b = random_monomial(A, rng)
    assert adjoint(adjoint(a)) == a
    assert adjoint(a * b) == adjoint(b) * adjoint(a)
