import numpy as np
import pytest
from hypothesis import given, strategies as st

from hyperlap import (
    OperatorParams,
    Variant,
    adjoint,
    assemble,
    build_hypergraph,
    check_weight_condition,
    divergence,
    energy,
    gradient,
    inner_product_hyperarc,
    inner_product_vertex,
    p_laplacian,
    p_laplacian_direct,
    rayleigh_quotient,
)
from hyperlap.errors import (
    HypergraphError,
    LengthMismatchError,
    POutOfRangeError,
    ZeroDegreeVertexError,
    ZeroFunctionError,
)
from hyperlap.operators import phi
from hyperlap.synthetic import random_instance

from conftest import instances, rel_err
from oracles import dense_grad_div, literal_simplified_p_laplacian

F1234 = np.array([1.0, 2.0, 3.0, 4.0])


# --- examples on the two-hyperarc toy instance -----------------------------

def test_assemble_coefficients(oh1):
    s = assemble(oh1)
    assert s.grad_coefficients(0) == {0: -1.0, 1: 0.5, 2: 0.5}
    assert s.div_coefficients(0) == {0: 1.0, 1: -0.5, 2: -0.5}
    assert s.nnz == 6


def test_assemble_simplified_coefficients(oh1):
    s = assemble(oh1, OperatorParams.simplified())
    assert s.grad_coefficients(0) == {0: -1.0, 1: 1.0, 2: 1.0}
    # -(1/deg)(delta_out - delta_in)
    assert s.div_coefficients(0) == {0: -1.0, 1: 0.5, 2: 0.5}


def test_gradient_example(oh1):
    s = assemble(oh1)
    np.testing.assert_array_equal(gradient(s, F1234), [1.5, 1.5])
    np.testing.assert_array_equal(gradient(s, np.full(4, 7.0)), [0.0, 0.0])


def test_gradient_antisymmetric_example():
    h = build_hypergraph(3, [([0], [1, 2]), ([1, 2], [0])])
    np.testing.assert_array_equal(gradient(assemble(h), [1.0, 2.0, 3.0]), [1.5, -1.5])


def test_adjoint_and_divergence_examples(oh1):
    s = assemble(oh1)
    np.testing.assert_array_equal(adjoint(s, [1.0, 1.0]), [-1, 0, 0, 1])
    np.testing.assert_array_equal(divergence(s, [1.0, 1.0]), [1, 0, 0, -1])
    np.testing.assert_array_equal(divergence(s, [1.0, -1.0]), [1, -1, -1, 1])
    np.testing.assert_array_equal(adjoint(s, [0.0, 0.0]), np.zeros(4))
    lhs = inner_product_hyperarc(oh1, [1, 1], gradient(s, F1234))
    rhs = inner_product_vertex(oh1, F1234, adjoint(s, [1.0, 1.0]))
    assert lhs == rhs == 3.0


def test_p_laplacian_examples(oh1):
    s = assemble(oh1)
    np.testing.assert_array_equal(p_laplacian(s, F1234, 2), [1.5, 0, 0, -1.5])
    np.testing.assert_array_equal(p_laplacian(s, F1234, 3), [2.25, 0, 0, -2.25])
    np.testing.assert_array_equal(p_laplacian_direct(s, F1234, 2), [1.5, 0, 0, -1.5])
    np.testing.assert_array_equal(p_laplacian_direct(s, F1234, 3), [2.25, 0, 0, -2.25])


def test_energy_and_rayleigh_examples(oh1):
    s = assemble(oh1)
    assert energy(s, F1234, 2) == 2.25
    assert energy(s, np.ones(4), 2) == 0.0
    assert rayleigh_quotient(s, F1234, 2) == pytest.approx(0.15, rel=1e-15)
    assert rayleigh_quotient(s, np.ones(4), 2) == 0.0
    with pytest.raises(ZeroFunctionError):
        rayleigh_quotient(s, np.zeros(4), 2)


def test_errors(oh1):
    s = assemble(oh1)
    with pytest.raises(LengthMismatchError):
        gradient(s, np.ones(3))
    with pytest.raises(LengthMismatchError):
        divergence(s, np.ones(3))
    with pytest.raises(POutOfRangeError):
        p_laplacian(s, F1234, 0.5)
    with pytest.raises(POutOfRangeError):
        p_laplacian_direct(s, F1234, 1.0)
    with pytest.raises(HypergraphError):
        OperatorParams(alpha=1.0, variant=Variant.SIMPLIFIED)
    with pytest.raises(HypergraphError):
        OperatorParams(alpha=float("nan"))


def test_simplified_rejects_isolated_vertex():
    h = build_hypergraph(3, [([0], [1])])
    assemble(h)
    with pytest.raises(ZeroDegreeVertexError):
        assemble(h, OperatorParams.simplified())


def test_phi_regularization():
    x = np.array([-2.0, 0.0, 3.0])
    np.testing.assert_array_equal(phi(x, 1.0, 0.0), [-1.0, 0.0, 1.0])
    np.testing.assert_allclose(phi(x, 1.0, 1e-8), [-1.0, 0.0, 1.0], rtol=1e-15)
    np.testing.assert_array_equal(phi(x, 3.0), [-4.0, 0.0, 9.0])


# --- properties on random instances ----------------------------------------

def test_matrices_match_entrywise_oracle():
    for h, prm in instances(11, 40, mode="random"):
        s = assemble(h, prm)
        G, D = dense_grad_div(h, prm)
        assert rel_err(s.grad.toarray(), G) <= 1e-12
        assert rel_err(s.div.toarray(), D) <= 1e-12
        assert s.nnz == sum(len(a.out_set) + len(a.in_set) for a in h.hyperarcs)


def test_adjointness_random_exponents():
    rng = np.random.default_rng(0)
    for h, prm in instances(12, 50, n_range=(2, 50), mode="random"):
        s = assemble(h, prm)
        f = rng.standard_normal(h.n_vertices)
        G = rng.standard_normal(h.n_hyperarcs)
        lhs = inner_product_hyperarc(h, G, gradient(s, f), prm.beta)
        rhs = inner_product_vertex(h, f, adjoint(s, G), prm.alpha)
        assert abs(lhs - rhs) <= 1e-10 * (1 + abs(lhs))


def test_divergence_is_negated_adjoint():
    rng = np.random.default_rng(1)
    for h, prm in instances(13, 20, mode="random"):
        s = assemble(h, prm)
        F = rng.standard_normal(h.n_hyperarcs)
        np.testing.assert_array_equal(divergence(s, F) + adjoint(s, F), 0.0)


def test_vanishing_gradient_under_weight_condition():
    for h, prm in instances(14, 50, mode="condition"):
        assert check_weight_condition(h, prm)
        s = assemble(h, prm)
        for c in (1.0, -3.5, 1e3):
            assert np.max(np.abs(gradient(s, np.full(h.n_vertices, c)))) <= 1e-14 * abs(c) * 10


def test_antisymmetry_with_equal_exponents():
    rng = np.random.default_rng(2)
    checked = 0
    for h, prm in instances(15, 40, mode="condition", reversals=5):
        s = assemble(h, prm)
        f = rng.standard_normal(h.n_vertices)
        g = gradient(s, f)
        for q, arc in enumerate(h.hyperarcs):
            r = h.arc_position(arc.reversed())
            if r is not None:
                assert abs(g[q] + g[r]) <= 1e-14 * max(1.0, abs(g[q]))
                checked += 1
    assert checked > 0


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 4.0])
def test_composition_matches_direct(p):
    rng = np.random.default_rng(int(p * 10))
    for h, prm in instances(16, 30, mode="random"):
        s = assemble(h, prm)
        f = rng.standard_normal(h.n_vertices)
        assert rel_err(p_laplacian(s, f, p), p_laplacian_direct(s, f, p)) <= 1e-12


def test_gamma_irrelevant_for_unit_weights(oh1):
    f = np.array([0.3, -1.0, 2.0, 5.0])
    base = p_laplacian_direct(assemble(oh1), f, 3)
    for gamma in (-2.0, 0.5, 1.7):
        np.testing.assert_array_equal(p_laplacian_direct(assemble(oh1, OperatorParams(gamma=gamma)), f, 3), base)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_simplified_matches_literal_formula(p):
    rng = np.random.default_rng(3)
    for h, _ in instances(17, 30, mode="unit"):
        s = assemble(h, OperatorParams.simplified())
        f = rng.standard_normal(h.n_vertices)
        assert rel_err(p_laplacian(s, f, p), literal_simplified_p_laplacian(h, f, p)) <= 1e-12
        assert rel_err(p_laplacian_direct(s, f, p), literal_simplified_p_laplacian(h, f, p)) <= 1e-12


def test_negative_semidefinite():
    rng = np.random.default_rng(4)
    for h, prm in instances(18, 20, mode="random"):
        s = assemble(h, prm)
        for _ in range(10):
            f = rng.standard_normal(h.n_vertices)
            assert inner_product_vertex(h, f, p_laplacian(s, f, 2), prm.alpha) <= 1e-12
            assert rayleigh_quotient(s, f, 2) >= -1e-12


def test_energy_variation_is_laplacian():
    # -d/dt E_p(f + t e_i) = <e_i, Lap_p f>_V, checked by central differences
    rng = np.random.default_rng(5)
    h, prm = random_instance(rng, 8, 14, mode="random")
    s = assemble(h, prm)
    f = rng.standard_normal(8)
    for p in (2.0, 3.0):
        lap = p_laplacian(s, f, p)
        for i in range(8):
            e = np.zeros(8)
            e[i] = 1e-6
            dE = (energy(s, f + e, p) - energy(s, f - e, p)) / 2e-6
            assert dE == pytest.approx(-s.vertex_inner[i] * lap[i], rel=1e-5, abs=1e-7)


@given(
    st.integers(0, 2**32 - 1),
    st.sampled_from([1.5, 2.0, 3.0, 4.0]),
    st.floats(-10, 10).filter(lambda c: abs(c) > 1e-3),
)
def test_homogeneity(seed, p, c):
    rng = np.random.default_rng(seed)
    h, prm = random_instance(rng, 7, 12, mode="random")
    s = assemble(h, prm)
    f = rng.standard_normal(7)
    lhs = p_laplacian(s, c * f, p)
    rhs = c * abs(c) ** (p - 2) * p_laplacian(s, f, p)
    assert rel_err(lhs, rhs) <= 1e-11 * max(1.0, abs(c) ** (p - 1))


@given(st.integers(0, 2**32 - 1), st.floats(-5, 5), st.floats(-5, 5))
def test_linearity(seed, a, b):
    rng = np.random.default_rng(seed)
    h, prm = random_instance(rng, 6, 10, mode="random")
    s = assemble(h, prm)
    f, g = rng.standard_normal((2, 6))
    F, G = rng.standard_normal((2, h.n_hyperarcs))
    assert rel_err(gradient(s, a * f + b * g), a * gradient(s, f) + b * gradient(s, g)) <= 1e-12
    assert rel_err(divergence(s, a * F + b * G), a * divergence(s, F) + b * divergence(s, G)) <= 1e-12
