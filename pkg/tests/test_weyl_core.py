import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from weylmaps.dynamics import ExponentialProfile, WeylDynamics
from weylmaps.phase_space import PhasePoint, cyclic_subgroup
from weylmaps.weyl_core import (
    NonInvertibleError,
    WeylMapSpec,
    apply_map,
    character_table,
    choi_from_superoperator,
    choi_matrix,
    dft_eigenvalues,
    identity_spec,
    intermediate_map,
    is_cp,
    match_multisets,
    random_density_matrix,
    random_spec,
    superoperator,
    superoperator_from_eigenvalues,
    vec,
    unvec,
    weyl_basis,
    weyl_operator,
)

RNG = np.random.default_rng(7)


@st.composite
def weight_vectors(draw, max_d=5):
    d = draw(st.integers(2, max_d))
    raw = draw(arrays(float, d * d, elements=st.floats(0, 1)))
    if raw.sum() == 0:
        raw[0] = 1.0
    return d, raw / raw.sum()


# --- Weyl operators ---


def test_identity_and_paulis():
    assert np.allclose(weyl_operator(0, 0, 4), np.eye(4))
    assert np.allclose(weyl_operator(1, 0, 2), np.diag([1, -1]))
    assert np.allclose(weyl_operator(0, 1, 2), [[0, 1], [1, 0]])


def test_commutation_phase_d3():
    w = np.exp(2j * np.pi / 3)
    lhs = weyl_operator(1, 0, 3) @ weyl_operator(0, 1, 3)
    rhs = w**2 * weyl_operator(0, 1, 3) @ weyl_operator(1, 0, 3)
    assert np.allclose(lhs, rhs, atol=1e-14)


@pytest.mark.parametrize("d", [2, 3, 5, 8, 16])
def test_unitary_orthogonal_periodic(d):
    B = weyl_basis(d)
    assert np.allclose(B.conj().T @ B, np.eye(d * d), atol=1e-10)
    for k, l in [(1, 2), (d - 1, 3), (2, d - 1)]:
        U = weyl_operator(k, l, d)
        assert np.allclose(U.conj().T @ U, np.eye(d), atol=1e-12)
        assert np.allclose(weyl_operator(k + d, l, d), U)
        assert np.allclose(weyl_operator(k, l - d, d), U)


def test_commutation_for_all_pairs_d4():
    d = 4
    W = character_table(d)
    for a in range(d * d):
        for b in range(d * d):
            Ua = weyl_operator(a // d, a % d, d)
            Ub = weyl_operator(b // d, b % d, d)
            assert np.allclose(Ua @ Ub, W[a, b] * Ub @ Ua, atol=1e-12)


def test_vec_roundtrip():
    X = RNG.normal(size=(3, 3))
    assert np.array_equal(unvec(vec(X), 3), X)


# --- specs ---


def test_spec_validation():
    with pytest.raises(ValueError):
        WeylMapSpec(2, {(0, 0): 0.5})
    with pytest.raises(ValueError):
        WeylMapSpec(2, {(0, 0): 1.5, (1, 0): -0.5})
    spec = WeylMapSpec(3, {(0, 0): 0.5, (4, 1): 0.5})
    assert spec.weights == {(0, 0): 0.5, (1, 1): 0.5}
    assert WeylMapSpec.from_json(spec.to_json()) == spec


# --- apply_map ---


def test_identity_channel_leaves_state():
    rho = random_density_matrix(3, RNG)
    assert np.allclose(apply_map(identity_spec(3), rho), rho)


def test_qubit_full_dephasing_of_plus_state():
    plus = np.full((2, 2), 0.5)
    out = apply_map(WeylMapSpec(2, {(0, 0): 0.5, (1, 0): 0.5}), plus)
    assert np.allclose(out, np.eye(2) / 2)


def test_apply_map_matches_superoperator():
    G = cyclic_subgroup(PhasePoint(1, 0, 3))
    spec = WeylDynamics.isotropic(G, ExponentialProfile(2 / 3, 1.0)).spec_at(np.inf)
    assert abs(sum(spec.weights.values()) - 1) < 1e-12
    rho = random_density_matrix(3, RNG)
    assert np.allclose(vec(apply_map(spec, rho)), superoperator(spec) @ vec(rho))


def test_apply_map_rejects_bad_states():
    spec = identity_spec(2)
    with pytest.raises(ValueError):
        apply_map(spec, np.eye(3) / 3)
    with pytest.raises(ValueError):
        apply_map(spec, np.eye(2))
    with pytest.raises(ValueError):
        apply_map(spec, np.array([[0.5, 1.0], [0.0, 0.5]]))


# --- superoperators and spectra ---


def test_superoperator_examples():
    assert np.allclose(superoperator(identity_spec(3)), np.eye(9))
    p = 0.3
    S = superoperator(WeylMapSpec(2, {(0, 0): 1 - p, (1, 0): p}))
    assert match_multisets(np.linalg.eigvals(S), [1, 1, 1 - 2 * p, 1 - 2 * p]) < 1e-12
    S = superoperator(WeylMapSpec.from_array(3, np.full(9, 1 / 9)))
    assert match_multisets(np.linalg.eigvals(S), [1] + [0] * 8, tol=1e-10) < 1e-10


def test_superoperator_trace_preserving():
    spec = random_spec(4, RNG)
    S = superoperator(spec)
    vec_id = vec(np.eye(4))
    assert np.allclose(vec_id @ S, vec_id, atol=1e-10)


@given(weight_vectors())
@settings(max_examples=60, deadline=None)
def test_dft_spectrum_matches_superoperator(case):
    d, p = case
    spec = WeylMapSpec.from_array(d, p)
    lam = dft_eigenvalues(spec.array, d)
    assert match_multisets(lam, np.linalg.eigvals(superoperator(spec)), tol=1e-10) <= 1e-10
    # and the Weyl basis diagonalizes it
    assert np.allclose(superoperator_from_eigenvalues(lam, d), superoperator(spec), atol=1e-12)


# --- Choi and CP ---


@given(weight_vectors(max_d=4))
@settings(max_examples=30, deadline=None)
def test_random_unitary_maps_are_cp(case):
    d, p = case
    C = choi_matrix(WeylMapSpec.from_array(d, p))
    assert np.allclose(C, C.conj().T, atol=1e-12)
    assert abs(np.trace(C) - d) < 1e-10
    assert is_cp(C)


def test_intermediate_map_after_qubit_zero_is_not_cp():
    fam = WeylDynamics.dephasing((1, 0), ExponentialProfile(0.9, 1.0), d=2)
    t_star = np.log(1.8 / 0.8)
    s, t = t_star + 0.2, t_star + 0.6
    V = intermediate_map(fam.spec_at(t), fam.spec_at(s))
    assert is_cp(choi_from_superoperator(V, 2)) is False


def test_isotropic_semigroup_intermediate_maps_are_cp():
    G = cyclic_subgroup(PhasePoint(1, 1, 3))
    fam = WeylDynamics.isotropic(G, ExponentialProfile(2 / 3, 1.0))
    grid = np.linspace(0.05, 4.0, 12)
    for i, s in enumerate(grid):
        for t in grid[i:]:
            V = intermediate_map(fam.spec_at(t), fam.spec_at(s))
            assert is_cp(choi_from_superoperator(V, 3))
            assert np.allclose(V, superoperator(fam.spec_at(t - s)), atol=1e-9)


def test_intermediate_map_identity_at_equal_times():
    # a dominant identity weight keeps every |lambda| >= 0.4
    p = 0.3 * random_spec(3, RNG).array
    p[0] += 0.7
    spec = WeylMapSpec.from_array(3, p)
    assert np.allclose(intermediate_map(spec, spec), np.eye(9), atol=1e-9)


def test_intermediate_map_noninvertible_near_zero():
    r, c = 0.6, 1.0
    s = np.log(2 * r / (2 * r - 1)) / c
    fam = WeylDynamics.dephasing((1, 0), ExponentialProfile(r, c), d=2)
    with pytest.raises(NonInvertibleError) as err:
        intermediate_map(fam.spec_at(s + 1.0), fam.spec_at(s), s=s)
    assert err.value.t == s


def test_match_multisets_detects_mismatch():
    assert match_multisets([1, 2], [1, 2.5]) == float("inf")
    assert match_multisets([1], [1, 2]) == float("inf")
