import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from weylmaps.dynamics import (
    ExponentialProfile,
    NonRealRateError,
    RateTable,
    TabulatedProfile,
    WeylDynamics,
    check_invertible_window,
    decay_rates,
    default_grid,
    dephasing_rate_closed_form,
    eigenvalue,
    forward_transform,
    generator_eigenvalue,
    generator_eigenvalues,
    isotropic_rate_closed_form,
    lambda_zero_time,
    make_grid,
    polynomial_identity_check,
    profile_from_json,
    rate_trace,
    rates_csv,
    rates_from_generator_eigenvalues,
    spectrum,
    spectrum_derivative,
    spectrum_derivative_fd,
)
from weylmaps.phase_space import (
    PhasePoint,
    all_points,
    all_subgroups,
    cyclic_order,
    cyclic_subgroup,
    dual_subgroup,
    symplectic_product,
)
from weylmaps.weyl_core import NonInvertibleError, dft_eigenvalues, match_multisets, superoperator

ZERO = ExponentialProfile(0.0, 1.0)


def random_family(d, rng, r_max=0.5):
    pattern = np.concatenate([[0.0], rng.dirichlet(np.ones(d * d - 1))])
    return WeylDynamics(d, pattern, ExponentialProfile(rng.uniform(0.05, r_max), rng.uniform(0.2, 3)))


# --- profiles ---


def test_exponential_profile_values():
    prof = ExponentialProfile(0.6, 2.0)
    assert prof.p(0.0) == 0.0
    assert prof.pdot(0.0) == pytest.approx(1.2)
    assert prof.p(1.0) == pytest.approx(0.6 * (1 - math.exp(-2)))
    with pytest.raises(ValueError):
        ExponentialProfile(1.2, 1.0)
    with pytest.raises(ValueError):
        ExponentialProfile(0.5, 0.0)


def test_tabulated_profile_tracks_exponential():
    ref = ExponentialProfile(0.5, 1.0)
    ts = np.linspace(0, 5, 401)
    tab = TabulatedProfile(ts, ref.p(ts))
    for t in (0.3, 1.7, 4.2):
        assert tab.p(t) == pytest.approx(ref.p(t), abs=1e-8)
        assert tab.pdot(t) == pytest.approx(ref.pdot(t), abs=1e-5)
    assert profile_from_json(tab.to_json()).p(1.7) == pytest.approx(tab.p(1.7))
    assert profile_from_json({"r": 0.5, "c": 1.0}) == ref


# --- eigenvalues ---


def test_identity_at_time_zero():
    rng = np.random.default_rng(1)
    fam = random_family(4, rng)
    assert np.allclose(spectrum(fam, 0.0), 1.0)


@pytest.mark.parametrize("d", [2, 3, 4, 6])
def test_isotropic_eigenvalues(d):
    prof = ExponentialProfile(0.4, 1.3)
    t = 0.8
    for G in all_subgroups(d):
        if G.order < 2:
            continue
        fam = WeylDynamics.isotropic(G, prof)
        dual = dual_subgroup(G)
        lam = spectrum(fam, t)
        off = 1 - G.order * prof.p(t) / (G.order - 1)
        for v in all_points(d):
            expected = 1.0 if v in dual else off
            assert lam[v.index] == pytest.approx(expected, abs=1e-12)


def test_dephasing_eigenvalue_formula():
    d, u = 5, PhasePoint(2, 3, 5)
    prof = ExponentialProfile(0.7, 1.0)
    fam = WeylDynamics.dephasing(u, prof)
    t = 0.9
    for v in all_points(d):
        w = cmath.exp(2j * math.pi * symplectic_product(u, v) / d)
        assert eigenvalue(fam, v, t) == pytest.approx(1 - (1 - w) * prof.p(t), abs=1e-12)


def test_spectrum_matches_superoperator():
    rng = np.random.default_rng(2)
    for d in (2, 3, 4):
        fam = random_family(d, rng, r_max=1.0)
        t = rng.uniform(0.1, 3)
        assert match_multisets(spectrum(fam, t),
                               np.linalg.eigvals(superoperator(fam.spec_at(t)))) < 1e-10


# --- generator eigenvalues and rates ---


def test_dual_points_have_zero_generator_eigenvalue():
    G = cyclic_subgroup(PhasePoint(1, 2, 3))
    fam = WeylDynamics.isotropic(G, ExponentialProfile(0.5, 1.0))
    for v in dual_subgroup(G).elements:
        assert generator_eigenvalue(fam, v, 1.1) == pytest.approx(0, abs=1e-14)


def test_trace_preservation_mu0():
    rng = np.random.default_rng(3)
    for d in (2, 3, 5):
        fam = random_family(d, rng)
        for t in default_grid(points=8):
            assert abs(generator_eigenvalues(fam, t)[0]) < 1e-10


@pytest.mark.parametrize("d", [2, 3, 4, 6])
def test_semigroup_rates_are_constant(d):
    for G in all_subgroups(d):
        if G.order < 2:
            continue
        c = 1.7
        fam = WeylDynamics.isotropic(G, ExponentialProfile((G.order - 1) / G.order, c))
        trace = rate_trace(fam, default_grid(c, points=16))
        for u in all_points(d):
            target = c / G.order if (u in G and not u.is_zero()) else 0.0
            assert np.allclose(trace[:, u.index], target, atol=1e-9)


def test_zero_profile_gives_zero_rates():
    fam = WeylDynamics.dephasing((1, 1), ZERO, d=3)
    assert np.all(rate_trace(fam, default_grid(points=5)) == 0)
    assert np.all(decay_rates(fam, 1.0).gamma == 0)


@given(st.integers(2, 5), st.integers(0, 2**32 - 1), st.floats(0.01, 5))
@settings(max_examples=40, deadline=None)
def test_forward_inverse_roundtrip(d, seed, t):
    fam = random_family(d, np.random.default_rng(seed))
    rates = decay_rates(fam, t)
    assert np.allclose(forward_transform(rates), generator_eigenvalues(fam, t), atol=1e-9)


def test_rate_table_access():
    fam = WeylDynamics.dephasing((1, 0), ExponentialProfile(0.3, 1.0), d=3)
    tab = decay_rates(fam, 0.5)
    assert tab[(1, 0)] == tab[3] == tab[PhasePoint(1, 0, 3)]
    assert len(list(tab.items())) == 8


def test_rate_trace_matches_pointwise_rates():
    rng = np.random.default_rng(4)
    fam = random_family(4, rng)
    grid = default_grid(points=10)
    trace = rate_trace(fam, grid)
    for k, t in enumerate(grid):
        assert np.allclose(trace[k], decay_rates(fam, t).gamma, atol=1e-13)


def test_nonreal_residue_is_reported():
    # mu that is not the transform of any real rate vector
    mu = np.zeros(4, dtype=complex)
    mu[1] = 1j
    with pytest.raises(NonRealRateError):
        rates_from_generator_eigenvalues(mu, 2)


def test_noninvertible_point_raises_with_location():
    r, c = 0.6, 1.0
    t0 = lambda_zero_time(r, c)
    fam = WeylDynamics.dephasing((1, 0), ExponentialProfile(r, c), d=2)
    with pytest.raises(NonInvertibleError) as err:
        decay_rates(fam, t0)
    assert err.value.v == (0, 1)


def test_window_check_finds_crossing_between_grid_points():
    r, c = 0.6, 1.0
    fam = WeylDynamics.dephasing((1, 0), ExponentialProfile(r, c), d=2)
    with pytest.raises(NonInvertibleError) as err:
        check_invertible_window(fam, default_grid(c))
    assert err.value.t == pytest.approx(lambda_zero_time(r, c), abs=1e-10)
    rate_trace(fam, default_grid(c))  # grid points alone stay invertible


def test_finite_difference_derivative():
    rng = np.random.default_rng(5)
    for d in (2, 3, 4):
        fam = random_family(d, rng)
        for t in default_grid(fam.profile.c, points=12):
            an = spectrum_derivative(fam, t)
            fd = spectrum_derivative_fd(fam, t)
            assert np.max(np.abs(fd - an)) <= 1e-6 * np.max(np.abs(an))


# --- grids and CSV ---


def test_grids():
    g = make_grid(0.1, 10, 3, "log")
    assert np.allclose(g, [0.1, 1, 10])
    assert np.allclose(make_grid(0, 1, 3, "linear"), [0, 0.5, 1])
    with pytest.raises(ValueError):
        make_grid(0, 1, 3, "log")
    with pytest.raises(ValueError):
        make_grid(1, 2, 1)
    assert default_grid(2.0)[-1] == pytest.approx(5.0)


def test_csv_format_is_deterministic():
    fam = WeylDynamics.isotropic(cyclic_subgroup(PhasePoint(0, 1, 2)), ExponentialProfile(0.5, 1))
    grid = default_grid(points=4)
    a = rates_csv(grid, rate_trace(fam, grid))
    b = rates_csv(grid, rate_trace(fam, grid))
    assert a == b
    lines = a.splitlines()
    assert lines[0] == "t,gamma_0,gamma_1,gamma_2,gamma_3"
    assert lines[1].split(",")[1:] == ["0", "0.5", "0", "0"]
    assert "-0," not in a


# --- closed forms ---


def test_dephasing_closed_form_examples():
    prof = ExponentialProfile(2 / 3, 1.0)
    u = PhasePoint(1, 0, 3)
    # y = 1 at t -> 0 approaches p'(0) = r c
    assert dephasing_rate_closed_form(u, 1, prof, 1e-9) == pytest.approx(2 / 3, rel=1e-6)
    fam = WeylDynamics.dephasing(u, prof)
    assert dephasing_rate_closed_form(u, 2, prof, 1.0) == pytest.approx(
        decay_rates(fam, 1.0)[(2, 0)], abs=1e-12)
    with pytest.raises(ValueError):
        dephasing_rate_closed_form(u, 3, prof, 1.0)


@pytest.mark.parametrize("d", [3, 5, 7, 9])
def test_last_channel_nonpositive_for_odd_order(d):
    u = PhasePoint(1, 0, d)
    prof = ExponentialProfile(0.8, 1.0)
    for t in default_grid(points=20):
        assert dephasing_rate_closed_form(u, d - 1, prof, t) <= 0


def test_dephasing_singularity():
    prof = ExponentialProfile(0.9, 1.0)
    with pytest.raises(ZeroDivisionError):
        dephasing_rate_closed_form(PhasePoint(1, 0, 2), 1, prof, lambda_zero_time(0.9, 1.0))


def test_isotropic_closed_form():
    G = cyclic_subgroup(PhasePoint(1, 1, 3))
    sg = isotropic_rate_closed_form(G, ExponentialProfile(2 / 3, 2.0), 0.7)
    assert sg[(1, 1)] == pytest.approx(2 / 3) and sg[(1, 0)] == 0
    assert np.all(isotropic_rate_closed_form(G, ZERO, 1.0).gamma == 0)
    prof = ExponentialProfile(0.5, 1.0)
    ref = decay_rates(WeylDynamics.isotropic(G, prof), 1.0).gamma
    assert np.allclose(isotropic_rate_closed_form(G, prof, 1.0).gamma, ref, atol=1e-9)
    with pytest.raises(NonInvertibleError):
        isotropic_rate_closed_form(G, ExponentialProfile(1.0, 1.0), math.log(3))


@pytest.mark.parametrize("d", range(2, 7))
def test_dephasing_closed_form_agrees_everywhere(d):
    for u in all_points(d):
        if u.is_zero():
            continue
        prof = ExponentialProfile(0.45, 1.0)
        fam = WeylDynamics.dephasing(u, prof)
        for t in (0.01, 0.5, 3.0):
            tab = decay_rates(fam, t)
            for y in range(1, cyclic_order(u)):
                assert dephasing_rate_closed_form(u, y, prof, t) == pytest.approx(
                    tab[u * y], abs=1e-10)


def test_polynomial_identity_examples():
    assert polynomial_identity_check(0.7, 0.0, 1.0, 3) < 1e-15
    assert polynomial_identity_check(0.7, 0.3, 1.0, 2) < 1e-14
    with pytest.raises(ValueError):
        polynomial_identity_check(0.5, 0.5, 1j, 3)
    with pytest.raises(ZeroDivisionError):
        polynomial_identity_check(0.5, 0.5, -1.0, 2)


@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.integers(1, 12), st.data())
def test_polynomial_identity_random(A, B, n, data):
    k = data.draw(st.integers(0, n - 1))
    z = cmath.exp(2j * math.pi * k / n)
    assume(abs(A + B * z) > 1e-3 and abs(A**n - (-B) ** n) > 1e-6)
    assert polynomial_identity_check(A, B, z, n) < 1e-10


def test_lambda_zero_time():
    assert lambda_zero_time(0.4, 1.0) is None
    t = lambda_zero_time(0.9, 2.0)
    assert 1 - 2 * ExponentialProfile(0.9, 2.0).p(t) == pytest.approx(0, abs=1e-14)


def test_family_validation_and_json():
    with pytest.raises(ValueError):
        WeylDynamics(2, np.array([0.5, 0.5, 0, 0]), ZERO)
    with pytest.raises(ValueError):
        WeylDynamics.dephasing((0, 0), ZERO, d=3)
    fam = WeylDynamics.dephasing((1, 2), ExponentialProfile(0.2, 1.0), d=3)
    obj = fam.to_json()
    assert obj["pattern"] == [{"i": 1, "j": 2, "w": 1.0}]
    assert isinstance(decay_rates(fam, 1.0), RateTable)
    assert dft_eigenvalues(fam.weights(0.0), 3)[0] == pytest.approx(1)
