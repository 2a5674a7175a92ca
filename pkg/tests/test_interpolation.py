import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncorlicz.errors import RegimeError
from ncorlicz.interpolation import (
    SublinearOperator,
    auto_exponents,
    certified_constant,
    column_blocks,
    column_embed,
    identity_operator,
    row_blocks,
    row_embed,
    split,
    stein_operator,
    transform_operator,
    verify_interpolation,
    weak_type_constant,
    weak_type_ratio,
)
from ncorlicz.martingale import Filtration, martingale_from_final
from ncorlicz.operators import distribution, lp_norm, svals, trace_phi_moment
from ncorlicz.orlicz import (
    Power,
    PowerLog,
    delta2_constant,
    elasticity_sup,
    growth_function,
    index_integral_bound_high,
    index_integral_bound_low,
)

from conftest import random_matrix
from oracles import power_certified

PL = PowerLog(1.2, 0.5)


def test_split_extremes(rng):
    x = random_matrix(rng, 6)
    x0, x1 = split(x, svals(x)[0] * 1.01)
    assert np.all(x0 == 0) and np.allclose(x1, x)
    x0, x1 = split(x, 1e-300)
    assert np.allclose(x0, x) and np.abs(x1).max() <= 1e-12


def test_split_reconstruction_and_bound(rng):
    for _ in range(20):
        x = random_matrix(rng, 8)
        for a in np.quantile(svals(x), [0.1, 0.5, 0.9]):
            x0, x1 = split(x, a)
            assert np.allclose(x0 + x1, x, atol=1e-12)
            assert svals(x1)[0] <= a + 1e-12
            for s in np.geomspace(0.05, 20, 25):
                assert distribution(x, 2 * s) <= distribution(x0, s) + distribution(x1, s) + 1e-15


def test_split_rejects_negative():
    with pytest.raises(ValueError):
        split(np.eye(2), -1.0)


def test_sublinear_handle_validation():
    with pytest.raises(ValueError):
        SublinearOperator(lambda x: x, p0=3, p1=2)
    with pytest.raises(ValueError):
        SublinearOperator(lambda x: x, A0=0.0)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 4.0])
def test_identity_weak_type_is_contractive(rng, p):
    ens = [random_matrix(rng, 8) for _ in range(30)]
    assert weak_type_constant(identity_operator(), p, ens) <= 1 + 1e-9
    assert weak_type_constant(identity_operator(), p, ens, n_alpha=60) <= 1 + 1e-9


def test_transform_weak_l2(rng):
    f = Filtration.tensor(3)
    ens = [random_matrix(rng, 8) for _ in range(30)]
    for alpha in ([1, -1, 1], [0.3, -1, 0.5j]):
        assert weak_type_constant(transform_operator(f, alpha), 2.0, ens) <= 1 + 1e-9


def test_weak_type_homogeneity(rng):
    ens = [random_matrix(rng, 8) for _ in range(20)]
    double = SublinearOperator(lambda x: 2 * x)
    for p in (1.0, 2.5):
        a1 = weak_type_constant(identity_operator(), p, ens)
        a2 = weak_type_constant(double, p, ens)
        assert a2 == pytest.approx(2 * a1, abs=1e-9)
        assert weak_type_ratio(double, p, ens) == pytest.approx(2 ** p * weak_type_ratio(identity_operator(), p, ens), rel=1e-12)


def test_exact_weak_sup_dominates_grid(rng):
    ens = [random_matrix(rng, 8) for _ in range(10)]
    T = transform_operator(Filtration.tensor(3), [1, -1, 1])
    assert weak_type_ratio(T, 1.5, ens, n_alpha=60) <= weak_type_ratio(T, 1.5, ens) * (1 + 1e-12)


@pytest.mark.parametrize("r,p0,p1", [(2.0, 1.0, 3.0), (2.0, 1.5, 4.0), (3.0, 1.2, 5.0)])
def test_certified_power_closed_form(r, p0, p1):
    assert certified_constant(Power(r), p0, p1, 1.0, 1.0) == pytest.approx(power_certified(r, p0, p1), rel=1e-6)
    assert certified_constant(Power(r), p0, p1, 0.7, 1.3) == pytest.approx(
        power_certified(r, p0, p1, 0.7, 1.3), rel=1e-6)


def test_doubling_A0_scales_first_summand():
    phi, p0, p1, A1 = PL, 1.05, 3.0, 1.1
    DK = elasticity_sup(phi) * delta2_constant(phi)
    second = DK * A1 ** p1 * index_integral_bound_high(phi, p1)
    c1 = certified_constant(phi, p0, p1, 1.0, A1) - second
    c2 = certified_constant(phi, p0, p1, 2.0, A1) - second
    assert c2 == pytest.approx(2 ** p0 * c1, rel=1e-12)


def test_certified_monotone_in_constants():
    base = certified_constant(PL, 1.05, 3.0, 1.0, 1.0)
    assert certified_constant(PL, 1.05, 3.0, 1.1, 1.0) > base
    assert certified_constant(PL, 1.05, 3.0, 1.0, 1.1) > base


def test_regime_errors():
    assert math.isfinite(certified_constant(PL, 1.05, 3.0, 1.0, 1.0))
    with pytest.raises(RegimeError):
        certified_constant(PL, 1.5, 3.0, 1.0, 1.0)
    with pytest.raises(RegimeError):
        certified_constant(PL, 1.05, 1.6, 1.0, 1.0)


def test_infinite_endpoint_branch():
    r, p0, A0, A1 = 2.0, 1.0, 1.3, 0.8
    got = certified_constant(Power(r), p0, math.inf, A0, A1)
    expected = r * A1 ** r * (A0 / A1) ** p0 / (r - p0)
    assert got == pytest.approx(expected, rel=1e-6)
    assert growth_function(Power(r), A1) == pytest.approx(A1 ** r)
    assert index_integral_bound_low(Power(r), p0) == pytest.approx(1 / (r - p0), rel=1e-6)


def test_infinite_endpoint_bounds_identity(rng):
    ens = [random_matrix(rng, 8) for _ in range(20)]
    res = verify_interpolation(identity_operator(), PL, 1.05, math.inf, ens)
    assert res.A1 == pytest.approx(1.0)
    assert res.passed


def test_auto_exponents():
    p0, p1 = auto_exponents(PL)
    assert p0 == pytest.approx(1.1, abs=3e-2)
    assert p1 == pytest.approx(3.4, abs=1e-1)


def test_identity_pipeline(rng):
    ens = [random_matrix(rng, 8) for _ in range(20)] + [np.zeros((8, 8))]
    res = verify_interpolation(identity_operator(), PL, 1.05, 3.0, ens)
    assert all(r == 1.0 for r in res.ratios)
    assert res.constant >= 1 and res.passed and res.skipped == 1


def test_pass_flag_is_strict_max():
    ens = [np.eye(4) * 2.0]
    res = verify_interpolation(identity_operator(), PL, 1.05, 3.0, ens, A0=1.0, A1=1.0)
    res.ratios.append(res.constant * (1 + 1e-12))
    res.__post_init__()
    assert not res.passed


def test_embeddings_round_trip(rng):
    a = [random_matrix(rng, 4) for _ in range(3)]
    c, r = column_embed(a), row_embed(a)
    assert all(np.array_equal(u, v) for u, v in zip(column_blocks(c, 3), a))
    assert all(np.array_equal(u, v) for u, v in zip(row_blocks(r, 3), a))
    # |column|^2 sits in the corner: sum a_k* a_k
    corner = (c.conj().T @ c)[:4, :4]
    assert np.allclose(corner, sum(x.conj().T @ x for x in a))


def test_stein_operator_on_adapted_is_identity(rng):
    f = Filtration.tensor(2)
    a = [f.expectation(n, random_matrix(rng, 4)) for n in range(2)]
    T = stein_operator(f)
    x = column_embed(a)
    assert np.allclose(T(x), x)
    assert trace_phi_moment(PL, T(x)) == pytest.approx(trace_phi_moment(PL, x), rel=1e-12)


def test_transform_operator_matches_martingale(rng):
    f = Filtration.tensor(3)
    x = random_matrix(rng, 8)
    m = martingale_from_final(f, x)
    y = transform_operator(f, [1, 0, 0])(x)
    assert np.allclose(y, m.diffs[0])


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), q=st.floats(0.05, 0.95))
def test_split_property(seed, q):
    rng = np.random.default_rng(seed)
    x = random_matrix(rng, 6)
    a = float(np.quantile(svals(x), q))
    x0, x1 = split(x, a)
    assert np.allclose(x0 + x1, x, atol=1e-12)
    assert svals(x1)[0] <= a + 1e-12 * max(1.0, svals(x)[0])
    assert lp_norm(x0, 2) ** 2 + lp_norm(x1, 2) ** 2 == pytest.approx(lp_norm(x, 2) ** 2, rel=1e-10)
