import numpy as np
import pytest

from renormlab import (
    DomainError,
    FoldingMap,
    NonlinearityProfile,
    OrientedInterval,
    ResolutionError,
    branch_zoom,
    compose,
    constant_profile,
    identity_profile,
    linear_combination,
    zoom,
)
from support import monotone_profile, random_profile

XS = np.linspace(-1.0, 1.0, 41)


def test_identity_profile_is_the_identity_map():
    phi = identity_profile(64)
    assert phi.nonlinearity_norm == 0.0
    assert np.max(np.abs(phi.evaluate(XS) - XS)) < 1e-14
    assert np.max(np.abs(phi.derivative(XS) - 1.0)) < 1e-14


def test_endpoints_are_fixed_exactly(rng):
    for _ in range(5):
        phi = random_profile(rng)
        assert phi.evaluate(-1.0) == -1.0
        assert phi.evaluate(1.0) == 1.0


def test_derivative_is_positive(rng):
    phi = random_profile(rng, scale=0.8)
    assert np.all(phi.derivative(XS) > 0.0)


def test_evaluate_rejects_points_outside_the_interval():
    phi = identity_profile(32)
    with pytest.raises(DomainError):
        phi.evaluate(1.0 + 1e-6)
    with pytest.raises(DomainError):
        phi.derivative(-1.5)


def test_eta_at_reproduces_grid_samples_bitwise(rng):
    phi = random_profile(rng)
    assert np.array_equal(phi.eta_at(phi.grid), phi.eta_values)


def test_inverse_round_trip(rng):
    phi = random_profile(rng, scale=0.6)
    ys = np.linspace(-0.999, 0.999, 23)
    xs = phi.inverse(ys)
    assert np.max(np.abs(phi.evaluate(xs) - ys)) < 1e-12
    y = float(ys[7])
    assert abs(phi.evaluate(phi.inverse(y)) - y) < 1e-12


def test_serialization_round_trip(rng):
    phi = random_profile(rng)
    clone = NonlinearityProfile.from_dict(phi.to_dict())
    assert np.array_equal(clone.eta_values, phi.eta_values)


def test_linear_combination_acts_samplewise(rng):
    phi, psi = random_profile(rng), random_profile(rng)
    out = linear_combination(0.3, phi, -1.25, psi)
    assert np.array_equal(out.eta_values, 0.3 * phi.eta_values + (-1.25) * psi.eta_values)


def test_compose_semantics_match_pointwise_composition(rng):
    outer, inner = random_profile(rng), random_profile(rng)
    both = compose(outer, inner)
    direct = outer.evaluate(inner.evaluate(XS))
    assert np.max(np.abs(both.evaluate(XS) - direct)) < 1e-12


def test_compose_with_identity_outer_is_bitwise():
    phi = random_profile(np.random.default_rng(3))
    out = compose(identity_profile(phi.degree), phi)
    assert np.array_equal(out.eta_values, phi.eta_values)


def test_compose_with_identity_inner_is_tight(rng):
    phi = random_profile(rng)
    out = compose(phi, identity_profile(phi.degree))
    assert np.max(np.abs(out.eta_values - phi.eta_values)) < 1e-13


def test_compose_is_associative_up_to_resolution(rng):
    a, b, c = (random_profile(rng, scale=0.25) for _ in range(3))
    left = compose(compose(a, b), c)
    right = compose(a, compose(b, c))
    assert np.max(np.abs(left.eta_values - right.eta_values)) < 1e-9


def test_compose_flags_undersampled_results():
    wild = constant_profile(18.0, 16)
    with pytest.raises(ResolutionError):
        compose(wild, wild)


def test_zoom_matches_the_normalized_restriction(rng):
    phi = random_profile(rng, scale=0.6)
    for flag in ("+", "-"):
        box = OrientedInterval(-0.35, 0.55, flag)
        out = zoom(phi, box)
        vals = phi.evaluate(box.identify(XS))
        v_m1 = phi.evaluate(box.identify(-1.0))
        v_p1 = phi.evaluate(box.identify(1.0))
        oracle = -1.0 + 2.0 * (vals - v_m1) / (v_p1 - v_m1)
        assert np.max(np.abs(out.evaluate(XS) - oracle)) < 1e-12


def test_zoom_contracts_nonlinearity_by_the_half_length(rng):
    phi = random_profile(rng)
    box = OrientedInterval(-0.2, 0.6, "+")
    out = zoom(phi, box)
    assert out.nonlinearity_norm <= box.half_length * phi.nonlinearity_norm + 1e-15


def test_zoom_of_constant_nonlinearity_is_exact():
    for c in (2.0, -0.7, 0.1251):
        box = OrientedInterval(-0.5, 0.25, "+")
        out = zoom(constant_profile(c, 48), box)
        assert np.all(out.eta_values == box.half_length * c)


def test_branch_zoom_matches_a_zoomed_fold_branch():
    s1 = OrientedInterval(0.33, 0.75, "+")
    bz = branch_zoom(2.0, s1, 64)
    fold = FoldingMap(2.0, 0.8)
    vals = fold.evaluate(s1.identify(XS))
    v_m1 = fold.evaluate(s1.identify(-1.0))
    v_p1 = fold.evaluate(s1.identify(1.0))
    oracle = -1.0 + 2.0 * (vals - v_m1) / (v_p1 - v_m1)
    assert np.max(np.abs(bz.evaluate(XS) - oracle)) < 1e-10


def test_branch_zoom_validates_its_interval():
    with pytest.raises(DomainError):
        branch_zoom(1.0, OrientedInterval(0.2, 0.5, "+"))
    with pytest.raises(DomainError):
        branch_zoom(2.0, OrientedInterval(-0.1, 0.5, "+"))
    with pytest.raises(DomainError):
        branch_zoom(2.0, OrientedInterval(0.2, 0.5, "-"))


def test_folding_map_closed_form():
    fold = FoldingMap(2.0, 0.75)
    assert fold.peak == 0.5
    assert fold.evaluate(0.0) == 0.5
    assert fold.evaluate(1.0) == -1.0
    assert fold.evaluate(-1.0) == -1.0
    xs = np.linspace(-1, 1, 11)
    assert np.max(np.abs(fold.evaluate(xs) - (-1.5 * xs ** 2 + 0.5))) < 1e-15


def test_folding_map_validates_parameters():
    with pytest.raises(DomainError):
        FoldingMap(1.0, 0.5)
    with pytest.raises(DomainError):
        FoldingMap(2.0, 1.5)


def test_oriented_interval_identify_locate_round_trip():
    for flag in ("+", "-"):
        box = OrientedInterval(-0.25, 0.8, flag)
        assert np.max(np.abs(box.locate(box.identify(XS)) - XS)) < 1e-14
        clone = OrientedInterval.from_dict(box.to_dict())
        assert clone == box


def test_oriented_interval_validation():
    with pytest.raises(DomainError):
        OrientedInterval(0.5, 0.5, "+")
    with pytest.raises(DomainError):
        OrientedInterval(-1.2, 0.0, "+")
    with pytest.raises(DomainError):
        OrientedInterval(0.0, 0.5, "x")


def test_monotone_profile_extremes_sit_on_grid_nodes():
    phi = monotone_profile(64)
    assert np.all(np.diff(phi.eta_values) > 0.0)
    assert phi.nonlinearity_norm == abs(phi.eta_values[-1])
