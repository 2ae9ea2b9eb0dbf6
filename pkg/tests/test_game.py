import functools

import numpy as np
import pytest
from numpy.testing import assert_allclose

from application.channel import (
    Band,
    ChannelSet,
    SisoScenario,
    StrategyProfile,
    random_mimo_channels,
    rate,
    symmetric_distances,
)
from application.constraints import ConstraintSpec, UserConstraints, beampattern, steering_vector
from application.engine import make_schedule, run
from application.errors import BadParamsError
from application.game import (
    GameVariant,
    best_response,
    build_game,
    is_nash,
    null_residual,
    payoff,
    uniqueness_for_game,
    uniqueness_mimo,
    uniqueness_siso,
    virtual_noise_limit_check,
)
from application.waterfilling import mimo_waterfill, whitened_gram
from conftest import decoupled_channels, random_complex, scalar_channels


def _budgets(count, power=1.0):
    return ConstraintSpec(tuple(UserConstraints(power) for _ in range(count)))


def test_build_game_needs_channels():
    with pytest.raises(BadParamsError):
        build_game(GameVariant.G1, _budgets(2))
    with pytest.raises(BadParamsError):
        build_game(GameVariant.SISO, _budgets(2), channels=random_mimo_channels(0, 2, 2))


def test_build_game_g2_needs_shaping():
    with pytest.raises(BadParamsError) as info:
        build_game(GameVariant.G2, _budgets(2), random_mimo_channels(0, 2, 2))
    assert "shaping" in info.value.message


def test_build_game_counts_users():
    with pytest.raises(BadParamsError):
        build_game(GameVariant.G1, _budgets(3), random_mimo_channels(0, 2, 2))


def test_build_game_siso_mask_length():
    s = SisoScenario(np.ones((1, 1, 4)), 1.0)
    cs = ConstraintSpec((UserConstraints(1.0, masks=[1.0, 1.0, 1.0]),))
    with pytest.raises(BadParamsError):
        build_game(GameVariant.SISO, cs, siso=s)


def test_build_game_rejects_negative_alpha():
    with pytest.raises(BadParamsError):
        build_game(GameVariant.G_ALPHA, _budgets(2), random_mimo_channels(0, 2, 2), alpha=-1.0)


def test_variant_views_drop_unused_constraints():
    u = np.array([[1.0], [0.0]])
    uc = UserConstraints(1.0, null_matrix=u, peak_power=3.0)
    spec = build_game(GameVariant.G_ALPHA, ConstraintSpec((uc,)), random_mimo_channels(1, 1, 2), alpha=1.0)
    assert spec.views[0].null_matrix is None
    assert spec.constraints[0].null_matrix is not None
    g1 = build_game(GameVariant.G1, ConstraintSpec((uc,)), random_mimo_channels(1, 1, 2))
    assert g1.views[0].has_null


def test_single_user_best_response_is_waterfilling():
    ch = random_mimo_channels(4, 1, 3)
    spec = build_game(GameVariant.G1, _budgets(1, 2.0), ch)
    profile = StrategyProfile.zeros(ch)
    expected = mimo_waterfill(whitened_gram(ch.direct(0), ch.noise[0]), 2.0).covariance
    assert_allclose(best_response(0, profile, spec), expected, atol=1e-12)


def test_decoupled_waterfilling_is_nash(rng):
    direct = [random_complex(rng, (2, 2)), random_complex(rng, (2, 2))]
    ch = decoupled_channels(direct)
    spec = build_game(GameVariant.G1, _budgets(2), ch)
    zero = StrategyProfile.zeros(ch)
    profile = StrategyProfile(tuple(best_response(q, zero, spec) for q in range(2)))
    report = is_nash(profile, spec)
    assert report.is_nash
    assert report.max_residual <= 1e-10
    assert not is_nash(zero, spec).is_nash


def test_siso_best_response_meets_budget_and_masks():
    s = SisoScenario(np.ones((2, 2, 4)) * np.array([1.0, 0.5, 0.2, 0.1]), 1.0)
    cs = ConstraintSpec((UserConstraints(2.0, masks=[0.5, np.inf, np.inf, np.inf]), UserConstraints(1.0)))
    spec = build_game(GameVariant.SISO, cs, siso=s)
    p = best_response(0, StrategyProfile((np.zeros(4), np.full(4, 0.25))), spec)
    assert p.sum() == pytest.approx(2.0)
    assert p[0] <= 0.5 + 1e-12


def test_payoff_of_g_alpha_with_zero_alpha_is_rate(rng):
    ch = random_mimo_channels(3, 2, 3)
    u = random_complex(rng, (3, 1))
    cs = ConstraintSpec((UserConstraints(1.0, null_matrix=u), UserConstraints(1.0)))
    spec = build_game(GameVariant.G_ALPHA, cs, ch, alpha=0.0)
    profile = StrategyProfile((np.eye(3) / 3, np.eye(3) / 3))
    assert payoff(0, profile, spec) == pytest.approx(rate(0, profile, ch))
    noisy = build_game(GameVariant.G_ALPHA, cs, ch, alpha=10.0)
    assert payoff(0, profile, noisy) < payoff(0, profile, spec)


def test_uniqueness_mimo_scalar_terms():
    ch = scalar_channels([[1.0, 0.5], [0.3, 1.0]], [1.0, 1.0])
    report = uniqueness_mimo(ch)
    assert_allclose(report.received, [0.09, 0.25])
    assert_allclose(report.generated, [0.25, 0.09])
    assert report.holds
    assert report.margin == pytest.approx(0.75)


def test_uniqueness_mimo_scales_with_cross_gain():
    base = random_mimo_channels(8, 3, 2)
    c = 0.5 + 0.5j
    scaled_links = tuple(
        tuple(h if r == q else c * h for q, h in enumerate(row)) for r, row in enumerate(base.links)
    )
    scaled = ChannelSet(scaled_links, base.noise)
    assert_allclose(uniqueness_mimo(scaled).terms, abs(c) ** 2 * uniqueness_mimo(base).terms, rtol=1e-10)


def test_uniqueness_mimo_fails_for_strong_interference():
    ch = scalar_channels([[1.0, 2.0], [2.0, 1.0]], [1.0, 1.0])
    report = uniqueness_mimo(ch)
    assert not report.holds
    assert report.margin < 0


@pytest.mark.parametrize("cross, holds", [(2.0, True), (1.2, False)])
def test_uniqueness_siso_follows_distance_ratio(cross, holds):
    s = SisoScenario(np.ones((3, 3, 4)), 1.0, distances=symmetric_distances(3, 1.0, cross))
    report = uniqueness_siso(s)
    assert_allclose(report.received, 2.0 * cross**-2)
    assert report.holds is holds


def test_uniqueness_siso_distance_override():
    s = SisoScenario(np.ones((2, 2, 3)), 1.0)
    assert not uniqueness_siso(s).holds
    assert uniqueness_siso(s, symmetric_distances(2, 1.0, 2.0)).holds


def test_uniqueness_for_game_dispatch(rng):
    ch = random_mimo_channels(2, 2, 3, distances=symmetric_distances(2, 1.0, 3.0))
    g1 = build_game(GameVariant.G1, _budgets(2), ch)
    assert not uniqueness_for_game(g1).heuristic

    u = random_complex(rng, (3, 1))
    cs = ConstraintSpec((UserConstraints(1.0, null_matrix=u), UserConstraints(1.0)))
    assert uniqueness_for_game(build_game(GameVariant.G1, cs, ch)).heuristic
    assert uniqueness_for_game(build_game(GameVariant.G_ALPHA, cs, ch, alpha=1.0)).heuristic
    assert uniqueness_for_game(build_game(GameVariant.G_INFINITY, cs, ch)).heuristic

    s = SisoScenario(np.ones((2, 2, 3)), 1.0, distances=symmetric_distances(2, 1.0, 2.0))
    siso = uniqueness_for_game(build_game(GameVariant.SISO, _budgets(2), siso=s))
    assert siso.holds and not siso.heuristic


def test_null_residual():
    u = np.array([[1.0], [0.0]])
    cs = ConstraintSpec((UserConstraints(1.0, null_matrix=u), UserConstraints(1.0)))
    assert null_residual(StrategyProfile((np.diag([0.0, 1.0]), np.eye(2))), cs) == 0.0
    assert null_residual(StrategyProfile((np.eye(2) / 2, np.eye(2))), cs) == pytest.approx(np.sqrt(0.5))


def _weakly_coupled_pair() -> ChannelSet:
    # ||H_qq^-1 H_rq||^2 <= 0.25 / 0.64 and 0.16 / 0.81, so both low-MUI margins exceed 0.6
    unitary = np.array([[1.0, 1.0j], [1.0j, 1.0]]) / np.sqrt(2.0)
    rotation = np.array([[1.0, -1.0], [1.0, 1.0]]) / np.sqrt(2.0)
    links = (
        (np.diag([1.0, 0.8]), 0.4 * rotation),
        (0.5 * unitary, np.diag([0.9, 1.0])),
    )
    return ChannelSet(links, (np.eye(2), np.eye(2)))


def test_weakly_coupled_pair_is_unique():
    report = uniqueness_mimo(_weakly_coupled_pair())
    assert report.holds
    assert report.margin >= 0.3


def test_virtual_noise_limit_approaches_null_constrained_game():
    ch = _weakly_coupled_pair()
    cs = ConstraintSpec(
        (
            UserConstraints(1.0, null_matrix=steering_vector(np.pi / 2, 2)),
            UserConstraints(1.0, null_matrix=steering_vector(-5 * np.pi / 12, 2)),
        )
    )
    solve = functools.partial(_solve, max_iter=2000, tol=1e-10)
    alphas = [1e1, 1e2, 1e3, 1e4, 1e5, 1e6]
    curve = virtual_noise_limit_check(ch, cs, alphas, solve)
    assert curve.uniqueness.holds
    assert curve.infinity_null_residual <= 1e-8
    assert curve.null_residuals[-1] < curve.null_residuals[0]
    assert curve.null_residuals[-1] <= 1e-3
    assert curve.distances[-1] < curve.distances[0]


def _solve(spec, max_iter, tol):
    return run(spec, make_schedule("simultaneous", spec.user_count), max_iter=max_iter, tol=tol)


@pytest.mark.parametrize("variant", [GameVariant.G_ALPHA, GameVariant.G_INFINITY])
def test_no_profitable_unilateral_deviation(rng, variant):
    ch = random_mimo_channels(17, 2, 3, distances=symmetric_distances(2, 1.0, 3.0))
    cs = ConstraintSpec((UserConstraints(1.0, null_matrix=random_complex(rng, (3, 1))), UserConstraints(1.0)))
    spec = build_game(variant, cs, ch, alpha=5.0)
    result = _solve(spec, max_iter=2000, tol=1e-11)
    assert result.converged
    for q in range(2):
        best = payoff(q, result.profile, spec)
        for _ in range(5):
            a = random_complex(rng, (3, 3))
            deviation = a @ a.conj().T
            deviation = deviation / np.real(np.trace(deviation))
            assert payoff(q, result.profile.replace(q, deviation), spec) <= best + 1e-9


def test_null_constrained_beampatterns_radiate_nothing_at_protected_angles():
    ch = random_mimo_channels(5, 2, 4, distances=symmetric_distances(2, 1.0, 4.0))
    nulls = (np.pi / 2, -5 * np.pi / 12)
    cs = ConstraintSpec(tuple(UserConstraints(1.0, null_matrix=steering_vector(phi, 4)) for phi in nulls))
    spec = build_game(GameVariant.G1, cs, ch)
    result = _solve(spec, max_iter=2000, tol=1e-10)
    assert result.converged
    grid = np.linspace(-np.pi / 2, np.pi / 2, 721)
    for q, phi in enumerate(nulls):
        peak = float(beampattern(result.profile[q], grid).total.max())
        assert peak > 0
        assert float(beampattern(result.profile[q], [phi]).total[0]) <= 1e-10 * peak


def _band_scenario(seed, users=2, bins=512):
    rng = np.random.default_rng(seed)
    magnitude = rng.uniform(0.0, 1.0, (users, users, bins))
    idx = np.arange(users)
    magnitude[idx, idx] = rng.uniform(1.0, 2.0, (users, bins))
    responses = magnitude * np.exp(2j * np.pi * rng.random((users, users, bins)))
    bands = (Band("A", 50, 300), Band("B", 300, 400))
    return SisoScenario(responses, 1.0, bands=bands, distances=symmetric_distances(users, 1.0, 2.0))


def test_band_masks_hold_at_equilibrium():
    s = _band_scenario(31)
    mask = 0.002
    masks = s.band_mask({"A": 0.0, "B": mask})
    budgets = (20.0, 10.0)
    cs = ConstraintSpec(tuple(UserConstraints(p, masks=masks) for p in budgets))
    spec = build_game(GameVariant.SISO, cs, siso=s)
    assert uniqueness_for_game(spec).holds
    result = _solve(spec, max_iter=2000, tol=1e-10)
    assert result.converged
    for q, budget in enumerate(budgets):
        p = result.profile[q]
        assert np.all(p[50:300] <= 1e-12)
        assert np.all(p[300:400] <= mask + 1e-10)
        assert p.sum() == pytest.approx(budget, rel=1e-10)
