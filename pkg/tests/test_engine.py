import itertools
import logging

import numpy as np
import pytest
from numpy.testing import assert_allclose

from application import engine
from application.channel import SisoScenario, StrategyProfile, random_mimo_channels, symmetric_distances
from application.constraints import ConstraintSpec, UserConstraints, check_feasible
from application.engine import ScheduleKind, initial_profile, make_schedule, run
from application.errors import BadParamsError, InfeasibleInitError
from application.game import GameVariant, best_response, build_game, uniqueness_mimo, uniqueness_siso
from conftest import decoupled_channels, random_complex


def _budgets(count, power=1.0):
    return ConstraintSpec(tuple(UserConstraints(power) for _ in range(count)))


def _weak_game(seed=3, count=3, antennas=2):
    ch = random_mimo_channels(seed, count, antennas, distances=symmetric_distances(count, 1.0, 4.0))
    return build_game(GameVariant.G1, _budgets(count), ch)


def test_sequential_schedule_round_robin():
    schedule = make_schedule("sequential", 3)
    assert [schedule.plan(n).updates for n in range(4)] == [(0,), (1,), (2,), (0,)]
    assert schedule.window == 3
    assert schedule.update_times(1, 7) == [1, 4]


def test_simultaneous_schedule_updates_everyone():
    schedule = make_schedule(ScheduleKind.SIMULTANEOUS, 2)
    plan = schedule.plan(5)
    assert plan.updates == (0, 1)
    assert np.all(plan.ages == 5)
    assert schedule.window == 1


def test_randomized_without_delay_updates_every_tick():
    schedule = make_schedule("randomized", 3, update_probability=0.3, max_delay=0, seed=1)
    for n in range(10):
        plan = schedule.plan(n)
        assert plan.updates == (0, 1, 2)
        assert np.all(plan.ages == n)


def test_randomized_schedule_bounds_delay_and_idle_time():
    schedule = make_schedule("randomized", 4, update_probability=0.2, max_delay=3, seed=7)
    horizon = 200
    for n in range(horizon):
        ages = schedule.plan(n).ages
        assert np.all(ages <= n)
        assert np.all(ages >= max(0, n - 3))
        assert np.all(np.diag(ages) == n)
    for q in range(4):
        times = schedule.update_times(q, horizon)
        assert times[0] <= 3
        assert max(np.diff(times)) <= 4


def test_randomized_schedule_is_reproducible_in_any_query_order():
    a = make_schedule("randomized", 3, update_probability=0.5, max_delay=2, seed=11)
    b = make_schedule("randomized", 3, update_probability=0.5, max_delay=2, seed=11)
    late = a.plan(20)
    assert late.updates == b.plan(20).updates
    for n in range(20):
        assert a.plan(n).updates == b.plan(n).updates
        assert np.array_equal(a.plan(n).ages, b.plan(n).ages)
    assert np.array_equal(late.ages, b.plan(20).ages)


def test_make_schedule_validation():
    with pytest.raises(BadParamsError):
        make_schedule("round_robin", 2)
    with pytest.raises(BadParamsError):
        make_schedule("randomized", 2, update_probability=0.0)
    with pytest.raises(BadParamsError):
        make_schedule("randomized", 2, max_delay=-1)
    with pytest.raises(BadParamsError):
        make_schedule("sequential", 0)


def test_single_user_converges_after_one_update():
    ch = random_mimo_channels(4, 1, 3)
    spec = build_game(GameVariant.G1, _budgets(1), ch)
    result = run(spec, make_schedule("sequential", 1))
    assert result.converged
    assert result.iterations == 2
    assert result.steps[-1] == 0.0
    assert result.report.is_nash


def test_decoupled_users_converge_immediately(rng):
    ch = decoupled_channels([random_complex(rng, (2, 2)) for _ in range(3)])
    spec = build_game(GameVariant.G1, _budgets(3), ch)
    result = run(spec, make_schedule("simultaneous", 3))
    assert result.converged
    assert result.iterations == 2


@pytest.mark.parametrize(
    "kind, params",
    [
        ("simultaneous", {}),
        ("randomized", {"update_probability": 0.5, "max_delay": 2, "seed": 5}),
    ],
)
def test_schedules_reach_the_same_equilibrium(kind, params):
    spec = _weak_game()
    reference = run(spec, make_schedule("sequential", 3), max_iter=3000, tol=1e-11)
    result = run(spec, make_schedule(kind, 3, **params), max_iter=3000, tol=1e-11)
    assert reference.converged and result.converged
    assert result.profile.distance(reference.profile) <= 1e-6
    assert result.sum_rate == pytest.approx(reference.sum_rate, rel=1e-6)


def test_run_result_histories():
    spec = _weak_game()
    result = run(spec, make_schedule("simultaneous", 3))
    assert result.rates.shape == (result.iterations, 3)
    assert result.steps.shape == (result.iterations,)
    assert result.sum_rate == pytest.approx(float(np.sum(result.rates[-1])))


def test_threaded_run_matches_serial_run():
    spec = _weak_game()
    serial = run(spec, make_schedule("simultaneous", 3))
    threaded = run(spec, make_schedule("simultaneous", 3), workers=3)
    assert serial.iterations == threaded.iterations
    assert np.array_equal(serial.rates, threaded.rates)
    for a, b in zip(serial.profile, threaded.profile):
        assert np.array_equal(a, b)


def test_uniform_projected_init_is_feasible(rng):
    ch = random_mimo_channels(6, 2, 3)
    u = random_complex(rng, (3, 1))
    cs = ConstraintSpec((UserConstraints(2.0, null_matrix=u), UserConstraints(1.0)))
    spec = build_game(GameVariant.G1, cs, ch)
    profile = initial_profile("uniform_projected", spec)
    assert np.real(np.trace(profile[0])) == pytest.approx(2.0)
    assert np.linalg.norm(u.conj().T @ profile[0]) <= 1e-10
    assert_allclose(profile[1], np.eye(3) / 3, atol=1e-12)


def test_uniform_projected_init_for_g2(rng):
    ch = random_mimo_channels(6, 2, 3)
    cs = ConstraintSpec(
        (
            UserConstraints(shaping_matrix=random_complex(rng, (3, 3)), average_power=1.5, peak_power=0.4),
            UserConstraints(shaping_matrix=np.eye(3), average_power=1.0, null_matrix=random_complex(rng, (3, 1))),
        )
    )
    spec = build_game(GameVariant.G2, cs, ch)
    profile = initial_profile("uniform_projected", spec)
    for q in range(2):
        assert check_feasible(profile[q], spec.views[q]).passed


def test_uniform_projected_init_for_siso_respects_masks():
    s = SisoScenario(np.ones((1, 1, 4)), 1.0)
    cs = ConstraintSpec((UserConstraints(2.0, masks=[0.1, 1.0, 1.0, 1.0]),))
    spec = build_game(GameVariant.SISO, cs, siso=s)
    assert_allclose(initial_profile("uniform_projected", spec)[0], [0.1, 0.5, 0.5, 0.5])
    assert_allclose(initial_profile("zero", spec)[0], np.zeros(4))


def test_unknown_init_preset():
    with pytest.raises(BadParamsError):
        initial_profile("random", _weak_game())


def test_infeasible_init_is_rejected():
    spec = _weak_game()
    init = StrategyProfile(tuple(2.0 * np.eye(2) for _ in range(3)))
    with pytest.raises(InfeasibleInitError) as info:
        run(spec, make_schedule("sequential", 3), init=init)
    assert info.value.user == 0
    assert "power" in info.value.failed_checks


def test_iteration_limit_returns_unconverged_profile(caplog):
    spec = _weak_game()
    with caplog.at_level(logging.WARNING, logger="application.engine"):
        result = run(spec, make_schedule("sequential", 3), max_iter=2)
    assert not result.converged
    assert result.iterations == 2
    assert not result.report.is_nash
    assert "no convergence" in caplog.text


def test_run_parameter_validation():
    spec = _weak_game()
    with pytest.raises(BadParamsError):
        run(spec, make_schedule("sequential", 3), max_iter=0)
    with pytest.raises(BadParamsError):
        run(spec, make_schedule("sequential", 3), tol=0.0)
    with pytest.raises(BadParamsError):
        run(spec, make_schedule("sequential", 2))


def _unique_instances(count, antennas=4, cross=4.0):
    found = []
    for seed in range(500):
        ch = random_mimo_channels(seed, 2, antennas, distances=symmetric_distances(2, 1.0, cross))
        if uniqueness_mimo(ch).holds:
            found.append(ch)
            if len(found) == count:
                break
    return found


@pytest.mark.slow
def test_equilibrium_does_not_depend_on_schedule_or_start():
    instances = _unique_instances(20)
    assert len(instances) == 20
    for seed, ch in enumerate(instances):
        spec = build_game(GameVariant.G1, _budgets(2), ch)
        schedules = [
            lambda: make_schedule("sequential", 2),
            lambda: make_schedule("simultaneous", 2),
            lambda: make_schedule("randomized", 2, update_probability=0.5, max_delay=5, seed=seed),
        ]
        profiles = []
        for build in schedules:
            for init in ("zero", "uniform_projected"):
                result = run(spec, build(), init=init, max_iter=5000, tol=1e-11)
                assert result.converged
                profiles.append(result.profile)
        for a, b in itertools.combinations(profiles, 2):
            assert a.distance(b) <= 1e-6


def _siso_game(seed, users=8, bins=16, cross=4.0):
    rng = np.random.default_rng(seed)
    magnitude = rng.uniform(0.0, 1.0, (users, users, bins))
    idx = np.arange(users)
    magnitude[idx, idx] = rng.uniform(1.0, 2.0, (users, bins))
    responses = magnitude * np.exp(2j * np.pi * rng.random((users, users, bins)))
    s = SisoScenario(responses, 1.0, distances=symmetric_distances(users, 1.0, cross))
    return build_game(GameVariant.SISO, _budgets(users), siso=s)


@pytest.mark.slow
def test_simultaneous_updates_need_fewer_ticks_than_sequential():
    ticks = {"simultaneous": [], "sequential": []}
    for seed in range(20):
        spec = _siso_game(seed)
        assert uniqueness_siso(spec.siso).holds
        for kind in ticks:
            result = run(spec, make_schedule(kind, 8), max_iter=5000, tol=1e-8)
            assert result.converged
            ticks[kind].append(result.iterations)
    assert np.median(ticks["simultaneous"]) < np.median(ticks["sequential"])


def test_fresh_update_never_lowers_own_rate():
    spec = _weak_game()
    result = run(spec, make_schedule("sequential", 3), max_iter=30, tol=1e-14)
    previous = np.zeros(3)
    for tick in range(result.iterations):
        q = tick % 3
        assert result.rates[tick, q] >= previous[q] - 1e-12
        previous = result.rates[tick]


def test_delayed_reads_match_committed_profiles(monkeypatch):
    calls = []

    def recording(q, view, spec):
        response = best_response(q, view, spec)
        calls.append((q, view, response))
        return response

    monkeypatch.setattr(engine, "best_response", recording)
    spec = _weak_game()
    schedule = make_schedule("randomized", 3, update_probability=0.5, max_delay=3, seed=2)
    initial = initial_profile("zero", spec)
    result = run(spec, schedule, init=initial, max_iter=40, tol=1e-14)

    committed = [initial]
    index = 0
    for tick in range(result.iterations):
        plan = schedule.plan(tick)
        strategies = list(committed[-1].strategies)
        for q in plan.updates:
            called_for, view, response = calls[index]
            index += 1
            assert called_for == q
            for r in range(3):
                assert np.array_equal(view[r], committed[plan.ages[q, r]][r])
            strategies[q] = response
        committed.append(StrategyProfile(tuple(strategies)))
    assert index == len(calls)
    for a, b in zip(committed[-1], result.profile):
        assert np.array_equal(a, b)
