"""Asynchronous iterative waterfilling under pluggable update schedules"""

import logging
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Deque, List, Optional, Tuple, Union

import numpy as np

from application.channel import StrategyProfile
from application.errors import BadParamsError, InfeasibleInitError
from application.game import GameSpec, GameVariant, NEReport, best_response, feasibility, is_nash, user_rate
from application.linalg import hermitize, orth_complement_projector

logger = logging.getLogger(__name__)

DEFAULT_MAX_ITER = 1000
DEFAULT_TOL = 1e-8
INIT_PRESETS = ("zero", "uniform_projected")


class ScheduleKind(str, Enum):
    SEQUENTIAL = "sequential"
    SIMULTANEOUS = "simultaneous"
    RANDOMIZED = "randomized"


@dataclass(frozen=True, eq=False)
class TickPlan:
    """Users updating at one tick and the information ages they read

    ``ages[q, r]`` is the tick whose committed profile user q reads for user r.
    """

    tick: int
    updates: Tuple[int, ...]
    ages: np.ndarray


class Schedule:
    """
    Update sets T_q and information ages tau_r^q(n)

    Plans are generated lazily in tick order and cached, so a schedule answers the
    same way however many times (and in whatever order) it is queried.
    """

    def __init__(
        self,
        kind: ScheduleKind,
        user_count: int,
        update_probability: float = 1.0,
        max_delay: int = 0,
        seed: int = 0,
    ):
        self.kind = ScheduleKind(kind)
        self.user_count = user_count
        self.update_probability = update_probability
        self.max_delay = max_delay
        self.seed = seed
        self._rng = np.random.default_rng(seed)
        self._idle = np.zeros(user_count, dtype=int)
        self._plans: List[TickPlan] = []

    @property
    def window(self) -> int:
        """Quiet ticks required before convergence is declared"""
        if self.kind is ScheduleKind.SEQUENTIAL:
            return max(self.max_delay + 1, self.user_count)
        return self.max_delay + 1

    def plan(self, tick: int) -> TickPlan:
        """
        Update set and information ages of one tick

        Args:
            tick: 0-based tick index; earlier plans are generated first if missing

        Returns:
            TickPlan, the same object on every call for a given tick
        """
        while len(self._plans) <= tick:
            self._plans.append(self._next_plan(len(self._plans)))
        return self._plans[tick]

    def update_times(self, q: int, horizon: int) -> List[int]:
        """Ticks below ``horizon`` at which user q updates"""
        return [n for n in range(horizon) if q in self.plan(n).updates]

    def _next_plan(self, n: int) -> TickPlan:
        count = self.user_count
        fresh = np.full((count, count), n, dtype=int)
        if self.kind is ScheduleKind.SEQUENTIAL:
            return TickPlan(n, (n % count,), fresh)
        if self.kind is ScheduleKind.SIMULTANEOUS:
            return TickPlan(n, tuple(range(count)), fresh)

        draws = self._rng.random(count)
        forced = self._idle >= self.max_delay
        updating = (draws < self.update_probability) | forced
        low = max(0, n - self.max_delay)
        ages = self._rng.integers(low, n + 1, size=(count, count))
        np.fill_diagonal(ages, n)
        self._idle = np.where(updating, 0, self._idle + 1)
        return TickPlan(n, tuple(int(q) for q in np.flatnonzero(updating)), ages)


def make_schedule(
    kind: Union[ScheduleKind, str],
    user_count: int,
    update_probability: float = 1.0,
    max_delay: int = 0,
    seed: int = 0,
) -> Schedule:
    """
    Validate the schedule parameters and build a Schedule

    Args:
        kind: sequential, simultaneous or randomized
        user_count: number of users Q
        update_probability: per-tick update probability (randomized only)
        max_delay: largest information age D (randomized only)
        seed: RNG seed (randomized only)

    Returns:
        Schedule
    """
    try:
        kind = ScheduleKind(kind)
    except ValueError:
        raise BadParamsError(f"unknown schedule kind {kind!r}") from None
    if user_count < 1:
        raise BadParamsError(f"user count must be at least 1, got {user_count}")
    if kind is ScheduleKind.RANDOMIZED:
        if not 0.0 < update_probability <= 1.0:
            raise BadParamsError(f"update probability must lie in (0, 1], got {update_probability}")
        if max_delay < 0 or int(max_delay) != max_delay:
            raise BadParamsError(f"max delay must be a non-negative integer, got {max_delay}")
        return Schedule(kind, user_count, update_probability, int(max_delay), seed)
    return Schedule(kind, user_count, seed=seed)


def _uniform_strategy(q: int, spec: GameSpec) -> np.ndarray:
    uc = spec.views[q]
    if spec.is_siso:
        bins = spec.siso.bin_count
        level = np.full(bins, uc.power_budget / bins)
        return level if uc.masks is None else np.minimum(level, uc.masks)

    if spec.variant is GameVariant.G2:
        mods = spec.modified
        g_pinv = mods.pseudoinverses[q]
        g = spec.constraints[q].shaping_matrix
        shaped_space = hermitize(mods.projectors[q] @ g_pinv @ g)
        modes = int(round(float(np.real(np.trace(shaped_space)))))
        level = min(uc.average_power / modes, uc.peak_power) if modes else 0.0
        return hermitize(g_pinv.conj().T @ (level * shaped_space) @ g_pinv)

    n = spec.channels.tx_dim(q)
    u = spec.constraints[q].null_matrix
    p = np.eye(n, dtype=complex) if u is None else orth_complement_projector(u)
    return hermitize(uc.power_budget * p / float(np.real(np.trace(p))))


def initial_profile(preset: str, spec: GameSpec) -> StrategyProfile:
    """
    Feasible starting point of the iterations

    Args:
        preset: ``zero`` (all strategies zero) or ``uniform_projected`` (budget spread
            evenly over the admissible subspace, clipped to masks or the peak cap)
        spec: game to start

    Returns:
        StrategyProfile
    """
    if preset not in INIT_PRESETS:
        raise BadParamsError(f"unknown init preset {preset!r}")
    count = spec.user_count
    if preset == "zero":
        return StrategyProfile(tuple(np.zeros(spec.strategy_shape(q)) for q in range(count)))
    return StrategyProfile(tuple(_uniform_strategy(q, spec) for q in range(count)))


@dataclass(frozen=True, eq=False)
class RunResult:
    """Outcome of one run; ``rates[n, q]`` and ``steps[n]`` describe the profile after tick n"""

    profile: StrategyProfile
    converged: bool
    iterations: int
    rates: np.ndarray
    steps: np.ndarray
    report: NEReport

    @property
    def sum_rate(self) -> float:
        return float(np.sum(self.report.rates))


def _delayed_view(q: int, ages: np.ndarray, history: Deque[StrategyProfile], tick: int) -> StrategyProfile:
    current = history[-1]
    if np.all(ages[q] == tick):
        return current
    strategies = [history[len(history) - 1 - (tick - int(ages[q, r]))][r] for r in range(len(current))]
    return StrategyProfile(tuple(strategies))


def _relative_step(before: StrategyProfile, after: StrategyProfile) -> float:
    return max(
        float(np.linalg.norm(a - b)) / max(1.0, float(np.linalg.norm(b)))
        for a, b in zip(after.strategies, before.strategies)
    )


def run(
    spec: GameSpec,
    schedule: Schedule,
    init: Union[StrategyProfile, str] = "zero",
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    workers: int = 1,
) -> RunResult:
    """
    Iterate Q_q <- T_q(Q_{-q} as last seen) on the schedule's update ticks

    Convergence needs ``schedule.window`` consecutive ticks whose relative step is at
    most ``tol`` followed by a passing Nash check at ``10 * tol``. Running out of
    iterations is not an error: the last profile comes back with ``converged=False``.

    Args:
        spec: game to play
        schedule: update schedule; its max delay sets the history depth
        init: feasible starting profile or the name of a preset
        max_iter: tick limit
        tol: relative step tolerance
        workers: threads used for the best responses of one tick

    Returns:
        RunResult
    """
    if max_iter < 1:
        raise BadParamsError(f"max_iter must be at least 1, got {max_iter}")
    if not tol > 0:
        raise BadParamsError(f"tol must be positive, got {tol}")
    if schedule.user_count != spec.user_count:
        raise BadParamsError(f"schedule for {schedule.user_count} users, game has {spec.user_count}")
    profile = initial_profile(init, spec) if isinstance(init, str) else init
    for q, report in enumerate(feasibility(profile, spec)):
        if not report.passed:
            raise InfeasibleInitError(q, report.failed)

    logger.info(
        "running %s game, %d users, %s schedule, max_iter=%d tol=%g",
        spec.variant.value, spec.user_count, schedule.kind.value, max_iter, tol,
    )
    history: Deque[StrategyProfile] = deque([profile], maxlen=schedule.max_delay + 1)
    rates: List[List[float]] = []
    steps: List[float] = []
    executor: Optional[ThreadPoolExecutor] = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    converged = False
    report: Optional[NEReport] = None
    quiet = 0
    try:
        for tick in range(max_iter):
            plan = schedule.plan(tick)
            current = history[-1]

            def respond(q: int) -> np.ndarray:
                return best_response(q, _delayed_view(q, plan.ages, history, tick), spec)

            if executor is not None and len(plan.updates) > 1:
                responses = list(executor.map(respond, plan.updates))
            else:
                responses = [respond(q) for q in plan.updates]
            strategies = list(current.strategies)
            for q, response in zip(plan.updates, responses):
                strategies[q] = response
            committed = StrategyProfile(tuple(strategies))
            history.append(committed)

            step = _relative_step(current, committed)
            steps.append(step)
            rates.append([user_rate(q, committed, spec) for q in range(spec.user_count)])
            logger.debug("tick %d: updates %s, step %.3e", tick, plan.updates, step)

            quiet = quiet + 1 if step <= tol else 0
            if quiet >= schedule.window:
                report = is_nash(committed, spec, 10 * tol)
                if report.is_nash:
                    converged = True
                    break
                quiet = 0
    finally:
        if executor is not None:
            executor.shutdown()

    final = history[-1]
    if report is None or not converged:
        report = is_nash(final, spec, 10 * tol)
    iterations = len(steps)
    if converged:
        logger.info("converged after %d ticks, sum rate %.6f bits", iterations, float(np.sum(report.rates)))
    else:
        logger.warning("no convergence after %d ticks (last step %.3e)", iterations, steps[-1])
    return RunResult(final, converged, iterations, np.array(rates), np.array(steps), report)

