"""Game variants, best-response mappings, Nash checks and uniqueness conditions"""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import TYPE_CHECKING, Callable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from application.channel import (
    ChannelSet,
    SisoScenario,
    StrategyProfile,
    interference_covariance,
    mui_covariance,
    rate,
    rate_from_covariance,
    siso_rate,
)
from application.constraints import (
    ConstraintSpec,
    FeasibilityReport,
    ModifiedChannels,
    UserConstraints,
    check_feasible,
    hat_channels,
    modified_channels_g1,
    modified_channels_g2,
    virtual_noise_covariance,
    virtual_noise_direction,
)
from application.errors import BadParamsError, NonConvergenceError
from application.linalg import pseudoinverse, spectral_radius
from application.waterfilling import (
    WaterfillResult,
    capped_waterfill,
    mimo_waterfill,
    projected_waterfill,
    siso_masked_waterfill,
    whitened_gram,
)

if TYPE_CHECKING:
    from application.engine import RunResult

logger = logging.getLogger(__name__)

NASH_TOL = 1e-7


class GameVariant(str, Enum):
    """Game formulations the simulator can play"""

    G1 = "g1"
    G2 = "g2"
    G_ALPHA = "g_alpha"
    G_INFINITY = "g_infinity"
    SISO = "siso"


@dataclass(frozen=True, eq=False)
class GameSpec:
    """
    A fully assembled game

    ``views[q]`` holds the constraints of user q that the variant actually enforces
    (G2 has no power budget, G_alpha/G_infinity only keep the power budget, and so on).
    """

    variant: GameVariant
    constraints: ConstraintSpec
    views: Tuple[UserConstraints, ...]
    channels: Optional[ChannelSet] = None
    siso: Optional[SisoScenario] = None
    alpha: float = 0.0
    modified: Optional[ModifiedChannels] = None
    virtual_directions: Tuple[Optional[np.ndarray], ...] = ()

    @property
    def user_count(self) -> int:
        return len(self.constraints)

    @property
    def is_siso(self) -> bool:
        return self.variant is GameVariant.SISO

    def strategy_shape(self, q: int) -> Tuple[int, ...]:
        if self.is_siso:
            return (self.siso.bin_count,)
        n = self.channels.tx_dim(q)
        return (n, n)


def _require(condition: bool, message: str, problems: List[str]) -> None:
    if not condition:
        problems.append(message)


def _variant_view(uc: UserConstraints, variant: GameVariant) -> UserConstraints:
    if variant is GameVariant.G1:
        return uc.without("shaping_matrix", "average_power", "peak_power", "masks", "gap")
    if variant is GameVariant.G2:
        return uc.without("power_budget", "masks", "gap")
    if variant is GameVariant.SISO:
        return uc.without("null_matrix", "shaping_matrix", "average_power", "peak_power")
    return uc.without("null_matrix", "shaping_matrix", "average_power", "peak_power", "masks", "gap")


def build_game(
    variant: GameVariant,
    constraints: ConstraintSpec,
    channels: Optional[ChannelSet] = None,
    siso: Optional[SisoScenario] = None,
    alpha: float = 0.0,
) -> GameSpec:
    """
    Validate the variant requirements and precompute its modified channels

    Args:
        variant: game formulation
        constraints: per-user constraint bundles
        channels: MIMO channel set (required except for SISO)
        siso: SISO scenario (required for SISO)
        alpha: virtual noise power for G_alpha

    Returns:
        GameSpec ready for best responses
    """
    variant = GameVariant(variant)
    problems: List[str] = []
    count = len(constraints)
    if variant is GameVariant.SISO:
        _require(siso is not None, "the SISO game needs a SISO scenario", problems)
        if siso is not None:
            _require(siso.user_count == count, f"{count} constraint bundles for {siso.user_count} users", problems)
    else:
        _require(channels is not None, f"game {variant.value} needs a MIMO channel set", problems)
        if channels is not None:
            _require(channels.user_count == count, f"{count} constraint bundles for {channels.user_count} users", problems)
    if variant is GameVariant.G_ALPHA:
        _require(alpha >= 0, f"alpha must be non-negative, got {alpha}", problems)
    for q, uc in enumerate(constraints.users):
        if variant is GameVariant.G2:
            _require(uc.has_shaping, f"user {q}: game g2 needs a shaping matrix and average power", problems)
        else:
            _require(uc.power_budget is not None, f"user {q}: game {variant.value} needs a power budget", problems)
        if variant is GameVariant.SISO and uc.masks is not None and siso is not None:
            _require(uc.masks.size == siso.bin_count, f"user {q}: {uc.masks.size} masks for {siso.bin_count} bins", problems)
    if problems:
        raise BadParamsError("; ".join(problems))

    views = tuple(_variant_view(uc, variant) for uc in constraints.users)
    modified = None
    directions: Tuple[Optional[np.ndarray], ...] = ()
    if variant is GameVariant.G1:
        modified = modified_channels_g1(channels, constraints)
    elif variant is GameVariant.G2:
        modified = modified_channels_g2(channels, constraints)
    elif variant in (GameVariant.G_ALPHA, GameVariant.G_INFINITY):
        directions = tuple(
            None if uc.null_matrix is None else virtual_noise_direction(channels.direct(q), uc.null_matrix)
            for q, uc in enumerate(constraints.users)
        )
        if variant is GameVariant.G_INFINITY:
            modified = hat_channels(channels, directions)
    return GameSpec(variant, constraints, views, channels, siso, float(alpha), modified, directions)


def _alpha_covariance(q: int, profile: StrategyProfile, spec: GameSpec) -> np.ndarray:
    r_minus = mui_covariance(q, profile, spec.channels)
    direction = spec.virtual_directions[q]
    if direction is not None and spec.alpha > 0:
        r_minus = r_minus + virtual_noise_covariance(direction, spec.alpha)
    return r_minus


def best_response_result(q: int, profile: StrategyProfile, spec: GameSpec) -> WaterfillResult:
    """Waterfilling solution of user q against the others' strategies in ``profile``"""
    uc = spec.views[q]
    variant = spec.variant
    if variant is GameVariant.G1:
        return projected_waterfill(q, profile, spec.channels, spec.modified, uc.power_budget)
    if variant is GameVariant.G2:
        return capped_waterfill(q, profile, spec.channels, spec.modified, uc.average_power, uc.peak_power)
    if variant is GameVariant.G_ALPHA:
        gram = whitened_gram(spec.channels.direct(q), _alpha_covariance(q, profile, spec))
        return mimo_waterfill(gram, uc.power_budget)
    if variant is GameVariant.G_INFINITY:
        mods = spec.modified
        r_hat = interference_covariance(q, profile, mods.links, mods.noise[q])
        return mimo_waterfill(whitened_gram(mods.direct(q), r_hat), uc.power_budget)
    return siso_masked_waterfill(q, profile.strategies, spec.siso, uc.power_budget, uc.masks, uc.gap)


def best_response(q: int, profile: StrategyProfile, spec: GameSpec) -> np.ndarray:
    """T_q(Q_{-q}): covariance (or SISO power vector) of user q's best response"""
    return best_response_result(q, profile, spec).covariance


def payoff(q: int, profile: StrategyProfile, spec: GameSpec) -> float:
    """Objective user q maximizes in the variant (virtual noise and gap included)"""
    variant = spec.variant
    if variant is GameVariant.SISO:
        return siso_rate(q, profile.strategies, spec.siso, spec.views[q].gap)
    if variant is GameVariant.G_ALPHA:
        return rate_from_covariance(spec.channels.direct(q), profile[q], _alpha_covariance(q, profile, spec))
    if variant is GameVariant.G_INFINITY:
        mods = spec.modified
        r_hat = interference_covariance(q, profile, mods.links, mods.noise[q])
        return rate_from_covariance(mods.direct(q), profile[q], r_hat)
    return rate(q, profile, spec.channels)


def user_rate(q: int, profile: StrategyProfile, spec: GameSpec) -> float:
    """Rate of link q in bits: log-det rate for MIMO games, gap-scaled per-bin rate for SISO"""
    if spec.is_siso:
        return siso_rate(q, profile.strategies, spec.siso, spec.views[q].gap)
    return rate(q, profile, spec.channels)


def feasibility(profile: StrategyProfile, spec: GameSpec) -> List[FeasibilityReport]:
    """
    Check every strategy against the constraints its variant enforces

    Args:
        profile: candidate profile
        spec: game whose per-user constraint views are applied

    Returns:
        One FeasibilityReport per user
    """
    return [check_feasible(profile[q], spec.views[q]) for q in range(spec.user_count)]


@dataclass(frozen=True, eq=False)
class NEReport:
    """Best-response residuals and rates of a candidate equilibrium"""

    residuals: np.ndarray
    rates: np.ndarray
    tolerance: float
    is_nash: bool

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals)) if self.residuals.size else 0.0


def is_nash(profile: StrategyProfile, spec: GameSpec, eps: float = NASH_TOL) -> NEReport:
    """
    Fixed-point test of a profile

    Residual of user q is ||Q_q - T_q(Q_{-q})||_F / max(1, ||Q_q||_F); the profile is a
    Nash equilibrium when every residual is at most ``eps``.
    """
    residuals = []
    for q in range(spec.user_count):
        current = profile[q]
        response = best_response(q, profile, spec)
        residuals.append(float(np.linalg.norm(current - response)) / max(1.0, float(np.linalg.norm(current))))
    residuals_arr = np.array(residuals)
    rates = np.array([user_rate(q, profile, spec) for q in range(spec.user_count)])
    return NEReport(residuals_arr, rates, eps, bool(np.all(residuals_arr <= eps)))


@dataclass(frozen=True, eq=False)
class UniquenessReport:
    """
    Left-hand sides of the low-MUI sufficient conditions

    ``received[q]`` sums the interference terms arriving at receiver q, ``generated[r]``
    the terms leaving transmitter r. Margins are 1 - LHS, positive when satisfied.
    """

    received: np.ndarray
    generated: np.ndarray
    terms: np.ndarray
    heuristic: bool = False

    @property
    def condition_received(self) -> bool:
        return bool(np.all(self.received < 1.0))

    @property
    def condition_generated(self) -> bool:
        return bool(np.all(self.generated < 1.0))

    @property
    def margins_received(self) -> np.ndarray:
        return 1.0 - self.received

    @property
    def margins_generated(self) -> np.ndarray:
        return 1.0 - self.generated

    @property
    def margin(self) -> float:
        """Best worst-case margin over the two conditions"""
        return float(max(self.margins_received.min(), self.margins_generated.min()))

    @property
    def holds(self) -> bool:
        return self.condition_received or self.condition_generated


def _report_from_terms(terms: np.ndarray, heuristic: bool = False) -> UniquenessReport:
    off = terms.copy()
    np.fill_diagonal(off, 0.0)
    return UniquenessReport(off.sum(axis=0), off.sum(axis=1), off, heuristic)


def uniqueness_siso(s: SisoScenario, distances: Optional[np.ndarray] = None) -> UniquenessReport:
    """
    SISO conditions: sum_{r != q} max_k |H_rq(k)|^2 / |H_qq(k)|^2 < 1 per receiver q
    (received) or per transmitter r (generated)

    With the scenario's distance scaling the per-link term equals
    max_k |Hbar_rq(k)|^2 d_qq^(2g) / (|Hbar_qq(k)|^2 d_rq^(2g)), g the path-loss exponent.
    """
    if distances is not None:
        s = replace(s, distances=np.asarray(distances, dtype=float))
    gains = s.gains()
    count = s.user_count
    terms = np.zeros((count, count))
    for r in range(count):
        for q in range(count):
            terms[r, q] = float(np.max(gains[r, q] / gains[q, q]))
    return _report_from_terms(terms)


def _mimo_terms(links: Sequence[Sequence[np.ndarray]], invert: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> np.ndarray:
    count = len(links)
    terms = np.zeros((count, count))
    for q in range(count):
        for r in range(count):
            if r == q:
                continue
            a = invert(links[q][q], links[r][q])
            terms[r, q] = spectral_radius(a.conj().T @ a)
    return terms


def uniqueness_mimo(ch: ChannelSet) -> UniquenessReport:
    """
    Low MUI received / generated: sums of rho(H_rq^H H_qq^{-H} H_qq^{-1} H_rq) below 1
    """
    return _report_from_terms(_mimo_terms(ch.links, lambda direct, cross: scipy.linalg.solve(direct, cross)))


def uniqueness_mimo_heuristic(spec: GameSpec) -> UniquenessReport:
    """
    The MIMO conditions evaluated on the variant's modified channels, with the
    pseudoinverse in place of the (singular) modified direct channel
    """
    if spec.modified is None:
        return uniqueness_mimo(spec.channels)
    terms = _mimo_terms(spec.modified.links, lambda direct, cross: pseudoinverse(direct) @ cross)
    return _report_from_terms(terms, heuristic=True)


@dataclass(frozen=True, eq=False)
class LimitCurve:
    """Null residual and distance to the G_infinity equilibrium along an alpha grid"""

    alphas: np.ndarray
    null_residuals: np.ndarray
    distances: np.ndarray
    infinity_null_residual: float
    uniqueness: UniquenessReport


def null_residual(profile: StrategyProfile, constraints: ConstraintSpec) -> float:
    """max_q ||U_q^H Q_q||_F / ||Q_q||_F over users with a null matrix"""
    worst = 0.0
    for q, uc in enumerate(constraints.users):
        if uc.null_matrix is None:
            continue
        norm = float(np.linalg.norm(profile[q]))
        if norm > 0:
            worst = max(worst, float(np.linalg.norm(uc.null_matrix.conj().T @ profile[q])) / norm)
    return worst


def virtual_noise_limit_check(
    channels: ChannelSet,
    constraints: ConstraintSpec,
    alphas: Sequence[float],
    solve: Callable[[GameSpec], "RunResult"],
) -> LimitCurve:
    """
    Solve G_alpha along an alpha grid and compare with the G_infinity equilibrium

    Args:
        channels: MIMO channel set
        constraints: per-user budgets and null matrices U_q (U^_q = H_qq U_q)
        alphas: virtual noise powers to visit
        solve: runs a game to equilibrium (e.g. a partial of ``engine.run``)

    Returns:
        LimitCurve; the uniqueness gate is reported, not enforced
    """
    spec_inf = build_game(GameVariant.G_INFINITY, constraints, channels)
    gate = uniqueness_mimo_heuristic(spec_inf)
    if not gate.holds:
        logger.warning("uniqueness gate fails (margin %.3f); the limit experiment may be ill-posed", gate.margin)

    def solved(spec: GameSpec) -> StrategyProfile:
        result = solve(spec)
        if not result.converged:
            raise NonConvergenceError(result.iterations, result.steps[-1] if result.steps else float("nan"))
        return result.profile

    profile_inf = solved(spec_inf)
    residuals = []
    distances = []
    for alpha in alphas:
        profile = solved(build_game(GameVariant.G_ALPHA, constraints, channels, alpha=alpha))
        residuals.append(null_residual(profile, constraints))
        distances.append(profile.distance(profile_inf))
        logger.info("alpha=%g null residual %.3e distance %.3e", alpha, residuals[-1], distances[-1])
    return LimitCurve(
        np.asarray(alphas, dtype=float),
        np.array(residuals),
        np.array(distances),
        null_residual(profile_inf, constraints),
        gate,
    )


def uniqueness_for_game(spec: GameSpec) -> UniquenessReport:
    """
    Sufficient uniqueness conditions matching the game

    SISO games use the per-bin conditions, G1 without null constraints the exact MIMO
    conditions; every other MIMO variant gets the heuristic gate on its effective channels.
    """
    if spec.is_siso:
        return uniqueness_siso(spec.siso)
    if spec.variant is GameVariant.G1 and not any(uc.has_null for uc in spec.constraints.users):
        return uniqueness_mimo(spec.channels)
    if spec.variant is GameVariant.G_ALPHA:
        return replace(uniqueness_mimo(spec.channels), heuristic=True)
    return uniqueness_mimo_heuristic(spec)
