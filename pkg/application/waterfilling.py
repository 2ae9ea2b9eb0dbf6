"""Best-response solvers: MIMO, projected, capped and masked SISO waterfilling"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.optimize
import scipy.stats

from application.channel import ChannelSet, SisoScenario, StrategyProfile, interference_covariance, siso_interference
from application.constraints import ModifiedChannels
from application.errors import DomainError, InfeasibleBudgetError, ZeroChannelError
from application.linalg import TOL_RANK, hermitian_eig, hermitize

logger = logging.getLogger(__name__)

TOL_BUDGET = 1e-10


@dataclass(frozen=True, eq=False)
class WaterfillResult:
    """
    Output of a waterfilling solver

    ``covariance`` is the transmit covariance (a power vector for SISO solvers);
    ``eigenvalues``/``eigenvectors`` are the active modes waterfilled over and
    ``powers`` the power poured on each of them.
    """

    covariance: np.ndarray
    water_level: float
    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray]
    powers: np.ndarray
    budget_used: float
    all_capped: bool = False


def allocate(gains: np.ndarray, level: float, caps) -> np.ndarray:
    """clip(level - 1/gain, 0, cap) per entry"""
    return np.clip(level - 1.0 / np.asarray(gains, dtype=float), 0.0, caps)


def _caps_like(gains: np.ndarray, caps) -> np.ndarray:
    if caps is None:
        return np.full(gains.shape, math.inf)
    return np.broadcast_to(np.asarray(caps, dtype=float), gains.shape).copy()


def water_level(gains, budget: float, caps=None) -> float:
    """
    Water level mu with sum_k clip(mu - 1/gain_k, 0, cap_k) = budget

    Args:
        gains: positive channel gains lambda_k
        budget: positive power budget
        caps: per-entry upper bounds (scalar, vector or None for no caps)

    Returns:
        The water level; if the caps add up to the budget, the smallest level at
        which every entry sits on its cap
    """
    gains = np.asarray(gains, dtype=float)
    if gains.size == 0 or np.any(gains <= 0):
        raise DomainError("gains", gains)
    if not budget > 0:
        raise DomainError("budget", budget)
    caps = _caps_like(gains, caps)
    floors = 1.0 / gains
    capacity = float(caps.sum())
    if capacity < budget * (1.0 - TOL_BUDGET):
        raise InfeasibleBudgetError(budget, capacity)
    if capacity <= budget * (1.0 + TOL_BUDGET):
        return float(np.max(floors + caps))

    def excess(level: float) -> float:
        return float(np.clip(level - floors, 0.0, caps).sum()) - budget

    low = float(floors.min())
    high = float(floors.max()) + budget
    if np.all(np.isfinite(caps)):
        high = max(high, float(np.max(floors + caps)))
    # floors.max() + budget can round below the root
    step = budget * 1e-9 + np.spacing(high)
    for _ in range(200):
        if excess(high) >= 0:
            break
        high += step
        step *= 2.0
    level = scipy.optimize.brentq(excess, low, high, xtol=1e-15 * max(1.0, abs(high)), rtol=1e-12)

    # exact value on the active set found by the root search
    values = level - floors
    interior = (values > 0) & (values < caps)
    if np.any(interior):
        capped = values >= caps
        refined = (budget - float(caps[capped].sum()) + float(floors[interior].sum())) / int(interior.sum())
        if abs(refined - level) <= 1e-9 * max(1.0, abs(level)):
            level = refined
    return float(level)


def mimo_waterfill(s, budget: float, peak: float = math.inf) -> WaterfillResult:
    """
    Waterfilling over the eigenmodes of a whitened channel Gram matrix

    Args:
        s: Hermitian PSD matrix H^H R^{-1} H
        budget: trace budget
        peak: per-mode cap; when peak * L <= budget every active mode gets ``peak``

    Returns:
        WaterfillResult whose covariance V diag(p) V^H commutes with ``s``
    """
    values, vectors = hermitian_eig(s)
    top = float(values[0]) if values.size else 0.0
    if top <= 0:
        raise ZeroChannelError(top)
    if budget < 0:
        raise DomainError("budget", budget)
    active = values > TOL_RANK * top
    gains = values[active]
    modes = vectors[:, active]
    if budget == 0:
        zero = np.zeros_like(vectors)
        return WaterfillResult(zero, float(np.min(1.0 / gains)), gains, modes, np.zeros(gains.size), 0.0)

    all_capped = peak * gains.size <= budget
    if all_capped:
        powers = np.full(gains.size, float(peak))
        level = float(np.max(1.0 / gains + peak))
    else:
        level = water_level(gains, budget, peak if math.isfinite(peak) else None)
        powers = allocate(gains, level, peak)
    covariance = hermitize((modes * powers) @ modes.conj().T)
    return WaterfillResult(covariance, level, gains, modes, powers, float(powers.sum()), all_capped)


def whitened_gram(h: np.ndarray, r_minus: np.ndarray) -> np.ndarray:
    """H^H R^{-1} H"""
    return hermitize(h.conj().T @ scipy.linalg.solve(r_minus, h, assume_a="her"))


def projected_waterfill(
    q: int,
    profile: StrategyProfile,
    ch: ChannelSet,
    mods: ModifiedChannels,
    budget: float,
) -> WaterfillResult:
    """Best response of G1: waterfill over H~_qq^H R_{-q}^{-1} H~_qq, then enforce Q = P Q P"""
    r_minus = interference_covariance(q, profile, mods.links, ch.noise[q])
    result = mimo_waterfill(whitened_gram(mods.direct(q), r_minus), budget)
    p = mods.projectors[q]
    return replace(result, covariance=hermitize(p @ result.covariance @ p))


def capped_waterfill(
    q: int,
    profile: StrategyProfile,
    ch: ChannelSet,
    mods: ModifiedChannels,
    average_power: float,
    peak_power: float = math.inf,
) -> WaterfillResult:
    """
    Best response of G2: Q = G^{#H} V diag(p) V^H G^# with p capped at ``peak_power``

    The interference seen by user q is built from the other users' transmitted
    covariances through the physical channels H_rq.
    """
    r_minus = interference_covariance(q, profile, ch.links, ch.noise[q])
    result = mimo_waterfill(whitened_gram(mods.direct(q), r_minus), average_power, peak_power)
    p = mods.projectors[q]
    shaped = hermitize(p @ result.covariance @ p)
    g_pinv = mods.pseudoinverses[q]
    return replace(result, covariance=hermitize(g_pinv.conj().T @ shaped @ g_pinv))


def siso_masked_waterfill(
    q: int,
    powers: Sequence[np.ndarray],
    s: SisoScenario,
    budget: float,
    masks: Optional[np.ndarray] = None,
    gap: float = 1.0,
) -> WaterfillResult:
    """
    Per-bin waterfilling [mu - gap * interference(k) / |H_qq(k)|^2] clipped to [0, mask(k)]

    Args:
        q: user index
        powers: current power vectors of all users (entry q is ignored)
        s: SISO scenario
        budget: total power P_q, met with equality
        masks: per-bin spectral mask (None for no mask)
        gap: SNR gap, at least 1

    Returns:
        WaterfillResult whose ``covariance`` is the power vector
    """
    if not gap >= 1.0:
        raise DomainError("gap", gap)
    gains = s.gains()[q, q] / (gap * siso_interference(q, powers, s))
    level = water_level(gains, budget, masks)
    caps = _caps_like(gains, masks)
    p = allocate(gains, level, caps)
    return WaterfillResult(p, level, gains, None, p, float(p.sum()), bool(np.all(p >= caps)))


def gap_factor(family: str = "qam", error_probability: float = 1e-6) -> float:
    """
    SNR gap of an uncoded constellation family at a target symbol error probability

    For M-QAM, gap = (Qinv(P_e / 4))^2 / 3 with Qinv the inverse Gaussian tail.
    Values below 1 are clamped to 1.
    """
    if not 0.0 < error_probability < 1.0:
        raise DomainError("error_probability", error_probability)
    if family.lower() not in ("qam", "m-qam"):
        raise DomainError("family", family)
    gap = float(scipy.stats.norm.isf(error_probability / 4.0)) ** 2 / 3.0
    if gap < 1.0:
        logger.warning("gap %.4f for P_e=%g is below 1, clamped to 1", gap, error_probability)
        return 1.0
    return gap
