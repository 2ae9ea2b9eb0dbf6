"""Constraint families (power, null, soft shaping, peak, masks) and modified channels"""

import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from application.channel import ChannelSet, ifft_matrix
from application.errors import InfeasibleBudgetError, RankDeficientError
from application.linalg import (
    TOL_RANK,
    as_matrix,
    column_rank,
    hermitian_eig,
    hermitize,
    max_eigenvalue,
    min_eigenvalue,
    orth_complement_basis,
    orth_complement_projector,
    pseudoinverse,
    require_full_column_rank,
)

FEASIBILITY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class UserConstraints:
    """
    Constraint bundle of one secondary user

    Absent fields are vacuous: no null matrix means no null constraint, an infinite
    peak means no peak constraint, no masks means unbounded bins.
    """

    power_budget: Optional[float] = None
    null_matrix: Optional[np.ndarray] = None
    shaping_matrix: Optional[np.ndarray] = None
    average_power: Optional[float] = None
    peak_power: float = math.inf
    masks: Optional[np.ndarray] = None
    gap: float = 1.0

    def __post_init__(self) -> None:
        if self.power_budget is None and (self.shaping_matrix is None or self.average_power is None):
            raise ValueError("a user needs a power budget or a soft shaping pair")
        if self.power_budget is not None and not self.power_budget > 0:
            raise ValueError(f"power budget must be positive, got {self.power_budget}")
        if self.null_matrix is not None:
            u = as_matrix(self.null_matrix)
            if u.shape[1] >= u.shape[0]:
                raise RankDeficientError(u.shape, column_rank(u), "null matrix (must be strictly tall)")
            require_full_column_rank(u, what="null matrix")
            object.__setattr__(self, "null_matrix", u)
        if self.shaping_matrix is not None:
            g = as_matrix(self.shaping_matrix)
            if column_rank(g.conj().T) < g.shape[0]:
                raise RankDeficientError(g.shape, column_rank(g), "shaping matrix (must be full row rank)")
            object.__setattr__(self, "shaping_matrix", g)
            if self.average_power is None or self.average_power < 0:
                raise ValueError("soft shaping needs a non-negative average power")
        if not self.peak_power > 0:
            raise ValueError(f"peak power must be positive, got {self.peak_power}")
        if not self.gap >= 1.0:
            raise ValueError(f"gap must be at least 1, got {self.gap}")
        if self.masks is not None:
            masks = np.array(self.masks, dtype=float)
            if masks.ndim != 1 or np.any(masks < 0) or np.any(np.isnan(masks)):
                raise ValueError("masks must be a vector of non-negative levels")
            if self.power_budget is not None and masks.sum() < self.power_budget - 1e-12:
                raise InfeasibleBudgetError(self.power_budget, float(masks.sum()))
            object.__setattr__(self, "masks", masks)

    @property
    def has_null(self) -> bool:
        return self.null_matrix is not None

    @property
    def has_shaping(self) -> bool:
        return self.shaping_matrix is not None

    def without(self, *names: str) -> "UserConstraints":
        """Copy with the named optional fields reset to their vacuous defaults"""
        defaults = {
            "power_budget": None,
            "null_matrix": None,
            "shaping_matrix": None,
            "average_power": None,
            "peak_power": math.inf,
            "masks": None,
            "gap": 1.0,
        }
        return replace(self, **{name: defaults[name] for name in names})


@dataclass(frozen=True, eq=False)
class ConstraintSpec:
    """Per-user constraint bundles"""

    users: Tuple[UserConstraints, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "users", tuple(self.users))

    def __len__(self) -> int:
        return len(self.users)

    def __getitem__(self, q: int) -> UserConstraints:
        return self.users[q]


@dataclass(frozen=True, eq=False)
class ModifiedChannels:
    """
    Transformed channels of a game variant

    ``links[r][q]`` is the modified H_rq. ``projectors[q]`` acts on the variable the
    user waterfills over (transmit space for G1, shaped space for G2). For hat channels
    ``bases[q]`` is the orthonormal complement basis and ``noise[q]`` the reduced noise.
    """

    variant: str
    links: Tuple[Tuple[np.ndarray, ...], ...]
    projectors: Tuple[np.ndarray, ...]
    pseudoinverses: Optional[Tuple[np.ndarray, ...]] = None
    bases: Optional[Tuple[np.ndarray, ...]] = None
    noise: Optional[Tuple[np.ndarray, ...]] = None

    @property
    def user_count(self) -> int:
        return len(self.links)

    def direct(self, q: int) -> np.ndarray:
        return self.links[q][q]


def _check_count(ch: ChannelSet, cs: ConstraintSpec) -> None:
    if len(cs) != ch.user_count:
        raise ValueError(f"{len(cs)} constraint bundles for {ch.user_count} users")


def modified_channels_g1(ch: ChannelSet, cs: ConstraintSpec) -> ModifiedChannels:
    """H~_rq = H_rq P_{R(U_r)^perp}; users without nulls get the identity projector"""
    _check_count(ch, cs)
    projectors = []
    for r in range(ch.user_count):
        u = cs[r].null_matrix
        if u is None:
            projectors.append(np.eye(ch.tx_dim(r), dtype=complex))
        else:
            if u.shape[0] != ch.tx_dim(r):
                raise ValueError(f"null matrix of user {r} has {u.shape[0]} rows, expected {ch.tx_dim(r)}")
            projectors.append(orth_complement_projector(u))
    count = ch.user_count
    links = tuple(tuple(ch.links[r][q] @ projectors[r] for q in range(count)) for r in range(count))
    return ModifiedChannels("g1", links, tuple(projectors))


def modified_channels_g2(ch: ChannelSet, cs: ConstraintSpec) -> ModifiedChannels:
    """H-_rq = H_rq G_r^{#H} P_{R(U-_r)^perp} with U-_r = G_r^# U_r"""
    _check_count(ch, cs)
    count = ch.user_count
    pinvs: List[np.ndarray] = []
    projectors: List[np.ndarray] = []
    for r in range(count):
        g = cs[r].shaping_matrix
        if g is None:
            raise ValueError(f"user {r} has no shaping matrix")
        if g.shape[0] != ch.tx_dim(r):
            raise ValueError(f"shaping matrix of user {r} has {g.shape[0]} rows, expected {ch.tx_dim(r)}")
        g_pinv = pseudoinverse(g)
        pinvs.append(g_pinv)
        u = cs[r].null_matrix
        if u is None:
            projectors.append(np.eye(g.shape[1], dtype=complex))
        else:
            projectors.append(orth_complement_projector(g_pinv @ u))
    links = tuple(
        tuple(ch.links[r][q] @ pinvs[r].conj().T @ projectors[r] for q in range(count))
        for r in range(count)
    )
    return ModifiedChannels("g2", links, tuple(projectors), pseudoinverses=tuple(pinvs))


def virtual_noise_covariance(u_hat, alpha: float) -> np.ndarray:
    """alpha U^ U^^H, the covariance of the virtual interference"""
    if alpha < 0:
        raise ValueError(f"alpha must be non-negative, got {alpha}")
    u_hat = as_matrix(u_hat)
    return hermitize(alpha * (u_hat @ u_hat.conj().T))


def hat_channels(ch: ChannelSet, u_hats: Sequence[Optional[np.ndarray]]) -> ModifiedChannels:
    """
    H^_rq = U^_q^{perp H} H_rq and reduced noise U^_q^{perp H} R_nq U^_q^perp

    Args:
        ch: channel set
        u_hats: per receiver the virtual noise directions, or None for none

    Returns:
        ModifiedChannels with ``bases`` and ``noise`` filled in
    """
    count = ch.user_count
    if len(u_hats) != count:
        raise ValueError(f"{len(u_hats)} direction matrices for {count} users")
    bases = []
    for q, u_hat in enumerate(u_hats):
        if u_hat is None:
            bases.append(np.eye(ch.rx_dim(q), dtype=complex))
        else:
            bases.append(orth_complement_basis(as_matrix(u_hat)))
    links = tuple(tuple(bases[q].conj().T @ ch.links[r][q] for q in range(count)) for r in range(count))
    noise = tuple(hermitize(bases[q].conj().T @ ch.noise[q] @ bases[q]) for q in range(count))
    projectors = tuple(np.eye(ch.tx_dim(q), dtype=complex) for q in range(count))
    return ModifiedChannels("hat", links, projectors, bases=tuple(bases), noise=noise)


def virtual_noise_direction(h_qq, u_q) -> np.ndarray:
    """U^_q = H_qq U_q, the receive directions that keep user q off R(U_q)"""
    u_hat = as_matrix(h_qq) @ as_matrix(u_q)
    require_full_column_rank(u_hat, what="virtual noise direction")
    return u_hat


def steering_vector(angle: float, antennas: int, spacing: float = 0.5) -> np.ndarray:
    """Uniform linear array response [exp(-j 2 pi m spacing sin(angle))]_m as an n x 1 matrix"""
    if antennas < 1:
        raise ValueError("antennas must be at least 1")
    if not spacing > 0:
        raise ValueError("spacing must be positive")
    m = np.arange(antennas)
    return np.exp(-2j * np.pi * m * spacing * math.sin(angle)).reshape(-1, 1)


@dataclass(frozen=True)
class ConstraintCheck:
    name: str
    residual: float
    passed: bool


@dataclass
class FeasibilityReport:
    """Per-constraint residuals of one strategy; positive residual means violation"""

    checks: Dict[str, ConstraintCheck] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    @property
    def failed(self) -> List[str]:
        return [name for name, c in self.checks.items() if not c.passed]

    def add(self, name: str, residual: float, scale: float, tol: float) -> None:
        self.checks[name] = ConstraintCheck(name, float(residual), bool(residual <= tol * max(1.0, scale)))


def check_feasible(strategy: np.ndarray, uc: UserConstraints, tol: float = FEASIBILITY_TOL) -> FeasibilityReport:
    """
    Evaluate every constraint present in ``uc`` on one strategy

    Args:
        strategy: covariance matrix, or power vector for the SISO game
        uc: constraint bundle of the user
        tol: relative pass tolerance

    Returns:
        FeasibilityReport with residuals Tr(Q)-P, max|U^H Q|, Tr(G^H Q G)-P_ave,
        lambda_max(G^H Q G)-P_peak, max_k([W^H Q W]_kk - p_max(k)) and PSD violation
    """
    report = FeasibilityReport()
    s = np.asarray(strategy)
    if s.ndim == 1:
        p = s.astype(float)
        report.add("psd", -float(p.min()) if p.size else 0.0, 0.0, tol)
        if uc.power_budget is not None:
            report.add("power", float(p.sum()) - uc.power_budget, uc.power_budget, tol)
        if uc.masks is not None:
            _add_masks(report, p, uc.masks, tol)
        return report

    q = hermitize(np.array(s, dtype=complex))
    norm = float(np.linalg.norm(q))
    report.add("psd", -min_eigenvalue(q), norm, tol)
    if uc.power_budget is not None:
        report.add("power", float(np.real(np.trace(q))) - uc.power_budget, uc.power_budget, tol)
    if uc.null_matrix is not None:
        report.add("null", float(np.max(np.abs(uc.null_matrix.conj().T @ q))), norm, tol)
    if uc.shaping_matrix is not None:
        g = uc.shaping_matrix
        shaped = hermitize(g.conj().T @ q @ g)
        report.add("shaping", float(np.real(np.trace(shaped))) - uc.average_power, uc.average_power, tol)
        if math.isfinite(uc.peak_power):
            report.add("peak", max_eigenvalue(shaped) - uc.peak_power, uc.peak_power, tol)
    if uc.masks is not None:
        w = ifft_matrix(q.shape[0])
        per_bin = np.real(np.einsum("ik,ij,jk->k", w.conj(), q, w))
        _add_masks(report, per_bin, uc.masks, tol)
    return report


def _add_masks(report: FeasibilityReport, per_bin: np.ndarray, masks: np.ndarray, tol: float) -> None:
    if per_bin.shape != masks.shape:
        raise ValueError(f"{masks.size} mask levels for {per_bin.size} bins")
    finite = np.isfinite(masks)
    if not np.any(finite):
        report.add("masks", -math.inf, 0.0, tol)
        return
    excess = per_bin[finite] - masks[finite]
    report.add("masks", float(excess.max()), float(masks[finite].max()), tol)



@dataclass(frozen=True, eq=False)
class Beampattern:
    """Per-mode gains |a(phi)^H v_i|^2 over an angle grid, modes in increasing eigenvalue order"""

    angles: np.ndarray
    eigenvalues: np.ndarray
    gains: np.ndarray
    total: np.ndarray


def beampattern(covariance: np.ndarray, angles: Sequence[float], spacing: float = 0.5) -> Beampattern:
    """
    Transmit beampattern of a covariance matrix on a uniform linear array

    Args:
        covariance: transmit covariance Q (n x n)
        angles: angles in radians
        spacing: element spacing in wavelengths

    Returns:
        Beampattern with one row of gains per retained eigenvector and the total
        pattern sum_i lambda_i g_i(phi)
    """
    q = hermitize(as_matrix(covariance))
    values, vectors = hermitian_eig(q)
    top = float(values[0]) if values.size else 0.0
    keep = values > TOL_RANK * top if top > 0 else np.zeros(values.size, dtype=bool)
    values = values[keep][::-1]
    vectors = vectors[:, keep][:, ::-1]
    angles = np.asarray(angles, dtype=float)
    steering = np.zeros((q.shape[0], 0), dtype=complex)
    if angles.size:
        steering = np.hstack([steering_vector(phi, q.shape[0], spacing) for phi in angles])
    gains = np.abs(vectors.conj().T @ steering) ** 2
    total = values @ gains if values.size else np.zeros(angles.size)
    return Beampattern(angles, values, gains, total)
