"""Gaussian vector interference channel: MUI covariances, rates and scenario generators"""

import math
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from application.errors import (
    DimensionMismatchError,
    NotHermitianError,
    SingularDirectChannelError,
)
from application.linalg import (
    TOL_HERM,
    as_matrix,
    hermitian_asymmetry,
    hermitize,
    max_eigenvalue,
    min_eigenvalue,
)

MAX_CONDITION = 1e12


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ChannelSet:
    """
    Q x Q grid of channel matrices plus per-receiver noise covariances

    ``links[r][q]`` is H_rq, the n_Rq x n_Tr matrix from transmitter r to receiver q.
    """

    links: Tuple[Tuple[np.ndarray, ...], ...]
    noise: Tuple[np.ndarray, ...]
    distances: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        links = tuple(tuple(_frozen(as_matrix(h)) for h in row) for row in self.links)
        noise = tuple(_frozen(as_matrix(r)) for r in self.noise)
        count = len(links)
        if count == 0 or any(len(row) != count for row in links) or len(noise) != count:
            raise ValueError("links must be a square Q x Q grid with one noise matrix per user")

        for q in range(count):
            direct = links[q][q]
            if direct.shape[0] != direct.shape[1]:
                raise SingularDirectChannelError(q, float("inf"))
            cond = float(np.linalg.cond(direct))
            if not np.isfinite(cond) or cond >= MAX_CONDITION:
                raise SingularDirectChannelError(q, cond)
        for r in range(count):
            for q in range(count):
                expected = (links[q][q].shape[0], links[r][r].shape[1])
                if links[r][q].shape != expected:
                    raise DimensionMismatchError(expected, links[r][q].shape, f"H[{r}][{q}]")
        for q, r_n in enumerate(noise):
            size = links[q][q].shape[0]
            if r_n.shape != (size, size):
                raise DimensionMismatchError((size, size), r_n.shape, f"noise[{q}]")
            asym = hermitian_asymmetry(r_n)
            if asym > TOL_HERM:
                raise NotHermitianError(asym, TOL_HERM)
            if min_eigenvalue(r_n) <= 0.0:
                raise ValueError(f"noise covariance of user {q} is not positive definite")

        object.__setattr__(self, "links", links)
        object.__setattr__(self, "noise", noise)
        if self.distances is not None:
            d = np.array(self.distances, dtype=float)
            if d.shape != (count, count) or np.any(d <= 0):
                raise ValueError("distances must be a positive Q x Q array")
            object.__setattr__(self, "distances", _frozen(d))

    @property
    def user_count(self) -> int:
        return len(self.links)

    def direct(self, q: int) -> np.ndarray:
        return self.links[q][q]

    def tx_dim(self, q: int) -> int:
        return self.links[q][q].shape[1]

    def rx_dim(self, q: int) -> int:
        return self.links[q][q].shape[0]


@dataclass(frozen=True, eq=False)
class StrategyProfile:
    """
    One strategy per user: a Hermitian PSD covariance Q_q for MIMO games, or a
    non-negative power vector p_q (one entry per bin) for the SISO game
    """

    strategies: Tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        checked: List[np.ndarray] = []
        for q, s in enumerate(self.strategies):
            a = np.asarray(s)
            if a.ndim == 2:
                a = np.array(a, dtype=complex)
                if a.shape[0] != a.shape[1]:
                    raise DimensionMismatchError((a.shape[0], a.shape[0]), a.shape, f"strategy {q}")
                asym = hermitian_asymmetry(a)
                if asym > TOL_HERM:
                    raise NotHermitianError(asym, TOL_HERM)
                a = hermitize(a)
                if a.size:
                    top = max(max_eigenvalue(a), 0.0)
                    if min_eigenvalue(a) < -1e-10 * max(top, 1e-300):
                        raise ValueError(f"covariance of user {q} is not positive semidefinite")
            elif a.ndim == 1:
                a = np.array(np.real(a), dtype=float)
                if np.any(a < 0):
                    raise ValueError(f"power vector of user {q} has negative entries")
            else:
                raise ValueError(f"strategy of user {q} must be a matrix or a vector")
            checked.append(_frozen(a))
        object.__setattr__(self, "strategies", tuple(checked))

    def __len__(self) -> int:
        return len(self.strategies)

    def __getitem__(self, q: int) -> np.ndarray:
        return self.strategies[q]

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.strategies)

    def replace(self, q: int, strategy: np.ndarray) -> "StrategyProfile":
        items = list(self.strategies)
        items[q] = strategy
        return StrategyProfile(tuple(items))

    def distance(self, other: "StrategyProfile") -> float:
        """Largest per-user Frobenius distance"""
        return max(float(np.linalg.norm(a - b)) for a, b in zip(self.strategies, other.strategies))

    @classmethod
    def zeros(cls, ch: ChannelSet) -> "StrategyProfile":
        return cls(tuple(np.zeros((ch.tx_dim(q), ch.tx_dim(q)), dtype=complex) for q in range(ch.user_count)))


def _check_profile(profile: StrategyProfile, ch: ChannelSet) -> None:
    if len(profile) != ch.user_count:
        raise DimensionMismatchError((ch.user_count,), (len(profile),), "profile")
    for r in range(ch.user_count):
        expected = (ch.tx_dim(r), ch.tx_dim(r))
        if profile[r].shape != expected:
            raise DimensionMismatchError(expected, profile[r].shape, f"strategy {r}")


def interference_covariance(
    q: int,
    profile: StrategyProfile,
    links: Sequence[Sequence[np.ndarray]],
    noise: np.ndarray,
) -> np.ndarray:
    """Noise plus the sum over r != q of links[r][q] Q_r links[r][q]^H"""
    total = np.array(noise, dtype=complex)
    for r, strategy in enumerate(profile):
        if r == q:
            continue
        h = links[r][q]
        total = total + h @ strategy @ h.conj().T
    return hermitize(total)


def mui_covariance(q: int, profile: StrategyProfile, ch: ChannelSet) -> np.ndarray:
    """R_{-q} = R_nq + sum_{r != q} H_rq Q_r H_rq^H"""
    _check_profile(profile, ch)
    return interference_covariance(q, profile, ch.links, ch.noise[q])


def _logdet(m: np.ndarray) -> float:
    sign, value = np.linalg.slogdet(m)
    if np.real(sign) <= 0:
        raise np.linalg.LinAlgError("matrix is not positive definite")
    return float(value)


def rate_from_covariance(h: np.ndarray, covariance: np.ndarray, r_minus: np.ndarray) -> float:
    """log2 det(I + H^H R^{-1} H Q) evaluated as log2 det(R + H Q H^H) - log2 det(R)"""
    signal = hermitize(r_minus + h @ covariance @ h.conj().T)
    return (_logdet(signal) - _logdet(r_minus)) / math.log(2.0)


def rate(q: int, profile: StrategyProfile, ch: ChannelSet) -> float:
    """Information rate of link q in bits per channel use"""
    r_minus = mui_covariance(q, profile, ch)
    return rate_from_covariance(ch.direct(q), profile[q], r_minus)


def sum_rate(profile: StrategyProfile, ch: ChannelSet) -> float:
    """
    Sum of the link rates

    Args:
        profile: one covariance per user
        ch: channel set the profile is played on

    Returns:
        sum_q rate(q) in bits per channel use
    """
    return sum(rate(q, profile, ch) for q in range(ch.user_count))


@dataclass(frozen=True)
class Band:
    """Labelled half-open bin range [start, stop)"""

    label: str
    start: int
    stop: int


def band_levels(bands: Sequence[Band], bin_count: int, levels: Dict[str, float], default: float) -> np.ndarray:
    """Per-bin vector equal to ``default`` outside the labelled bands named in ``levels``"""
    by_label = {band.label: band for band in bands}
    out = np.full(bin_count, float(default))
    for label, level in levels.items():
        if label not in by_label:
            raise KeyError(label)
        band = by_label[label]
        out[band.start:band.stop] = float(level)
    return out


@dataclass(frozen=True, eq=False)
class SisoScenario:
    """
    Frequency-selective SISO interference channel over N bins

    ``responses[r, q, k]`` holds the normalized transfer function of the link from
    transmitter r to receiver q; the effective response is scaled by
    ``distances[r, q] ** -pathloss_exponent``.
    """

    responses: np.ndarray
    noise_powers: np.ndarray
    bands: Tuple[Band, ...] = ()
    distances: Optional[np.ndarray] = None
    pathloss_exponent: float = 1.0

    def __post_init__(self) -> None:
        responses = np.array(self.responses, dtype=complex)
        if responses.ndim != 3 or responses.shape[0] != responses.shape[1] or responses.shape[2] < 1:
            raise ValueError("responses must have shape (Q, Q, N) with N >= 1")
        count, _, bins = responses.shape
        noise = np.array(self.noise_powers, dtype=float)
        if noise.ndim == 0:
            noise = np.full((count, bins), float(noise))
        elif noise.ndim == 1:
            noise = np.tile(noise, (count, 1))
        if noise.shape != (count, bins) or np.any(noise <= 0):
            raise ValueError("noise powers must be positive with shape (Q, N)")
        for q in range(count):
            if np.any(responses[q, q] == 0):
                raise SingularDirectChannelError(q, float("inf"))
        distances = np.ones((count, count)) if self.distances is None else np.array(self.distances, dtype=float)
        if distances.shape != (count, count) or np.any(distances <= 0):
            raise ValueError("distances must be a positive Q x Q array")
        occupied = np.zeros(bins, dtype=bool)
        for band in self.bands:
            if not 0 <= band.start < band.stop <= bins:
                raise ValueError(f"band {band.label} [{band.start}, {band.stop}) is outside [0, {bins})")
            if np.any(occupied[band.start:band.stop]):
                raise ValueError(f"band {band.label} overlaps another band")
            occupied[band.start:band.stop] = True
        object.__setattr__(self, "responses", _frozen(responses))
        object.__setattr__(self, "noise_powers", _frozen(noise))
        object.__setattr__(self, "distances", _frozen(distances))
        object.__setattr__(self, "bands", tuple(self.bands))

    @property
    def user_count(self) -> int:
        return self.responses.shape[0]

    @property
    def bin_count(self) -> int:
        return self.responses.shape[2]

    def transfer(self, r: int, q: int) -> np.ndarray:
        """Effective frequency response H_rq(k)"""
        return self.responses[r, q] * self.distances[r, q] ** (-self.pathloss_exponent)

    def gains(self) -> np.ndarray:
        """|H_rq(k)|^2 as an array of shape (Q, Q, N)"""
        scale = self.distances ** (-2.0 * self.pathloss_exponent)
        return np.abs(self.responses) ** 2 * scale[:, :, None]

    def band(self, label: str) -> Band:
        for band in self.bands:
            if band.label == label:
                return band
        raise KeyError(label)

    def band_mask(self, levels: Dict[str, float], default: float = math.inf) -> np.ndarray:
        """Per-bin vector taking ``levels[label]`` inside each labelled band"""
        return band_levels(self.bands, self.bin_count, levels, default)


def siso_interference(q: int, powers: Sequence[np.ndarray], s: SisoScenario) -> np.ndarray:
    """noise(k) + sum_{r != q} |H_rq(k)|^2 p_r(k)"""
    gains = s.gains()
    total = np.array(s.noise_powers[q], dtype=float)
    for r, p in enumerate(powers):
        if r != q:
            total = total + gains[r, q] * np.asarray(p, dtype=float)
    return total


def siso_rate(q: int, powers: Sequence[np.ndarray], s: SisoScenario, gap: float = 1.0) -> float:
    """Per-bin rate sum_k log2(1 + |H_qq(k)|^2 p(k) / (gap * interference(k)))"""
    gains = s.gains()
    sinr = gains[q, q] * np.asarray(powers[q], dtype=float) / (gap * siso_interference(q, powers, s))
    return float(np.sum(np.log2(1.0 + sinr)))


def ifft_matrix(n: int) -> np.ndarray:
    """Normalized IFFT matrix [W]_ij = exp(j 2 pi i j / N) / sqrt(N), 0-based"""
    idx = np.arange(n)
    return np.exp(2j * np.pi * np.outer(idx, idx) / n) / math.sqrt(n)


def siso_to_covariance(powers: np.ndarray) -> np.ndarray:
    """W diag(p) W^H"""
    w = ifft_matrix(len(powers))
    return hermitize((w * np.asarray(powers, dtype=float)) @ w.conj().T)


def circulant_channels(s: SisoScenario) -> ChannelSet:
    """Equivalent MIMO channel set H_rq = W D_rq W^H, R_nq = W diag(noise_q) W^H"""
    w = ifft_matrix(s.bin_count)
    wh = w.conj().T
    count = s.user_count
    links = tuple(tuple((w * s.transfer(r, q)) @ wh for q in range(count)) for r in range(count))
    noise = tuple(hermitize((w * s.noise_powers[q]) @ wh) for q in range(count))
    return ChannelSet(links, noise, s.distances)


def complex_gaussian(rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
    """Circularly-symmetric unit-variance entries (x + jy) / sqrt(2)"""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def _antenna_list(antennas: Union[int, Sequence[int]], count: int) -> List[int]:
    if isinstance(antennas, (int, np.integer)):
        return [int(antennas)] * count
    values = [int(a) for a in antennas]
    if len(values) != count:
        raise ValueError(f"expected {count} antenna counts, got {len(values)}")
    return values


def random_mimo_channels(
    seed: int,
    user_count: int,
    antennas: Union[int, Sequence[int]],
    distances: Optional[np.ndarray] = None,
    pathloss_exponent: float = 2.0,
    noise_power: float = 1.0,
) -> ChannelSet:
    """
    I.i.d. Rayleigh MIMO interference channel

    Args:
        seed: RNG seed; equal seeds give identical channel sets
        user_count: number of links Q
        antennas: antennas per user (transmit = receive), scalar or one per user
        distances: Q x Q array d[r, q] (defaults to all ones)
        pathloss_exponent: amplitude scaled by d ** -pathloss_exponent
        noise_power: white noise level of every receiver

    Returns:
        ChannelSet with square direct channels and white noise
    """
    if user_count < 1:
        raise ValueError("user_count must be at least 1")
    dims = _antenna_list(antennas, user_count)
    d = np.ones((user_count, user_count)) if distances is None else np.array(distances, dtype=float)
    if d.shape != (user_count, user_count) or np.any(d <= 0):
        raise ValueError("distances must be a positive Q x Q array")
    rng = np.random.default_rng(seed)
    links = tuple(
        tuple(
            complex_gaussian(rng, (dims[q], dims[r])) * d[r, q] ** (-pathloss_exponent)
            for q in range(user_count)
        )
        for r in range(user_count)
    )
    noise = tuple(noise_power * np.eye(dims[q], dtype=complex) for q in range(user_count))
    return ChannelSet(links, noise, d)


def symmetric_distances(user_count: int, direct: float, cross: float) -> np.ndarray:
    """Distance grid with ``direct`` on the diagonal and ``cross`` elsewhere"""
    d = np.full((user_count, user_count), float(cross))
    np.fill_diagonal(d, float(direct))
    return d


def random_siso_scenario(
    seed: int,
    user_count: int,
    bin_count: int,
    taps: int = 4,
    distances: Optional[np.ndarray] = None,
    pathloss_exponent: float = 1.0,
    noise_power: Union[float, np.ndarray] = 1.0,
    bands: Sequence[Band] = (),
    min_direct_gain: float = 1e-3,
) -> SisoScenario:
    """
    Frequency responses as the N-point FFT of i.i.d. complex Gaussian taps

    Direct responses whose squared magnitude falls below ``min_direct_gain`` are
    raised to that level (keeps every H_qq(k) invertible).
    """
    if taps < 1 or taps > bin_count:
        raise ValueError("taps must lie in [1, bin_count]")
    rng = np.random.default_rng(seed)
    impulse = complex_gaussian(rng, (user_count, user_count, taps)) / math.sqrt(taps)
    responses = np.fft.fft(impulse, n=bin_count, axis=2)
    floor = math.sqrt(min_direct_gain)
    for q in range(user_count):
        h = responses[q, q]
        weak = np.abs(h) < floor
        h[weak] = floor * np.exp(1j * np.angle(h[weak]))
    return SisoScenario(responses, noise_power, tuple(bands), distances, pathloss_exponent)
