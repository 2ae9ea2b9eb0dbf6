"""Shared fixtures, random generators and optimization oracles"""

from typing import Optional, Sequence

import numpy as np
import pytest

from application.channel import ChannelSet
from application.linalg import hermitize


def random_complex(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    a = random_complex(rng, (n, n))
    return hermitize(a)


def random_psd(rng: np.random.Generator, n: int, rank: Optional[int] = None) -> np.ndarray:
    a = random_complex(rng, (n, rank or n))
    return hermitize(a @ a.conj().T)


def scalar_channels(links: Sequence[Sequence[complex]], noise: Sequence[float]) -> ChannelSet:
    """ChannelSet of 1 x 1 links; ``links[r][q]`` is the gain from transmitter r to receiver q"""
    return ChannelSet(
        tuple(tuple(np.array([[h]], dtype=complex) for h in row) for row in links),
        tuple(np.array([[n]], dtype=complex) for n in noise),
    )


def decoupled_channels(direct: Sequence[np.ndarray], noise: float = 1.0) -> ChannelSet:
    """Square direct channels with zero cross links"""
    count = len(direct)
    links = tuple(
        tuple(np.asarray(direct[q]) if r == q else np.zeros((direct[q].shape[0], direct[r].shape[1])) for q in range(count))
        for r in range(count)
    )
    return ChannelSet(links, tuple(noise * np.eye(direct[q].shape[0]) for q in range(count)))


def project_simplex(values: np.ndarray, budget: float) -> np.ndarray:
    """Euclidean projection of a real vector onto {x >= 0, sum x = budget}"""
    u = np.sort(values)[::-1]
    css = np.cumsum(u) - budget
    idx = np.arange(1, values.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    theta = css[rho] / (rho + 1)
    return np.maximum(values - theta, 0.0)


def project_capped_simplex(values: np.ndarray, budget: float, cap: float) -> np.ndarray:
    """Euclidean projection onto {0 <= x <= cap, sum x = budget} by bisection on the shift"""
    low = float(values.min()) - cap - budget
    high = float(values.max())
    for _ in range(100):
        mid = 0.5 * (low + high)
        if np.clip(values - mid, 0.0, cap).sum() > budget:
            low = mid
        else:
            high = mid
    return np.clip(values - high, 0.0, cap)


def projected_gradient_rate(
    gram: np.ndarray, budget: float, iterations: int = 4000, cap: Optional[float] = None
) -> float:
    """
    Projected gradient ascent of log2 det(I + S Q) over {Q PSD, Tr Q = budget},
    with every eigenvalue of Q at most ``cap`` when given

    Returns the best rate found (a lower bound on the optimum).
    """
    n = gram.shape[0]
    q = budget * np.eye(n) / n
    step = 1.0 / max(np.linalg.eigvalsh(gram)[-1] ** 2, 1e-12)
    best = -np.inf
    for _ in range(iterations):
        grad = hermitize(np.linalg.solve(np.eye(n) + gram @ q, gram))
        values, vectors = np.linalg.eigh(hermitize(q + step * grad))
        projected = project_simplex(values, budget) if cap is None else project_capped_simplex(values, budget, cap)
        q = hermitize((vectors * projected) @ vectors.conj().T)
        best = max(best, float(np.real(np.linalg.slogdet(np.eye(n) + gram @ q)[1])) / np.log(2.0))
    return best


def grid_search_two_bins(gains: np.ndarray, budget: float, masks=(np.inf, np.inf), points: int = 20001) -> float:
    """Best of sum_k log2(1 + g_k p_k) over a grid of p_0 with p_1 = budget - p_0"""
    p0 = np.linspace(0.0, budget, points)
    p1 = budget - p0
    ok = (p0 <= masks[0] + 1e-15) & (p1 <= masks[1] + 1e-15)
    values = np.log2(1.0 + gains[0] * p0) + np.log2(1.0 + gains[1] * p1)
    return float(values[ok].max())


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
