import numpy as np
import pytest
from numpy.testing import assert_allclose

from application.channel import (
    Band,
    ChannelSet,
    SisoScenario,
    StrategyProfile,
    circulant_channels,
    ifft_matrix,
    mui_covariance,
    random_mimo_channels,
    random_siso_scenario,
    rate,
    siso_rate,
    siso_to_covariance,
    sum_rate,
)
from application.errors import DimensionMismatchError, SingularDirectChannelError
from conftest import decoupled_channels, random_complex, random_psd, scalar_channels


def test_mui_single_user_is_noise():
    ch = ChannelSet(((np.eye(2),),), (2.0 * np.eye(2),))
    profile = StrategyProfile((np.eye(2),))
    assert_allclose(mui_covariance(0, profile, ch), 2.0 * np.eye(2))


def test_mui_zero_strategies_is_noise():
    ch = random_mimo_channels(3, 3, 2)
    assert_allclose(mui_covariance(1, StrategyProfile.zeros(ch), ch), ch.noise[1])


def test_mui_scalar_hand_computation():
    ch = scalar_channels([[1.0, 1.0], [0.3, 1.0]], [1.0, 0.5])
    profile = StrategyProfile((np.array([[2.0]]), np.array([[0.0]])))
    assert_allclose(mui_covariance(1, profile, ch), [[2.5]])


def test_mui_rejects_wrong_dimensions():
    ch = random_mimo_channels(0, 2, 2)
    profile = StrategyProfile((np.eye(3), np.eye(2)))
    with pytest.raises(DimensionMismatchError):
        mui_covariance(1, profile, ch)


def test_rate_zero_input_is_zero():
    ch = random_mimo_channels(1, 2, 3)
    assert rate(0, StrategyProfile.zeros(ch), ch) == pytest.approx(0.0, abs=1e-12)


def test_rate_identity_channel_gives_n_bits():
    ch = ChannelSet(((np.eye(3),),), (np.eye(3),))
    assert rate(0, StrategyProfile((np.eye(3),)), ch) == pytest.approx(3.0)


def test_rate_scalar_formula():
    ch = scalar_channels([[np.sqrt(3.0)]], [1.0])
    assert rate(0, StrategyProfile((np.array([[1.0]]),)), ch) == pytest.approx(2.0)


def test_sum_rate_of_decoupled_links_doubles():
    ch = decoupled_channels([np.array([[2.0]]), np.array([[2.0]])])
    profile = StrategyProfile((np.array([[1.0]]), np.array([[1.0]])))
    single = rate(0, profile, ch)
    assert sum_rate(profile, ch) == pytest.approx(2.0 * single)
    assert sum_rate(StrategyProfile.zeros(ch), ch) == pytest.approx(0.0, abs=1e-12)


def test_rate_is_concave_along_segments(rng):
    ch = random_mimo_channels(7, 2, 3)
    other = random_psd(rng, 3)
    a, b = random_psd(rng, 3), random_psd(rng, 3)

    def r(q0):
        return rate(0, StrategyProfile((q0, other)), ch)

    for t in (0.25, 0.5, 0.75):
        assert r(t * a + (1 - t) * b) >= t * r(a) + (1 - t) * r(b) - 1e-9


def test_mui_is_monotone_in_other_strategies(rng):
    ch = random_mimo_channels(11, 2, 3)
    base = StrategyProfile((random_psd(rng, 3), random_psd(rng, 3)))
    bigger = base.replace(0, base[0] + random_psd(rng, 3, rank=1))
    diff = mui_covariance(1, bigger, ch) - mui_covariance(1, base, ch)
    assert np.linalg.eigvalsh(diff)[0] >= -1e-10


def test_singular_direct_channel_rejected():
    with pytest.raises(SingularDirectChannelError):
        ChannelSet(((np.zeros((2, 2)),),), (np.eye(2),))


def test_profile_rejects_indefinite_covariance():
    with pytest.raises(ValueError):
        StrategyProfile((np.diag([1.0, -1.0]),))


def test_random_channels_deterministic():
    a = random_mimo_channels(42, 3, [2, 3, 2])
    b = random_mimo_channels(42, 3, [2, 3, 2])
    for row_a, row_b in zip(a.links, b.links):
        for h_a, h_b in zip(row_a, row_b):
            assert np.array_equal(h_a, h_b)
    assert a.links[1][0].shape == (2, 3)


def test_random_channels_variance_follows_distance():
    d = np.array([[1.0, 2.0], [2.0, 1.0]])
    ch = random_mimo_channels(5, 2, 100, distances=d, pathloss_exponent=2.0)
    cross = ch.links[0][1]
    assert np.mean(np.abs(cross) ** 2) == pytest.approx(2.0 ** -4, rel=0.05)
    assert np.mean(np.abs(ch.links[0][0]) ** 2) == pytest.approx(1.0, rel=0.05)


def test_circulant_single_bin_is_scalar():
    responses = np.array([[[2.0 + 1.0j]]])
    ch = circulant_channels(SisoScenario(responses, 1.0))
    assert_allclose(ch.links[0][0], [[2.0 + 1.0j]])


def test_circulant_flat_response_is_scaled_identity():
    responses = np.full((1, 1, 4), 3.0 + 0.0j)
    ch = circulant_channels(SisoScenario(responses, 1.0))
    assert_allclose(ch.links[0][0], 3.0 * np.eye(4), atol=1e-12)


def test_circulant_diagonalized_by_ifft(rng):
    s = SisoScenario(random_complex(rng, (2, 2, 4)) + 2.0, 1.0)
    ch = circulant_channels(s)
    w = ifft_matrix(4)
    for r in range(2):
        for q in range(2):
            d = w.conj().T @ ch.links[r][q] @ w
            assert np.linalg.norm(d - np.diag(np.diag(d))) <= 1e-10
            assert_allclose(np.diag(d), s.transfer(r, q), atol=1e-10)


def test_circulant_rate_matches_per_bin_rate(rng):
    s = random_siso_scenario(9, 2, 8, taps=3)
    ch = circulant_channels(s)
    p = rng.uniform(0.0, 2.0, 8)
    powers = [p, np.zeros(8)]
    profile = StrategyProfile((siso_to_covariance(p), np.zeros((8, 8))))
    expected = np.sum(np.log2(1.0 + s.gains()[0, 0] * p / s.noise_powers[0]))
    assert rate(0, profile, ch) == pytest.approx(expected, abs=1e-8)
    assert siso_rate(0, powers, s) == pytest.approx(expected, abs=1e-10)


def test_siso_bands_and_masks():
    s = SisoScenario(np.ones((1, 1, 10)), 1.0, (Band("A", 2, 5), Band("B", 5, 7)))
    mask = s.band_mask({"A": 0.0, "B": 0.5}, default=1.0)
    assert_allclose(mask, [1, 1, 0, 0, 0, 0.5, 0.5, 1, 1, 1])
    with pytest.raises(ValueError):
        SisoScenario(np.ones((1, 1, 10)), 1.0, (Band("A", 2, 5), Band("B", 4, 7)))


def test_siso_distance_scaling():
    s = SisoScenario(np.ones((2, 2, 3)), 1.0, distances=np.array([[1.0, 2.0], [2.0, 1.0]]))
    assert_allclose(s.gains()[0, 1], 0.25)
    assert_allclose(s.gains()[1, 1], 1.0)
