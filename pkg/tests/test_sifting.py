import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vemd.directions import axis_directions, direction_set
from vemd.envelope import envelopes_1d, envelopes_memd
from vemd.errors import NoExtremaError
from vemd.signals import VectorSignal, find_extrema
from vemd.sifting import (
    SiftConfig,
    _NeumaierSum,
    decompose,
    ensemble_mean,
    local_mean,
    sd_criterion,
    sift,
)

MEMD = SiftConfig(method="memd")
VEMD2 = SiftConfig(method="vemd", order=2)
VEMD3 = SiftConfig(method="vemd", order=3)


def am_tone(T=600):
    t = np.linspace(0, 1, T)
    return (1.5 + 0.5 * np.cos(2 * np.pi * t)) * np.sin(24 * np.pi * t) + 0.8 * t


def smooth_random(r, d=3, T=256):
    t = np.linspace(0, 1, T)
    chans = []
    for _ in range(d):
        s = sum(r.normal() * np.sin(2 * np.pi * r.uniform(1, 20) * t + r.uniform(0, 6)) for _ in range(3))
        chans.append(s + r.normal() * t + r.normal() * t**2)
    return np.array(chans)


def test_config_validation():
    with pytest.raises(ValueError):
        SiftConfig(theta1=0.5, theta2=0.1)
    with pytest.raises(ValueError):
        SiftConfig(alpha=1.0)
    with pytest.raises(ValueError):
        SiftConfig(method="emd")
    with pytest.raises(ValueError):
        SiftConfig(max_imfs=0)


def test_local_mean_of_constant_fails():
    with pytest.raises(NoExtremaError):
        local_mean(np.full((3, 50), 2.0), direction_set(16, 2), MEMD)


@pytest.mark.parametrize("cfg", [MEMD, VEMD2, VEMD3])
def test_one_channel_collapses_to_classic_mean(cfg):
    s = am_tone()
    ex = find_extrema(s)
    classic = envelopes_1d(s, ex).mean
    got = local_mean(s[np.newaxis], axis_directions(1), cfg)[0]
    assert np.max(np.abs(got - classic)) <= 1e-8


def test_pure_tone_mean_is_small():
    t = np.linspace(0, 1, 1001)
    s = 2.0 * np.sin(20 * np.pi * t)
    m = local_mean(s[np.newaxis], axis_directions(1), MEMD)[0]
    inner = (t >= 0.1) & (t <= 0.9)
    assert np.max(np.abs(m[inner])) <= 0.05 * 2.0
    imf, diag = sift(s[np.newaxis], axis_directions(1), MEMD)
    assert np.max(np.abs(imf[0] - s)[inner]) <= 0.05 * 2.0


def test_sd_criterion_examples():
    cfg = SiftConfig()
    amp = np.ones(100)
    assert sd_criterion(np.zeros((3, 100)), amp, cfg) == (True, 0.0)
    stop, sd = sd_criterion(np.vstack([2 * amp, 0 * amp, 0 * amp]), amp, cfg)
    assert not stop and sd == 2.0


def test_sd_criterion_zero_amplitude():
    cfg = SiftConfig()
    stop, sd = sd_criterion(np.zeros((1, 4)), np.zeros(4), cfg)
    assert stop and sd == 0.0
    stop, sd = sd_criterion(np.array([[0.0, 1.0, 0.0, 0.0]]), np.zeros(4), cfg)
    assert not stop and sd == np.inf


def test_sd_criterion_fraction_rule():
    cfg = SiftConfig(theta1=0.05, theta2=0.5, alpha=0.05)
    amp = np.ones(100)
    m = np.zeros(100)
    m[:5] = 0.2  # 5% above theta1, all below theta2
    assert sd_criterion(m, amp, cfg)[0]
    m[:6] = 0.2
    assert not sd_criterion(m, amp, cfg)[0]
    m[:] = 0
    m[0] = 0.6  # one sample above theta2
    assert not sd_criterion(m, amp, cfg)[0]


def test_fixture_first_sift_does_not_stop(fixture):
    dirs = direction_set(64, 2)
    imf, diag = sift(fixture.signal, dirs, MEMD)
    assert diag.iterations >= 1
    assert diag.sd_trace[0] > diag.sd_trace[-1]


def test_stopped_input_returned_unchanged():
    s = am_tone()[np.newaxis]
    cfg = SiftConfig(theta1=1e3, theta2=2e3)
    imf, diag = sift(s, axis_directions(1), cfg)
    np.testing.assert_array_equal(imf, s)
    assert diag.iterations == 0 and diag.converged


def test_max_sift_bounds_iterations():
    cfg = SiftConfig(theta1=1e-12, theta2=2e-12, max_sift=3)
    _, diag = sift(am_tone()[np.newaxis], axis_directions(1), cfg)
    assert diag.iterations == 3 and not diag.converged


def test_skipped_directions_use_smaller_divisor():
    t = np.linspace(0, 1, 400)
    H = np.vstack([np.sin(16 * np.pi * t), 40 * t, 0 * t])
    dirs = direction_set(32, 2)
    ens = ensemble_mean(H, dirs, MEMD)
    assert ens.skipped > 0 and ens.used + ens.skipped == 32
    manual = []
    for p in dirs:
        ex = find_extrema(p @ H)
        if len(ex.maxima) >= 2 and len(ex.minima) >= 2:
            manual.append(envelopes_memd(H, ex).mean)
    assert len(manual) == ens.used
    np.testing.assert_allclose(ens.mean, np.mean(manual, axis=0), atol=1e-12)


def test_monotone_signal_has_no_imfs():
    t = np.linspace(0, 1, 200)
    F = VectorSignal(np.vstack([t, t**2, np.exp(t)]))
    dec = decompose(F, SiftConfig(directions=32))
    assert dec.n_imfs == 0
    np.testing.assert_array_equal(dec.residual.data, F.data)


def test_max_imfs_is_stopping_index(fixture):
    dec = decompose(fixture.signal, SiftConfig(directions=16, max_imfs=2))
    assert dec.n_imfs == 1
    assert decompose(fixture.signal, SiftConfig(directions=16, max_imfs=1)).n_imfs == 0


@settings(max_examples=8, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), method=st.sampled_from(["memd", "vemd2", "vemd3"]))
def test_reconstruction_identity(seed, method):
    r = np.random.default_rng(seed)
    F = smooth_random(r)
    cfg = {"memd": MEMD, "vemd2": VEMD2, "vemd3": VEMD3}[method]
    from dataclasses import replace

    dec = decompose(F, replace(cfg, directions=8))
    assert np.max(np.abs(dec.reconstruct() - F)) <= 1e-10 * np.max(np.abs(F))
    assert all(imf.data.shape == F.shape for imf in dec.imfs)


def test_decomposition_is_deterministic_across_workers(fixture):
    from dataclasses import replace

    cfg = replace(VEMD2, directions=24, max_imfs=2)
    a = decompose(fixture.signal, cfg)
    b = decompose(fixture.signal, cfg)
    c = decompose(fixture.signal, replace(cfg, workers=4))
    for x in (b, c):
        assert x.n_imfs == a.n_imfs
        assert x.imfs[0].data.tobytes() == a.imfs[0].data.tobytes()
        assert x.residual.data.tobytes() == a.residual.data.tobytes()


def test_neumaier_sum_compensates():
    acc = _NeumaierSum(1)
    for x in (1e16, 1.0, -1e16):
        acc.add(np.array([x]))
    assert acc.value[0] == 1.0
