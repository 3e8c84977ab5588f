import json

import numpy as np
import pytest

from spp_polar.channel import (
    ChannelConfig,
    SimRecord,
    SweepConfig,
    channel_llr,
    load_sweep_config,
    results_csv,
    run_sweep,
    simulate_bler,
    trial_rng,
)
from spp_polar.decoder import LLR_CLAMP


def test_awgn_llr_moments():
    ch = ChannelConfig.awgn(1.0, 0.5)
    rng = np.random.default_rng(0)
    llr = channel_llr(np.zeros(400_000, dtype=np.uint8), ch, rng)
    # LLRs of the all-zero word are Gaussian with mean 2/sigma^2 and variance 4/sigma^2
    s2 = ch.sigma2
    assert llr.mean() == pytest.approx(2 / s2, rel=0.01)
    assert llr.var() == pytest.approx(4 / s2, rel=0.01)
    assert s2 == pytest.approx(1 / (2 * 0.5 * 10**0.1))


def test_bec_llrs():
    rng = np.random.default_rng(0)
    x = np.array([0, 1] * 50, dtype=np.uint8)
    assert not channel_llr(x, ChannelConfig.bec(1.0), rng).any()
    clean = channel_llr(x, ChannelConfig.bec(0.0), rng)
    assert np.array_equal(clean, LLR_CLAMP * (1 - 2.0 * x))


def test_channel_validation():
    with pytest.raises(ValueError):
        ChannelConfig("bi_awgn", ebn0_db=1.0)
    with pytest.raises(ValueError):
        ChannelConfig.bec(1.5)
    with pytest.raises(ValueError):
        ChannelConfig("rayleigh")
    with pytest.raises(AttributeError):
        ChannelConfig.bec(0.5).sigma2


def test_trial_rng_is_counter_based():
    a = trial_rng(7, 3).integers(0, 2**31, 4)
    b = trial_rng(7, 3).integers(0, 2**31, 4)
    c = trial_rng(7, 4).integers(0, 2**31, 4)
    assert np.array_equal(a, b) and not np.array_equal(a, c)


def test_erasure_channel_fails_almost_always(family_specs):
    spec = family_specs["polar"]
    rec = simulate_bler(spec, 4, ChannelConfig.bec(0.99), min_errors=10**6, max_trials=300)
    assert rec.trials == 300 and rec.bler > 0.9


def test_noiseless_erasure_channel_never_fails(family_specs):
    rec = simulate_bler(family_specs["spp"], 2, ChannelConfig.bec(0.0), max_trials=200)
    assert rec.errors == 0 and rec.trials == 200


def test_stops_at_min_errors(family_specs):
    spec = family_specs["spp"]
    ch = ChannelConfig.awgn(0.0, spec.rate)
    rec = simulate_bler(spec, 2, ch, min_errors=25, max_trials=10**5, batch_size=64)
    assert rec.errors == 25
    ref = simulate_bler(spec, 2, ch, min_errors=25, max_trials=10**5, batch_size=7)
    assert rec == ref


@pytest.mark.parametrize("genie", [False, True])
def test_determinism_across_workers(family_specs, genie):
    spec = family_specs["spp_crc"]
    ch = ChannelConfig.awgn(1.0, spec.rate)
    runs = [simulate_bler(spec, 4, ch, min_errors=40, max_trials=4000, master_seed=3, genie=genie,
                          workers=w, batch_size=50) for w in (1, 4, 8)]
    assert runs[0] == runs[1] == runs[2]
    assert runs[0].errors == 40


def test_genie_partition(family_specs):
    spec = family_specs["spp"]
    ch = ChannelConfig.awgn(0.5, spec.rate)
    rec = simulate_bler(spec, 2, ch, min_errors=60, max_trials=5000, genie=True)
    assert rec.e1 + rec.e2 == rec.errors
    assert rec.e1 > 0
    plain = simulate_bler(spec, 2, ch, min_errors=60, max_trials=5000)
    # the genie only observes; it never changes decisions
    assert (plain.trials, plain.errors) == (rec.trials, rec.errors)
    assert plain.e1 is None


def test_wilson_interval():
    rec = SimRecord("x", 1, "c", 0.0, trials=100, errors=10, e1=None, e2=None, seed=0, genie=False)
    lo, hi = rec.confidence_interval()
    assert lo == pytest.approx(0.0552, abs=1e-3) and hi == pytest.approx(0.1744, abs=1e-3)
    zero = SimRecord("x", 1, "c", 0.0, trials=100, errors=0, e1=None, e2=None, seed=0, genie=False)
    assert zero.confidence_interval()[0] == 0.0


def test_argument_validation(family_specs):
    spec = family_specs["polar"]
    ch = ChannelConfig.awgn(1.0, spec.rate)
    for kwargs in ({"max_trials": 0}, {"min_errors": 0}, {"workers": 0}, {"batch_size": 0}):
        with pytest.raises(ValueError):
            simulate_bler(spec, 2, ch, **kwargs)


def test_sweep_config_roundtrip(family_specs, tmp_path):
    spec = family_specs["spp"]
    (tmp_path / "code.json").write_text(spec.to_json())
    cfg = SweepConfig("code.json", 2, (0.0, 1.0), min_errors=5, max_trials=500)
    (tmp_path / "sweep.json").write_text(json.dumps(cfg.to_dict()))
    loaded = load_sweep_config(tmp_path / "sweep.json")
    assert loaded.ebn0_db == (0.0, 1.0) and loaded.spec_path == str(tmp_path / "code.json")
    records = run_sweep(loaded)
    assert len(records) == 2 and records[0].bler >= records[1].bler
    lines = results_csv(records).splitlines()
    assert lines[0] == "spec_id,S,channel,ebn0_db,trials,errors,e1,e2,bler"
    assert lines[1].startswith("code,2,bi_awgn(R=0.375),0.0,")
    (tmp_path / "bad.json").write_text(json.dumps({**cfg.to_dict(), "colour": 1}))
    with pytest.raises(ValueError, match="unknown"):
        load_sweep_config(tmp_path / "bad.json")
