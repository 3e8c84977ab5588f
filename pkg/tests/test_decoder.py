import numpy as np
import pytest

from conftest import small_family_specs
from oracles import all_messages, ml_decode, sc_decode
from spp_polar.channel import ChannelConfig, channel_llr
from spp_polar.codec import encode
from spp_polar.decoder import scl_decode, scl_decode_batch

FAMILY_NAMES = list(small_family_specs())


def noisy(spec, count, ebn0, seed):
    rng = np.random.default_rng(seed)
    msgs = rng.integers(0, 2, (count, spec.k)).astype(np.uint8)
    llr = channel_llr(encode(spec, msgs), ChannelConfig.awgn(ebn0, spec.rate), rng)
    return msgs, llr


@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_noiseless_recovery(family_specs, name):
    spec = family_specs[name]
    msgs, _ = noisy(spec, 64, 0.0, 1)
    llr = 20.0 * (1.0 - 2.0 * encode(spec, msgs))
    for S in (1, 4):
        res = scl_decode_batch(spec, llr, S)
        assert np.array_equal(res.selected, msgs)


@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_list_one_equals_sc_oracle(family_specs, name):
    spec = family_specs[name]
    # 1000 noisy cases spread over the families, at an SNR with frequent errors
    _, llr = noisy(spec, 1000 // len(FAMILY_NAMES) + 1, 1.0, 2)
    res = scl_decode_batch(spec, llr, 1)
    for b in range(len(llr)):
        assert res.selected[b].tolist() == sc_decode(spec, llr[b]).tolist()


@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_full_list_is_ml(family_specs, name):
    spec = family_specs[name]
    msgs = all_messages(spec.k)
    codebook = encode(spec, msgs).astype(float)
    _, llr = noisy(spec, 500, 1.0, 3)
    res = scl_decode_batch(spec, llr, 1 << spec.k)
    for b in range(len(llr)):
        best = ml_decode(codebook, llr[b])
        got = res.selected[b]
        # ties between codewords are possible only on measure-zero events
        assert np.array_equal(encode(spec, got), codebook[best].astype(np.uint8))


def test_path_metrics_never_decrease(family_specs):
    spec = family_specs["spp_pairs"]
    _, llr = noisy(spec, 20, 1.0, 4)
    res = scl_decode_batch(spec, llr, 4, trace=True)
    best = np.nanmin(res.trace, axis=2)
    assert np.all(np.diff(best, axis=1) >= -1e-9)
    assert np.all(res.metrics >= 0)
    # final metrics are those of the last trace step
    assert np.allclose(np.sort(res.metrics, axis=1), np.sort(res.trace[:, -1, :], axis=1))


def test_metric_equals_disagreement_cost(family_specs):
    spec = family_specs["polar"]
    _, llr = noisy(spec, 10, 1.0, 5)
    res = scl_decode_batch(spec, llr, 8)
    hard = (llr < 0).astype(np.uint8)
    cost = (np.abs(llr)[:, None, :] * (res.codewords != hard[:, None, :])).sum(axis=-1)
    assert np.allclose(cost, res.metrics)


def test_full_list_metric_is_a_lower_bound(family_specs):
    # pointwise monotonicity in S does not hold, but no list beats the full one
    spec = family_specs["spp"]
    _, llr = noisy(spec, 200, 1.0, 6)
    floor = scl_decode_batch(spec, llr, 1 << spec.k).metrics.min(axis=1)
    means = []
    for S in (1, 4, 16):
        best = scl_decode_batch(spec, llr, S).metrics.min(axis=1)
        assert np.all(best >= floor - 1e-9)
        means.append(best.mean())
    assert means[0] >= means[1] >= means[2]


def test_crc_selection_prefers_passing_path(family_specs):
    spec = family_specs["ca_polar"]
    _, llr = noisy(spec, 100, 0.5, 7)
    res = scl_decode_batch(spec, llr, 8)
    for b in range(len(llr)):
        if res.crc_pass[b].any():
            assert res.crc_pass[b, res.selected_index[b]]
            passing = res.metrics[b][res.crc_pass[b]]
            assert res.metrics[b, res.selected_index[b]] == passing.min()


def test_codewords_reencode_messages(family_specs):
    spec = family_specs["deep_polar"]
    _, llr = noisy(spec, 20, 1.0, 8)
    res = scl_decode_batch(spec, llr, 4)
    assert np.array_equal(res.codewords, encode(spec, res.messages))


def test_genie_flag(family_specs):
    spec = family_specs["spp"]
    msgs, llr = noisy(spec, 100, 0.0, 9)
    res = scl_decode_batch(spec, llr, 2, genie_messages=msgs)
    in_list = (res.messages == msgs[:, None, :]).all(axis=-1).any(axis=-1)
    # the genie flag tracks survival at every step, so it implies final membership
    assert np.all(~res.in_list | in_list)
    correct = (res.selected == msgs).all(axis=1)
    assert np.all(res.in_list[correct])


def test_exact_metric_decodes_noiseless(family_specs):
    spec = family_specs["pac"]
    msgs, _ = noisy(spec, 10, 0.0, 10)
    llr = 10.0 * (1.0 - 2.0 * encode(spec, msgs))
    assert np.array_equal(scl_decode_batch(spec, llr, 4, exact=True).selected, msgs)


def test_single_frame_api(family_specs):
    spec = family_specs["polar"]
    msgs, llr = noisy(spec, 1, 3.0, 11)
    one = scl_decode(spec, llr[0], 4, genie_message=msgs[0], trace=True)
    batch = scl_decode_batch(spec, llr, 4)
    assert np.array_equal(one.selected, batch.selected[0])
    assert len(one.trace) == spec.N
    assert isinstance(one.in_list, bool)


def test_decoder_input_validation(family_specs):
    spec = family_specs["polar"]
    with pytest.raises(ValueError):
        scl_decode(spec, np.zeros(spec.N + 1), 4)
    with pytest.raises(ValueError):
        scl_decode(spec, np.zeros(spec.N), 0)
    # infinite and NaN channel values are clamped rather than propagated
    llr = np.full(spec.N, np.inf)
    llr[0] = np.nan
    assert not scl_decode(spec, llr, 2).selected.any()
