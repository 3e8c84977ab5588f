import numpy as np
import pytest

from conftest import one_based
from spp_polar.analysis import coset_weight_counts
from spp_polar.codec import CodeSpec, polar_code, spp_code
from spp_polar.construction import (
    MergedPairs,
    RateProfile,
    compute_k_set,
    local_info_set,
    min_weight_lower_bound,
    rate_profile,
    select_type2_pairs,
    swap_gain,
    merge_clears_coset,
)
from spp_polar.polar_core import bec_reliability, load_5g_sequence, row_weight


@pytest.fixture(scope="module")
def capacity_info():
    rel = bec_reliability(5, 0.5)
    return tuple(int(i) for i in np.flatnonzero(rel.values > 0.8))


def test_bec_16_8_information_set(small16):
    assert one_based(small16["polar"].profile.info0) == [8, 10, 11, 12, 13, 14, 15, 16]


def test_spp_16_8_profile(small16):
    prof = small16["spp"].profile
    assert [one_based(a) for a in prof.connections] == [[7, 10]]
    assert [one_based(s) for s in prof.layer_info] == [[1]]
    assert len(prof.info0) == 7
    assert prof.k == 8


def test_16_8_coset_lower_bound(small16):
    report = min_weight_lower_bound(small16["polar"].profile.info0, 4)
    assert report.w_min == 4
    assert report.total == 28
    assert sorted(report.per_coset.values(), reverse=True) == [16, 8, 4]


def test_k_set_definition():
    # leader 7 has support {0,1,2}; every later row has exactly bit 3 outside it
    assert compute_k_set(7, range(16)) == tuple(range(8, 16))
    assert compute_k_set(3, [5, 7, 11, 12]) == (5, 7, 11)


def test_profile_128_32_connection_sets():
    rel = load_5g_sequence(length=128)
    prof = rate_profile(rel, 32 - 12, [(2, 1), (2, 1), (16, 10)])
    a1, a2, a3 = (one_based(a) for a in prof.connections)
    assert a1 == [32, 48]
    assert a2 == [56, 60]
    assert a3[0] == 62 and a3[-1] == 121 and len(a3) == 16
    assert prof.k == 32


def test_capacity_threshold_cosets(capacity_info):
    assert len(capacity_info) == 12
    report = min_weight_lower_bound(capacity_info, 5)
    assert {i + 1: c for i, c in report.per_coset.items()} == {15: 32, 22: 32, 23: 16, 26: 16, 27: 8, 29: 4}
    spec = CodeSpec("polar", RateProfile(5, capacity_info), 12)
    counts = coset_weight_counts(spec, report.w_min)
    assert counts == report.per_coset


def test_merging_clears_first_coset(capacity_info):
    spec = CodeSpec("spp", RateProfile(5, capacity_info), 12, pairs=MergedPairs(((14, 19),)))
    counts = coset_weight_counts(spec, 4)
    assert counts.get(14, 0) == 0
    assert merge_clears_coset(14, 19, capacity_info, 5)


def test_pair_selection_capacity_threshold(capacity_info):
    pairs = select_type2_pairs(RateProfile(5, capacity_info))
    assert pairs.pairs[:2] == ((14, 19), (21, 24))
    for i, j in pairs:
        assert i in capacity_info and j not in capacity_info and i < j


def test_local_info_set_prefers_heavy_rows():
    assert local_info_set(2, 1) == (0,)
    # rows of G_8^T with weight 8, 4, 4, 4 then ties to the smaller index
    assert local_info_set(8, 4) == (0, 1, 2, 4)
    with pytest.raises(ValueError):
        local_info_set(4, 5)


def test_swap_gain_bounds_enumeration(small16):
    # unfreeze min-weight row i in place of information row j and recount
    info = small16["polar"].profile.info0
    before = min_weight_lower_bound(info, 4).total
    checked = 0
    for i in range(16):
        for j in info:
            if i in info or row_weight(i, 4) != 4 or row_weight(j, 4) != 4:
                continue
            if j not in compute_k_set(i, info):
                with pytest.raises(ValueError):
                    swap_gain(i, j, info, 4)
                continue
            gain = swap_gain(i, j, info, 4)
            if gain is None:
                continue
            swapped = sorted(set(info) - {j} | {i})
            after = sum(coset_weight_counts(CodeSpec("polar", RateProfile(4, swapped), 8), 4).values())
            assert after <= before - gain
            checked += 1
    assert checked > 0
    with pytest.raises(ValueError):
        swap_gain(info[0], info[1], info, 4)


def test_profile_validation_messages():
    rel = bec_reliability(4, 0.5)
    with pytest.raises(ValueError, match="exceeds N"):
        rate_profile(rel, 4, [(64, 1)])
    with pytest.raises(ValueError, match="power of two"):
        rate_profile(rel, 4, [(3, 1)])
    with pytest.raises(ValueError, match="infeasible"):
        rate_profile(rel, 14, [(4, 1)])
    with pytest.raises(ValueError, match="disjoint"):
        RateProfile(4, (1, 2), ((2, 3),), ((0,),))
    with pytest.raises(ValueError):
        MergedPairs(((5, 3),))
    with pytest.raises(ValueError):
        MergedPairs(((1, 3), (3, 5)))


def test_spp_rejects_layers_heavier_than_k():
    with pytest.raises(ValueError):
        spp_code(bec_reliability(4, 0.5), 1, [(4, 3)])


def test_polar_code_sizes():
    spec = polar_code(load_5g_sequence(length=64), 20)
    assert spec.k == 20 and spec.N == 64 and spec.pretransform.is_identity
