import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from spp_polar.codec import ca_polar_code, deep_polar_code, pac_code, polar_code, spp_code
from spp_polar.construction import MergedPairs, RateProfile
from spp_polar.codec import CodeSpec
from spp_polar.crc import CRC3
from spp_polar.polar_core import bec_reliability, load_5g_sequence


def one_based(indices):
    return sorted(i + 1 for i in indices)


@pytest.fixture(scope="session")
def rel16():
    return bec_reliability(4, 0.5)


@pytest.fixture(scope="session")
def small16(rel16):
    return {
        "polar": polar_code(rel16, 8),
        "spp": spp_code(rel16, 8, [(2, 1)], type2=False),
    }


def small_family_specs():
    """One small instance of every family (N = 32)."""
    rel = load_5g_sequence(length=32)
    bec = bec_reliability(5, 0.5)
    return {
        "polar": polar_code(rel, 12),
        "spp": spp_code(bec, 12, [(2, 1), (4, 2)]),
        "spp_pairs": CodeSpec("spp", RateProfile(5, (14, 15, 21, 22, 23, 25, 26, 27, 28, 29, 30, 31)), 12,
                              pairs=MergedPairs(((14, 19), (21, 24)))),
        "spp_crc": spp_code(rel, 10, [(2, 1)], crc_poly=CRC3),
        "ca_polar": ca_polar_code(rel, 9, CRC3),
        "pac": pac_code(rel, 12),
        "deep_polar": deep_polar_code(rel, 12, (2, 8, 32), (1, 4, 7)),
    }


@pytest.fixture(scope="session")
def family_specs():
    return small_family_specs()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one acceptance line; it is printed now and in the terminal summary."""

    def _report(criterion, ok, detail):
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
