import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from unlimited_sampling.adc import SrAdcConfig, fold_samples  # noqa: E402
from unlimited_sampling.signals import CRITICAL_PERIOD, SamplingGrid, generate_random, sample  # noqa: E402

ACCEPTANCE_LINES = []


def folded_case(seed, lam=0.05, beta=1.0, K=512, T=CRITICAL_PERIOD, M=32):
    """Ground-truth samples and their folded version for one random signal."""
    g = generate_random(seed, M, beta)
    gamma = sample(g, SamplingGrid(T, K))
    y = fold_samples(gamma, SrAdcConfig(lam))
    return gamma, y


@pytest.fixture
def demo_case():
    return folded_case(seed=1)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
