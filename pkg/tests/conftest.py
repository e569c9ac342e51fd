import os
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from erasure_sources.adversary import ExtractorSpec
from erasure_sources.source_model import ChannelFamily, ErasureAlphabet

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("dev", max_examples=10, deadline=None)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def bits():
    return ErasureAlphabet(("0", "1"))


@pytest.fixture
def uniform1(bits):
    return ChannelFamily.uniform(1, bits)


@pytest.fixture
def uniform2(bits):
    return ChannelFamily.uniform(2, bits)


@pytest.fixture
def fixture_f(bits):
    """f(0)=0, f(1)=1, f(_)=0 on a single step."""
    return ExtractorSpec(1, bits, (0, 1), {("0",): 0, ("1",): 1, ("_",): 0})


@pytest.fixture
def fifth():
    return Fraction(1, 5)


@pytest.fixture
def fixtures_dir():
    return FIXTURES
