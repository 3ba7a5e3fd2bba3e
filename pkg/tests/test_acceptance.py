import random

import pytest

from gcdeform import config
from gcdeform_tools.commands import ACCEPTANCE_SAMPLES, SELFTEST, selftest_samples

pytestmark = pytest.mark.slow


@pytest.mark.parametrize("name, check", SELFTEST, ids=[name for name, _ in SELFTEST])
def test_acceptance_check(name, check):
    samples = selftest_samples(name)
    assert samples >= ACCEPTANCE_SAMPLES.get(name, 1)
    assert check(random.Random(config.seed()), samples)
