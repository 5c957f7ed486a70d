import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from scaleop.field import get_field

SMALL_QS = (3, 5, 7, 9, 11, 13)
AXIOM_QS = (3, 5, 7, 9, 11, 13, 25, 27, 49)  # every built-in spec with q <= 49


@pytest.fixture(params=SMALL_QS)
def spec(request):
    return get_field(request.param)


@pytest.fixture(params=AXIOM_QS)
def any_spec(request):
    return get_field(request.param)
