import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from chmkit.families import standard_corpus


@pytest.fixture(scope="session")
def corpus():
    """The 19 labelled family members used by the corpus-wide invariants."""
    return standard_corpus()
