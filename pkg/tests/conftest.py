import os
import shutil
from collections.abc import Callable, Iterator

import pytest

# must be set before the package reads its configuration
os.environ["IS_TEST_ENV"] = "true"

from annulus_conformal.config import set_global_conf  # noqa: E402
from annulus_conformal.core.composite import CompositeMap, HoleTarget, build_composite  # noqa: E402
from annulus_conformal.core.discrepancy import table1_outer_map  # noqa: E402
from annulus_conformal.core.outer_map import LaurentMap  # noqa: E402

# Global constants
RUN_DATA_PATH = os.path.join(os.path.dirname(__file__), "run_data")


# Fixture to clean and prepare run_data directory
@pytest.fixture(scope="session", autouse=True)
def prepare_run_data() -> None:
    if os.path.exists(RUN_DATA_PATH):
        shutil.rmtree(RUN_DATA_PATH)
    os.makedirs(RUN_DATA_PATH)


@pytest.fixture(autouse=True)
def default_global_conf() -> Iterator[None]:
    """Put the global configuration back to its defaults after every test."""
    yield
    set_global_conf({"MODE": "prod"}, ignore_env=True, override=True)


@pytest.fixture
def run_data() -> str:
    return RUN_DATA_PATH


@pytest.fixture(scope="session")
def table1_map() -> LaurentMap:
    """n = 2, m = 1/4 hypotrochoid with outer radius 1 (C = 0.8)."""
    return table1_outer_map()


@pytest.fixture(scope="session")
def identity_map() -> LaurentMap:
    return LaurentMap(scale=1.0)


@pytest.fixture(scope="session")
def table1_cell(table1_map: LaurentMap) -> Callable[[float, float], CompositeMap]:
    """Factory for the composite map of one (R, d) cell of the discrepancy table."""

    def build(R: float, d: float) -> CompositeMap:
        return build_composite(table1_map, HoleTarget(R=R, d=d, reference=1.0))

    return build
