import os

import pytest

from maxcurve.curves import make_curve


@pytest.fixture(scope="session")
def am9():
    return make_curve("as-max", 9)


@pytest.fixture(scope="session")
def am27():
    return make_curve("as-max", 27)


def optin_enabled() -> bool:
    return os.environ.get("MAXCURVE_OPTIN", "") not in ("", "0")
