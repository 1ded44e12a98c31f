import pytest

from helpers import build_company


@pytest.fixture
def company():
    return build_company()
