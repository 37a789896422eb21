import pytest

from fearover import FearModel, four_provider_trace_route, survey_route


@pytest.fixture(scope="session")
def survey_db():
    return survey_route()


@pytest.fixture(scope="session")
def trace_db():
    return four_provider_trace_route()


@pytest.fixture(scope="session")
def fear_model():
    # Session-scoped so the rectified surfaces are built once.
    return FearModel()
