import pytest
from hypothesis import HealthCheck, settings

from yangian_eval.metric import make_metric

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("repo")

SO_N = (2, 3, 4, 5, 6)
SP_N = (2, 4, 6)
ALL_METRICS = [("so", n) for n in SO_N] + [("sp", n) for n in SP_N]


@pytest.fixture(params=ALL_METRICS, ids=lambda p: f"{p[0]}{p[1]}")
def any_metric(request):
    return make_metric(*request.param)
