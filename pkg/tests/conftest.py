import os

from hypothesis import HealthCheck, settings

# property suites run at least 10^3 cases each
settings.register_profile(
    "thorough",
    max_examples=1000,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.register_profile("quick", max_examples=50, deadline=None)
settings.load_profile(os.environ.get("CZETA_HYPOTHESIS", "thorough"))
