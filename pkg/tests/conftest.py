from hypothesis import HealthCheck, settings

# every example runs exact elimination, keep the counts small
settings.register_profile(
    "exact",
    max_examples=30,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("exact")
