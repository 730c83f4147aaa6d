import sys

from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, title in module.CRITERIA.items():
        status = module.RESULTS.get(num)
        word = "NOT RUN" if status is None else ("PASS" if status else "FAIL")
        terminalreporter.write_line(f"{word} [{num}] {title}")
