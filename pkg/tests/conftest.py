import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_criteria = {}


def pytest_addoption(parser):
    parser.addoption("--extended", action="store_true", default=False,
                     help="also run the larger reproduction instances")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config.addinivalue_line("markers", "extended: only runs with --extended")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--extended"):
        return
    skip = pytest.mark.skip(reason="needs --extended")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def extended(request):
    return request.config.getoption("--extended")


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    number, title = marker
    state = _criteria.setdefault(number, {"title": title, "passed": True, "ran": False})
    if report.when == "call":
        state["ran"] = True
    if report.failed:
        state["passed"] = False


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        report.criterion = tuple(mark.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria, key=lambda k: (isinstance(k, str), str(k).zfill(3))):
        state = _criteria[number]
        if not state["ran"]:
            verdict = "SKIP"
        else:
            verdict = "PASS" if state["passed"] else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict}  {state['title']}")
