import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile("default")


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): exit criterion")
    config._acceptance = {}
    config._oracles = {}


def pytest_collection_modifyitems(session, config, items):
    # acceptance criterion 11 reads the oracle outcomes, so it must run last
    items.sort(key=lambda item: item.get_closest_marker("acceptance") is not None)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when != "call" and not rep.failed:
        return
    oracle = item.get_closest_marker("oracle")
    if oracle is not None:
        name = oracle.args[0]
        ok = rep.passed and rep.when == "call"
        item.config._oracles[name] = item.config._oracles.get(name, True) and ok
    acc = item.get_closest_marker("acceptance")
    if acc is not None:
        number, title = acc.args
        detail = dict(item.user_properties).get("detail", "")
        status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        item.config._acceptance[number] = (title, status, detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config._acceptance
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, status, detail = results[number]
        terminalreporter.write_line(f"[{status}] {number:2d}. {title}  {detail}")
