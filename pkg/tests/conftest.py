_CRITERIA: dict[str, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion this test checks")


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker is not None:
            item.user_properties.append(("criterion", marker.args[0]))


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    label = props.get("criterion")
    if label is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        entry = _CRITERIA.setdefault(label, {"ok": True, "details": []})
        entry["ok"] &= report.passed
        entry["details"] += [v for k, v in report.user_properties if k == "detail"]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_CRITERIA, key=lambda s: int(s.split(".")[0])):
        entry = _CRITERIA[label]
        terminalreporter.write_line(f"{'PASS' if entry['ok'] else 'FAIL'}  {label}")
        for detail in entry["details"]:
            terminalreporter.write_line(f"        {detail}")
