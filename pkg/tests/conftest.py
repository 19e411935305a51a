_CRITERIA = []


def record_criterion(name, ok, detail=""):
    _CRITERIA.append((name, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, ok, detail in _CRITERIA:
        status = "PASS" if ok else "FAIL"
        line = f"{status}  {name}"
        if detail and not ok:
            line += f"  [{detail.splitlines()[0]}]"
        terminalreporter.write_line(line)
