def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of a run."""
    lines = []
    for outcome, label in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py::" not in rep.nodeid:
                continue
            if getattr(rep, "when", "call") != "call" and outcome == "passed":
                continue
            name = rep.nodeid.split("::")[-1]
            lines.append(f"{label}  {name}")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in dict.fromkeys(lines):
            terminalreporter.write_line(line)
