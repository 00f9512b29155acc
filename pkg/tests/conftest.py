import re


def pytest_terminal_summary(terminalreporter):
    rows = []
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", getattr(rep, "nodeid", ""))
            if m and (rep.when == "call" or status == "error"):
                detail = dict(rep.user_properties).get("detail", "")
                rows.append((int(m.group(1)), "PASS" if status == "passed" else "FAIL", detail))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for num, verdict, detail in sorted(rows):
        terminalreporter.write_line(f"criterion {num:2d}: {verdict}  {detail}")
