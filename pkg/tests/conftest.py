def pytest_terminal_summary(terminalreporter):
    # surface the acceptance-gate verdicts even though pytest captures the
    # per-test stdout on success
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in RESULTS:
        suffix = f"  ({detail})" if detail else ""
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}{suffix}")
