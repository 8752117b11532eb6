def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import CRITERIA, RESULTS, format_line
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for ac in CRITERIA:
        if ac in RESULTS:
            ok, title, detail = RESULTS[ac]
            terminalreporter.write_line(format_line(ac, ok, title, detail))
        else:
            terminalreporter.write_line(f"{ac} NOT RUN  {CRITERIA[ac][0]}")
