def pytest_terminal_summary(terminalreporter):
    lines = [
        value
        for key in ("passed", "failed")
        for rep in terminalreporter.stats.get(key, [])
        if rep.when == "call"
        for name, value in rep.user_properties
        if name == "acceptance"
    ]
    if lines:
        terminalreporter.section("acceptance criteria")
        order = {n: i for i, n in enumerate(_names())}
        for line in sorted(lines, key=lambda l: order.get(l.split("] ", 1)[1].split(":")[0], 99)):
            terminalreporter.write_line(line)


def _names():
    from weylmaps.acceptance import CHECKS

    return list(CHECKS)
