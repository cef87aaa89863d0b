import pytest

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


class Recorder:
    def __init__(self, criterion):
        self.criterion = criterion
        self.checks = []

    def check(self, name, ok, detail=""):
        self.checks.append((name, bool(ok), detail))

    def finish(self):
        ok = all(c[1] for c in self.checks)
        bad = [f"{n} [{d}]" if d else n for n, good, d in self.checks if not good]
        summary = f"{len(self.checks)} checks" + (f"; failed: {'; '.join(bad)}" if bad else "")
        ACCEPTANCE[self.criterion] = (ok, summary)
        line = f"ACCEPTANCE C{self.criterion:02d} {'PASS' if ok else 'FAIL'}: {summary}"
        print(line)
        assert ok, line


@pytest.fixture
def criterion(request):
    marker = request.node.get_closest_marker("criterion")
    rec = Recorder(marker.args[0])
    yield rec


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(ACCEPTANCE):
        ok, summary = ACCEPTANCE[c]
        terminalreporter.write_line(f"C{c:02d} {'PASS' if ok else 'FAIL'}  {summary}")
