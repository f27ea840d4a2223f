import pytest

CRITERIA = {
    1: "bug reproduction (buggy variant fails max-wait, trace ends at overshoot)",
    2: "fix verification (fixed variant passes, max wait equals 3*t_thr)",
    3: "round-robin and liveness hold in both variants at both scales",
    4: "checker agrees with brute-force semantics on random structures",
    5: "every emitted trace is a valid path that shows the violation",
    6: "saturation: identical schedules, avg wait within 1%",
    7: "low load: adaptive avg wait <= 0.5 x fixed",
    8: "determinism: repeated runs are byte-identical",
}

_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_KEY] = {}


@pytest.fixture
def acceptance(request):
    """Dict of criterion number -> (passed, detail), reported after the run."""
    return request.config.stash[_KEY]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_KEY, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number, title in CRITERIA.items():
        if number not in results:
            terminalreporter.write_line(f"[ -- ] {number}. {title}: not run")
            continue
        ok, detail = results[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")
