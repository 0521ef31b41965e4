import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    order = [c[0] for c in mod.CRITERIA + mod.INFO]
    for key in order:
        if key in results:
            terminalreporter.write_line(results[key])
