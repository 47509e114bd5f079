import pytest

from gibbs_partitions.models import PitmanYor, TabulatedGibbs, ewens


def py_mixture(alpha=0.5, thetas=(1.0, 4.0), weights=(0.3, 0.7), max_n=16):
    """Mixture of PY laws sharing alpha; a Gibbs model outside the PY family."""
    comps = [PitmanYor(alpha, t) for t in thetas]
    rows = [
        [sum(w * c.weight(n, k).to_real() for w, c in zip(weights, comps)) for k in range(1, n + 1)]
        for n in range(1, max_n + 1)
    ]
    return TabulatedGibbs(alpha, rows)


MODEL_GRID = {
    "py-0.5-1": PitmanYor(0.5, 1.0),
    "py-0.25-2.5": PitmanYor(0.25, 2.5),
    "ewens-1.5": ewens(1.5),
    "fisher-0.5x4": PitmanYor.fisher(-0.5, 4),
    "mixture-0.5": py_mixture(),
}


@pytest.fixture(params=sorted(MODEL_GRID), ids=sorted(MODEL_GRID))
def model(request):
    return MODEL_GRID[request.param]


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for number in sorted(REPORT):
            terminalreporter.write_line(REPORT[number])
