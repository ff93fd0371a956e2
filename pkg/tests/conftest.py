import functools

import pytest

from ergodic_hjb.grid import make_grid
from ergodic_hjb.kernel import discretize_kernel
from ergodic_hjb.model import instantiate_model
from ergodic_hjb.sweep import SweepOptions, run_sweep

# model name, model params, kernel name, kernel params
PAIRINGS = {
    "zero-cost": ("zero-cost", {}, "constant", {}),
    "scalar-reduction": ("scalar-reduction", {}, "constant", {}),
    "quad-eikonal": ("quad-eikonal", {"g": "continuous"}, "affine-eta", {}),
    "quad-eikonal-measurable": ("quad-eikonal", {"g": "measurable"}, "two-band", {}),
    "power-m": ("power-m", {"m": 3.0}, "sin-product", {"a": 0.5}),
}


def build(key, nx, n_xi):
    mname, mparams, kname, kparams = PAIRINGS[key]
    grid = make_grid(nx, n_xi)
    return instantiate_model(mname, grid, **mparams), discretize_kernel(kname, grid, **kparams)


@functools.lru_cache(maxsize=None)
def cached_sweep(key, nx, n_xi, scheme="godunov"):
    model, kernel = build(key, nx, n_xi)
    report = run_sweep(model, kernel, opts=SweepOptions(scheme=scheme))
    return model, kernel, report


@pytest.fixture(scope="session")
def sweep():
    return cached_sweep


ACCEPTANCE = {}


@pytest.fixture
def record():
    """Store and print the one-line verdict of an acceptance criterion."""
    def _record(number, ok, detail):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE[number] = line
        print(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
