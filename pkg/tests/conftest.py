import pytest

from hundal_lab import _kernel
from hundal_lab.cone import build_cone


@pytest.fixture(params=sorted(_kernel.KERNELS))
def backend(request, monkeypatch):
    """Run the test once per available NNLS kernel, installed as the active one."""
    monkeypatch.setattr(_kernel, "nnls_kernel", _kernel.KERNELS[request.param])
    return request.param


@pytest.fixture(scope="session")
def small_cone():
    # 9 generators: small enough for the brute-force oracle
    return build_cone(2.0, 0.25, 8)


@pytest.fixture(scope="session")
def default_cone():
    return build_cone(61.0, 1 / 32, 64)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
