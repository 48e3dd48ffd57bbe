import importlib

import pytest

from quadfunc import _pykernels

try:
    from quadfunc import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = [pytest.param(_pykernels, id="python")]
if _ckernels is not None:
    BACKENDS.append(pytest.param(_ckernels, id="cython"))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    """Never touch the user's cache directory from tests."""
    monkeypatch.setenv("QUADFUNC_CACHE_DIR", str(tmp_path / "cache"))


@pytest.fixture
def pure_python(monkeypatch):
    """Reload the kernel selector with the compiled backend disabled."""
    import quadfunc.kernels as kernels

    monkeypatch.setenv("QUADFUNC_PURE_PYTHON", "1")
    importlib.reload(kernels)
    yield kernels
    monkeypatch.delenv("QUADFUNC_PURE_PYTHON")
    importlib.reload(kernels)


# ---- acceptance criteria reporting -------------------------------------------

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        number, title = mark.args
        prev = _CRITERIA.get(number, (title, True))
        _CRITERIA[number] = (title, prev[1] and report.outcome == "passed")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
