import numpy as np
import pytest

from critline import _backend, _kernel_py
from critline.functional import gauss_legendre
from critline.presets import eta_inputs, theorem1_critical, theorem1_simple

_kernel_c = pytest.importorskip("critline._kernel_c", reason="compiled kernel not built")


def cases():
    nodes, weights = gauss_legendre(64)
    yield theorem1_simple().mollifier.as_array(), -0.715, 1.0, 1, -0.715, 1.0, 1, nodes, weights, 0.5
    yield theorem1_critical().mollifier.as_array(), -0.7721, 1.0, 5, -0.7721, 1.0, 5, nodes, weights, 0.5
    yield theorem1_critical().mollifier.as_array(), 0.7721, -1.0, 5, 0.7721, -1.0, 5, nodes, weights, 0.5
    _, mol, _ = eta_inputs(2.0)
    yield mol.as_array(), -0.54, 1.0, 2, 0.3, -1.0, 3, nodes, weights, 0.5
    yield mol.as_array(), 1e-9, 1.0, 1, 0.0, 0.0, 0, nodes, weights, 0.5


@pytest.mark.parametrize("args", list(cases()))
def test_backends_agree(args):
    py = _kernel_py.moment_grid(*args)
    c = _kernel_c.moment_grid(*args)
    assert py.shape == c.shape
    assert np.allclose(py, c, rtol=1e-13, atol=1e-15)


def test_compiled_rejects_oversized_input():
    nodes, weights = gauss_legendre(16)
    big = np.zeros((3, 40))
    with pytest.raises(ValueError):
        _kernel_c.moment_grid(big, -0.5, 1.0, 20, -0.5, 1.0, 20, nodes, weights, 0.5)


def test_backend_selected():
    assert _backend.BACKEND == "compiled"
    assert _backend.moment_grid is _kernel_c.moment_grid


def test_worker_count(monkeypatch):
    monkeypatch.setenv("CRITLINE_THREADS", "3")
    assert _backend.worker_count() == 3
    monkeypatch.setenv("CRITLINE_THREADS", "0")
    assert _backend.worker_count() == 1
    monkeypatch.delenv("CRITLINE_THREADS")
    assert _backend.worker_count() >= 1
    monkeypatch.setenv("CRITLINE_THREADS", "many")
    with pytest.raises(ValueError):
        _backend.worker_count()


def test_python_backend_forced(tmp_path):
    import subprocess
    import sys

    code = "from critline import _backend; print(_backend.BACKEND)"
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True,
        env={"CRITLINE_BACKEND": "python", "PATH": "/usr/bin:/bin"}, check=True,
    )
    assert out.stdout.strip() == "python"
