"""Backend equivalence: the numba build and the pure-Python build of every
kernel consume the same uniform stream and must agree bit for bit."""

import os
import subprocess
import sys

import numpy as np
import pytest

from deathlab import kernels
from deathlab.rng import make_stream

pytestmark = pytest.mark.skipif(
    not kernels._HAVE_NUMBA, reason="equivalence needs both backends importable"
)


def _pair_of_generators(tag):
    return make_stream(99, tag).generator, make_stream(99, tag).generator


@pytest.fixture(scope="module")
def backends():
    return kernels.get_backend(True), kernels.get_backend(False)


def test_binomial_paths_identical(backends):
    nb, py = backends
    for tag, (x, c) in enumerate([(5, 0.3), (10, 0.9), (200, 0.05), (500, 0.5), (10**5, 0.4)]):
        g1, g2 = _pair_of_generators(tag)
        a = np.empty(4000, dtype=np.int64)
        b = np.empty(4000, dtype=np.int64)
        nb.binomial_batch(g1, x, c, a)
        py.binomial_batch(g2, x, c, b)
        assert np.array_equal(a, b), (x, c)


def test_geometric_and_max_geometric_identical(backends):
    nb, py = backends
    for tag, c in ((10, 0.2), (12, 1.0)):
        g1, g2 = _pair_of_generators(tag)
        a = np.empty(5000, dtype=np.int64)
        b = np.empty(5000, dtype=np.int64)
        nb.geometric_batch(g1, c, a)
        py.geometric_batch(g2, c, b)
        assert np.array_equal(a, b)
    for tag, c in ((11, 0.1), (13, 1.0)):
        g1, g2 = _pair_of_generators(tag)
        a = np.empty(5000, dtype=np.int64)
        b = np.empty(5000, dtype=np.int64)
        nb.max_geometric_batch(g1, 10**6, c, a)
        py.max_geometric_batch(g2, 10**6, c, b)
        assert np.array_equal(a, b)


def test_process_kernels_identical(backends):
    nb, py = backends
    g1, g2 = _pair_of_generators(20)
    a = np.empty(2000, dtype=np.int64)
    b = np.empty(2000, dtype=np.int64)
    nb.extinction_batch(g1, 50, kernels.CONSTANT, 0.2, 0.0, 10**6, a)
    py.extinction_batch(g2, 50, kernels.CONSTANT, 0.2, 0.0, 10**6, b)
    assert np.array_equal(a, b)

    g1, g2 = _pair_of_generators(21)
    ab = np.empty(1000, dtype=np.uint8)
    bb = np.empty(1000, dtype=np.uint8)
    nb.single_drop_batch(g1, 10, kernels.JOINT_POWER, 1.0, 2.0, ab)
    py.single_drop_batch(g2, 10, kernels.JOINT_POWER, 1.0, 2.0, bb)
    assert np.array_equal(ab, bb)

    g1, g2 = _pair_of_generators(22)
    aj = np.empty(2000, dtype=np.int64)
    ac = np.empty(2000, dtype=np.int64)
    bj = np.empty(2000, dtype=np.int64)
    bc = np.empty(2000, dtype=np.int64)
    nb.first_passage_batch(g1, 3, 1e-6, 0, aj, ac)
    py.first_passage_batch(g2, 3, 1e-6, 0, bj, bc)
    assert np.array_equal(aj, bj)
    assert np.array_equal(ac, bc)

    g1, g2 = _pair_of_generators(23)
    nb.first_passage_stepped_batch(g1, 3, 0.3, 10**6, aj, ac)
    py.first_passage_stepped_batch(g2, 3, 0.3, 10**6, bj, bc)
    assert np.array_equal(aj, bj)
    assert np.array_equal(ac, bc)


def test_trajectory_fill_identical(backends):
    nb, py = backends
    g1, g2 = _pair_of_generators(30)
    a = np.zeros(1001, dtype=np.int64)
    b = np.zeros(1001, dtype=np.int64)
    ea = nb.trajectory_fill(g1, 30, kernels.STATE_POWER, 0.5, 1.0, 1000, a)
    eb = py.trajectory_fill(g2, 30, kernels.STATE_POWER, 0.5, 1.0, 1000, b)
    assert ea == eb
    assert np.array_equal(a, b)


def test_env_flag_selects_python_backend():
    env = dict(os.environ, DEATHLAB_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "import deathlab; print(deathlab.BACKEND)"],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    assert out.stdout.strip() == "python"


@pytest.mark.skipif(kernels.numba_disabled(), reason="fallback forced via env flag")
def test_default_backend_is_numba_here():
    assert kernels.BACKEND == "numba"


def test_mortality_at_matches_regime_module(backends):
    from deathlab.regimes import JointPower, StatePower, kernel_code, mortality

    nb, _ = backends
    for regime in (StatePower(0.5, 1.5), JointPower(1.0, 4.0)):
        kind, p1, p2 = kernel_code(regime)
        for k, n in [(1, 10), (5, 10), (10, 10)]:
            assert nb.mortality_at(kind, p1, p2, k, n) == pytest.approx(
                mortality(regime, k, n), rel=1e-15
            )
