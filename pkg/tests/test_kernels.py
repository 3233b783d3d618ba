"""Parity between the accelerated and pure-numpy kernel paths."""

import os
import subprocess
import sys

import numpy as np
import pytest

from smrmr._accel import NUMBA_ENABLED
from smrmr._kernels import (
    _cd_weighted_nn_numba,
    _cd_weighted_nn_numpy,
    _pc_association_numba,
    _pc_association_numpy,
)


class TestAssociationParity:
    def test_both_paths_agree(self):
        rng = np.random.default_rng(0)
        for n, m in ((10, 2), (25, 4), (40, 6)):
            V = np.ascontiguousarray(rng.standard_normal((n, m)))
            a = _pc_association_numba(V)
            b = _pc_association_numpy(V)
            assert np.max(np.abs(a - b)) < 1e-10

    def test_ties_handled_identically(self):
        rng = np.random.default_rng(1)
        V = np.ascontiguousarray(
            np.round(rng.standard_normal((20, 3)), 0)  # many repeated values
        )
        a = _pc_association_numba(V)
        b = _pc_association_numpy(V)
        assert np.max(np.abs(a - b)) < 1e-10

    def test_result_is_symmetric_psd(self):
        rng = np.random.default_rng(2)
        V = np.ascontiguousarray(rng.standard_normal((15, 4)))
        M = _pc_association_numpy(V)
        assert np.allclose(M, M.T, atol=1e-12)
        assert np.min(np.linalg.eigvalsh(M)) > -1e-10


class TestCoordinateDescentParity:
    def _problem(self, rng, p):
        B = rng.standard_normal((p, p + 2))
        K = B @ B.T / p
        K += 1e-8 * np.eye(p)
        J = rng.uniform(0, 1, p)
        w = rng.uniform(0, 0.2, p)
        return np.ascontiguousarray(K), J, w

    def test_both_paths_agree(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            p = int(rng.integers(2, 12))
            K, J, w = self._problem(rng, p)
            ta = np.zeros(p)
            tb = np.zeros(p)
            ia, da = _cd_weighted_nn_numba(K, J, w, ta, 10_000, 1e-12)
            ib, db = _cd_weighted_nn_numpy(K, J, w, tb, 10_000, 1e-12)
            assert ia == ib
            assert np.max(np.abs(ta - tb)) < 1e-12

    def test_iteration_cap_respected(self):
        rng = np.random.default_rng(4)
        K, J, w = self._problem(rng, 6)
        theta = np.zeros(6)
        iters, delta = _cd_weighted_nn_numpy(K, J, w, theta, 3, 0.0)
        assert iters == 3


class TestPathSelection:
    def test_env_flag_forces_numpy_path(self):
        env = dict(os.environ, SMRMR_NO_NUMBA="1")
        out = subprocess.run(
            [
                sys.executable,
                "-c",
                "from smrmr._accel import NUMBA_ENABLED; print(NUMBA_ENABLED)",
            ],
            capture_output=True,
            text=True,
            env=env,
        )
        assert out.stdout.strip() == "False"

    def test_active_path_matches_flag(self):
        from smrmr import _kernels

        if NUMBA_ENABLED:
            assert _kernels.pc_association is _kernels._pc_association_numba
        else:
            assert _kernels.pc_association is _kernels._pc_association_numpy

    def test_results_identical_across_paths_in_subprocess(self):
        script = (
            "import numpy as np\n"
            "from smrmr.measures import pc_squared_v\n"
            "rng = np.random.default_rng(7)\n"
            "x = rng.standard_normal(30)\n"
            "y = rng.standard_normal(30)\n"
            "print(repr(pc_squared_v(x, y)))\n"
        )
        plain = subprocess.run(
            [sys.executable, "-c", script], capture_output=True, text=True,
            env=dict(os.environ, SMRMR_NO_NUMBA=""),
        )
        forced = subprocess.run(
            [sys.executable, "-c", script], capture_output=True, text=True,
            env=dict(os.environ, SMRMR_NO_NUMBA="1"),
        )
        assert plain.returncode == forced.returncode == 0
        a = float(plain.stdout.strip())
        b = float(forced.stdout.strip())
        assert a == pytest.approx(b, abs=1e-12)
