"""Hot numeric kernels with optional numba acceleration.

Two inner loops dominate runtime at scale: the level step of the stationary
coefficient recursion and the fixed-step RK4 walk over a constant frame.
Both exist in a pure-numpy form and, when numba is importable, in an
@njit-compiled form.  Set the environment variable ``SPQUAD_NO_NUMBA=1``
before import to force the numpy path (useful for debugging and for the
benchmark baseline).

The numpy implementations are always defined (``*_numpy``) so the benchmark
can compare both paths in one process regardless of the flag.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("SPQUAD_NO_NUMBA", "").lower() in ("1", "true", "yes")

try:  # pragma: no cover - exercised implicitly
    if _DISABLED:
        raise ImportError("numba disabled by SPQUAD_NO_NUMBA")
    from numba import njit
    USING_NUMBA = True
except ImportError:  # pragma: no cover
    njit = None
    USING_NUMBA = False


# --------------------------------------------------------------------------
# stationary recursion level step
#
# vals[r] aggregates the recursion coefficient over all ordered index strings
# whose tail multiset is counts[r]; appending index j multiplies by
# (counts[r] . Vss[:, j]) + vroot[j] and accumulates into trans[r, j].
# --------------------------------------------------------------------------

def level_step_numpy(vals, counts, trans, Vss, vroot):
    sigma = Vss.shape[0]
    out = np.zeros(int(trans.max()) + 1 if trans.size else 0)
    mult = counts.astype(np.float64) @ Vss + vroot
    contrib = vals[:, None] * mult
    for j in range(sigma):
        np.add.at(out, trans[:, j], contrib[:, j])
    return out


if USING_NUMBA:
    @njit(cache=True)
    def _level_step_numba(vals, counts, trans, Vss, vroot, out):  # pragma: no cover
        n, sigma = counts.shape
        for r in range(n):
            v = vals[r]
            if v == 0.0:
                continue
            for j in range(sigma):
                m = vroot[j]
                for l in range(sigma):
                    m += counts[r, l] * Vss[l, j]
                out[trans[r, j]] += v * m
        return out

    def level_step(vals, counts, trans, Vss, vroot):
        out = np.zeros(int(trans.max()) + 1 if trans.size else 0)
        return _level_step_numba(vals, counts, trans, Vss, vroot, out)
else:
    level_step = level_step_numpy


# --------------------------------------------------------------------------
# RK4 over a constant frame: dx_i/dt = (V x)_i * x_i
# --------------------------------------------------------------------------

def rk4_frame_numpy(V, x0, t0, n_steps, h, landing):
    m = len(x0)
    states = np.empty((n_steps + 1, m))
    states[0] = x0
    x = x0.copy()
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n_steps):
            dt = landing if k == n_steps - 1 else h
            k1 = (V @ x) * x
            x2 = x + 0.5 * dt * k1
            k2 = (V @ x2) * x2
            x3 = x + 0.5 * dt * k2
            k3 = (V @ x3) * x3
            x4 = x + dt * k3
            k4 = (V @ x4) * x4
            x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            states[k + 1] = x
            if not np.all(np.isfinite(x)):
                return states[:k + 2], False
    return states, True


if USING_NUMBA:
    @njit(cache=True)
    def _rk4_frame_numba(V, x0, n_steps, h, landing, states):  # pragma: no cover
        m = x0.shape[0]
        x = x0.copy()
        k1 = np.empty(m); k2 = np.empty(m); k3 = np.empty(m); k4 = np.empty(m)
        xt = np.empty(m)
        for k in range(n_steps):
            dt = landing if k == n_steps - 1 else h
            for i in range(m):
                s = 0.0
                for j in range(m):
                    s += V[i, j] * x[j]
                k1[i] = s * x[i]
            for i in range(m):
                xt[i] = x[i] + 0.5 * dt * k1[i]
            for i in range(m):
                s = 0.0
                for j in range(m):
                    s += V[i, j] * xt[j]
                k2[i] = s * xt[i]
            for i in range(m):
                xt[i] = x[i] + 0.5 * dt * k2[i]
            for i in range(m):
                s = 0.0
                for j in range(m):
                    s += V[i, j] * xt[j]
                k3[i] = s * xt[i]
            for i in range(m):
                xt[i] = x[i] + dt * k3[i]
            for i in range(m):
                s = 0.0
                for j in range(m):
                    s += V[i, j] * xt[j]
                k4[i] = s * xt[i]
            finite = True
            for i in range(m):
                x[i] = x[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                states[k + 1, i] = x[i]
                if not np.isfinite(x[i]):
                    finite = False
            if not finite:
                return k + 1, False
        return n_steps, True

    def rk4_frame(V, x0, t0, n_steps, h, landing):
        states = np.empty((n_steps + 1, len(x0)))
        states[0] = x0
        done, ok = _rk4_frame_numba(V, x0, n_steps, h, landing, states)
        return states[:done + 1], ok
else:
    rk4_frame = rk4_frame_numpy


def warmup():
    """Trigger JIT compilation so timed sections exclude compile cost."""
    V = np.array([[0.0, 1.0], [0.0, 0.0]])
    counts = np.array([[1, 0], [0, 1]], dtype=np.int64)
    trans = np.array([[0, 1], [1, 2]], dtype=np.int64)
    level_step(np.array([1.0, 0.5]), counts, trans, V, np.array([0.1, 0.2]))
    rk4_frame(V, np.array([1.0, 1.0]), 0.0, 4, 0.1, 0.1)
