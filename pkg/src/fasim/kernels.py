"""Hot Monte Carlo kernels: numba-jitted with a pure-numpy fallback.

The numba path is used when numba imports and the environment variable
FASIM_DISABLE_NUMBA is unset/0; set FASIM_DISABLE_NUMBA=1 to force the numpy
implementations (benchmarks/bench_kernels.py compares the two).

Kernels:
    sos_synthesize       sum-of-sinusoids field on a uniform track grid
    sos_synthesize_pair  the same field sampled by two elements offset
                         perpendicular to the track by delta
    upcross_counts       per-trial upcrossing counts on a sorted threshold grid
    below_counts         batch-total samples at or below each threshold

Field synthesis walks the grid with one complex rotation per sinusoid
(no per-sample trig); drift over 10^4 steps is ~1e-13.
"""

import math
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_ENABLED = (
    numba is not None
    and os.environ.get("FASIM_DISABLE_NUMBA", "0").lower() not in ("1", "true", "yes")
)


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def sos_synthesize_numpy(cos_theta, phi, n_grid, grid_step):
    """Unit-variance Jakes field for each trial row; returns (B, n_grid)."""
    n_comp = cos_theta.shape[1]
    amp = 1.0 / math.sqrt(n_comp)
    step = np.exp(1j * (2.0 * np.pi * grid_step * cos_theta))
    state = amp * np.exp(1j * phi)
    out = np.empty((cos_theta.shape[0], n_grid), np.complex128)
    for g in range(n_grid):
        out[:, g] = state.sum(axis=1)
        state *= step
    return out


def sos_synthesize_pair_numpy(cos_theta, sin_theta, phi, n_grid, grid_step, delta):
    """Two-element sampling of one 2-D isotropic field; elements at
    (l, 0) and (l, delta)."""
    n_comp = cos_theta.shape[1]
    amp = 1.0 / math.sqrt(n_comp)
    step = np.exp(1j * (2.0 * np.pi * grid_step * cos_theta))
    offset = np.exp(1j * (2.0 * np.pi * delta * sin_theta))
    state = amp * np.exp(1j * phi)
    n_trials = cos_theta.shape[0]
    out1 = np.empty((n_trials, n_grid), np.complex128)
    out2 = np.empty((n_trials, n_grid), np.complex128)
    for g in range(n_grid):
        out1[:, g] = state.sum(axis=1)
        out2[:, g] = (state * offset).sum(axis=1)
        state *= step
    return out1, out2


def upcross_counts_numpy(metric, thresholds):
    """Counts of strict straddles S[g] <= t < S[g+1] per trial row.

    Ties sit on the below side, so a sample exactly at the threshold does not
    produce a crossing.
    """
    n_trials, _ = metric.shape
    n_th = thresholds.shape[0]
    rows, cols = np.nonzero(metric[:, 1:] > metric[:, :-1])
    s0 = metric[rows, cols]
    s1 = metric[rows, cols + 1]
    lo = np.searchsorted(thresholds, s0, side="left")
    hi = np.searchsorted(thresholds, s1, side="left")
    diff = np.zeros((n_trials, n_th + 1), np.int64)
    np.add.at(diff, (rows, lo), 1)
    np.add.at(diff, (rows, hi), -1)
    return np.cumsum(diff[:, :-1], axis=1)


def below_counts_numpy(metric, thresholds):
    """Number of samples <= threshold, summed over the batch, per threshold."""
    n_th = thresholds.shape[0]
    out = np.empty(n_th, np.int64)
    for j in range(n_th):
        out[j] = int(np.count_nonzero(metric <= thresholds[j]))
    return out


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if numba is not None:

    @numba.njit(cache=True, fastmath=True)
    def _sos_numba(cos_theta, phi, n_grid, grid_step, out_re, out_im):
        n_trials, n_comp = cos_theta.shape
        amp = 1.0 / math.sqrt(n_comp)
        zr = np.empty(n_comp)
        zi = np.empty(n_comp)
        wr = np.empty(n_comp)
        wi = np.empty(n_comp)
        for b in range(n_trials):
            for m in range(n_comp):
                ang = 2.0 * np.pi * grid_step * cos_theta[b, m]
                wr[m] = np.cos(ang)
                wi[m] = np.sin(ang)
                zr[m] = amp * np.cos(phi[b, m])
                zi[m] = amp * np.sin(phi[b, m])
            for g in range(n_grid):
                sr = 0.0
                si = 0.0
                for m in range(n_comp):
                    sr += zr[m]
                    si += zi[m]
                    tr = zr[m] * wr[m] - zi[m] * wi[m]
                    zi[m] = zr[m] * wi[m] + zi[m] * wr[m]
                    zr[m] = tr
                out_re[b, g] = sr
                out_im[b, g] = si

    @numba.njit(cache=True, fastmath=True)
    def _sos_pair_numba(cos_theta, sin_theta, phi, n_grid, grid_step, delta,
                        o1_re, o1_im, o2_re, o2_im):
        n_trials, n_comp = cos_theta.shape
        amp = 1.0 / math.sqrt(n_comp)
        zr = np.empty(n_comp)
        zi = np.empty(n_comp)
        wr = np.empty(n_comp)
        wi = np.empty(n_comp)
        pr = np.empty(n_comp)
        pi_ = np.empty(n_comp)
        for b in range(n_trials):
            for m in range(n_comp):
                ang = 2.0 * np.pi * grid_step * cos_theta[b, m]
                wr[m] = np.cos(ang)
                wi[m] = np.sin(ang)
                zr[m] = amp * np.cos(phi[b, m])
                zi[m] = amp * np.sin(phi[b, m])
                off = 2.0 * np.pi * delta * sin_theta[b, m]
                pr[m] = np.cos(off)
                pi_[m] = np.sin(off)
            for g in range(n_grid):
                s1r = 0.0
                s1i = 0.0
                s2r = 0.0
                s2i = 0.0
                for m in range(n_comp):
                    s1r += zr[m]
                    s1i += zi[m]
                    s2r += zr[m] * pr[m] - zi[m] * pi_[m]
                    s2i += zr[m] * pi_[m] + zi[m] * pr[m]
                    tr = zr[m] * wr[m] - zi[m] * wi[m]
                    zi[m] = zr[m] * wi[m] + zi[m] * wr[m]
                    zr[m] = tr
                o1_re[b, g] = s1r
                o1_im[b, g] = s1i
                o2_re[b, g] = s2r
                o2_im[b, g] = s2i

    @numba.njit(cache=True)
    def _upcross_numba(metric, thresholds, counts):
        n_trials, n_grid = metric.shape
        n_th = thresholds.shape[0]
        for b in range(n_trials):
            diff = np.zeros(n_th + 1, np.int64)
            for g in range(n_grid - 1):
                s0 = metric[b, g]
                s1 = metric[b, g + 1]
                if s1 > s0:
                    lo = np.searchsorted(thresholds, s0, side="left")
                    hi = np.searchsorted(thresholds, s1, side="left")
                    if hi > lo:
                        diff[lo] += 1
                        diff[hi] -= 1
            acc = 0
            for j in range(n_th):
                acc += diff[j]
                counts[b, j] = acc

    @numba.njit(cache=True)
    def _below_numba(metric, thresholds, out):
        # histogram of "first threshold >= sample", then suffix accumulation
        n_trials, n_grid = metric.shape
        n_th = thresholds.shape[0]
        hist = np.zeros(n_th + 1, np.int64)
        for b in range(n_trials):
            for g in range(n_grid):
                hist[np.searchsorted(thresholds, metric[b, g], side="left")] += 1
        acc = 0
        for j in range(n_th):
            acc += hist[j]
            out[j] += acc

    def sos_synthesize_numba(cos_theta, phi, n_grid, grid_step):
        out_re = np.empty((cos_theta.shape[0], n_grid))
        out_im = np.empty_like(out_re)
        _sos_numba(cos_theta, phi, n_grid, grid_step, out_re, out_im)
        return out_re + 1j * out_im

    def sos_synthesize_pair_numba(cos_theta, sin_theta, phi, n_grid, grid_step,
                                  delta):
        shape = (cos_theta.shape[0], n_grid)
        o1_re = np.empty(shape)
        o1_im = np.empty(shape)
        o2_re = np.empty(shape)
        o2_im = np.empty(shape)
        _sos_pair_numba(cos_theta, sin_theta, phi, n_grid, grid_step, delta,
                        o1_re, o1_im, o2_re, o2_im)
        return o1_re + 1j * o1_im, o2_re + 1j * o2_im

    def upcross_counts_numba(metric, thresholds):
        counts = np.empty((metric.shape[0], thresholds.shape[0]), np.int64)
        _upcross_numba(metric, thresholds, counts)
        return counts

    def below_counts_numba(metric, thresholds):
        out = np.zeros(thresholds.shape[0], np.int64)
        _below_numba(metric, thresholds, out)
        return out


if NUMBA_ENABLED:
    sos_synthesize = sos_synthesize_numba
    sos_synthesize_pair = sos_synthesize_pair_numba
    upcross_counts = upcross_counts_numba
    below_counts = below_counts_numba
else:
    sos_synthesize = sos_synthesize_numpy
    sos_synthesize_pair = sos_synthesize_pair_numpy
    upcross_counts = upcross_counts_numpy
    below_counts = below_counts_numpy
