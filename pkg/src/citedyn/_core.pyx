# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-paper trajectory kernel.

Poisson draws go through numpy's own ``random_poisson`` on the paper's
bit-generator state, so trajectories are bit-identical to the pure-Python
kernel (which uses ``Generator.poisson`` on the same stream).  Floating
point is kept order-identical with the Python kernel; the build disables
FMA contraction for the same reason.
"""

from libc.math cimport log10
from libc.stdint cimport int64_t
from cpython.pycapsule cimport PyCapsule_GetPointer

from numpy.random cimport bitgen_t

cdef extern from "numpy/random/distributions.h":
    int64_t random_poisson(bitgen_t *bitgen_state, double lam) nogil


def simulate_trajectories(double[::1] etas,
                          list bit_generators,
                          double[::1] m_dir,
                          double[::1] F_ext,
                          double p0_base,
                          double p0_slope,
                          long[:, ::1] out_k):
    """Fill out_k[i, t-1] with annual citation counts for each paper i.

    etas[i] is the paper fitness; bit_generators[i] the paper's own
    numpy BitGenerator (its state advances in place).
    """
    cdef Py_ssize_t n = etas.shape[0]
    cdef int horizon = <int> out_k.shape[1]
    cdef Py_ssize_t i
    cdef int t, tau
    cdef long K, kv
    cdef double lam, acc, p0, Kd, eta
    cdef bitgen_t *state

    if len(bit_generators) != n or m_dir.shape[0] < horizon or F_ext.shape[0] < horizon:
        raise ValueError("inputs do not cover the ensemble/horizon")

    for i in range(n):
        capsule = bit_generators[i].capsule
        state = <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")
        eta = etas[i]
        K = 0
        for t in range(1, horizon + 1):
            lam = eta * m_dir[t - 1]
            if K > 0:
                acc = 0.0
                for tau in range(1, t):
                    kv = out_k[i, tau - 1]
                    if kv != 0:
                        acc = acc + F_ext[t - tau - 1] * kv
                if acc > 0.0:
                    Kd = <double> K
                    p0 = p0_base * (1.0 + p0_slope * log10(Kd))
                    lam = lam + p0 * acc
            out_k[i, t - 1] = random_poisson(state, lam)
            K = K + out_k[i, t - 1]
    return None
