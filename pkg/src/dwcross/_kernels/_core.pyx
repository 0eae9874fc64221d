# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: Sturm pivot counting and RK4 wavefunction shooting.

Floating-point operation order mirrors _pure.py exactly so that both
backends return bitwise-identical results.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef double _SAFMIN = 2.2250738585072014e-308
cdef double _RENORM_LIMIT = 1e100


def sturm_counts(diag, offdiag, shifts):
    """Number of eigenvalues strictly below each shift, per shift."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] d = np.ascontiguousarray(diag, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] e = np.ascontiguousarray(offdiag, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sh = np.atleast_1d(
        np.ascontiguousarray(shifts, dtype=np.float64)
    )
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t m = sh.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] e2 = e * e
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts = np.zeros(m, dtype=np.int64)

    cdef double emax = 1.0
    cdef Py_ssize_t i, j
    for i in range(n - 1):
        if e2[i] > emax:
            emax = e2[i]
    cdef double pivmin = _SAFMIN * emax

    cdef double q, shift
    cdef long c
    for j in range(m):
        shift = sh[j]
        q = d[0] - shift
        if q < pivmin and q > -pivmin:
            q = -pivmin
        c = 1 if q < 0.0 else 0
        for i in range(1, n):
            q = (d[i] - shift) - e2[i - 1] / q
            if q < pivmin and q > -pivmin:
                q = -pivmin
            if q < 0.0:
                c += 1
        counts[j] = c
    return counts


cdef inline void _rk4_step(double* y1, double* y2, double s,
                           double g0, double gm, double g1) nogil:
    cdef double half = 0.5 * s
    cdef double k1_1 = y2[0]
    cdef double k1_2 = g0 * y1[0]
    cdef double k2_1 = y2[0] + half * k1_2
    cdef double k2_2 = gm * (y1[0] + half * k1_1)
    cdef double k3_1 = y2[0] + half * k2_2
    cdef double k3_2 = gm * (y1[0] + half * k2_1)
    cdef double k4_1 = y2[0] + s * k3_2
    cdef double k4_2 = g1 * (y1[0] + s * k3_1)
    cdef double sixth = s / 6.0
    y1[0] = y1[0] + sixth * (k1_1 + 2.0 * (k2_1 + k3_1) + k4_1)
    y2[0] = y2[0] + sixth * (k1_2 + 2.0 * (k2_2 + k3_2) + k4_2)


def integrate_schrodinger(v_half, double h, double u, double energy,
                          double y_start, double dy_start, bint from_left):
    """RK4 integration of psi'' = u (V - E) psi across one smooth span.

    Same contract as the pure backend: half-step potential samples over a
    smooth span, caller-supplied initial state, on-the-fly renormalization,
    returns (psi, dpsi) over the nodes in left-to-right order.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] vh = np.ascontiguousarray(
        v_half, dtype=np.float64
    )
    cdef Py_ssize_t n_nodes = (vh.shape[0] - 1) // 2 + 1
    cdef cnp.ndarray[cnp.float64_t, ndim=1] psi = np.empty(n_nodes, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dpsi = np.empty(n_nodes, dtype=np.float64)
    cdef double ue = u * energy
    cdef double y1 = y_start
    cdef double y2 = dy_start
    cdef double g0, gm, g1, mag, s
    cdef Py_ssize_t node, base

    if from_left:
        s = h
        psi[0] = y1
        dpsi[0] = y2
        for node in range(1, n_nodes):
            base = 2 * (node - 1)
            g0 = u * vh[base] - ue
            gm = u * vh[base + 1] - ue
            g1 = u * vh[base + 2] - ue
            _rk4_step(&y1, &y2, s, g0, gm, g1)
            psi[node] = y1
            dpsi[node] = y2
            mag = abs(y1)
            if abs(y2) > mag:
                mag = abs(y2)
            if mag > _RENORM_LIMIT:
                y1 /= mag
                y2 /= mag
                psi[node] = y1
                dpsi[node] = y2
    else:
        s = -h
        psi[n_nodes - 1] = y1
        dpsi[n_nodes - 1] = y2
        for node in range(n_nodes - 2, -1, -1):
            base = 2 * (node + 1)
            g0 = u * vh[base] - ue
            gm = u * vh[base - 1] - ue
            g1 = u * vh[base - 2] - ue
            _rk4_step(&y1, &y2, s, g0, gm, g1)
            psi[node] = y1
            dpsi[node] = y2
            mag = abs(y1)
            if abs(y2) > mag:
                mag = abs(y2)
            if mag > _RENORM_LIMIT:
                y1 /= mag
                y2 /= mag
                psi[node] = y1
                dpsi[node] = y2
    return psi, dpsi
