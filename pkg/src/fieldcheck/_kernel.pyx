# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled retarded-kernel quadrature.

Same contract as ``fieldcheck._kernel_py.retarded_sums``.
"""
import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport sin, cos, sqrt, INFINITY

cnp.import_array()

cdef enum:
    MAX_COMP = 4
    MAX_FREQ = 16
    BLOCK = 256

BACKEND = "compiled"


cdef void _one_event(
    double t, double x, double y, double z, double sign,
    const double[:, ::1] nodes,
    const double[:, ::1] spatial,
    const long[::1] term_comp,
    const long[::1] term_freq,
    const double[::1] term_ac,
    const double[::1] term_as,
    const double[::1] term_off,
    const double[::1] omegas,
    double[:, ::1] out,
    double* min_r,
) noexcept nogil:
    cdef Py_ssize_t n_nodes = nodes.shape[0]
    cdef Py_ssize_t n_terms = spatial.shape[0]
    cdef Py_ssize_t n_freq = omegas.shape[0]
    cdef double acc[MAX_COMP * 5]
    cdef double blk[MAX_COMP * 5]
    cdef double sn[MAX_FREQ]
    cdef double cs[MAX_FREQ]
    cdef Py_ssize_t i, j, f, c, base
    cdef double dx, dy, dz, r2, r, inv_r, inv_r2, inv_r3, u, q, qd, sw, om, a_t, b_t
    cdef double rmin = INFINITY

    for j in range(MAX_COMP * 5):
        acc[j] = 0.0
        blk[j] = 0.0

    for i in range(n_nodes):
        dx = x - nodes[i, 0]
        dy = y - nodes[i, 1]
        dz = z - nodes[i, 2]
        r2 = dx * dx + dy * dy + dz * dz
        r = sqrt(r2)
        if r < rmin:
            rmin = r
        inv_r = 1.0 / r
        inv_r2 = inv_r * inv_r
        inv_r3 = inv_r2 * inv_r
        u = t - sign * r
        for f in range(n_freq):
            sn[f] = sin(omegas[f] * u)
            cs[f] = cos(omegas[f] * u)
        for j in range(n_terms):
            sw = spatial[j, i]
            if sw == 0.0:
                continue
            f = term_freq[j]
            om = omegas[f]
            q = term_ac[j] * sn[f] + term_as[j] * cs[f] + term_off[j]
            qd = om * (term_ac[j] * cs[f] - term_as[j] * sn[f])
            c = term_comp[j]
            base = c * 5
            blk[base] += sw * q * inv_r
            blk[base + 1] += sw * qd * inv_r
            a_t = -sign * sw * qd * inv_r2 - sw * q * inv_r3
            blk[base + 2] += a_t * dx
            blk[base + 3] += a_t * dy
            blk[base + 4] += a_t * dz
        if (i + 1) % BLOCK == 0:
            for j in range(MAX_COMP * 5):
                acc[j] += blk[j]
                blk[j] = 0.0

    for j in range(MAX_COMP * 5):
        acc[j] += blk[j]
    for c in range(out.shape[0]):
        for j in range(5):
            out[c, j] = acc[c * 5 + j]
    min_r[0] = rmin


def retarded_sums(
    const double[:, ::1] events,
    double sign,
    const double[:, ::1] nodes,
    const double[:, ::1] spatial,
    const long[::1] term_comp,
    const long[::1] term_freq,
    const double[::1] term_ac,
    const double[::1] term_as,
    const double[::1] term_off,
    const double[::1] omegas,
    int n_comp,
    int threads=1,
):
    """Quadrature sums of the retarded kernel and its first derivatives.

    Returns ``(out, min_r)`` with ``out[m, c] = (value, d_t, d_x, d_y, d_z)``
    for component ``c`` at event ``m``.
    """
    if n_comp > MAX_COMP:
        raise ValueError("at most 4 components")
    if omegas.shape[0] > MAX_FREQ:
        raise ValueError("at most 16 distinct frequencies")
    cdef Py_ssize_t m, n_ev = events.shape[0]
    out_arr = np.zeros((n_ev, n_comp, 5))
    rmin_arr = np.full(n_ev, np.inf)
    cdef double[:, :, ::1] out = out_arr
    cdef double[::1] rmin = rmin_arr
    if threads < 1:
        threads = 1
    for m in prange(n_ev, nogil=True, num_threads=threads, schedule="dynamic"):
        _one_event(
            events[m, 0], events[m, 1], events[m, 2], events[m, 3], sign,
            nodes, spatial, term_comp, term_freq, term_ac, term_as, term_off, omegas,
            out[m], &rmin[m],
        )
    return out_arr, rmin_arr
