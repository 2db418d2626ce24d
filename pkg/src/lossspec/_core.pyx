# Compiled smoothing core: pairwise kernel weights, fits, and the
# leave-one-out bandwidth criterion. Single-threaded on purpose so results
# are independent of scheduling.

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


cdef inline double _k1(double u, int kernel_id) nogil:
    cdef double w
    u = fabs(u)
    if u > 1.0:
        return 0.0
    if kernel_id == 0:
        return 0.5
    w = 1.0 - u * u
    if kernel_id == 1:
        return 0.75 * w
    if kernel_id == 2:
        return 0.9375 * w * w
    return 1.09375 * w * w * w


cdef inline double _wprod(const double[:, ::1] z, Py_ssize_t t, Py_ssize_t s,
                          double scale, double inv_hw, int kernel_id,
                          Py_ssize_t p) nogil:
    cdef double wgt = 1.0
    cdef Py_ssize_t k
    for k in range(p):
        wgt *= _k1((z[t, k] - z[s, k]) / scale, kernel_id) * inv_hw
        if wgt == 0.0:
            return 0.0
    return wgt


def nw_weight_matrix(const double[:, ::1] z, double h, int kernel_id, double halfwidth):
    """Row-stochastic kernel weight matrix over the sample points."""
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t p = z.shape[1]
    cdef double scale = h * halfwidth
    cdef double inv_hw = 1.0 / halfwidth
    out = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] w = out
    cdef Py_ssize_t t, s
    cdef double rowsum
    with nogil:
        for t in range(n):
            rowsum = 0.0
            for s in range(n):
                w[t, s] = _wprod(z, t, s, scale, inv_hw, kernel_id, p)
                rowsum += w[t, s]
            for s in range(n):
                w[t, s] /= rowsum
    return out


def nw_smooth(const double[::1] resid, const double[:, ::1] z, double h,
              int kernel_id, double halfwidth):
    """Kernel-weighted average of `resid` at every sample point."""
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t p = z.shape[1]
    cdef double scale = h * halfwidth
    cdef double inv_hw = 1.0 / halfwidth
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] m = out
    cdef Py_ssize_t t, s
    cdef double num, den, wgt
    with nogil:
        for t in range(n):
            num = 0.0
            den = 0.0
            for s in range(n):
                wgt = _wprod(z, t, s, scale, inv_hw, kernel_id, p)
                num += wgt * resid[s]
                den += wgt
            m[t] = num / den
    return out


def loo_cv_criterion(const double[::1] resid, const double[:, ::1] z, double h,
                     int kernel_id, double halfwidth):
    """Leave-one-out squared prediction error and the count of points with
    a nonempty leave-one-out neighborhood. Empty neighborhoods predict 0."""
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t p = z.shape[1]
    cdef double scale = h * halfwidth
    cdef double inv_hw = 1.0 / halfwidth
    cdef Py_ssize_t t, s
    cdef Py_ssize_t nonempty = 0
    cdef double crit = 0.0
    cdef double num, den, wgt, err
    with nogil:
        for t in range(n):
            num = 0.0
            den = 0.0
            for s in range(n):
                if s == t:
                    continue
                wgt = _wprod(z, t, s, scale, inv_hw, kernel_id, p)
                num += wgt * resid[s]
                den += wgt
            if den > 0.0:
                nonempty += 1
                err = resid[t] - num / den
            else:
                err = resid[t]
            crit += err * err
    return crit, int(nonempty)
