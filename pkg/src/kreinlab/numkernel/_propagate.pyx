# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled propagation kernels: Magnus steps for the second-order system
and classical RK4 for the clamped fourth/sixth-order systems."""

from libc.math cimport cos, cosh, exp, fabs, log, sin, sinh, sqrt

import numpy as np


def magnus_sl(double[::1] b1, double[::1] b2, double[::1] q1, double[::1] q2,
              double h, double[::1] lams, double[:, :, ::1] y,
              double[::1] logs, int renorm_every,
              states=None, logtrail=None):
    cdef Py_ssize_t n = b1.shape[0]
    cdef Py_ssize_t nb = y.shape[0]
    cdef Py_ssize_t nk = y.shape[2]
    cdef Py_ssize_t i, b, k
    cdef double half = 0.5 * h
    cdef double comm = h * h * sqrt(3.0) / 12.0
    cdef double bb, c1, c2, cc, dd, delta, w, ch, sh
    cdef double a00, a01, a10, a11, y0, y1, m, av
    cdef double[:, :, :, ::1] st
    cdef double[:, ::1] lt
    cdef bint rec = states is not None
    if rec:
        st = states
        lt = logtrail
    for i in range(n):
        bb = half * (b1[i] + b2[i])
        for b in range(nb):
            c1 = q1[i] - lams[b]
            c2 = q2[i] - lams[b]
            cc = half * (c1 + c2)
            dd = comm * (b2[i] * c1 - b1[i] * c2)
            delta = dd * dd + bb * cc
            if delta >= 0.0:
                w = sqrt(delta)
                if w > 700.0:
                    w = 700.0
                ch = cosh(w)
                sh = sinh(w) / w if w != 0.0 else 1.0
            else:
                w = sqrt(-delta)
                ch = cos(w)
                sh = sin(w) / w if w != 0.0 else 1.0
            a00 = ch + sh * dd
            a01 = sh * bb
            a10 = sh * cc
            a11 = ch - sh * dd
            for k in range(nk):
                y0 = y[b, 0, k]
                y1 = y[b, 1, k]
                y[b, 0, k] = a00 * y0 + a01 * y1
                y[b, 1, k] = a10 * y0 + a11 * y1
        if renorm_every and (i % renorm_every == renorm_every - 1):
            for b in range(nb):
                m = 0.0
                for k in range(nk):
                    av = fabs(y[b, 0, k])
                    if av > m:
                        m = av
                    av = fabs(y[b, 1, k])
                    if av > m:
                        m = av
                if m == 0.0:
                    m = 1.0
                for k in range(nk):
                    y[b, 0, k] /= m
                    y[b, 1, k] /= m
                logs[b] += log(m)
        if rec:
            for b in range(nb):
                lt[i + 1, b] = logs[b]
                for k in range(nk):
                    st[i + 1, b, 0, k] = y[b, 0, k]
                    st[i + 1, b, 1, k] = y[b, 1, k]


def rk4_ho(double[::1] invp, double[::1] q, double h, double[::1] lams,
           double[:, :, ::1] y, int order, src=None, states=None):
    cdef Py_ssize_t n = (invp.shape[0] - 1) // 2
    cdef Py_ssize_t nb = y.shape[0]
    cdef Py_ssize_t dim = y.shape[1]
    cdef Py_ssize_t nk = y.shape[2]
    cdef Py_ssize_t i, b, k, r, j
    cdef double[::1] sv
    cdef bint has_src = src is not None
    cdef double[:, :, :, ::1] st
    cdef bint rec = states is not None
    cdef double lam
    # stage scratch
    k1a = np.empty((dim,), dtype=float)
    cdef double[::1] k1 = k1a
    cdef double[::1] k2 = np.empty((dim,), dtype=float)
    cdef double[::1] k3 = np.empty((dim,), dtype=float)
    cdef double[::1] k4 = np.empty((dim,), dtype=float)
    cdef double[::1] yt = np.empty((dim,), dtype=float)
    cdef double[::1] yl = np.empty((dim,), dtype=float)
    if has_src:
        sv = src
    if rec:
        st = states

    for i in range(n):
        j = 2 * i
        for b in range(nb):
            lam = lams[b]
            for k in range(nk):
                for r in range(dim):
                    yl[r] = y[b, r, k]
                _rhs(invp[j], q[j], lam, yl, k1, order,
                     sv[j] if (has_src and k == nk - 1) else 0.0)
                for r in range(dim):
                    yt[r] = yl[r] + 0.5 * h * k1[r]
                _rhs(invp[j + 1], q[j + 1], lam, yt, k2, order,
                     sv[j + 1] if (has_src and k == nk - 1) else 0.0)
                for r in range(dim):
                    yt[r] = yl[r] + 0.5 * h * k2[r]
                _rhs(invp[j + 1], q[j + 1], lam, yt, k3, order,
                     sv[j + 1] if (has_src and k == nk - 1) else 0.0)
                for r in range(dim):
                    yt[r] = yl[r] + h * k3[r]
                _rhs(invp[j + 2], q[j + 2], lam, yt, k4, order,
                     sv[j + 2] if (has_src and k == nk - 1) else 0.0)
                for r in range(dim):
                    y[b, r, k] = yl[r] + (h / 6.0) * (
                        k1[r] + 2.0 * k2[r] + 2.0 * k3[r] + k4[r])
        if rec:
            for b in range(nb):
                for r in range(dim):
                    for k in range(nk):
                        st[i + 1, b, r, k] = y[b, r, k]


cdef inline void _rhs(double ip, double qv, double lam, double[::1] s,
                      double[::1] out, int order, double srcv) nogil:
    out[0] = s[1] * ip
    out[1] = qv * s[0] - s[2]
    if order == 2:
        out[2] = s[3] * ip
        out[3] = (qv - lam) * s[2] - srcv
    else:
        out[2] = s[3] * ip
        out[3] = qv * s[2] - s[4]
        out[4] = s[5] * ip
        out[5] = (qv - lam) * s[4] - srcv
