# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cyclic threshold Jacobi eigensolver, compiled kernel.

Operates in place on a C-contiguous symmetric matrix and accumulates the
rotations in ``v``.  Returns the number of sweeps used, or -1 if the sweep
budget was exhausted before the off-diagonal mass vanished.
"""

from libc.math cimport fabs, sqrt

import numpy as np


def jacobi_cycle(double[:, ::1] a, double[:, ::1] v, int max_sweeps):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, i, sweep
    cdef double off, fro, thresh, apq, app, aqq, h, theta, t, c, s, tau
    cdef double g, aip, aiq, vip, viq

    if n == 1:
        return 0

    fro = 0.0
    for p in range(n):
        for q in range(n):
            fro += a[p, q] * a[p, q]
    fro = sqrt(fro)
    if fro == 0.0:
        return 0

    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += fabs(a[p, q])
        if off == 0.0:
            return sweep
        # heavier threshold in the first sweeps, then rotate everything
        thresh = 0.2 * off / (n * n) if sweep < 3 else 0.0

        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                g = 100.0 * fabs(apq)
                # negligible relative to the diagonal: hard zero
                if sweep >= 4 and fabs(a[p, p]) + g == fabs(a[p, p]) \
                        and fabs(a[q, q]) + g == fabs(a[q, q]):
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                if fabs(apq) <= thresh:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                h = aqq - app
                if fabs(h) + g == fabs(h):
                    t = apq / h
                else:
                    theta = 0.5 * h / apq
                    t = 1.0 / (fabs(theta) + sqrt(1.0 + theta * theta))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                tau = s / (1.0 + c)

                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for i in range(n):
                    if i != p and i != q:
                        aip = a[i, p]
                        aiq = a[i, q]
                        a[i, p] = aip - s * (aiq + tau * aip)
                        a[i, q] = aiq + s * (aip - tau * aiq)
                        a[p, i] = a[i, p]
                        a[q, i] = a[i, q]
                for i in range(n):
                    vip = v[i, p]
                    viq = v[i, q]
                    v[i, p] = vip - s * (viq + tau * vip)
                    v[i, q] = viq + s * (vip - tau * viq)

    off = 0.0
    for p in range(n - 1):
        for q in range(p + 1, n):
            off += fabs(a[p, q])
    if off <= 1e-14 * fro:
        return max_sweeps
    return -1
