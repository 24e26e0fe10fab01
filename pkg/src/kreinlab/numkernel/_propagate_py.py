"""Pure-Python twins of the compiled propagation kernels.

Both kernels operate in place on the batched state y (B, dim, K) and are
driven by precomputed coefficient arrays at the step nodes, so the twins
stay line-for-line comparable with the Cython versions.
"""

import numpy as np


def magnus_sl(b1, b2, q1, q2, h, lams, y, logs, renorm_every,
              states=None, logtrail=None):
    """Fourth-order commutator-corrected steps for y' = [[0,1/p],[q-lam,0]] y.

    b1,b2,q1,q2: (n,) values of 1/p and q at the two Gauss nodes per step;
    y: (B, 2, K) in-out; logs: (B,) accumulated renormalization logs.
    """
    n = len(b1)
    half = 0.5 * h
    comm = h * h * np.sqrt(3.0) / 12.0
    for i in range(n):
        bb = half * (b1[i] + b2[i])
        c1 = q1[i] - lams
        c2 = q2[i] - lams
        cc = half * (c1 + c2)
        dd = comm * (b2[i] * c1 - b1[i] * c2)
        delta = dd * dd + bb * cc
        w = np.sqrt(np.abs(delta))
        wc = np.minimum(w, 700.0)
        pos = delta >= 0.0
        ch = np.where(pos, np.cosh(wc), np.cos(w))
        sh = np.where(pos, np.sinh(wc), np.sin(w))
        sh = np.where(w == 0.0, 1.0, sh / np.where(w == 0.0, 1.0, w))
        a00 = ch + sh * dd
        a01 = sh * bb
        a10 = sh * cc
        a11 = ch - sh * dd
        y0r = y[:, 0, :].copy()
        y1r = y[:, 1, :]
        y[:, 0, :] = a00[:, None] * y0r + a01[:, None] * y1r
        y[:, 1, :] = a10[:, None] * y0r + a11[:, None] * y1r
        if renorm_every and (i % renorm_every == renorm_every - 1):
            m = np.max(np.abs(y), axis=(1, 2))
            m = np.where(m == 0.0, 1.0, m)
            y /= m[:, None, None]
            logs += np.log(m)
        if states is not None:
            states[i + 1] = y
            logtrail[i + 1] = logs


def rk4_ho(invp, q, h, lams, y, order, src=None, states=None):
    """Classical RK4 for the clamped 4th/6th-order systems.

    invp, q: (2n+1,) half-step node arrays; y: (B, dim, K) in-out with
    dim = 4 (order 2) or 6 (order 3).  The source, when given, is
    subtracted in the last column's final derivative row.
    """
    n = (len(invp) - 1) // 2
    lamc = lams[:, None]

    def rhs(j, state):
        out = np.empty_like(state)
        out[:, 0, :] = state[:, 1, :] * invp[j]
        out[:, 1, :] = q[j] * state[:, 0, :] - state[:, 2, :]
        if order == 2:
            out[:, 2, :] = state[:, 3, :] * invp[j]
            out[:, 3, :] = (q[j] - lamc) * state[:, 2, :]
            if src is not None:
                out[:, 3, -1] -= src[j]
        else:
            out[:, 2, :] = state[:, 3, :] * invp[j]
            out[:, 3, :] = q[j] * state[:, 2, :] - state[:, 4, :]
            out[:, 4, :] = state[:, 5, :] * invp[j]
            out[:, 5, :] = (q[j] - lamc) * state[:, 4, :]
            if src is not None:
                out[:, 5, -1] -= src[j]
        return out

    for i in range(n):
        j = 2 * i
        k1 = rhs(j, y)
        k2 = rhs(j + 1, y + 0.5 * h * k1)
        k3 = rhs(j + 1, y + 0.5 * h * k2)
        k4 = rhs(j + 2, y + h * k3)
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if states is not None:
            states[i + 1] = y
