"""Pure-Python twin of the compiled Jacobi kernel.

Same cyclic threshold iteration, but organised round-robin so that each
round applies n//2 rotations with disjoint pivot pairs as vectorised row
and column updates.  Within a round the rotations commute exactly, so the
result matches the sequential kernel up to rotation ordering.
"""

import numpy as np


def _round_robin(n):
    """Pivot schedule: list of rounds, each an array of disjoint (p, q)."""
    m = n if n % 2 == 0 else n + 1
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p < n and q < n]
        rounds.append(np.array(pairs, dtype=np.intp))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def jacobi_cycle(a, v, max_sweeps):
    n = a.shape[0]
    if n == 1:
        return 0
    fro = np.linalg.norm(a)
    if fro == 0.0:
        return 0
    schedule = _round_robin(n)
    iupper = np.triu_indices(n, 1)

    for sweep in range(max_sweeps):
        off = np.sum(np.abs(a[iupper]))
        if off == 0.0:
            return sweep
        thresh = 0.2 * off / (n * n) if sweep < 3 else 0.0

        for pairs in schedule:
            p = pairs[:, 0]
            q = pairs[:, 1]
            apq = a[p, q]
            app = a[p, p]
            aqq = a[q, q]
            g = 100.0 * np.abs(apq)
            drop = (np.abs(app) + g == np.abs(app)) & (np.abs(aqq) + g == np.abs(aqq)) \
                if sweep >= 4 else np.zeros(len(p), dtype=bool)
            active = (np.abs(apq) > thresh) & ~drop
            if drop.any():
                a[p[drop], q[drop]] = 0.0
                a[q[drop], p[drop]] = 0.0
            if not active.any():
                continue
            p = p[active]
            q = q[active]
            apq = apq[active]
            h = aqq[active] - app[active]
            t = np.empty_like(apq)
            small = np.abs(h) + g[active] == np.abs(h)
            t[small] = apq[small] / h[small]
            theta = 0.5 * h[~small] / apq[~small]
            tns = 1.0 / (np.abs(theta) + np.sqrt(1.0 + theta * theta))
            t[~small] = np.where(theta < 0.0, -tns, tns)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c

            # two-sided rotation, rows then columns (disjoint pairs)
            ap = a[p, :].copy()
            aq = a[q, :].copy()
            a[p, :] = c[:, None] * ap - s[:, None] * aq
            a[q, :] = s[:, None] * ap + c[:, None] * aq
            ap = a[:, p].copy()
            aq = a[:, q].copy()
            a[:, p] = c[None, :] * ap - s[None, :] * aq
            a[:, q] = s[None, :] * ap + c[None, :] * aq
            a[p, q] = 0.0
            a[q, p] = 0.0

            vp = v[:, p].copy()
            vq = v[:, q].copy()
            v[:, p] = c[None, :] * vp - s[None, :] * vq
            v[:, q] = s[None, :] * vp + c[None, :] * vq

    off = np.sum(np.abs(a[iupper]))
    if off <= 1e-14 * fro:
        return max_sweeps
    return -1
