"""Compiled inner loops for graph generation.

The per-pair randomness is a splitmix64-style hash of (seed, min(i,j),
max(i,j)) mapped to a uniform in [0, 1).  Both shortcut samplers below
evaluate exactly the same hash and the same float expressions, which is
what makes the accelerated sampler reproduce the reference sampler's
edge set bit-for-bit rather than merely in distribution.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U64 = np.uint64

_K1 = U64(0x9E3779B97F4A7C15)
_K2 = U64(0xC2B2AE3D27D4EB4F)
_M1 = U64(0xBF58476D1CE4E5B9)
_M2 = U64(0x94D049BB133111EB)
_S30 = U64(30)
_S27 = U64(27)
_S31 = U64(31)
_S11 = U64(11)
_INV53 = 2.0 ** -53


@njit(cache=True, inline="always")
def _fin(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True, inline="always")
def _node_hash(seed, i):
    return _fin(seed ^ (U64(i) * _K1))


@njit(cache=True, inline="always")
def _combine(hi, j):
    z = _fin(hi ^ (U64(j) * _K2))
    return np.float64(z >> _S11) * _INV53


@njit(cache=True)
def pair_uniform(seed, i, j):
    """Uniform in [0, 1) for the unordered pair {i, j}, fixed by `seed`."""
    a, b = (i, j) if i < j else (j, i)
    return _combine(_node_hash(U64(seed), a), b)


def pair_uniform_array(seed: int, i, j):
    """Vectorised numpy twin of :func:`pair_uniform` (bit-identical)."""
    i = np.asarray(i, dtype=np.uint64)
    j = np.asarray(j, dtype=np.uint64)
    a = np.minimum(i, j)
    b = np.maximum(i, j)

    def fin(z):
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
        return z ^ (z >> _S31)

    z = fin(fin(U64(seed) ^ (a * _K1)) ^ (b * _K2))
    return (z >> _S11).astype(np.float64) * _INV53


@njit(cache=True, inline="always")
def _wrap_dist(L, ax, ay, bx, by):
    dx = abs(ax - bx)
    if dx > L - dx:
        dx = L - dx
    dy = abs(ay - by)
    if dy > L - dy:
        dy = L - dy
    return np.sqrt(dx * dx + dy * dy)


@njit(cache=True)
def node_hashes(seed, n):
    out = np.empty(n, dtype=np.uint64)
    s = U64(seed)
    for i in range(n):
        out[i] = _node_hash(s, i)
    return out


@njit(cache=True)
def local_edges_kernel(posx, posy, cell_of, order, start, cpa, L, r_n, eu, ev):
    """Collect pairs closer than r_n by scanning 3x3 wrapped cell blocks.

    Writes up to len(eu) edges (u < v); returns the true edge count so the
    caller can retry with a larger buffer on overflow.
    """
    n = posx.shape[0]
    cap = eu.shape[0]
    cnt = 0
    cells = np.empty(9, dtype=np.int64)
    for i in range(n):
        ci = cell_of[i]
        ix = ci % cpa
        iy = ci // cpa
        ncells = 0
        for dy in range(-1, 2):
            for dx in range(-1, 2):
                c = ((iy + dy) % cpa) * cpa + ((ix + dx) % cpa)
                dup = False
                for k in range(ncells):
                    if cells[k] == c:
                        dup = True
                        break
                if not dup:
                    cells[ncells] = c
                    ncells += 1
        xi = posx[i]
        yi = posy[i]
        for k in range(ncells):
            c = cells[k]
            for jj in range(start[c], start[c + 1]):
                j = order[jj]
                if j <= i:
                    continue
                d = _wrap_dist(L, xi, yi, posx[j], posy[j])
                if 0.0 < d < r_n:
                    if cnt < cap:
                        eu[cnt] = i
                        ev[cnt] = j
                    cnt += 1
    return cnt


@njit(cache=True)
def shortcuts_exact_kernel(posx, posy, L, r_n, a_n, alpha, seed, eu, ev):
    """Reference O(N^2) shortcut sampler: every unordered pair is tested."""
    n = posx.shape[0]
    cap = eu.shape[0]
    cnt = 0
    hid = node_hashes(seed, n)
    for i in range(n):
        hi = hid[i]
        xi = posx[i]
        yi = posy[i]
        for j in range(i + 1, n):
            d = _wrap_dist(L, xi, yi, posx[j], posy[j])
            if d <= r_n:
                continue
            p = a_n * d ** (-alpha)
            if p > 1.0:
                p = 1.0
            if _combine(hi, j) < p:
                if cnt < cap:
                    eu[cnt] = i
                    ev[cnt] = j
                cnt += 1
    return cnt


@njit(cache=True)
def shortcuts_fast_kernel(posx, posy, order, start, cpa, cell_side,
                          L, r_n, a_n, alpha, seed, eu, ev):
    """Cell-pair accelerated sampler, bit-identical to the exact one.

    For each unordered cell pair a distance lower bound d_min gives a
    probability ceiling p_max; candidate pairs are first screened with the
    cheap hash test u < p_max and only survivors pay for a distance and an
    exact-probability test.  Since u < p_true implies u < p_max, the
    accepted set equals the reference sampler's.
    """
    cap = eu.shape[0]
    cnt = 0
    n = posx.shape[0]
    hid = node_hashes(seed, n)
    ncell = cpa * cpa
    for c1 in range(ncell):
        x1 = c1 % cpa
        y1 = c1 // cpa
        s1 = start[c1]
        e1 = start[c1 + 1]
        if e1 == s1:
            continue
        for c2 in range(c1, ncell):
            s2 = start[c2]
            e2 = start[c2 + 1]
            if e2 == s2:
                continue
            kx = abs(c2 % cpa - x1)
            if cpa - kx < kx:
                kx = cpa - kx
            ky = abs(c2 // cpa - y1)
            if cpa - ky < ky:
                ky = cpa - ky
            gx = (kx - 1) * cell_side if kx > 0 else 0.0
            gy = (ky - 1) * cell_side if ky > 0 else 0.0
            # shave a relative epsilon so float rounding can never push the
            # bound above a true pair distance
            d_min = np.sqrt(gx * gx + gy * gy) * (1.0 - 1e-12)
            d_eff = d_min if d_min > r_n else r_n
            p_max = a_n * d_eff ** (-alpha)
            if p_max > 1.0:
                p_max = 1.0
            if c1 == c2:
                for ii in range(s1, e1):
                    i = order[ii]
                    hi = hid[i]
                    xi = posx[i]
                    yi = posy[i]
                    for jj in range(ii + 1, e1):
                        j = order[jj]
                        u = _combine(hi, j)
                        if u >= p_max:
                            continue
                        d = _wrap_dist(L, xi, yi, posx[j], posy[j])
                        if d <= r_n:
                            continue
                        p = a_n * d ** (-alpha)
                        if p > 1.0:
                            p = 1.0
                        if u < p:
                            if cnt < cap:
                                eu[cnt] = i
                                ev[cnt] = j
                            cnt += 1
            else:
                for ii in range(s1, e1):
                    i = order[ii]
                    xi = posx[i]
                    yi = posy[i]
                    for jj in range(s2, e2):
                        j = order[jj]
                        if i < j:
                            a, b = i, j
                        else:
                            a, b = j, i
                        u = _combine(hid[a], b)
                        if u >= p_max:
                            continue
                        d = _wrap_dist(L, xi, yi, posx[j], posy[j])
                        if d <= r_n:
                            continue
                        p = a_n * d ** (-alpha)
                        if p > 1.0:
                            p = 1.0
                        if u < p:
                            if cnt < cap:
                                eu[cnt] = a
                                ev[cnt] = b
                            cnt += 1
    return cnt


@njit(cache=True)
def csr_from_edges(n, eu, ev):
    """Symmetric CSR adjacency (sorted neighbour lists) from u < v edges."""
    m = eu.shape[0]
    deg = np.zeros(n + 1, dtype=np.int64)
    for k in range(m):
        deg[eu[k] + 1] += 1
        deg[ev[k] + 1] += 1
    indptr = np.cumsum(deg)
    indices = np.empty(2 * m, dtype=np.int32)
    cursor = indptr[:-1].copy()
    for k in range(m):
        u = eu[k]
        v = ev[k]
        indices[cursor[u]] = v
        cursor[u] += 1
        indices[cursor[v]] = u
        cursor[v] += 1
    for i in range(n):
        seg = indices[indptr[i]:indptr[i + 1]]
        seg.sort()
    return indptr, indices
