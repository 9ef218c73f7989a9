"""Compiled inner loops for the pivot chain and its samplers.

The chain state is a point array plus an open-addressing hash table of
occupied sites (linear probing, tombstone deletion).  A pivot attempt
walks the moving side outward from the pivot site and looks each
transformed site up in the table; rejections therefore terminate early,
and accepted moves cost O(moving side).

The simulated chain is always the standard tail-pivot chain (uniform
pivot site in 0..N-1, uniform non-identity lattice symmetry applied to
the part of the walk after the site).  For the free ensemble the update
is applied to whichever side is shorter: transforming the head by the
inverse element yields the same walk up to a global symmetry, which is
accumulated in a register (meta[2]) and folded back into observables.
For the pinned ensembles (half-plane, middle bond) the anchored side is
fixed and the register stays at the identity.

Ensemble codes: 0 = free, 1 = upper half-plane (origin pinned),
2 = middle bond pinned at (0,0)-(0,1).
"""

import numpy as np
from numba import njit

FREE, HALFPLANE, MIDBOND = 0, 1, 2

# 8 point-group elements, row-major 2x2 entries (a, b, c, d); index 0 identity.
SYMS = np.array(
    [
        [1, 0, 0, 1],
        [0, -1, 1, 0],
        [-1, 0, 0, -1],
        [0, 1, -1, 0],
        [1, 0, 0, -1],
        [-1, 0, 0, 1],
        [0, 1, 1, 0],
        [0, -1, -1, 0],
    ],
    dtype=np.int64,
)


def _build_group_tables():
    mats = [np.array([[r[0], r[1]], [r[2], r[3]]]) for r in SYMS]
    comp = np.empty((8, 8), dtype=np.int64)
    inv = np.empty(8, dtype=np.int64)
    for i, mi in enumerate(mats):
        for j, mj in enumerate(mats):
            prod = mi @ mj
            for k, mk in enumerate(mats):
                if np.array_equal(prod, mk):
                    comp[i, j] = k
            if comp[i, j] == 0 and np.array_equal(prod, np.eye(2, dtype=np.int64)):
                inv[i] = j
    return comp, inv


COMP, INV = _build_group_tables()

_MIX = np.int64(-7046029254386353131)  # 0x9E3779B97F4A7C15 as signed 64-bit

# outcome codes for cut-curve samples
CC_ACCEPT, CC_ZERO, CC_MULTI, CC_DEGEN = 0, 1, 2, 3

_GEOM_TOL = 1e-9


@njit(cache=True, inline="always")
def _key(x, y):
    return ((x & 0x7FFFFFFF) << 31) ^ (y & 0x7FFFFFFF)


@njit(cache=True, inline="always")
def _slot(k, mask):
    h = k * _MIX
    return (h ^ (h >> 31)) & mask


# The table interleaves key/index pairs (slot h -> table[2h], table[2h+1])
# so a probe touches a single cache line; index -1 marks an empty slot and
# -2 a tombstone.


@njit(cache=True)
def _ht_find(table, mask, k):
    h = _slot(k, mask)
    while True:
        v = table[h + h + 1]
        if v == -1:
            return -1
        if v != -2 and table[h + h] == k:
            return v
        h = (h + 1) & mask


@njit(cache=True)
def _ht_insert(table, mask, k, i):
    h = _slot(k, mask)
    while table[h + h + 1] >= 0:
        h = (h + 1) & mask
    reused = table[h + h + 1] == -2
    table[h + h] = k
    table[h + h + 1] = i
    return reused


@njit(cache=True)
def _ht_delete(table, mask, k):
    h = _slot(k, mask)
    while True:
        v = table[h + h + 1]
        if v == -1:
            return
        if v != -2 and table[h + h] == k:
            table[h + h + 1] = -2
            return
        h = (h + 1) & mask


@njit(cache=True)
def _rebuild(pts, table, meta):
    table[1::2] = -1
    mask = meta[0]
    for j in range(pts.shape[0]):
        _ht_insert(table, mask, _key(pts[j, 0], pts[j, 1]), j)
    meta[1] = 0


@njit(cache=True)
def _recenter(pts, table, meta):
    # translation gauge only; keeps coordinates inside the key packing range
    x0 = pts[0, 0]
    y0 = pts[0, 1]
    for j in range(pts.shape[0]):
        pts[j, 0] -= x0
        pts[j, 1] -= y0
    _rebuild(pts, table, meta)


@njit(cache=True)
def _attempt(pts, table, meta, scratch, ensemble):
    """One tail-pivot attempt; returns 1 on accept, 0 on reject."""
    n = pts.shape[0] - 1  # number of steps
    mask = meta[0]
    s = 1 + np.random.randint(7)  # non-identity symmetry

    head_moves = False
    if ensemble == FREE:
        i = np.random.randint(n)  # tail-pivot site 0..n-1
        if n - i <= i:
            mlo, mhi = i + 1, n
        else:
            # same walk modulo a global symmetry; head side is cheaper
            head_moves = True
            mlo, mhi = 0, i - 1
    elif ensemble == HALFPLANE:
        i = np.random.randint(n)
        mlo, mhi = i + 1, n
    else:  # MIDBOND: each half is an anchored tail-pivot chain
        i = 1 + np.random.randint(n - 1)
        mid = n // 2
        if i <= mid:
            head_moves = True
            mlo, mhi = 0, i - 1
        else:
            mlo, mhi = i + 1, n

    g = INV[s] if (head_moves and ensemble == FREE) else s
    a = SYMS[g, 0]
    b = SYMS[g, 1]
    c = SYMS[g, 2]
    d = SYMS[g, 3]
    px = pts[i, 0]
    py = pts[i, 1]

    # iterate outward from the pivot so collisions are found early
    if head_moves:
        j0, j1, dj = i - 1, -1, -1
    else:
        j0, j1, dj = i + 1, n + 1, 1

    j = j0
    while j != j1:
        dx = pts[j, 0] - px
        dy = pts[j, 1] - py
        qx = px + a * dx + b * dy
        qy = py + c * dx + d * dy
        if ensemble == HALFPLANE and qy < 0:
            return 0
        f = _ht_find(table, mask, _key(qx, qy))
        if f >= 0 and (f < mlo or f > mhi):
            return 0
        scratch[j, 0] = qx
        scratch[j, 1] = qy
        j += dj

    # accept: splice the transformed side into the table
    for j in range(mlo, mhi + 1):
        _ht_delete(table, mask, _key(pts[j, 0], pts[j, 1]))
    tombs = mhi - mlo + 1
    for j in range(mlo, mhi + 1):
        pts[j, 0] = scratch[j, 0]
        pts[j, 1] = scratch[j, 1]
        if _ht_insert(table, mask, _key(pts[j, 0], pts[j, 1]), j):
            tombs -= 1
    meta[1] += tombs
    if meta[1] > (mask + 1) // 4:
        _rebuild(pts, table, meta)
    if head_moves and ensemble == FREE:
        meta[2] = COMP[meta[2], s]
    return 1


@njit(cache=True)
def seed_rng(seed):
    np.random.seed(seed)


@njit(cache=True)
def run_chain(pts, table, meta, scratch, n_attempts, ensemble, seed):
    """Advance the chain by n_attempts pivots; returns the accept count."""
    if seed >= 0:
        np.random.seed(seed)
    acc = 0
    for _ in range(n_attempts):
        acc += _attempt(pts, table, meta, scratch, ensemble)
    if ensemble == FREE and (abs(pts[0, 0]) > 1 << 28 or abs(pts[0, 1]) > 1 << 28):
        _recenter(pts, table, meta)
    return acc


@njit(cache=True)
def run_occupancy(pts, table, meta, scratch, n_attempts, record_stride,
                  ensemble, code_to_index, counts, seed):
    """Record state occupancy every record_stride attempts.

    States are encoded as base-4 sequences of the walk's actual steps
    (global register applied); code_to_index maps the code to an index
    from the exact enumerator, with unknown codes mapped to the trailing
    overflow slot of counts.  Returns the accept count.
    """
    np.random.seed(seed)
    n = pts.shape[0] - 1
    acc = 0
    for t in range(n_attempts):
        acc += _attempt(pts, table, meta, scratch, ensemble)
        if (t + 1) % record_stride == 0:
            sg = meta[2]
            a = SYMS[sg, 0]
            b = SYMS[sg, 1]
            c = SYMS[sg, 2]
            d = SYMS[sg, 3]
            code = 0
            for j in range(n):
                dx = pts[j + 1, 0] - pts[j, 0]
                dy = pts[j + 1, 1] - pts[j, 1]
                sx = a * dx + b * dy
                sy = c * dx + d * dy
                if sx == 1:
                    cstep = 0
                elif sx == -1:
                    cstep = 1
                elif sy == 1:
                    cstep = 2
                else:
                    cstep = 3
                code = code * 4 + cstep
            counts[code_to_index[code]] += 1
    return acc


@njit(cache=True)
def sample_line_survival(pts, table, meta, scratch, ensemble,
                         n_samples, stride, sin_t, cos_t, n_batches,
                         success, seed):
    """Correction-kernel sampler for p^v_1 (free) and p^v_2 (midbond).

    For every retained walk and every angle on the grid, draws a fresh
    offset l ~ U[0,1), builds the line through (0, l), and tests the
    crossing condition: midbond walks must cross exactly once and at the
    middle bond, free walks must not cross at all.  Successes accumulate
    into success[batch, theta].  Returns (accepts, degenerate redraws).
    """
    np.random.seed(seed)
    n = pts.shape[0] - 1
    nt = sin_t.shape[0]
    mid = n // 2
    per_batch = n_samples // n_batches
    acc = 0
    redraws = 0
    for snum in range(n_samples):
        for _ in range(stride):
            acc += _attempt(pts, table, meta, scratch, ensemble)
        if ensemble == FREE and (abs(pts[0, 0]) > 1 << 28 or abs(pts[0, 1]) > 1 << 28):
            _recenter(pts, table, meta)
        batch = min(snum // per_batch, n_batches - 1)
        x0 = pts[0, 0]
        y0 = pts[0, 1]
        sg = meta[2]
        sa = SYMS[sg, 0]
        sb = SYMS[sg, 1]
        sc = SYMS[sg, 2]
        sd = SYMS[sg, 3]
        for t in range(nt):
            st = sin_t[t]
            ct = cos_t[t]
            ok = False
            for _retry in range(64):
                l = np.random.random()
                degen = False
                good = True
                if ensemble == MIDBOND:
                    # absolute coordinates; middle bond always crosses
                    dprev = -st * pts[0, 0] + ct * (pts[0, 1] - l)
                    if abs(dprev) <= _GEOM_TOL:
                        degen = True
                    else:
                        for j in range(1, n + 1):
                            dcur = -st * pts[j, 0] + ct * (pts[j, 1] - l)
                            if abs(dcur) <= _GEOM_TOL:
                                degen = True
                                break
                            if dprev * dcur < 0.0 and j - 1 != mid:
                                good = False
                                break
                            dprev = dcur
                else:
                    # free walk from the origin; pull the line normal back
                    # through the global register (sigma^T n)
                    mx = -sa * st + sc * ct
                    my = -sb * st + sd * ct
                    dprev = -ct * l
                    if abs(dprev) <= _GEOM_TOL:
                        degen = True
                    else:
                        for j in range(1, n + 1):
                            dcur = (mx * (pts[j, 0] - x0)
                                    + my * (pts[j, 1] - y0) - ct * l)
                            if abs(dcur) <= _GEOM_TOL:
                                degen = True
                                break
                            if dprev * dcur < 0.0:
                                good = False
                                break
                            dprev = dcur
                if degen:
                    redraws += 1
                    continue
                ok = good
                break
            if ok:
                success[batch, t] += 1
    return acc, redraws


@njit(cache=True)
def sample_cutcurve(pts, table, meta, scratch, ensemble,
                    n_samples, stride, r_lat, upper_only,
                    out_angle, out_orient, out_code, seed):
    """Sample crossing counts of the circle of radius r_lat (lattice units).

    The circle is centered at the walk start.  For upper_only (semicircle)
    geometries only intersection points with y > 0 count; an intersection
    at y ~ 0 flags the sample degenerate.  Per sample records outcome code
    (CC_*), the crossing polar angle in degrees and the bond orientation
    (0 horizontal, 1 vertical) when the count is exactly one.
    Returns the pivot accept count.
    """
    np.random.seed(seed)
    n = pts.shape[0] - 1
    r2 = r_lat * r_lat
    acc = 0
    for snum in range(n_samples):
        for _ in range(stride):
            acc += _attempt(pts, table, meta, scratch, ensemble)
        if ensemble == FREE and (abs(pts[0, 0]) > 1 << 28 or abs(pts[0, 1]) > 1 << 28):
            _recenter(pts, table, meta)
        x0 = pts[0, 0]
        y0 = pts[0, 1]
        sg = meta[2]
        sa = SYMS[sg, 0]
        sb = SYMS[sg, 1]
        sc = SYMS[sg, 2]
        sd = SYMS[sg, 3]
        count = 0
        ang = -1.0
        orient = 0
        degen = False
        ax = 0.0
        ay = 0.0
        a2 = 0.0
        for j in range(n + 1):
            bx = float(pts[j, 0] - x0)
            by = float(pts[j, 1] - y0)
            b2 = bx * bx + by * by
            if j > 0:
                da = a2 - r2
                db = b2 - r2
                if abs(da) <= _GEOM_TOL or abs(db) <= _GEOM_TOL:
                    degen = True
                    break
                dx = bx - ax
                dy = by - ay
                if da * db < 0.0:
                    # one transversal crossing
                    pd = ax * dx + ay * dy
                    disc = pd * pd - da
                    rt = np.sqrt(disc)
                    tcr = -pd + rt
                    if tcr < 0.0 or tcr > 1.0:
                        tcr = -pd - rt
                    ix = ax + tcr * dx
                    iy = ay + tcr * dy
                    # map back through the global register
                    wx = sa * ix + sb * iy
                    wy = sc * ix + sd * iy
                    if upper_only and wy <= _GEOM_TOL:
                        degen = True
                        break
                    count += 1
                    if count == 1:
                        ang = np.degrees(np.arctan2(wy, wx))
                        if ang < 0.0:
                            ang += 360.0
                        orient = 1 if (sa * dx + sb * dy) == 0.0 else 0
                    else:
                        break
                elif da > 0.0 and db > 0.0:
                    # both endpoints outside: possible near-tangent chord
                    pd = ax * dx + ay * dy
                    tstar = -pd
                    if 0.0 < tstar < 1.0:
                        fmin = a2 - pd * pd
                        if abs(fmin - r2) <= _GEOM_TOL:
                            degen = True
                            break
                        if fmin < r2:
                            iy = ay + tstar * dy
                            wy = sc * (ax + tstar * dx) + sd * iy
                            if (not upper_only) or wy > _GEOM_TOL:
                                count += 2
                                break
            ax = bx
            ay = by
            a2 = b2
        if degen:
            out_code[snum] = CC_DEGEN
            out_angle[snum] = np.nan
            out_orient[snum] = -1
        elif count == 1:
            out_code[snum] = CC_ACCEPT
            out_angle[snum] = ang
            out_orient[snum] = orient
        else:
            out_code[snum] = CC_ZERO if count == 0 else CC_MULTI
            out_angle[snum] = np.nan
            out_orient[snum] = -1
    return acc


@njit(cache=True)
def end_to_end_samples(pts, table, meta, scratch, ensemble,
                       n_samples, stride, out_r2, seed):
    """Squared end-to-end distance every stride attempts."""
    np.random.seed(seed)
    n = pts.shape[0] - 1
    acc = 0
    for snum in range(n_samples):
        for _ in range(stride):
            acc += _attempt(pts, table, meta, scratch, ensemble)
        dx = pts[n, 0] - pts[0, 0]
        dy = pts[n, 1] - pts[0, 1]
        out_r2[snum] = float(dx * dx + dy * dy)
    return acc


@njit(cache=True)
def run_naive_chain(pts, scratch, table, meta, n_attempts, ensemble, seed):
    """Baseline chain: full from-scratch occupancy check every attempt.

    Statistically identical to run_chain (same tail-pivot moves, always
    applied to the tail); kept compiled so the >=10x speedup of the
    incremental chain is measured like for like.
    """
    np.random.seed(seed)
    n = pts.shape[0] - 1
    mask = meta[0]
    acc = 0
    for _ in range(n_attempts):
        s = 1 + np.random.randint(7)
        if ensemble == MIDBOND:
            i = 1 + np.random.randint(n - 1)
            mid = n // 2
            if i <= mid:
                mlo, mhi = 0, i - 1
            else:
                mlo, mhi = i + 1, n
        else:
            i = np.random.randint(n)
            mlo, mhi = i + 1, n
        a = SYMS[s, 0]
        b = SYMS[s, 1]
        c = SYMS[s, 2]
        d = SYMS[s, 3]
        px = pts[i, 0]
        py = pts[i, 1]
        # rebuild the fixed-side table from scratch
        table[1::2] = -1
        for j in range(n + 1):
            if j < mlo or j > mhi:
                _ht_insert(table, mask, _key(pts[j, 0], pts[j, 1]), j)
        ok = True
        for j in range(mlo, mhi + 1):
            dx = pts[j, 0] - px
            dy = pts[j, 1] - py
            qx = px + a * dx + b * dy
            qy = py + c * dx + d * dy
            scratch[j, 0] = qx
            scratch[j, 1] = qy
            if ensemble == HALFPLANE and qy < 0:
                ok = False
            if _ht_find(table, mask, _key(qx, qy)) >= 0:
                ok = False
        if ok:
            for j in range(mlo, mhi + 1):
                pts[j, 0] = scratch[j, 0]
                pts[j, 1] = scratch[j, 1]
            acc += 1
    return acc


@njit(cache=True)
def sample_lerw_exits(site_index, ox, oy, n_samples, edge_counts, seed):
    """Loop-erased random walk exit edges on a finite domain.

    site_index is a 2D grid (-1 marks exterior sites); the walk starts at
    grid cell (ox, oy) which must be interior.  The loop-erased path is
    maintained incrementally (chronological erasure); the recorded edge is
    (last interior site of the erased path, step direction).
    edge_counts has shape (n_sites, 4) with directions E,W,N,S.
    """
    np.random.seed(seed)
    w = site_index.shape[0]
    h = site_index.shape[1]
    n_sites = edge_counts.shape[0]
    stack_x = np.empty(n_sites + 1, dtype=np.int64)
    stack_y = np.empty(n_sites + 1, dtype=np.int64)
    pos_in = np.full((w, h), -1, dtype=np.int64)
    dxs = np.array([1, -1, 0, 0], dtype=np.int64)
    dys = np.array([0, 0, 1, -1], dtype=np.int64)
    for _ in range(n_samples):
        top = 0
        stack_x[0] = ox
        stack_y[0] = oy
        pos_in[ox, oy] = 0
        while True:
            step = np.random.randint(4)
            cx = stack_x[top]
            cy = stack_y[top]
            nx = cx + dxs[step]
            ny = cy + dys[step]
            if nx < 0 or nx >= w or ny < 0 or ny >= h or site_index[nx, ny] < 0:
                # exit: record edge from the erased-path head
                edge_counts[site_index[cx, cy], step] += 1
                break
            p = pos_in[nx, ny]
            if p >= 0:
                # revisit: erase the loop back to the earlier occurrence
                for k in range(p + 1, top + 1):
                    pos_in[stack_x[k], stack_y[k]] = -1
                top = p
            else:
                top += 1
                stack_x[top] = nx
                stack_y[top] = ny
                pos_in[nx, ny] = top
        for k in range(top + 1):
            pos_in[stack_x[k], stack_y[k]] = -1
