"""Pure-Python kernels.

This module is the fallback used when the compiled ``_ckernels`` extension is
unavailable. Every routine here is mirrored operation for operation in
``_ckernels.pyx`` so that both backends produce bit-identical doubles; keep the
two files in sync when changing arithmetic.

Triangles travel as flat 9-tuples ``(ax, ay, az, bx, by, bz, cx, cy, cz)``.
"""
import math

import numpy as np

BACKEND = "python"

EXACT, U1, U2, U3, U4, ZHENG = 0, 1, 2, 3, 4, 5

# sin^2 of the smallest angle below which a triangle is treated as a segment
DEGENERATE_SIN2 = 1e-30
# |n1 x n2| below which two planes are considered parallel
PARALLEL_TOL = 1e-9
# relative separation below which two footpoints coincide
COINCIDENT_TOL = 1e-14
# signed distances within this fraction of max(segment length, |coords|) count as zero
ON_PLANE_TOL = 1e-14
# slack on box pruning, relative to the coordinate magnitude
PRUNE_TOL = 1e-12
# a footpoint within this fraction of B's extent of a face lies on that face
SHARED_FACE_TOL = 1e-14
# rounding allowance removed from a distance before it may raise the lower bound
LOWER_TOL = 1e-14

_INF = math.inf


# ---------------------------------------------------------------------------
# point / segment / triangle
# ---------------------------------------------------------------------------

def closest_on_segment(px, py, pz, ax, ay, az, bx, by, bz):
    abx = bx - ax
    aby = by - ay
    abz = bz - az
    ab2 = abx * abx + aby * aby + abz * abz
    if ab2 == 0.0:
        t = 0.0
    else:
        t = ((px - ax) * abx + (py - ay) * aby + (pz - az) * abz) / ab2
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    qx = ax + t * abx
    qy = ay + t * aby
    qz = az + t * abz
    dx = px - qx
    dy = py - qy
    dz = pz - qz
    return qx, qy, qz, dx * dx + dy * dy + dz * dz


def _closest_on_edges(px, py, pz, ax, ay, az, bx, by, bz, cx, cy, cz):
    best = closest_on_segment(px, py, pz, ax, ay, az, bx, by, bz)
    cand = closest_on_segment(px, py, pz, bx, by, bz, cx, cy, cz)
    if cand[3] < best[3]:
        best = cand
    cand = closest_on_segment(px, py, pz, cx, cy, cz, ax, ay, az)
    if cand[3] < best[3]:
        best = cand
    return best


def closest_on_triangle(px, py, pz, ax, ay, az, bx, by, bz, cx, cy, cz):
    """Closest point of triangle ``abc`` to ``p``; returns ``(qx, qy, qz, d2)``."""
    abx = bx - ax
    aby = by - ay
    abz = bz - az
    acx = cx - ax
    acy = cy - ay
    acz = cz - az
    nx = aby * acz - abz * acy
    ny = abz * acx - abx * acz
    nz = abx * acy - aby * acx
    n2 = nx * nx + ny * ny + nz * nz
    ab2 = abx * abx + aby * aby + abz * abz
    ac2 = acx * acx + acy * acy + acz * acz
    if n2 <= DEGENERATE_SIN2 * ab2 * ac2:
        return _closest_on_edges(px, py, pz, ax, ay, az, bx, by, bz, cx, cy, cz)

    apx = px - ax
    apy = py - ay
    apz = pz - az
    d1 = abx * apx + aby * apy + abz * apz
    d2 = acx * apx + acy * apy + acz * apz
    if d1 <= 0.0 and d2 <= 0.0:
        dx = px - ax
        dy = py - ay
        dz = pz - az
        return ax, ay, az, dx * dx + dy * dy + dz * dz

    bpx = px - bx
    bpy = py - by
    bpz = pz - bz
    d3 = abx * bpx + aby * bpy + abz * bpz
    d4 = acx * bpx + acy * bpy + acz * bpz
    if d3 >= 0.0 and d4 <= d3:
        dx = px - bx
        dy = py - by
        dz = pz - bz
        return bx, by, bz, dx * dx + dy * dy + dz * dz

    vc = d1 * d4 - d3 * d2
    if vc <= 0.0 and d1 >= 0.0 and d3 <= 0.0:
        v = d1 / (d1 - d3)
        qx = ax + v * abx
        qy = ay + v * aby
        qz = az + v * abz
        dx = px - qx
        dy = py - qy
        dz = pz - qz
        return qx, qy, qz, dx * dx + dy * dy + dz * dz

    cpx = px - cx
    cpy = py - cy
    cpz = pz - cz
    d5 = abx * cpx + aby * cpy + abz * cpz
    d6 = acx * cpx + acy * cpy + acz * cpz
    if d6 >= 0.0 and d5 <= d6:
        dx = px - cx
        dy = py - cy
        dz = pz - cz
        return cx, cy, cz, dx * dx + dy * dy + dz * dz

    vb = d5 * d2 - d1 * d6
    if vb <= 0.0 and d2 >= 0.0 and d6 <= 0.0:
        w = d2 / (d2 - d6)
        qx = ax + w * acx
        qy = ay + w * acy
        qz = az + w * acz
        dx = px - qx
        dy = py - qy
        dz = pz - qz
        return qx, qy, qz, dx * dx + dy * dy + dz * dz

    va = d3 * d6 - d5 * d4
    e43 = d4 - d3
    e56 = d5 - d6
    if va <= 0.0 and e43 >= 0.0 and e56 >= 0.0:
        w = e43 / (e43 + e56)
        qx = bx + w * (cx - bx)
        qy = by + w * (cy - by)
        qz = bz + w * (cz - bz)
        dx = px - qx
        dy = py - qy
        dz = pz - qz
        return qx, qy, qz, dx * dx + dy * dy + dz * dz

    s = va + vb + vc
    if not s > 0.0:
        return _closest_on_edges(px, py, pz, ax, ay, az, bx, by, bz, cx, cy, cz)
    inv = 1.0 / s
    v = vb * inv
    w = vc * inv
    if v < 0.0 or w < 0.0 or v + w > 1.0:
        return _closest_on_edges(px, py, pz, ax, ay, az, bx, by, bz, cx, cy, cz)
    qx = ax + abx * v + acx * w
    qy = ay + aby * v + acy * w
    qz = az + abz * v + acz * w
    dx = px - qx
    dy = py - qy
    dz = pz - qz
    return qx, qy, qz, dx * dx + dy * dy + dz * dz


def closest_point_on_triangle(p, a, b, c):
    """Tuple-level entry point shared by both backends: ``((qx, qy, qz), dist)``."""
    qx, qy, qz, d2 = closest_on_triangle(
        float(p[0]), float(p[1]), float(p[2]),
        float(a[0]), float(a[1]), float(a[2]),
        float(b[0]), float(b[1]), float(b[2]),
        float(c[0]), float(c[1]), float(c[2]),
    )
    return (qx, qy, qz), math.sqrt(d2)


def _dist(ax, ay, az, bx, by, bz):
    dx = ax - bx
    dy = ay - by
    dz = az - bz
    return math.sqrt(dx * dx + dy * dy + dz * dz)


def triangle_g(ax, ay, az, bx, by, bz, cx, cy, cz):
    """Covering radius: circumradius if acute, half the longest edge otherwise."""
    e1 = _dist(ax, ay, az, bx, by, bz)
    e2 = _dist(bx, by, bz, cx, cy, cz)
    e3 = _dist(cx, cy, cz, ax, ay, az)
    emax = e1
    if e2 > emax:
        emax = e2
    if e3 > emax:
        emax = e3
    abx = bx - ax
    aby = by - ay
    abz = bz - az
    acx = cx - ax
    acy = cy - ay
    acz = cz - az
    nx = aby * acz - abz * acy
    ny = abz * acx - abx * acz
    nz = abx * acy - aby * acx
    area = 0.5 * math.sqrt(nx * nx + ny * ny + nz * nz)
    if area == 0.0:
        return 0.5 * emax
    big_r = e1 * e2 * e3 / (4.0 * area)
    s = (e1 + e2 + e3) / 2.0
    r = area / s
    if s - r > 2.0 * big_r:
        return big_r
    return 0.5 * emax


# ---------------------------------------------------------------------------
# planes
# ---------------------------------------------------------------------------

def face_plane(t):
    """Supporting plane ``(nx, ny, nz, offset)`` of a 9-tuple triangle, or None."""
    ax, ay, az, bx, by, bz, cx, cy, cz = t
    abx = bx - ax
    aby = by - ay
    abz = bz - az
    acx = cx - ax
    acy = cy - ay
    acz = cz - az
    nx = aby * acz - abz * acy
    ny = abz * acx - abx * acz
    nz = abx * acy - aby * acx
    n2 = nx * nx + ny * ny + nz * nz
    ab2 = abx * abx + aby * aby + abz * abz
    ac2 = acx * acx + acy * acy + acz * acz
    if n2 <= DEGENERATE_SIN2 * ab2 * ac2:
        return None
    nn = math.sqrt(n2)
    nx = nx / nn
    ny = ny / nn
    nz = nz / nn
    return nx, ny, nz, -(nx * ax + ny * ay + nz * az)


def bisector_of_points(ax, ay, az, bx, by, bz):
    """Plane of points equidistant to ``a`` and ``b``, or None when they coincide."""
    nx = bx - ax
    ny = by - ay
    nz = bz - az
    nn = math.sqrt(nx * nx + ny * ny + nz * nz)
    mag = 1.0
    for c in (ax, ay, az, bx, by, bz):
        if abs(c) > mag:
            mag = abs(c)
    if nn < COINCIDENT_TOL * mag:
        return None
    nx = nx / nn
    ny = ny / nn
    nz = nz / nn
    mx = (ax + bx) * 0.5
    my = (ay + by) * 0.5
    mz = (az + bz) * 0.5
    return nx, ny, nz, -(nx * mx + ny * my + nz * mz)


def bisector_of_planes(p1, p2, hx, hy, hz):
    """Bisector of two planes through the dihedral wedge containing the hint."""
    n1x, n1y, n1z, o1 = p1
    n2x, n2y, n2z, o2 = p2
    cx = n1y * n2z - n1z * n2y
    cy = n1z * n2x - n1x * n2z
    cz = n1x * n2y - n1y * n2x
    if math.sqrt(cx * cx + cy * cy + cz * cz) < PARALLEL_TOL:
        return None
    s1 = n1x * hx + n1y * hy + n1z * hz + o1
    s2 = n2x * hx + n2y * hy + n2z * hz + o2
    if (s1 >= 0.0) == (s2 >= 0.0):
        nx = n1x - n2x
        ny = n1y - n2y
        nz = n1z - n2z
        o = o1 - o2
    else:
        nx = n1x + n2x
        ny = n1y + n2y
        nz = n1z + n2z
        o = o1 + o2
    nn = math.sqrt(nx * nx + ny * ny + nz * nz)
    return nx / nn, ny / nn, nz / nn, o / nn


def segment_plane(ax, ay, az, bx, by, bz, pl):
    """Intersection of segment ``ab`` with a plane: ``(t, x, y, z)`` or None."""
    nx, ny, nz, o = pl
    sa = nx * ax + ny * ay + nz * az + o
    sb = nx * bx + ny * by + nz * bz + o
    ztol = _dist(ax, ay, az, bx, by, bz)
    for c in (ax, ay, az, bx, by, bz):
        if abs(c) > ztol:
            ztol = abs(c)
    ztol = ON_PLANE_TOL * ztol
    if abs(sa) <= ztol:
        sa = 0.0
    if abs(sb) <= ztol:
        sb = 0.0
    if sa == 0.0:
        t = 0.0
    elif sb == 0.0:
        t = 1.0
    elif (sa > 0.0) != (sb > 0.0):
        t = sa / (sa - sb)
    else:
        return None
    return t, ax + t * (bx - ax), ay + t * (by - ay), az + t * (bz - az)


# ---------------------------------------------------------------------------
# per-mesh kernel: AABB traversal and the bound cascade
# ---------------------------------------------------------------------------

def _shares_edge(fa, fb):
    a0, a1, a2 = fa
    n = 0
    if a0 in fb:
        n += 1
    if a1 != a0 and a1 in fb:
        n += 1
    if a2 != a0 and a2 != a1 and a2 in fb:
        n += 1
    return n >= 2


class Kernel:
    """Closest-point queries and upper bounds against one triangle soup ``B``.

    Parameters mirror the flattened :class:`~trihausdorff.spatial.AabbTree`
    arrays; see that class for their meaning.
    """

    def __init__(self, tris, faces, node_lo, node_hi, node_left, node_right,
                 node_start, node_count, leaf_faces, extent):
        self.tris = [tuple(r) for r in np.asarray(tris, dtype=np.float64).tolist()]
        self.faces = [tuple(r) for r in np.asarray(faces, dtype=np.int64).tolist()]
        self.lo = [tuple(r) for r in np.asarray(node_lo, dtype=np.float64).tolist()]
        self.hi = [tuple(r) for r in np.asarray(node_hi, dtype=np.float64).tolist()]
        self.left = np.asarray(node_left, dtype=np.int64).tolist()
        self.right = np.asarray(node_right, dtype=np.int64).tolist()
        self.start = np.asarray(node_start, dtype=np.int64).tolist()
        self.count = np.asarray(node_count, dtype=np.int64).tolist()
        self.leaf_faces = np.asarray(leaf_faces, dtype=np.int64).tolist()
        self.extent = float(extent)
        self._planes = {}

    # -- queries -----------------------------------------------------------

    def _box_d2(self, n, px, py, pz):
        lx, ly, lz = self.lo[n]
        hx, hy, hz = self.hi[n]
        s = 0.0
        if px < lx:
            t = lx - px
            s += t * t
        elif px > hx:
            t = px - hx
            s += t * t
        if py < ly:
            t = ly - py
            s += t * t
        elif py > hy:
            t = py - hy
            s += t * t
        if pz < lz:
            t = lz - pz
            s += t * t
        elif pz > hz:
            t = pz - hz
            s += t * t
        return s

    def closest(self, px, py, pz):
        """Exact closest point on ``B``: ``(dist, qx, qy, qz, face)``."""
        px = float(px)
        py = float(py)
        pz = float(pz)
        mag = abs(px)
        if abs(py) > mag:
            mag = abs(py)
        if abs(pz) > mag:
            mag = abs(pz)
        tol = PRUNE_TOL * (self.extent + mag)
        tris = self.tris
        left = self.left
        best_d2 = _INF
        best_lim2 = _INF
        best_face = -1
        bqx = bqy = bqz = 0.0
        stack = [(0, self._box_d2(0, px, py, pz))]
        while stack:
            n, bd2 = stack.pop()
            if bd2 > best_lim2:
                continue
            ln = left[n]
            if ln < 0:
                s = self.start[n]
                for k in range(s, s + self.count[n]):
                    f = self.leaf_faces[k]
                    qx, qy, qz, d2 = closest_on_triangle(px, py, pz, *tris[f])
                    if d2 < best_d2 or (d2 == best_d2 and f < best_face):
                        best_d2 = d2
                        best_face = f
                        bqx = qx
                        bqy = qy
                        bqz = qz
                        bd = math.sqrt(d2) + tol
                        best_lim2 = bd * bd
            else:
                rn = self.right[n]
                dl = self._box_d2(ln, px, py, pz)
                dr = self._box_d2(rn, px, py, pz)
                if dl <= dr:
                    stack.append((rn, dr))
                    stack.append((ln, dl))
                else:
                    stack.append((ln, dl))
                    stack.append((rn, dr))
        return math.sqrt(best_d2), bqx, bqy, bqz, best_face

    def closest_linear(self, px, py, pz):
        """Linear scan over every face; lowest index wins ties."""
        px = float(px)
        py = float(py)
        pz = float(pz)
        best_d2 = _INF
        best_face = -1
        bqx = bqy = bqz = 0.0
        for f, t in enumerate(self.tris):
            qx, qy, qz, d2 = closest_on_triangle(px, py, pz, *t)
            if d2 < best_d2:
                best_d2 = d2
                best_face = f
                bqx = qx
                bqy = qy
                bqz = qz
        return math.sqrt(best_d2), bqx, bqy, bqz, best_face

    def closest_many(self, points):
        pts = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 3)
        n = pts.shape[0]
        dist = np.empty(n)
        foot = np.empty((n, 3))
        face = np.empty(n, dtype=np.int64)
        for i, (x, y, z) in enumerate(pts.tolist()):
            d, qx, qy, qz, f = self.closest(x, y, z)
            dist[i] = d
            foot[i, 0] = qx
            foot[i, 1] = qy
            foot[i, 2] = qz
            face[i] = f
        return dist, foot, face

    def max_distance(self, points):
        """Largest closest-point distance over a batch of points."""
        pts = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 3)
        best = 0.0
        for x, y, z in pts.tolist():
            d = self.closest(x, y, z)[0]
            if d > best:
                best = d
        return best

    # -- bound helpers -----------------------------------------------------

    def _face_dist(self, x, y, z, f):
        return math.sqrt(closest_on_triangle(x, y, z, *self.tris[f])[3])

    def adjacent(self, f1, f2):
        return _shares_edge(self.faces[f1], self.faces[f2])

    def _plane(self, f):
        try:
            return self._planes[f]
        except KeyError:
            pl = face_plane(self.tris[f])
            self._planes[f] = pl
            return pl

    # -- bounds ------------------------------------------------------------

    def exact(self, v, q, d, f):
        value = self._shared_face(q, d, f)
        return None if value < 0.0 else value

    def _shared_face(self, q, d, f):
        """``max_i d_i`` if one footpoint face holds all three footpoints, else -1.

        Ties at shared vertices and edges report the lowest face index, so the
        faces can differ while the footpoints still lie on a common face. A
        footpoint off that face by ``e`` adds ``e`` to its term.
        """
        if f[0] == f[1] and f[1] == f[2]:
            return max(d[0], max(d[1], d[2]))
        tol = SHARED_FACE_TOL * self.extent
        for k in range(3):
            s = f[k]
            if (k == 1 and s == f[0]) or (k == 2 and (s == f[0] or s == f[1])):
                continue
            value = 0.0
            for i in range(3):
                t = d[i]
                if f[i] != s:
                    e = self._face_dist(q[3 * i], q[3 * i + 1], q[3 * i + 2], s)
                    if e > tol:
                        value = -1.0
                        break
                    t = t + e
                if t > value:
                    value = t
            if value >= 0.0:
                return value
        return -1.0

    def u1(self, v, q, d, f):
        return u1(v, d)

    def u2(self, v, q, d, f):
        return triangle_g(*v) + max(d[0], max(d[1], d[2]))

    def u3(self, v, q, d, f):
        f0, f1, f2 = f
        if f0 == f1 and f1 != f2:
            lone = 2
        elif f0 == f2 and f0 != f1:
            lone = 1
        elif f1 == f2 and f0 != f1:
            lone = 0
        else:
            lone = -1
        if lone >= 0:
            k1 = (lone + 1) % 3
            k2 = (lone + 2) % 3
            s1 = f[lone]
            s2 = f[k1]
            if self.adjacent(s1, s2):
                return self._u3_case1(v, d, lone, k1, k2, s1, s2)
        return self._u3_case2(v, d, f)

    def _u3_case1(self, v, d, lone, k1, k2, s1, s2):
        x1 = v[3 * lone]
        y1 = v[3 * lone + 1]
        z1 = v[3 * lone + 2]
        x2 = v[3 * k1]
        y2 = v[3 * k1 + 1]
        z2 = v[3 * k1 + 2]
        x3 = v[3 * k2]
        y3 = v[3 * k2 + 1]
        z3 = v[3 * k2 + 2]
        split = False
        p1 = self._plane(s1)
        p2 = self._plane(s2)
        if p1 is not None and p2 is not None:
            bis = bisector_of_planes(p1, p2, x1, y1, z1)
            if bis is None:
                bis = self._crease_plane(s1, s2, p1)
            if bis is not None:
                h1 = segment_plane(x1, y1, z1, x2, y2, z2, bis)
                h2 = segment_plane(x1, y1, z1, x3, y3, z3, bis)
                if h1 is not None and h2 is not None:
                    split = True
                    b1x, b1y, b1z = h1[1], h1[2], h1[3]
                    b2x, b2y, b2z = h2[1], h2[2], h2[3]
        if not split:
            b1x = (x1 + x2) * 0.5
            b1y = (y1 + y2) * 0.5
            b1z = (z1 + z2) * 0.5
            b2x = (x1 + x3) * 0.5
            b2y = (y1 + y3) * 0.5
            b2z = (z1 + z3) * 0.5
        hr = d[lone]
        t = self._face_dist(b1x, b1y, b1z, s1)
        if t > hr:
            hr = t
        t = self._face_dist(b2x, b2y, b2z, s1)
        if t > hr:
            hr = t
        hq = d[k1]
        if d[k2] > hq:
            hq = d[k2]
        t = self._face_dist(b1x, b1y, b1z, s2)
        if t > hq:
            hq = t
        t = self._face_dist(b2x, b2y, b2z, s2)
        if t > hq:
            hq = t
        return hr if hr > hq else hq

    def _crease_plane(self, s1, s2, p1):
        # plane through the shared edge, normal to face s1; the limit of the
        # plane bisector as the two faces become coplanar
        fa = self.faces[s1]
        fb = self.faces[s2]
        i = j = -1
        for k in range(3):
            if fa[k] in fb:
                if i < 0:
                    i = k
                elif fa[k] != fa[i]:
                    j = k
                    break
        if j < 0:
            return None
        t = self.tris[s1]
        ax = t[3 * i]
        ay = t[3 * i + 1]
        az = t[3 * i + 2]
        ex = t[3 * j] - ax
        ey = t[3 * j + 1] - ay
        ez = t[3 * j + 2] - az
        n1x, n1y, n1z, _ = p1
        nx = n1y * ez - n1z * ey
        ny = n1z * ex - n1x * ez
        nz = n1x * ey - n1y * ex
        nn = math.sqrt(nx * nx + ny * ny + nz * nz)
        if not nn > 0.0:
            return None
        nx = nx / nn
        ny = ny / nn
        nz = nz / nn
        return nx, ny, nz, -(nx * ax + ny * ay + nz * az)

    def _u3_case2(self, v, d, f):
        x1, y1, z1, x2, y2, z2, x3, y3, z3 = v
        m1x = (x1 + x2) * 0.5
        m1y = (y1 + y2) * 0.5
        m1z = (z1 + z2) * 0.5
        m2x = (x2 + x3) * 0.5
        m2y = (y2 + y3) * 0.5
        m2z = (z2 + z3) * 0.5
        m3x = (x3 + x1) * 0.5
        m3y = (y3 + y1) * 0.5
        m3z = (z3 + z1) * 0.5
        bx = (x1 + x2 + x3) / 3.0
        by = (y1 + y2 + y3) / 3.0
        bz = (z1 + z2 + z3) / 3.0
        fd = self._face_dist
        f0, f1, f2 = f
        # quadrilaterals (v_i, next midpoint, barycenter, previous midpoint)
        part = d[0]
        for x, y, z in ((m1x, m1y, m1z), (bx, by, bz), (m3x, m3y, m3z)):
            t = fd(x, y, z, f0)
            if t > part:
                part = t
        if d[1] > part:
            part = d[1]
        for x, y, z in ((m2x, m2y, m2z), (bx, by, bz), (m1x, m1y, m1z)):
            t = fd(x, y, z, f1)
            if t > part:
                part = t
        if d[2] > part:
            part = d[2]
        for x, y, z in ((m3x, m3y, m3z), (bx, by, bz), (m2x, m2y, m2z)):
            t = fd(x, y, z, f2)
            if t > part:
                part = t
        best = part
        for i in range(3):
            fi = f[i]
            h = d[i]
            for j in range(3):
                if j != i:
                    t = fd(v[3 * j], v[3 * j + 1], v[3 * j + 2], fi)
                    if t > h:
                        h = t
            if h < best:
                best = h
        return best

    def u4(self, v, q, d, f):
        return u4(v, q)

    def zheng(self, v, q, d, f):
        bx = (v[0] + v[3] + v[6]) / 3.0
        by = (v[1] + v[4] + v[7]) / 3.0
        bz = (v[2] + v[5] + v[8]) / 3.0
        fb = self.closest(bx, by, bz)[4]
        fd = self._face_dist
        best = _INF
        for s in (f[0], f[1], f[2], fb):
            h = 0.0
            for j in range(3):
                if s == f[j]:
                    t = d[j]
                else:
                    t = fd(v[3 * j], v[3 * j + 1], v[3 * j + 2], s)
                if t > h:
                    h = t
            if h < best:
                best = h
        return best

    def bound(self, code, v, q, d, f):
        if code == U1:
            return self.u1(v, q, d, f)
        if code == U2:
            return self.u2(v, q, d, f)
        if code == U3:
            return self.u3(v, q, d, f)
        if code == U4:
            return self.u4(v, q, d, f)
        if code == ZHENG:
            return self.zheng(v, q, d, f)
        raise ValueError(f"unknown bound code {code}")

    def cascade(self, v, q, d, f, lower, order):
        """Lazy bound evaluation.

        Returns ``(value, code, exact, discard, n_evaluated)`` where ``code``
        is the bound that ended the cascade.
        """
        value = self._shared_face(q, d, f)
        if value >= 0.0:
            return value, EXACT, True, value < lower, 0
        best = _INF
        code = EXACT
        n = 0
        for code in order:
            n += 1
            u = self.bound(code, v, q, d, f)
            if u < lower:
                return u, code, False, True, n
            if u < best:
                best = u
        return best, code, False, False, n


    def refine(self, v, q, d, f, lower, order):
        """Subdivide at edge midpoints and bound the four children.

        The midpoint distances raise ``lower`` before any child cascade runs.
        Returns ``(lower, children)`` with one
        ``(v, q, d, f, value, code, exact, discard, n_evaluated)`` per child,
        ordered ``(v1, m1, m3), (m1, v2, m2), (m3, m2, v3), (m1, m2, m3)``.
        """
        x1, y1, z1, x2, y2, z2, x3, y3, z3 = v
        m1 = (0.5 * (x1 + x2), 0.5 * (y1 + y2), 0.5 * (z1 + z2))
        m2 = (0.5 * (x2 + x3), 0.5 * (y2 + y3), 0.5 * (z2 + z3))
        m3 = (0.5 * (x3 + x1), 0.5 * (y3 + y1), 0.5 * (z3 + z1))
        r1 = self.closest(*m1)
        r2 = self.closest(*m2)
        r3 = self.closest(*m3)
        for r, m in ((r1, m1), (r2, m2), (r3, m3)):
            c = certain_lower(r[0], m[0], m[1], m[2], self.extent)
            if c > lower:
                lower = c
        p1 = (x1, y1, z1)
        p2 = (x2, y2, z2)
        p3 = (x3, y3, z3)
        a1 = (q[0], q[1], q[2], d[0], f[0])
        a2 = (q[3], q[4], q[5], d[1], f[1])
        a3 = (q[6], q[7], q[8], d[2], f[2])
        b1 = (r1[1], r1[2], r1[3], r1[0], r1[4])
        b2 = (r2[1], r2[2], r2[3], r2[0], r2[4])
        b3 = (r3[1], r3[2], r3[3], r3[0], r3[4])
        out = []
        for (pa, qa), (pb, qb), (pc, qc) in (
            ((p1, a1), (m1, b1), (m3, b3)),
            ((m1, b1), (p2, a2), (m2, b2)),
            ((m3, b3), (m2, b2), (p3, a3)),
            ((m1, b1), (m2, b2), (m3, b3)),
        ):
            cv = pa + pb + pc
            cq = qa[:3] + qb[:3] + qc[:3]
            cd = (qa[3], qb[3], qc[3])
            cf = (qa[4], qb[4], qc[4])
            out.append((cv, cq, cd, cf) + self.cascade(cv, cq, cd, cf, lower, order))
        return lower, out


def certain_lower(d, x, y, z, extent):
    """``d`` minus the rounding allowance for a point at ``(x, y, z)``, floored at 0.

    A distance computed for a rounded point can exceed the true one by a few
    ulps of the coordinates involved; only what survives this cut is certain.
    """
    m = max(max(max(extent, abs(x)), abs(y)), abs(z))
    d = d - LOWER_TOL * m
    return d if d > 0.0 else 0.0


def u1(v, d):
    """Edge-length bound; needs no mesh data."""
    e12 = _dist(v[0], v[1], v[2], v[3], v[4], v[5])
    e23 = _dist(v[3], v[4], v[5], v[6], v[7], v[8])
    e31 = _dist(v[6], v[7], v[8], v[0], v[1], v[2])
    b = max(e12, e31) + d[0]
    t = max(e12, e23) + d[1]
    if t < b:
        b = t
    t = max(e23, e31) + d[2]
    if t < b:
        b = t
    return b


def u4(v, q):
    """Footpoint-pair bound; needs no mesh data."""
    x1, y1, z1, x2, y2, z2, x3, y3, z3 = v
    l0 = _sq(x1 - x2, y1 - y2, z1 - z2)
    l1 = _sq(x2 - x3, y2 - y3, z2 - z3)
    l2 = _sq(x3 - x1, y3 - y1, z3 - z1)
    if l0 <= l1 and l0 <= l2:
        i, j, o = 0, 1, 2
    elif l1 <= l2:
        i, j, o = 1, 2, 0
    else:
        i, j, o = 2, 0, 1
    ax = q[3 * o]
    ay = q[3 * o + 1]
    az = q[3 * o + 2]
    h1 = _pair_hausdorff(v, ax, ay, az, q[3 * i], q[3 * i + 1], q[3 * i + 2])
    h2 = _pair_hausdorff(v, ax, ay, az, q[3 * j], q[3 * j + 1], q[3 * j + 2])
    return h1 if h1 < h2 else h2


def _sq(x, y, z):
    return x * x + y * y + z * z


def _pair_hausdorff(v, ax, ay, az, bx, by, bz):
    """max over the triangle ``v`` of the distance to the point set {a, b}."""
    pl = bisector_of_points(ax, ay, az, bx, by, bz)
    h = 0.0
    if pl is None:
        for k in range(3):
            t = _dist(v[3 * k], v[3 * k + 1], v[3 * k + 2], ax, ay, az)
            if t > h:
                h = t
        return h
    for k in range(3):
        x = v[3 * k]
        y = v[3 * k + 1]
        z = v[3 * k + 2]
        da = _dist(x, y, z, ax, ay, az)
        db = _dist(x, y, z, bx, by, bz)
        t = da if da < db else db
        if t > h:
            h = t
    for k in range(3):
        kk = (k + 1) % 3
        hit = segment_plane(v[3 * k], v[3 * k + 1], v[3 * k + 2],
                            v[3 * kk], v[3 * kk + 1], v[3 * kk + 2], pl)
        if hit is not None:
            da = _dist(hit[1], hit[2], hit[3], ax, ay, az)
            db = _dist(hit[1], hit[2], hit[3], bx, by, bz)
            t = da if da < db else db
            if t > h:
                h = t
    return h
