# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels.

Operation-for-operation mirror of ``_pykernels.py``. Both files must evaluate
floating-point expressions in the same order so the backends agree bit for bit
(the build disables FMA contraction for the same reason).
"""
from libc.math cimport sqrt, fabs, INFINITY

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"

EXACT, U1, U2, U3, U4, ZHENG = 0, 1, 2, 3, 4, 5

cdef double DEGENERATE_SIN2 = 1e-30
cdef double PARALLEL_TOL = 1e-9
cdef double COINCIDENT_TOL = 1e-14
cdef double ON_PLANE_TOL = 1e-14
cdef double PRUNE_TOL = 1e-12
cdef double SHARED_FACE_TOL = 1e-14
cdef double LOWER_TOL = 1e-14


cdef struct Hit:
    double d2
    double x
    double y
    double z


cdef struct Plane:
    bint ok
    double nx
    double ny
    double nz
    double o


# ---------------------------------------------------------------------------
# point / segment / triangle
# ---------------------------------------------------------------------------

cdef inline Hit _segment(double px, double py, double pz,
                         double ax, double ay, double az,
                         double bx, double by, double bz) nogil:
    cdef Hit h
    cdef double abx = bx - ax
    cdef double aby = by - ay
    cdef double abz = bz - az
    cdef double ab2 = abx * abx + aby * aby + abz * abz
    cdef double t, dx, dy, dz
    if ab2 == 0.0:
        t = 0.0
    else:
        t = ((px - ax) * abx + (py - ay) * aby + (pz - az) * abz) / ab2
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    h.x = ax + t * abx
    h.y = ay + t * aby
    h.z = az + t * abz
    dx = px - h.x
    dy = py - h.y
    dz = pz - h.z
    h.d2 = dx * dx + dy * dy + dz * dz
    return h


cdef inline Hit _edges(double px, double py, double pz,
                       double ax, double ay, double az,
                       double bx, double by, double bz,
                       double cx, double cy, double cz) nogil:
    cdef Hit best = _segment(px, py, pz, ax, ay, az, bx, by, bz)
    cdef Hit cand = _segment(px, py, pz, bx, by, bz, cx, cy, cz)
    if cand.d2 < best.d2:
        best = cand
    cand = _segment(px, py, pz, cx, cy, cz, ax, ay, az)
    if cand.d2 < best.d2:
        best = cand
    return best


cdef inline Hit _at(double px, double py, double pz,
                    double qx, double qy, double qz) nogil:
    cdef Hit h
    h.x = qx
    h.y = qy
    h.z = qz
    cdef double dx = px - qx
    cdef double dy = py - qy
    cdef double dz = pz - qz
    h.d2 = dx * dx + dy * dy + dz * dz
    return h


cdef Hit _triangle(double px, double py, double pz,
                   double ax, double ay, double az,
                   double bx, double by, double bz,
                   double cx, double cy, double cz) nogil:
    cdef double abx = bx - ax
    cdef double aby = by - ay
    cdef double abz = bz - az
    cdef double acx = cx - ax
    cdef double acy = cy - ay
    cdef double acz = cz - az
    cdef double nx = aby * acz - abz * acy
    cdef double ny = abz * acx - abx * acz
    cdef double nz = abx * acy - aby * acx
    cdef double n2 = nx * nx + ny * ny + nz * nz
    cdef double ab2 = abx * abx + aby * aby + abz * abz
    cdef double ac2 = acx * acx + acy * acy + acz * acz
    cdef double apx, apy, apz, bpx, bpy, bpz, cpx, cpy, cpz
    cdef double d1, d2, d3, d4, d5, d6, va, vb, vc, v, w, e43, e56, s, inv
    if n2 <= DEGENERATE_SIN2 * ab2 * ac2:
        return _edges(px, py, pz, ax, ay, az, bx, by, bz, cx, cy, cz)

    apx = px - ax
    apy = py - ay
    apz = pz - az
    d1 = abx * apx + aby * apy + abz * apz
    d2 = acx * apx + acy * apy + acz * apz
    if d1 <= 0.0 and d2 <= 0.0:
        return _at(px, py, pz, ax, ay, az)

    bpx = px - bx
    bpy = py - by
    bpz = pz - bz
    d3 = abx * bpx + aby * bpy + abz * bpz
    d4 = acx * bpx + acy * bpy + acz * bpz
    if d3 >= 0.0 and d4 <= d3:
        return _at(px, py, pz, bx, by, bz)

    vc = d1 * d4 - d3 * d2
    if vc <= 0.0 and d1 >= 0.0 and d3 <= 0.0:
        v = d1 / (d1 - d3)
        return _at(px, py, pz, ax + v * abx, ay + v * aby, az + v * abz)

    cpx = px - cx
    cpy = py - cy
    cpz = pz - cz
    d5 = abx * cpx + aby * cpy + abz * cpz
    d6 = acx * cpx + acy * cpy + acz * cpz
    if d6 >= 0.0 and d5 <= d6:
        return _at(px, py, pz, cx, cy, cz)

    vb = d5 * d2 - d1 * d6
    if vb <= 0.0 and d2 >= 0.0 and d6 <= 0.0:
        w = d2 / (d2 - d6)
        return _at(px, py, pz, ax + w * acx, ay + w * acy, az + w * acz)

    va = d3 * d6 - d5 * d4
    e43 = d4 - d3
    e56 = d5 - d6
    if va <= 0.0 and e43 >= 0.0 and e56 >= 0.0:
        w = e43 / (e43 + e56)
        return _at(px, py, pz, bx + w * (cx - bx), by + w * (cy - by), bz + w * (cz - bz))

    s = va + vb + vc
    if not s > 0.0:
        return _edges(px, py, pz, ax, ay, az, bx, by, bz, cx, cy, cz)
    inv = 1.0 / s
    v = vb * inv
    w = vc * inv
    if v < 0.0 or w < 0.0 or v + w > 1.0:
        return _edges(px, py, pz, ax, ay, az, bx, by, bz, cx, cy, cz)
    return _at(px, py, pz,
               ax + abx * v + acx * w,
               ay + aby * v + acy * w,
               az + abz * v + acz * w)


cdef inline double _dist(double ax, double ay, double az,
                         double bx, double by, double bz) nogil:
    cdef double dx = ax - bx
    cdef double dy = ay - by
    cdef double dz = az - bz
    return sqrt(dx * dx + dy * dy + dz * dz)


cdef double _triangle_g(const double* v) nogil:
    cdef double ax = v[0], ay = v[1], az = v[2]
    cdef double bx = v[3], by = v[4], bz = v[5]
    cdef double cx = v[6], cy = v[7], cz = v[8]
    cdef double e1 = _dist(ax, ay, az, bx, by, bz)
    cdef double e2 = _dist(bx, by, bz, cx, cy, cz)
    cdef double e3 = _dist(cx, cy, cz, ax, ay, az)
    cdef double emax = e1
    if e2 > emax:
        emax = e2
    if e3 > emax:
        emax = e3
    cdef double abx = bx - ax
    cdef double aby = by - ay
    cdef double abz = bz - az
    cdef double acx = cx - ax
    cdef double acy = cy - ay
    cdef double acz = cz - az
    cdef double nx = aby * acz - abz * acy
    cdef double ny = abz * acx - abx * acz
    cdef double nz = abx * acy - aby * acx
    cdef double area = 0.5 * sqrt(nx * nx + ny * ny + nz * nz)
    if area == 0.0:
        return 0.5 * emax
    cdef double big_r = e1 * e2 * e3 / (4.0 * area)
    cdef double s = (e1 + e2 + e3) / 2.0
    cdef double r = area / s
    if s - r > 2.0 * big_r:
        return big_r
    return 0.5 * emax


def closest_on_triangle(double px, double py, double pz,
                        double ax, double ay, double az,
                        double bx, double by, double bz,
                        double cx, double cy, double cz):
    cdef Hit h = _triangle(px, py, pz, ax, ay, az, bx, by, bz, cx, cy, cz)
    return h.x, h.y, h.z, h.d2


def closest_point_on_triangle(p, a, b, c):
    cdef Hit h = _triangle(float(p[0]), float(p[1]), float(p[2]),
                           float(a[0]), float(a[1]), float(a[2]),
                           float(b[0]), float(b[1]), float(b[2]),
                           float(c[0]), float(c[1]), float(c[2]))
    return (h.x, h.y, h.z), sqrt(h.d2)


def triangle_g(double ax, double ay, double az, double bx, double by, double bz,
               double cx, double cy, double cz):
    cdef double v[9]
    v[0] = ax; v[1] = ay; v[2] = az
    v[3] = bx; v[4] = by; v[5] = bz
    v[6] = cx; v[7] = cy; v[8] = cz
    return _triangle_g(v)


# ---------------------------------------------------------------------------
# planes
# ---------------------------------------------------------------------------

cdef Plane _face_plane(const double* t) nogil:
    cdef Plane pl
    cdef double ax = t[0], ay = t[1], az = t[2]
    cdef double abx = t[3] - ax
    cdef double aby = t[4] - ay
    cdef double abz = t[5] - az
    cdef double acx = t[6] - ax
    cdef double acy = t[7] - ay
    cdef double acz = t[8] - az
    cdef double nx = aby * acz - abz * acy
    cdef double ny = abz * acx - abx * acz
    cdef double nz = abx * acy - aby * acx
    cdef double n2 = nx * nx + ny * ny + nz * nz
    cdef double ab2 = abx * abx + aby * aby + abz * abz
    cdef double ac2 = acx * acx + acy * acy + acz * acz
    cdef double nn
    if n2 <= DEGENERATE_SIN2 * ab2 * ac2:
        pl.ok = False
        return pl
    nn = sqrt(n2)
    pl.ok = True
    pl.nx = nx / nn
    pl.ny = ny / nn
    pl.nz = nz / nn
    pl.o = -(pl.nx * ax + pl.ny * ay + pl.nz * az)
    return pl


cdef Plane _bisector_of_points(double ax, double ay, double az,
                               double bx, double by, double bz) nogil:
    cdef Plane pl
    cdef double nx = bx - ax
    cdef double ny = by - ay
    cdef double nz = bz - az
    cdef double nn = sqrt(nx * nx + ny * ny + nz * nz)
    cdef double mag = 1.0
    if fabs(ax) > mag:
        mag = fabs(ax)
    if fabs(ay) > mag:
        mag = fabs(ay)
    if fabs(az) > mag:
        mag = fabs(az)
    if fabs(bx) > mag:
        mag = fabs(bx)
    if fabs(by) > mag:
        mag = fabs(by)
    if fabs(bz) > mag:
        mag = fabs(bz)
    if nn < COINCIDENT_TOL * mag:
        pl.ok = False
        return pl
    pl.ok = True
    pl.nx = nx / nn
    pl.ny = ny / nn
    pl.nz = nz / nn
    cdef double mx = (ax + bx) * 0.5
    cdef double my = (ay + by) * 0.5
    cdef double mz = (az + bz) * 0.5
    pl.o = -(pl.nx * mx + pl.ny * my + pl.nz * mz)
    return pl


cdef Plane _bisector_of_planes(Plane p1, Plane p2,
                               double hx, double hy, double hz) nogil:
    cdef Plane pl
    cdef double cx = p1.ny * p2.nz - p1.nz * p2.ny
    cdef double cy = p1.nz * p2.nx - p1.nx * p2.nz
    cdef double cz = p1.nx * p2.ny - p1.ny * p2.nx
    cdef double nx, ny, nz, o, nn, s1, s2
    if sqrt(cx * cx + cy * cy + cz * cz) < PARALLEL_TOL:
        pl.ok = False
        return pl
    s1 = p1.nx * hx + p1.ny * hy + p1.nz * hz + p1.o
    s2 = p2.nx * hx + p2.ny * hy + p2.nz * hz + p2.o
    if (s1 >= 0.0) == (s2 >= 0.0):
        nx = p1.nx - p2.nx
        ny = p1.ny - p2.ny
        nz = p1.nz - p2.nz
        o = p1.o - p2.o
    else:
        nx = p1.nx + p2.nx
        ny = p1.ny + p2.ny
        nz = p1.nz + p2.nz
        o = p1.o + p2.o
    nn = sqrt(nx * nx + ny * ny + nz * nz)
    pl.ok = True
    pl.nx = nx / nn
    pl.ny = ny / nn
    pl.nz = nz / nn
    pl.o = o / nn
    return pl


cdef bint _segment_plane(double ax, double ay, double az,
                         double bx, double by, double bz,
                         Plane pl, double* out) nogil:
    """Writes (t, x, y, z) into ``out``; returns whether the segment is hit."""
    cdef double sa = pl.nx * ax + pl.ny * ay + pl.nz * az + pl.o
    cdef double sb = pl.nx * bx + pl.ny * by + pl.nz * bz + pl.o
    cdef double ztol = _dist(ax, ay, az, bx, by, bz)
    cdef double t
    ztol = _maxd(ztol, _maxd(_maxd(fabs(ax), fabs(ay)), fabs(az)))
    ztol = _maxd(ztol, _maxd(_maxd(fabs(bx), fabs(by)), fabs(bz)))
    ztol = ON_PLANE_TOL * ztol
    if fabs(sa) <= ztol:
        sa = 0.0
    if fabs(sb) <= ztol:
        sb = 0.0
    if sa == 0.0:
        t = 0.0
    elif sb == 0.0:
        t = 1.0
    elif (sa > 0.0) != (sb > 0.0):
        t = sa / (sa - sb)
    else:
        return False
    out[0] = t
    out[1] = ax + t * (bx - ax)
    out[2] = ay + t * (by - ay)
    out[3] = az + t * (bz - az)
    return True


def _plane_tuple(Plane pl):
    if not pl.ok:
        return None
    return pl.nx, pl.ny, pl.nz, pl.o


cdef Plane _plane_from(object p):
    cdef Plane pl
    pl.ok = True
    pl.nx = p[0]
    pl.ny = p[1]
    pl.nz = p[2]
    pl.o = p[3]
    return pl


def face_plane(t):
    cdef double buf[9]
    cdef int i
    for i in range(9):
        buf[i] = t[i]
    return _plane_tuple(_face_plane(buf))


def bisector_of_points(double ax, double ay, double az, double bx, double by, double bz):
    return _plane_tuple(_bisector_of_points(ax, ay, az, bx, by, bz))


def bisector_of_planes(p1, p2, double hx, double hy, double hz):
    return _plane_tuple(_bisector_of_planes(_plane_from(p1), _plane_from(p2), hx, hy, hz))


def segment_plane(double ax, double ay, double az, double bx, double by, double bz, pl):
    cdef double out[4]
    if _segment_plane(ax, ay, az, bx, by, bz, _plane_from(pl), out):
        return out[0], out[1], out[2], out[3]
    return None


cdef double _pair_hausdorff(const double* v, double ax, double ay, double az,
                            double bx, double by, double bz) nogil:
    cdef Plane pl = _bisector_of_points(ax, ay, az, bx, by, bz)
    cdef double h = 0.0
    cdef double t, da, db
    cdef double hit[4]
    cdef int k, kk
    if not pl.ok:
        for k in range(3):
            t = _dist(v[3 * k], v[3 * k + 1], v[3 * k + 2], ax, ay, az)
            if t > h:
                h = t
        return h
    for k in range(3):
        da = _dist(v[3 * k], v[3 * k + 1], v[3 * k + 2], ax, ay, az)
        db = _dist(v[3 * k], v[3 * k + 1], v[3 * k + 2], bx, by, bz)
        t = da if da < db else db
        if t > h:
            h = t
    for k in range(3):
        kk = (k + 1) % 3
        if _segment_plane(v[3 * k], v[3 * k + 1], v[3 * k + 2],
                          v[3 * kk], v[3 * kk + 1], v[3 * kk + 2], pl, hit):
            da = _dist(hit[1], hit[2], hit[3], ax, ay, az)
            db = _dist(hit[1], hit[2], hit[3], bx, by, bz)
            t = da if da < db else db
            if t > h:
                h = t
    return h


# ---------------------------------------------------------------------------
# per-mesh kernel
# ---------------------------------------------------------------------------

cdef enum:
    _MAX_DEPTH = 126


def tree_depth(left, right):
    """Number of levels below the root (0 for a single leaf)."""
    depth = 0
    frontier = [(0, 0)]
    while frontier:
        n, k = frontier.pop()
        if left[n] < 0:
            depth = max(depth, k)
        else:
            frontier.append((left[n], k + 1))
            frontier.append((right[n], k + 1))
    return depth


cdef struct Query:
    double dist
    double x
    double y
    double z
    long face


cdef class Kernel:
    """Closest-point queries and upper bounds against one triangle soup ``B``."""

    cdef const double[:, ::1] tris
    cdef const long[:, ::1] faces
    cdef const double[:, ::1] lo
    cdef const double[:, ::1] hi
    cdef const long[::1] left
    cdef const long[::1] right
    cdef const long[::1] start
    cdef const long[::1] count
    cdef const long[::1] leaf_faces
    cdef double extent
    cdef long n_nodes

    def __init__(self, tris, faces, node_lo, node_hi, node_left, node_right,
                 node_start, node_count, leaf_faces, extent):
        self.tris = np.ascontiguousarray(tris, dtype=np.float64)
        self.faces = np.ascontiguousarray(faces, dtype=np.int_)
        self.lo = np.ascontiguousarray(node_lo, dtype=np.float64)
        self.hi = np.ascontiguousarray(node_hi, dtype=np.float64)
        self.left = np.ascontiguousarray(node_left, dtype=np.int_)
        self.right = np.ascontiguousarray(node_right, dtype=np.int_)
        self.start = np.ascontiguousarray(node_start, dtype=np.int_)
        self.count = np.ascontiguousarray(node_count, dtype=np.int_)
        self.leaf_faces = np.ascontiguousarray(leaf_faces, dtype=np.int_)
        self.extent = extent
        self.n_nodes = self.left.shape[0]
        if tree_depth(self.left, self.right) >= _MAX_DEPTH:
            raise ValueError("tree too deep for the traversal stack")

    # -- queries -----------------------------------------------------------

    cdef inline double _box_d2(self, long n, double px, double py, double pz) nogil:
        cdef double s = 0.0
        cdef double t
        if px < self.lo[n, 0]:
            t = self.lo[n, 0] - px
            s += t * t
        elif px > self.hi[n, 0]:
            t = px - self.hi[n, 0]
            s += t * t
        if py < self.lo[n, 1]:
            t = self.lo[n, 1] - py
            s += t * t
        elif py > self.hi[n, 1]:
            t = py - self.hi[n, 1]
            s += t * t
        if pz < self.lo[n, 2]:
            t = self.lo[n, 2] - pz
            s += t * t
        elif pz > self.hi[n, 2]:
            t = pz - self.hi[n, 2]
            s += t * t
        return s

    cdef inline Hit _tri(self, long f, double px, double py, double pz) nogil:
        return _triangle(px, py, pz,
                         self.tris[f, 0], self.tris[f, 1], self.tris[f, 2],
                         self.tris[f, 3], self.tris[f, 4], self.tris[f, 5],
                         self.tris[f, 6], self.tris[f, 7], self.tris[f, 8])

    cdef Query _closest(self, double px, double py, double pz) nogil:
        cdef Query res
        cdef double mag = fabs(px)
        if fabs(py) > mag:
            mag = fabs(py)
        if fabs(pz) > mag:
            mag = fabs(pz)
        cdef double tol = PRUNE_TOL * (self.extent + mag)
        cdef double best_d2 = INFINITY
        cdef double best_lim2 = INFINITY
        cdef long best_face = -1
        cdef double bqx = 0.0, bqy = 0.0, bqz = 0.0
        cdef long top = 0
        cdef long n, ln, rn, k, f
        cdef double bd2, dl, dr, bd
        cdef Hit h
        # DFS keeps at most one pending sibling per level
        cdef long stack_node[_MAX_DEPTH + 2]
        cdef double stack_d2[_MAX_DEPTH + 2]
        stack_node[0] = 0
        stack_d2[0] = self._box_d2(0, px, py, pz)
        top = 1
        while top > 0:
            top -= 1
            n = stack_node[top]
            bd2 = stack_d2[top]
            if bd2 > best_lim2:
                continue
            ln = self.left[n]
            if ln < 0:
                for k in range(self.start[n], self.start[n] + self.count[n]):
                    f = self.leaf_faces[k]
                    h = self._tri(f, px, py, pz)
                    if h.d2 < best_d2 or (h.d2 == best_d2 and f < best_face):
                        best_d2 = h.d2
                        best_face = f
                        bqx = h.x
                        bqy = h.y
                        bqz = h.z
                        bd = sqrt(h.d2) + tol
                        best_lim2 = bd * bd
            else:
                rn = self.right[n]
                dl = self._box_d2(ln, px, py, pz)
                dr = self._box_d2(rn, px, py, pz)
                if dl <= dr:
                    stack_node[top] = rn
                    stack_d2[top] = dr
                    stack_node[top + 1] = ln
                    stack_d2[top + 1] = dl
                else:
                    stack_node[top] = ln
                    stack_d2[top] = dl
                    stack_node[top + 1] = rn
                    stack_d2[top + 1] = dr
                top += 2
        res.dist = sqrt(best_d2)
        res.x = bqx
        res.y = bqy
        res.z = bqz
        res.face = best_face
        return res

    def closest(self, double px, double py, double pz):
        """Exact closest point on ``B``: ``(dist, qx, qy, qz, face)``."""
        cdef Query r = self._closest(px, py, pz)
        return r.dist, r.x, r.y, r.z, r.face

    def closest_linear(self, double px, double py, double pz):
        """Linear scan over every face; lowest index wins ties."""
        cdef double best_d2 = INFINITY
        cdef long best_face = -1
        cdef double bqx = 0.0, bqy = 0.0, bqz = 0.0
        cdef long f
        cdef Hit h
        for f in range(self.tris.shape[0]):
            h = self._tri(f, px, py, pz)
            if h.d2 < best_d2:
                best_d2 = h.d2
                best_face = f
                bqx = h.x
                bqy = h.y
                bqz = h.z
        return sqrt(best_d2), bqx, bqy, bqz, best_face

    def closest_many(self, points):
        cdef const double[:, ::1] pts = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 3)
        cdef Py_ssize_t n = pts.shape[0]
        dist_a = np.empty(n)
        foot_a = np.empty((n, 3))
        face_a = np.empty(n, dtype=np.int64)
        cdef double[::1] dist = dist_a
        cdef double[:, ::1] foot = foot_a
        cdef cnp.int64_t[::1] face = face_a
        cdef Py_ssize_t i
        cdef Query r
        with nogil:
            for i in range(n):
                r = self._closest(pts[i, 0], pts[i, 1], pts[i, 2])
                dist[i] = r.dist
                foot[i, 0] = r.x
                foot[i, 1] = r.y
                foot[i, 2] = r.z
                face[i] = r.face
        return dist_a, foot_a, face_a

    def max_distance(self, points):
        """Largest closest-point distance over a batch of points."""
        cdef const double[:, ::1] pts = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 3)
        cdef Py_ssize_t i
        cdef double best = 0.0
        cdef Query r
        with nogil:
            for i in range(pts.shape[0]):
                r = self._closest(pts[i, 0], pts[i, 1], pts[i, 2])
                if r.dist > best:
                    best = r.dist
        return best

    # -- bound helpers -----------------------------------------------------

    cdef inline double _face_dist(self, double x, double y, double z, long f) nogil:
        return sqrt(self._tri(f, x, y, z).d2)

    cdef bint _adjacent(self, long f1, long f2) nogil:
        cdef long a0 = self.faces[f1, 0], a1 = self.faces[f1, 1], a2 = self.faces[f1, 2]
        cdef long b0 = self.faces[f2, 0], b1 = self.faces[f2, 1], b2 = self.faces[f2, 2]
        cdef int n = 0
        if a0 == b0 or a0 == b1 or a0 == b2:
            n += 1
        if a1 != a0 and (a1 == b0 or a1 == b1 or a1 == b2):
            n += 1
        if a2 != a0 and a2 != a1 and (a2 == b0 or a2 == b1 or a2 == b2):
            n += 1
        return n >= 2

    def adjacent(self, long f1, long f2):
        return self._adjacent(f1, f2)

    cdef inline Plane _plane(self, long f) nogil:
        cdef double t[9]
        cdef int i
        for i in range(9):
            t[i] = self.tris[f, i]
        return _face_plane(t)

    # -- bounds ------------------------------------------------------------

    cdef double _u1(self, const double* v, const double* d) nogil:
        cdef double e12 = _dist(v[0], v[1], v[2], v[3], v[4], v[5])
        cdef double e23 = _dist(v[3], v[4], v[5], v[6], v[7], v[8])
        cdef double e31 = _dist(v[6], v[7], v[8], v[0], v[1], v[2])
        cdef double b = (e12 if e12 >= e31 else e31) + d[0]
        cdef double t = (e12 if e12 >= e23 else e23) + d[1]
        if t < b:
            b = t
        t = (e23 if e23 >= e31 else e31) + d[2]
        if t < b:
            b = t
        return b

    cdef double _u2(self, const double* v, const double* d) nogil:
        return _triangle_g(v) + _max3(d[0], d[1], d[2])

    cdef double _u3(self, const double* v, const double* d, const long* f) nogil:
        cdef int lone, k1, k2
        cdef long s1, s2
        if f[0] == f[1] and f[1] != f[2]:
            lone = 2
        elif f[0] == f[2] and f[0] != f[1]:
            lone = 1
        elif f[1] == f[2] and f[0] != f[1]:
            lone = 0
        else:
            lone = -1
        if lone >= 0:
            k1 = (lone + 1) % 3
            k2 = (lone + 2) % 3
            s1 = f[lone]
            s2 = f[k1]
            if self._adjacent(s1, s2):
                return self._u3_case1(v, d, lone, k1, k2, s1, s2)
        return self._u3_case2(v, d, f)

    cdef double _u3_case1(self, const double* v, const double* d,
                          int lone, int k1, int k2, long s1, long s2) nogil:
        cdef double x1 = v[3 * lone], y1 = v[3 * lone + 1], z1 = v[3 * lone + 2]
        cdef double x2 = v[3 * k1], y2 = v[3 * k1 + 1], z2 = v[3 * k1 + 2]
        cdef double x3 = v[3 * k2], y3 = v[3 * k2 + 1], z3 = v[3 * k2 + 2]
        cdef double b1x = 0.0, b1y = 0.0, b1z = 0.0, b2x = 0.0, b2y = 0.0, b2z = 0.0
        cdef double h1[4]
        cdef double h2[4]
        cdef bint split = False
        cdef Plane p1 = self._plane(s1)
        cdef Plane p2 = self._plane(s2)
        cdef Plane bis
        cdef double hr, hq, t
        if p1.ok and p2.ok:
            bis = _bisector_of_planes(p1, p2, x1, y1, z1)
            if not bis.ok:
                bis = self._crease_plane(s1, s2, p1)
            if bis.ok:
                if (_segment_plane(x1, y1, z1, x2, y2, z2, bis, h1)
                        and _segment_plane(x1, y1, z1, x3, y3, z3, bis, h2)):
                    split = True
                    b1x = h1[1]
                    b1y = h1[2]
                    b1z = h1[3]
                    b2x = h2[1]
                    b2y = h2[2]
                    b2z = h2[3]
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

    cdef Plane _crease_plane(self, long s1, long s2, Plane p1) nogil:
        # plane through the shared edge, normal to face s1; the limit of the
        # plane bisector as the two faces become coplanar
        cdef Plane pl
        cdef int i = -1, j = -1, k
        cdef long a
        cdef double ax, ay, az, ex, ey, ez, nx, ny, nz, nn
        pl.ok = False
        for k in range(3):
            a = self.faces[s1, k]
            if a == self.faces[s2, 0] or a == self.faces[s2, 1] or a == self.faces[s2, 2]:
                if i < 0:
                    i = k
                elif a != self.faces[s1, i]:
                    j = k
                    break
        if j < 0:
            return pl
        ax = self.tris[s1, 3 * i]
        ay = self.tris[s1, 3 * i + 1]
        az = self.tris[s1, 3 * i + 2]
        ex = self.tris[s1, 3 * j] - ax
        ey = self.tris[s1, 3 * j + 1] - ay
        ez = self.tris[s1, 3 * j + 2] - az
        nx = p1.ny * ez - p1.nz * ey
        ny = p1.nz * ex - p1.nx * ez
        nz = p1.nx * ey - p1.ny * ex
        nn = sqrt(nx * nx + ny * ny + nz * nz)
        if not nn > 0.0:
            return pl
        pl.ok = True
        pl.nx = nx / nn
        pl.ny = ny / nn
        pl.nz = nz / nn
        pl.o = -(pl.nx * ax + pl.ny * ay + pl.nz * az)
        return pl

    cdef double _u3_case2(self, const double* v, const double* d, const long* f) nogil:
        cdef double x1 = v[0], y1 = v[1], z1 = v[2]
        cdef double x2 = v[3], y2 = v[4], z2 = v[5]
        cdef double x3 = v[6], y3 = v[7], z3 = v[8]
        cdef double m1x = (x1 + x2) * 0.5
        cdef double m1y = (y1 + y2) * 0.5
        cdef double m1z = (z1 + z2) * 0.5
        cdef double m2x = (x2 + x3) * 0.5
        cdef double m2y = (y2 + y3) * 0.5
        cdef double m2z = (z2 + z3) * 0.5
        cdef double m3x = (x3 + x1) * 0.5
        cdef double m3y = (y3 + y1) * 0.5
        cdef double m3z = (z3 + z1) * 0.5
        cdef double bx = (x1 + x2 + x3) / 3.0
        cdef double by = (y1 + y2 + y3) / 3.0
        cdef double bz = (z1 + z2 + z3) / 3.0
        cdef double part, t, best, h
        cdef int i, j
        cdef long fi
        part = d[0]
        part = _maxd(part, self._face_dist(m1x, m1y, m1z, f[0]))
        part = _maxd(part, self._face_dist(bx, by, bz, f[0]))
        part = _maxd(part, self._face_dist(m3x, m3y, m3z, f[0]))
        part = _maxd(part, d[1])
        part = _maxd(part, self._face_dist(m2x, m2y, m2z, f[1]))
        part = _maxd(part, self._face_dist(bx, by, bz, f[1]))
        part = _maxd(part, self._face_dist(m1x, m1y, m1z, f[1]))
        part = _maxd(part, d[2])
        part = _maxd(part, self._face_dist(m3x, m3y, m3z, f[2]))
        part = _maxd(part, self._face_dist(bx, by, bz, f[2]))
        part = _maxd(part, self._face_dist(m2x, m2y, m2z, f[2]))
        best = part
        for i in range(3):
            fi = f[i]
            h = d[i]
            for j in range(3):
                if j != i:
                    t = self._face_dist(v[3 * j], v[3 * j + 1], v[3 * j + 2], fi)
                    if t > h:
                        h = t
            if h < best:
                best = h
        return best

    cdef double _u4(self, const double* v, const double* q) nogil:
        cdef double l0 = _sq(v[0] - v[3], v[1] - v[4], v[2] - v[5])
        cdef double l1 = _sq(v[3] - v[6], v[4] - v[7], v[5] - v[8])
        cdef double l2 = _sq(v[6] - v[0], v[7] - v[1], v[8] - v[2])
        cdef int i, j, o
        cdef double h1, h2
        if l0 <= l1 and l0 <= l2:
            i = 0; j = 1; o = 2
        elif l1 <= l2:
            i = 1; j = 2; o = 0
        else:
            i = 2; j = 0; o = 1
        h1 = _pair_hausdorff(v, q[3 * o], q[3 * o + 1], q[3 * o + 2],
                             q[3 * i], q[3 * i + 1], q[3 * i + 2])
        h2 = _pair_hausdorff(v, q[3 * o], q[3 * o + 1], q[3 * o + 2],
                             q[3 * j], q[3 * j + 1], q[3 * j + 2])
        return h1 if h1 < h2 else h2

    cdef double _zheng(self, const double* v, const double* d, const long* f) nogil:
        cdef double bx = (v[0] + v[3] + v[6]) / 3.0
        cdef double by = (v[1] + v[4] + v[7]) / 3.0
        cdef double bz = (v[2] + v[5] + v[8]) / 3.0
        cdef long cand[4]
        cdef double best = INFINITY
        cdef double h, t
        cdef int k, j
        cdef long s
        cand[0] = f[0]
        cand[1] = f[1]
        cand[2] = f[2]
        cand[3] = self._closest(bx, by, bz).face
        for k in range(4):
            s = cand[k]
            h = 0.0
            for j in range(3):
                if s == f[j]:
                    t = d[j]
                else:
                    t = self._face_dist(v[3 * j], v[3 * j + 1], v[3 * j + 2], s)
                if t > h:
                    h = t
            if h < best:
                best = h
        return best

    cdef double _bound(self, int code, const double* v, const double* q,
                       const double* d, const long* f) nogil:
        if code == 1:
            return self._u1(v, d)
        if code == 2:
            return self._u2(v, d)
        if code == 3:
            return self._u3(v, d, f)
        if code == 4:
            return self._u4(v, q)
        return self._zheng(v, d, f)

    # -- Python surface ------------------------------------------------------

    def exact(self, v, q, d, f):
        cdef double cv[9]
        cdef double cq[9]
        cdef double cd[3]
        cdef long cf[3]
        _unpack(v, q, d, f, cv, cq, cd, cf)
        value = self._shared_face(cq, cd, cf)
        return None if value < 0.0 else value

    cdef double _shared_face(self, const double* cq, const double* cd, const long* cf) nogil:
        # max d_i if one footpoint face holds all three footpoints, else -1
        cdef int k, i
        cdef long s
        cdef double tol, value, t, e
        if cf[0] == cf[1] and cf[1] == cf[2]:
            return _max3(cd[0], cd[1], cd[2])
        tol = SHARED_FACE_TOL * self.extent
        for k in range(3):
            s = cf[k]
            if (k == 1 and s == cf[0]) or (k == 2 and (s == cf[0] or s == cf[1])):
                continue
            value = 0.0
            for i in range(3):
                t = cd[i]
                if cf[i] != s:
                    e = self._face_dist(cq[3 * i], cq[3 * i + 1], cq[3 * i + 2], s)
                    if e > tol:
                        value = -1.0
                        break
                    t = t + e
                if t > value:
                    value = t
            if value >= 0.0:
                return value
        return -1.0

    def bound(self, int code, v, q, d, f):
        if code < 1 or code > 5:
            raise ValueError(f"unknown bound code {code}")
        cdef double cv[9]
        cdef double cq[9]
        cdef double cd[3]
        cdef long cf[3]
        _unpack(v, q, d, f, cv, cq, cd, cf)
        return self._bound(code, cv, cq, cd, cf)

    def u1(self, v, q, d, f):
        return self.bound(1, v, q, d, f)

    def u2(self, v, q, d, f):
        return self.bound(2, v, q, d, f)

    def u3(self, v, q, d, f):
        return self.bound(3, v, q, d, f)

    def u4(self, v, q, d, f):
        return self.bound(4, v, q, d, f)

    def zheng(self, v, q, d, f):
        return self.bound(5, v, q, d, f)

    cdef int _cascade(self, const double* cv, const double* cq, const double* cd,
                      const long* cf, double lower, const int* codes, int n_order,
                      double* value, int* code, int* exact) nogil:
        # returns the number of bounds evaluated; value/code/exact via pointers
        cdef int k, n = 0
        cdef double best, u
        u = self._shared_face(cq, cd, cf)
        if u >= 0.0:
            value[0] = u
            code[0] = 0
            exact[0] = 1
            return 0
        exact[0] = 0
        code[0] = 0
        best = INFINITY
        for k in range(n_order):
            code[0] = codes[k]
            n += 1
            u = self._bound(codes[k], cv, cq, cd, cf)
            if u < lower:
                value[0] = u
                return n
            if u < best:
                best = u
        value[0] = best
        return n

    def cascade(self, v, q, d, f, double lower, order):
        """Lazy bound evaluation.

        Returns ``(value, code, exact, discard, n_evaluated)`` where ``code``
        is the bound that ended the cascade.
        """
        cdef double cv[9]
        cdef double cq[9]
        cdef double cd[3]
        cdef long cf[3]
        cdef int codes[8]
        cdef int n_order = _codes(order, codes)
        cdef int n, code, exact
        cdef double value
        _unpack(v, q, d, f, cv, cq, cd, cf)
        n = self._cascade(cv, cq, cd, cf, lower, codes, n_order, &value, &code, &exact)
        return value, code, exact == 1, value < lower, n

    def refine(self, v, q, d, f, double lower, order):
        """Subdivide at edge midpoints and bound the four children.

        The midpoint distances raise ``lower`` before any child cascade runs.
        Returns ``(lower, children)`` with one
        ``(v, q, d, f, value, code, exact, discard, n_evaluated)`` per child,
        ordered ``(v1, m1, m3), (m1, v2, m2), (m3, m2, v3), (m1, m2, m3)``.
        """
        cdef double pv[9]
        cdef double pq[9]
        cdef double pd[3]
        cdef long pf[3]
        # six points: v1, v2, v3, m1, m2, m3
        cdef double P[18]
        cdef double Q[18]
        cdef double D[6]
        cdef long F[6]
        cdef double cv[9]
        cdef double cq[9]
        cdef double cd[3]
        cdef long cf[3]
        cdef int codes[8]
        cdef int n_order = _codes(order, codes)
        cdef int c, j, k, i, n, code, exact
        cdef double value
        cdef Query r
        _unpack(v, q, d, f, pv, pq, pd, pf)
        for i in range(3):
            for k in range(3):
                P[3 * i + k] = pv[3 * i + k]
                Q[3 * i + k] = pq[3 * i + k]
            D[i] = pd[i]
            F[i] = pf[i]
        for i in range(3):
            j = (i + 1) % 3
            for k in range(3):
                P[9 + 3 * i + k] = 0.5 * (pv[3 * i + k] + pv[3 * j + k])
        for i in range(3, 6):
            r = self._closest(P[3 * i], P[3 * i + 1], P[3 * i + 2])
            Q[3 * i] = r.x
            Q[3 * i + 1] = r.y
            Q[3 * i + 2] = r.z
            D[i] = r.dist
            F[i] = r.face
        for i in range(3, 6):
            value = _certain(D[i], P[3 * i], P[3 * i + 1], P[3 * i + 2], self.extent)
            if value > lower:
                lower = value
        out = []
        for c in range(4):
            for k in range(3):
                i = _CHILD[c][k]
                for j in range(3):
                    cv[3 * k + j] = P[3 * i + j]
                    cq[3 * k + j] = Q[3 * i + j]
                cd[k] = D[i]
                cf[k] = F[i]
            n = self._cascade(cv, cq, cd, cf, lower, codes, n_order, &value, &code, &exact)
            out.append((
                (cv[0], cv[1], cv[2], cv[3], cv[4], cv[5], cv[6], cv[7], cv[8]),
                (cq[0], cq[1], cq[2], cq[3], cq[4], cq[5], cq[6], cq[7], cq[8]),
                (cd[0], cd[1], cd[2]),
                (cf[0], cf[1], cf[2]),
                value, code, exact == 1, value < lower, n,
            ))
        return lower, out


# point indices (v1, v2, v3, m1, m2, m3) = 0..5 of each child
cdef int _CHILD[4][3]
_CHILD[0][:] = [0, 3, 5]
_CHILD[1][:] = [3, 1, 4]
_CHILD[2][:] = [5, 4, 2]
_CHILD[3][:] = [3, 4, 5]


cdef int _codes(order, int* codes) except -1:
    cdef int n = len(order)
    cdef int k
    if n > 8:
        raise ValueError("cascade order too long")
    for k in range(n):
        codes[k] = order[k]
        if codes[k] < 1 or codes[k] > 5:
            raise ValueError(f"unknown bound code {codes[k]}")
    return n


cdef inline double _sq(double x, double y, double z) nogil:
    return x * x + y * y + z * z


cdef inline double _maxd(double a, double b) nogil:
    return b if b > a else a


cdef inline double _certain(double d, double x, double y, double z, double extent) nogil:
    cdef double m = _maxd(_maxd(_maxd(extent, fabs(x)), fabs(y)), fabs(z))
    d = d - LOWER_TOL * m
    return d if d > 0.0 else 0.0


def certain_lower(double d, double x, double y, double z, double extent):
    return _certain(d, x, y, z, extent)


cdef inline double _max3(double a, double b, double c) nogil:
    cdef double m = b if b >= c else c
    return a if a >= m else m


cdef void _unpack(v, q, d, f, double* cv, double* cq, double* cd, long* cf) except *:
    cdef int i
    for i in range(9):
        cv[i] = v[i]
        cq[i] = q[i]
    for i in range(3):
        cd[i] = d[i]
        cf[i] = f[i]
