# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled chain kernel.

Same contract as _chainkernel_py (the pure-Python reference): deterministic
orthonormal completion, chain construction, cyclic overlap sum.  Keeps the
whole pentagram in C locals so optimizer loops avoid Python objects.
"""

from libc.math cimport cos, fabs, sin, sqrt

__all__ = ["completion", "chain_legs", "kcbs_from_legs", "chain_kcbs"]

CLOSURE_TOL = 1e-8
PARALLEL_TOL = 1e-10


cdef inline void _completion(double lx, double ly, double lz, double* out) noexcept nogil:
    cdef double ax = fabs(lx)
    cdef double ay = fabs(ly)
    cdef double az = fabs(lz)
    cdef double ex = 0.0, ey = 0.0, ez = 0.0
    cdef double d, mx, my, mz, r
    if ax <= ay and ax <= az:
        ex = 1.0
    elif ay <= az:
        ey = 1.0
    else:
        ez = 1.0
    d = ex * lx + ey * ly + ez * lz
    mx = ex - d * lx
    my = ey - d * ly
    mz = ez - d * lz
    r = sqrt(mx * mx + my * my + mz * mz)
    mx /= r
    my /= r
    mz /= r
    out[0] = mx
    out[1] = my
    out[2] = mz
    out[3] = ly * mz - lz * my
    out[4] = lz * mx - lx * mz
    out[5] = lx * my - ly * mx


cdef inline int _chain(double l1x, double l1y, double l1z,
                       double t1, double t2, double t3,
                       double min_closure, double* legs) noexcept nogil:
    """Fill legs[0:15]; return 0 on success, -1 on failed closure."""
    cdef double frame[6]
    cdef double ts[3]
    cdef double px = l1x, py = l1y, pz = l1z
    cdef double ct, st, cx, cy, cz, r
    cdef int k
    ts[0] = t1
    ts[1] = t2
    ts[2] = t3
    legs[0] = l1x
    legs[1] = l1y
    legs[2] = l1z
    for k in range(3):
        _completion(px, py, pz, frame)
        ct = cos(ts[k])
        st = sin(ts[k])
        px = ct * frame[0] + st * frame[3]
        py = ct * frame[1] + st * frame[4]
        pz = ct * frame[2] + st * frame[5]
        legs[3 * k + 3] = px
        legs[3 * k + 4] = py
        legs[3 * k + 5] = pz
    cx = py * l1z - pz * l1y
    cy = pz * l1x - px * l1z
    cz = px * l1y - py * l1x
    r = sqrt(cx * cx + cy * cy + cz * cz)
    if r < min_closure:
        return -1
    legs[12] = cx / r
    legs[13] = cy / r
    legs[14] = cz / r
    return 0


def completion(double lx, double ly, double lz):
    """Deterministic right-handed orthonormal completion (m, n) of a unit vector."""
    cdef double out[6]
    _completion(lx, ly, lz, out)
    return out[0], out[1], out[2], out[3], out[4], out[5]


def chain_legs(double l1x, double l1y, double l1z,
               double t1, double t2, double t3, double min_closure=1e-8):
    """Grow legs 2..4 from leg 1 by bend angles, close with leg 5.

    Returns the 15 leg components as a flat tuple, or None when the closing
    cross product has norm below min_closure.
    """
    cdef double legs[15]
    if _chain(l1x, l1y, l1z, t1, t2, t3, min_closure, legs) != 0:
        return None
    return tuple([legs[i] for i in range(15)])


def kcbs_from_legs(legs, pr, pi):
    """Cyclic sum of |sum_j l_j psi_j|^2 over five legs (bilinear overlap)."""
    cdef double total = 0.0
    cdef double lx, ly, lz, re, im
    cdef double pr0 = pr[0], pr1 = pr[1], pr2 = pr[2]
    cdef double pi0 = pi[0], pi1 = pi[1], pi2 = pi[2]
    cdef int k
    for k in range(5):
        lx = legs[3 * k]
        ly = legs[3 * k + 1]
        lz = legs[3 * k + 2]
        re = lx * pr0 + ly * pr1 + lz * pr2
        im = lx * pi0 + ly * pi1 + lz * pi2
        total += re * re + im * im
    return total


def chain_kcbs(double a, double b, double t1, double t2, double t3,
               double[::1] triad, double[::1] pr, double[::1] pi,
               double min_closure=1e-8, double parallel_tol=1e-10):
    """Overlap sum of the chain pentagram with first leg at angles (a, b).

    Same contract as the pure-Python kernel: -1.0 marks invalid geometry
    (failed closure or non-adjacent legs within parallel_tol of parallel).
    """
    cdef double legs[15]
    cdef double sa = sin(a), ca = cos(a), sb = sin(b), cb = cos(b)
    cdef double l1x = ca * triad[0] + sa * (cb * triad[3] + sb * triad[6])
    cdef double l1y = ca * triad[1] + sa * (cb * triad[4] + sb * triad[7])
    cdef double l1z = ca * triad[2] + sa * (cb * triad[5] + sb * triad[8])
    cdef double d, lx, ly, lz, re, im, total
    cdef int i, j, k
    cdef int pairs[5][2]
    pairs[0][0] = 0
    pairs[0][1] = 2
    pairs[1][0] = 0
    pairs[1][1] = 3
    pairs[2][0] = 1
    pairs[2][1] = 3
    pairs[3][0] = 1
    pairs[3][1] = 4
    pairs[4][0] = 2
    pairs[4][1] = 4
    if _chain(l1x, l1y, l1z, t1, t2, t3, min_closure, legs) != 0:
        return -1.0
    for k in range(5):
        i = pairs[k][0]
        j = pairs[k][1]
        d = (legs[3 * i] * legs[3 * j]
             + legs[3 * i + 1] * legs[3 * j + 1]
             + legs[3 * i + 2] * legs[3 * j + 2])
        if d > 1.0 - parallel_tol or d < parallel_tol - 1.0:
            return -1.0
    total = 0.0
    for k in range(5):
        lx = legs[3 * k]
        ly = legs[3 * k + 1]
        lz = legs[3 * k + 2]
        re = lx * pr[0] + ly * pr[1] + lz * pr[2]
        im = lx * pi[0] + ly * pi[1] + lz * pi[2]
        total += re * re + im * im
    return total
