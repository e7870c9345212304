"""Pure-Python chain kernel.

Reference implementation of the hot numerical path shared by the geometry
module and the optimizer: deterministic orthonormal completion, chain
construction of a pentagram from bend angles, and the cyclic overlap sum.
The compiled module _chainkernel implements the same functions with the
same arithmetic; either can back pentaspin.kernels.

Plain floats throughout, no numpy: in fallback mode this is called inside
optimizer loops where array overhead would dominate.
"""

import math

__all__ = ["completion", "chain_legs", "kcbs_from_legs", "chain_kcbs"]

# pentagram validity bands, shared with pentagram_geom
CLOSURE_TOL = 1e-8
PARALLEL_TOL = 1e-10


def completion(lx, ly, lz):
    """Deterministic right-handed orthonormal completion (m, n) of a unit vector.

    m is the normalized rejection of the coordinate axis with the smallest
    absolute component (lowest index on ties), n = l x m.  Returns the six
    components (mx, my, mz, nx, ny, nz).
    """
    ax = abs(lx)
    ay = abs(ly)
    az = abs(lz)
    if ax <= ay and ax <= az:
        ex, ey, ez = 1.0, 0.0, 0.0
    elif ay <= az:
        ex, ey, ez = 0.0, 1.0, 0.0
    else:
        ex, ey, ez = 0.0, 0.0, 1.0
    d = ex * lx + ey * ly + ez * lz
    mx = ex - d * lx
    my = ey - d * ly
    mz = ez - d * lz
    r = math.sqrt(mx * mx + my * my + mz * mz)
    mx /= r
    my /= r
    mz /= r
    nx = ly * mz - lz * my
    ny = lz * mx - lx * mz
    nz = lx * my - ly * mx
    return mx, my, mz, nx, ny, nz


def chain_legs(l1x, l1y, l1z, t1, t2, t3, min_closure=CLOSURE_TOL):
    """Grow legs 2..4 from leg 1 by bend angles, close with leg 5.

    Each new leg lies in the plane orthogonal to its predecessor at angle t_k
    within that plane's completion frame; leg 5 is the unit cross product
    l4 x l1, which is orthogonal to both of its cyclic neighbours.  Returns
    the 15 leg components as a flat tuple, or None when the closing cross
    product has norm below min_closure.
    """
    legs = [l1x, l1y, l1z]
    px, py, pz = l1x, l1y, l1z
    for t in (t1, t2, t3):
        mx, my, mz, nx, ny, nz = completion(px, py, pz)
        ct = math.cos(t)
        st = math.sin(t)
        px = ct * mx + st * nx
        py = ct * my + st * ny
        pz = ct * mz + st * nz
        legs.extend((px, py, pz))
    cx = py * l1z - pz * l1y
    cy = pz * l1x - px * l1z
    cz = px * l1y - py * l1x
    r = math.sqrt(cx * cx + cy * cy + cz * cz)
    if r < min_closure:
        return None
    legs.extend((cx / r, cy / r, cz / r))
    return tuple(legs)


def kcbs_from_legs(legs, pr, pi):
    """Cyclic sum of |sum_j l_j psi_j|^2 over five legs.

    legs is a flat 15-sequence; pr and pi carry the real and imaginary parts
    of the state.  The overlap is bilinear (no conjugation of psi).
    """
    total = 0.0
    for k in range(5):
        lx = legs[3 * k]
        ly = legs[3 * k + 1]
        lz = legs[3 * k + 2]
        re = lx * pr[0] + ly * pr[1] + lz * pr[2]
        im = lx * pi[0] + ly * pi[1] + lz * pi[2]
        total += re * re + im * im
    return total


def chain_kcbs(a, b, t1, t2, t3, triad, pr, pi,
               min_closure=CLOSURE_TOL, parallel_tol=PARALLEL_TOL):
    """Overlap sum of the chain pentagram with first leg at angles (a, b).

    The first leg is placed in the orthonormal triad (triad[0:3], triad[3:6],
    triad[6:9]) at polar angle a from the first axis and azimuth b in the
    plane of the other two.  Returns the overlap sum, or -1.0 when the chain
    fails to close or two non-adjacent legs are within parallel_tol of
    (anti)parallel, so callers can penalize invalid geometry.
    """
    sa = math.sin(a)
    ca = math.cos(a)
    sb = math.sin(b)
    cb = math.cos(b)
    l1x = ca * triad[0] + sa * (cb * triad[3] + sb * triad[6])
    l1y = ca * triad[1] + sa * (cb * triad[4] + sb * triad[7])
    l1z = ca * triad[2] + sa * (cb * triad[5] + sb * triad[8])
    legs = chain_legs(l1x, l1y, l1z, t1, t2, t3, min_closure)
    if legs is None:
        return -1.0
    for i, j in ((0, 2), (0, 3), (1, 3), (1, 4), (2, 4)):
        d = (legs[3 * i] * legs[3 * j]
             + legs[3 * i + 1] * legs[3 * j + 1]
             + legs[3 * i + 2] * legs[3 * j + 2])
        if d > 1.0 - parallel_tol or d < parallel_tol - 1.0:
            return -1.0
    return kcbs_from_legs(legs, pr, pi)
