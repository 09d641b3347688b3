"""Batched N-body sums against the wall kernels.

Scalar re-implementations of the closed forms in halfwall.greens, compiled
with numba and summed per target in a fixed source order, so results are
bit-reproducible for any thread count.  The python wrappers add the same
separation guard as the reference module.
"""

import numpy as np
from numba import njit, prange

GUARD_REL = 1e-8
_FOUR_PI = 4.0 * np.pi
_EIGHT_PI = 8.0 * np.pi


@njit(cache=True, parallel=True)
def _apply(targets, sources, forces, radii, want_finite, want_grad1, out, pout):
    # accumulates G f (optionally + (r^2/6) lap_y G f) into out, the pressure
    # kernel into pout, or d/dx1 of G f when want_grad1; returns min |x - y|
    m_tot = targets.shape[0]
    n_tot = sources.shape[0]
    min_sep = 1e300
    for m in prange(m_tot):
        x0 = targets[m, 0]
        x1 = targets[m, 1]
        x2 = targets[m, 2]
        a0 = 0.0
        a1 = 0.0
        a2 = 0.0
        ap = 0.0
        loc_sep = 1e300
        for n in range(n_tot):
            y0 = sources[n, 0]
            y1 = sources[n, 1]
            y2 = sources[n, 2]
            f0 = forces[n, 0]
            f1 = forces[n, 1]
            f2 = forces[n, 2]
            r0 = x0 - y0
            r1 = x1 - y1
            r2 = x2 - y2
            d2 = r0 * r0 + r1 * r1 + r2 * r2
            d = np.sqrt(d2)
            if d < loc_sep:
                loc_sep = d
            d3 = d * d2
            d5 = d3 * d2
            z0 = x0 + y0
            z1 = r1
            z2 = r2
            q2 = z0 * z0 + z1 * z1 + z2 * z2
            q = np.sqrt(q2)
            q3 = q * q2
            q5 = q3 * q2
            q7 = q5 * q2
            rf = r0 * f0 + r1 * f1 + r2 * f2
            # mirrored force and the s-weighted contraction s_j z_j f_j
            g0 = -f0
            zf = z0 * g0 + z1 * f1 + z2 * f2
            szf = zf
            b = y0

            if want_grad1:
                # d/dx0 of the Oseen part
                c = 1.0 / (_EIGHT_PI * d3)
                a0 += c * (-f0 * r0 + rf + r0 * f0 - 3.0 * r0 * rf * r0 / d2)
                a1 += c * (-f1 * r0 + r1 * f0 - 3.0 * r1 * rf * r0 / d2)
                a2 += c * (-f2 * r0 + r2 * f0 - 3.0 * r2 * rf * r0 / d2)
                # image part (z0 also moves with x0)
                ci = 1.0 / (_EIGHT_PI * q3)
                a0 -= ci * (-g0 * z0 + zf + z0 * g0 - 3.0 * z0 * zf * z0 / q2)
                a1 -= ci * (-f1 * z0 + z1 * g0 - 3.0 * z1 * zf * z0 / q2)
                a2 -= ci * (-f2 * z0 + z2 * g0 - 3.0 * z2 * zf * z0 / q2)
                # wall correction: d/dx0 (x0 dphi_i - delta_i0 phi)
                dp0 = (f0 * z0 / q3 + b * (-f0 / q3 - 3.0 * z0 * szf / q5)) / _FOUR_PI
                dp1 = (f0 * z1 / q3 + b * (f1 / q3 - 3.0 * z1 * szf / q5)) / _FOUR_PI
                dp2 = (f0 * z2 / q3 + b * (f2 / q3 - 3.0 * z2 * szf / q5)) / _FOUR_PI
                dd0 = (f0 * (1.0 / q3 - 3.0 * z0 * z0 / q2 / q3)
                       + b * (-3.0 * (-f0 * z0 - f0 * z0 + szf) / q5
                              + 15.0 * z0 * z0 * szf / q7)) / _FOUR_PI
                dd1 = (f0 * (-3.0 * z1 * z0 / q5)
                       + b * (-3.0 * (f1 * z0 - f0 * z1) / q5
                              + 15.0 * z1 * z0 * szf / q7)) / _FOUR_PI
                dd2 = (f0 * (-3.0 * z2 * z0 / q5)
                       + b * (-3.0 * (f2 * z0 - f0 * z2) / q5
                              + 15.0 * z2 * z0 * szf / q7)) / _FOUR_PI
                a0 -= x0 * dd0
                a1 -= dp1 + x0 * dd1
                a2 -= dp2 + x0 * dd2
                continue

            # Oseen plus image point force
            c = 1.0 / (_EIGHT_PI * d)
            a0 += c * (f0 + r0 * rf / d2)
            a1 += c * (f1 + r1 * rf / d2)
            a2 += c * (f2 + r2 * rf / d2)
            ci = 1.0 / (_EIGHT_PI * q)
            a0 -= ci * (g0 + z0 * zf / q2)
            a1 -= ci * (f1 + z1 * zf / q2)
            a2 -= ci * (f2 + z2 * zf / q2)
            # wall correction A f
            phif = (-f0 / q + b * szf / q3) / _FOUR_PI
            dp0 = (f0 * z0 / q3 + b * (-f0 / q3 - 3.0 * z0 * szf / q5)) / _FOUR_PI
            dp1 = (f0 * z1 / q3 + b * (f1 / q3 - 3.0 * z1 * szf / q5)) / _FOUR_PI
            dp2 = (f0 * z2 / q3 + b * (f2 / q3 - 3.0 * z2 * szf / q5)) / _FOUR_PI
            a0 -= x0 * dp0 - phif
            a1 -= x0 * dp1
            a2 -= x0 * dp2
            ap += (rf / d3 - szf / q3) / _FOUR_PI - 2.0 * dp0

            if want_finite:
                rad = radii[n]
                w = rad * rad / 6.0
                cl = 1.0 / (_FOUR_PI * d3)
                l0 = cl * (f0 - 3.0 * r0 * rf / d2)
                l1 = cl * (f1 - 3.0 * r1 * rf / d2)
                l2 = cl * (f2 - 3.0 * r2 * rf / d2)
                cli = 1.0 / (_FOUR_PI * q3)
                l0 -= cli * (g0 - 3.0 * z0 * zf / q2)
                l1 -= cli * (f1 - 3.0 * z1 * zf / q2)
                l2 -= cli * (f2 - 3.0 * z2 * zf / q2)
                lphif = (-f0 / q3 - 3.0 * z0 * szf / q5) / (2.0 * np.pi)
                ld0 = (-3.0 * (-f0 * z0 - f0 * z0 + szf) / q5
                       + 15.0 * z0 * z0 * szf / q7) / (2.0 * np.pi)
                ld1 = (-3.0 * (f1 * z0 - f0 * z1) / q5
                       + 15.0 * z0 * z1 * szf / q7) / (2.0 * np.pi)
                ld2 = (-3.0 * (f2 * z0 - f0 * z2) / q5
                       + 15.0 * z0 * z2 * szf / q7) / (2.0 * np.pi)
                l0 -= x0 * ld0 - lphif
                l1 -= x0 * ld1
                l2 -= x0 * ld2
                a0 += w * l0
                a1 += w * l1
                a2 += w * l2

        out[m, 0] = a0
        out[m, 1] = a1
        out[m, 2] = a2
        pout[m] = ap
        min_sep = min(min_sep, loc_sep)
    return min_sep


def _prep(targets, sources, forces):
    targets = np.ascontiguousarray(np.atleast_2d(np.asarray(targets, dtype=np.float64)))
    sources = np.ascontiguousarray(np.atleast_2d(np.asarray(sources, dtype=np.float64)))
    forces = np.asarray(forces, dtype=np.float64)
    if forces.ndim == 1:
        forces = np.broadcast_to(forces, sources.shape)
    forces = np.ascontiguousarray(forces)
    if sources.shape != forces.shape:
        raise ValueError("sources and forces must have matching shapes")
    return targets, sources, forces


def _guard(min_sep, sources):
    scale = max(1.0, float(np.abs(sources).max()))
    if min_sep < GUARD_REL * scale:
        raise ValueError("evaluation point too close to a source point")


def greens_apply(targets, sources, forces):
    """Sum_n G(x_m, y_n) f_n for every target x_m."""
    targets, sources, forces = _prep(targets, sources, forces)
    out = np.empty_like(targets)
    pout = np.empty(targets.shape[0])
    radii = np.empty(0)
    min_sep = _apply(targets, sources, forces, radii, False, False, out, pout)
    _guard(min_sep, sources)
    return out


def greens_apply_finite(targets, sources, forces, radii):
    """Finite-size superposition: (1 + radius^2/6 lap_y) G applied per source."""
    targets, sources, forces = _prep(targets, sources, forces)
    radii = np.ascontiguousarray(np.broadcast_to(
        np.asarray(radii, dtype=np.float64), sources.shape[:1]))
    out = np.empty_like(targets)
    pout = np.empty(targets.shape[0])
    min_sep = _apply(targets, sources, forces, radii, True, False, out, pout)
    _guard(min_sep, sources)
    return out


def greens_grad1_apply(targets, sources, forces):
    """Wall-normal derivative d/dx1 of the point superposition."""
    targets, sources, forces = _prep(targets, sources, forces)
    out = np.empty_like(targets)
    pout = np.empty(targets.shape[0])
    radii = np.empty(0)
    min_sep = _apply(targets, sources, forces, radii, False, True, out, pout)
    _guard(min_sep, sources)
    return out


def greens_pressure_apply(targets, sources, forces):
    """Pressure companion of greens_apply."""
    targets, sources, forces = _prep(targets, sources, forces)
    out = np.empty_like(targets)
    pout = np.empty(targets.shape[0])
    radii = np.empty(0)
    min_sep = _apply(targets, sources, forces, radii, False, False, out, pout)
    _guard(min_sep, sources)
    return pout


def min_separation(targets, sources):
    """Smallest |x_m - y_n| over all pairs, without evaluating kernels."""
    targets = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    sources = np.atleast_2d(np.asarray(sources, dtype=np.float64))
    best = np.inf
    for chunk in np.array_split(targets, max(1, targets.shape[0] // 512)):
        d = np.linalg.norm(chunk[:, None, :] - sources[None, :, :], axis=-1)
        best = min(best, d.min())
    return best
