"""Independent oracles used by the test suite.

Everything here recomputes expected values through a different route than
the library code under test: different discretizations, different linear
algebra, or closed forms.  Keeping them in one place makes it easy to see
that no oracle shares code with what it checks.
"""

import numpy as np
from scipy.optimize import brentq

ETA = np.diag([1.0, -1.0, -1.0, -1.0])


def stencil_extrinsic_curvature(emb, tau, sigma, step=1e-4):
    """Shape tensor via Gram-Schmidt normal + plain difference stencils.

    The library computes K from lapse, shift and metric derivatives; this
    oracle instead projects second position differences onto a unit normal
    built by Gram-Schmidt against the three tangents.  No cofactors, no
    Christoffel symbols, no shared code path.
    """
    sigma = np.asarray(sigma, dtype=float)

    tangents = []
    for r in range(3):
        e = np.zeros(3)
        e[r] = step
        tangents.append((emb(tau, sigma + e) - emb(tau, sigma - e)) / (2 * step))

    basis = []
    for v in tangents:
        v = v.copy()
        for b in basis:
            v -= (v @ ETA @ b) / (b @ ETA @ b) * b
        basis.append(v)
    normal = np.array([1.0, 0.0, 0.0, 0.0])
    for b in basis:
        normal -= (normal @ ETA @ b) / (b @ ETA @ b) * b
    normal /= np.sqrt(normal @ ETA @ normal)
    if normal[0] < 0:
        normal = -normal

    k = np.zeros((3, 3))
    for r in range(3):
        er = np.zeros(3)
        er[r] = step
        for s in range(r, 3):
            es = np.zeros(3)
            es[s] = step
            if r == s:
                dd = (emb(tau, sigma + er) - 2 * emb(tau, sigma)
                      + emb(tau, sigma - er)) / step**2
            else:
                dd = (emb(tau, sigma + er + es) - emb(tau, sigma + er - es)
                      - emb(tau, sigma - er + es) + emb(tau, sigma - er - es)
                      ) / (4 * step**2)
            k[r, s] = k[s, r] = -(normal @ ETA @ dd)
    return k


def inertial_sync_closed_form(origin, h, event):
    """Radar time of an event for a uniformly moving observer.

    Midpoint of emission/absorption proper times equals the projection of
    the event onto the observer's 4-velocity: tau = u . (event - origin).
    """
    u = np.concatenate(([np.sqrt(1.0 + h @ h)], h))
    d = np.asarray(event, dtype=float) - np.asarray(origin, dtype=float)
    return float(u @ ETA @ d)


def circular_orbit_momentum(m1, m2, q1q2, radius, c=1.0):
    """|pi| giving a circular relativistic Coulomb orbit of the given radius.

    Balances the rate of direction change of pi against the central force:
    k^2 (1/E1 + 1/E2) / r = alpha / (c r^2) with alpha = -q1q2/(4 pi) > 0.
    """
    alpha = -q1q2 / (4.0 * np.pi)
    if alpha <= 0:
        raise ValueError("needs an attractive pair (q1q2 < 0)")

    def residual(k):
        e1 = np.sqrt((m1 * c) ** 2 + k * k)
        e2 = np.sqrt((m2 * c) ** 2 + k * k)
        return k * k * (1.0 / e1 + 1.0 / e2) - alpha / (c * radius)

    return brentq(residual, 1e-12, 1e9, xtol=1e-15, rtol=8.882e-16)


def newtonian_relative_orbit(m1, m2, q1q2, rho0, p0, dt, n_steps):
    """Velocity-Verlet for the nonrelativistic limit of the two-body problem.

    mu rho'' = -dV/drho with V = q1q2/(4 pi r), integrated in physical time.
    Same order and same kick-drift-kick structure as the library integrator,
    so comparing against it at increasing c isolates the relativistic terms.
    """
    mu = m1 * m2 / (m1 + m2)
    rho = np.array(rho0, dtype=float)
    p = np.array(p0, dtype=float)
    out = np.empty((n_steps + 1, 3))
    out[0] = rho

    def force(r_vec):
        r = np.linalg.norm(r_vec)
        return q1q2 / (4.0 * np.pi * r**3) * r_vec

    for k in range(1, n_steps + 1):
        p += 0.5 * dt * force(rho)
        rho = rho + dt * p / mu
        p += 0.5 * dt * force(rho)
        out[k] = rho
    return out


def orthogonal_boost_wigner_tangent(xi1, xi2):
    """tan of the Wigner angle for two orthogonal boosts of given rapidities."""
    return np.sinh(xi1) * np.sinh(xi2) / (np.cosh(xi1) + np.cosh(xi2))
