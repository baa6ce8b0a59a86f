"""Flat space-time primitives: metric, boosts, Wigner rotations.

Four-vectors are plain numpy arrays of shape (4,), ordered (x0, x1, x2, x3),
with the time component carrying the c factor so that all four entries share
one unit (lengths for events, momentum units for four-momenta).  The metric is

    eta = sgn * diag(+1, -1, -1, -1),      sgn in {+1, -1}

so sgn=+1 is the mostly-minus particle-physics convention and sgn=-1 the
mostly-plus one.  Every function takes sgn explicitly (default +1); quantities
that are convention-independent, like the interval x0^2 - |x|^2, are computed
without it.

Boosts are parameterized by the dimensionless vector h = p/(Mc), i.e. by
gamma * beta rather than beta, which keeps every real 3-vector h a valid
argument and makes boost composition with momenta exact:
boost_from_h(h) maps (Mc, 0, 0, 0) to (Mc*sqrt(1+h^2), Mc*h).
"""

import numpy as np

from .errors import NonTimelikeError

__all__ = [
    "metric",
    "minkowski_dot",
    "interval",
    "is_timelike_future",
    "boost_from_h",
    "standard_boost",
    "rotation_to_lorentz",
    "is_lorentz",
    "wigner_rotation",
    "levi_civita4",
]

_SIGNS = (1, -1)


def _check_sgn(sgn):
    if sgn not in _SIGNS:
        raise ValueError(f"sgn must be +1 or -1, got {sgn!r}")


def metric(sgn=1):
    """Return the 4x4 flat metric sgn*diag(+1, -1, -1, -1)."""
    _check_sgn(sgn)
    return sgn * np.diag([1.0, -1.0, -1.0, -1.0])


def minkowski_dot(a, b, sgn=1):
    """Scalar product a^mu eta_mu_nu b^nu.  Works on trailing axes of arrays."""
    _check_sgn(sgn)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return sgn * (a[..., 0] * b[..., 0] - np.sum(a[..., 1:] * b[..., 1:], axis=-1))


def interval(v):
    """Convention-independent interval v0^2 - |v|^2 (positive for timelike)."""
    v = np.asarray(v, dtype=float)
    return v[..., 0] ** 2 - np.sum(v[..., 1:] ** 2, axis=-1)


def is_timelike_future(v):
    v = np.asarray(v, dtype=float)
    return bool(np.all(interval(v) > 0.0) and np.all(v[..., 0] > 0.0))


def boost_from_h(h, sgn=1):
    """Pure (rotation-free) boost with velocity parameter h = gamma*beta.

    Maps the rest-frame momentum (Mc, 0, 0, 0) to (Mc*sqrt(1+h^2), Mc*h).
    The matrix itself does not depend on the metric convention; sgn is
    accepted for interface uniformity and validated only.
    """
    _check_sgn(sgn)
    h = np.asarray(h, dtype=float)
    if h.shape != (3,):
        raise ValueError(f"h must be a 3-vector, got shape {h.shape}")
    gamma = np.sqrt(1.0 + h @ h)
    lam = np.empty((4, 4))
    lam[0, 0] = gamma
    lam[0, 1:] = h
    lam[1:, 0] = h
    lam[1:, 1:] = np.eye(3) + np.outer(h, h) / (1.0 + gamma)
    return lam


def standard_boost(p, sgn=1):
    """Standard boost B(p): the pure boost taking (Mc, 0) to the momentum p.

    p must be timelike and future-pointing; raises NonTimelikeError otherwise.
    """
    p = np.asarray(p, dtype=float)
    m2 = interval(p)
    if m2 <= 0.0 or p[0] <= 0.0:
        raise NonTimelikeError(f"momentum {p} is not timelike future-pointing")
    return boost_from_h(p[1:] / np.sqrt(m2), sgn)


def rotation_to_lorentz(r):
    """Embed a 3x3 rotation matrix as the spatial block of a 4x4 transform."""
    r = np.asarray(r, dtype=float)
    lam = np.eye(4)
    lam[1:, 1:] = r
    return lam


def is_lorentz(lam, sgn=1, tol=1e-12):
    """True if lam^T eta lam = eta to within tol (max-abs entry)."""
    eta = metric(sgn)
    lam = np.asarray(lam, dtype=float)
    return bool(np.max(np.abs(lam.T @ eta @ lam - eta)) <= tol)


def wigner_rotation(p, lam, sgn=1):
    """Spatial rotation R(lam, p) = B(lam p)^-1 lam B(p) as a 3x3 matrix.

    For timelike future-pointing p the composition of standard boosts above
    leaves the rest frame, so the 4x4 product is block-diagonal 1 (+) R.
    """
    p = np.asarray(p, dtype=float)
    lam = np.asarray(lam, dtype=float)
    bp = standard_boost(p, sgn)
    p2 = lam @ p
    bp2 = standard_boost(p2, sgn)
    w = np.linalg.solve(bp2, lam @ bp)
    return w[1:, 1:].copy()


def levi_civita4():
    """Totally antisymmetric 4-index symbol with eps[0,1,2,3] = +1."""
    eps = np.zeros((4, 4, 4, 4))
    for perm, sign in _PERMUTATIONS4:
        eps[perm] = sign
    return eps


def _perms4():
    from itertools import permutations

    out = []
    for perm in permutations(range(4)):
        # parity by counting inversions
        inv = sum(
            1
            for i in range(4)
            for j in range(i + 1, 4)
            if perm[i] > perm[j]
        )
        out.append((perm, -1.0 if inv % 2 else 1.0))
    return tuple(out)


_PERMUTATIONS4 = _perms4()
