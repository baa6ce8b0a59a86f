"""Shared factories and finite-difference machinery for the tests."""

import numpy as np

from instantform.collective import (
    ParticleSystem,
    invariant_mass_spin,
    newton_wigner_and_jacobi,
    poincare_generators,
)


def random_free_system(rng, n=2, mass_scale=1.0, momentum_scale=0.6,
                       position_scale=2.0, c=1.0):
    return ParticleSystem(
        masses=mass_scale * rng.uniform(0.5, 2.0, size=n),
        positions=position_scale * rng.standard_normal((n, 3)),
        momenta=momentum_scale * rng.standard_normal((n, 3)),
        x0=float(rng.uniform(-1.0, 1.0)),
        c=c,
    )


def random_spinning_pair(rng, min_spin=0.05, c=1.0):
    """Free two-particle system whose rest-frame spin is bounded away from 0."""
    for _ in range(200):
        sys = random_free_system(rng, n=2, c=c)
        mc, _, s_bar = invariant_mass_spin(poincare_generators(sys))
        if np.linalg.norm(s_bar) > min_spin * mc:
            return sys
    raise RuntimeError("could not draw a usefully spinning pair")


def random_coulomb_pair(rng, charge_product=-1.0, potential="coulomb", c=1.0):
    sys = random_free_system(rng, n=2, c=c)
    # keep the pair well separated so the potential stays mild
    sep = sys.positions[0] - sys.positions[1]
    r = np.linalg.norm(sep)
    if r < 1.0:
        sys.positions[0] += (1.5 - r) * sep / max(r, 1e-12)
    q = np.sqrt(abs(charge_product))
    return ParticleSystem(
        masses=sys.masses,
        positions=sys.positions,
        momenta=sys.momenta,
        charges=np.array([q, np.sign(charge_product) * q]),
        potential=potential,
        x0=sys.x0,
        c=c,
    )


def phase_space_gradient(f, sys, eps=1e-5):
    """Central-difference gradient of f(system) over (x_i^k, p_i^k).

    Returns (df_dx, df_dp), each shaped (n, 3).  Used by the canonical
    bracket checks; deliberately knows nothing about the generators'
    analytic structure.
    """
    n = sys.n
    df_dx = np.zeros((n, 3))
    df_dp = np.zeros((n, 3))
    for i in range(n):
        for k in range(3):
            for arr, out in ((sys.positions, df_dx), (sys.momenta, df_dp)):
                keep = arr[i, k]
                arr[i, k] = keep + eps
                fp = f(sys)
                arr[i, k] = keep - eps
                fm = f(sys)
                arr[i, k] = keep
                out[i, k] = (fp - fm) / (2 * eps)
    return df_dx, df_dp


def poisson_bracket(f, g, sys, eps=1e-5):
    fx, fp = phase_space_gradient(f, sys, eps)
    gx, gp = phase_space_gradient(g, sys, eps)
    return float(np.sum(fx * gp) - np.sum(gx * fp))


def nw_component(k):
    def f(sys):
        return float(newton_wigner_and_jacobi(poincare_generators(sys))[0][k])
    return f


def momentum_component(k):
    def f(sys):
        return float(poincare_generators(sys).P[k + 1])
    return f
