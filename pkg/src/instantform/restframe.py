"""Rest-frame instant form: internal coordinates, relative dynamics, world-lines.

An isolated system is described by frozen collective data (the Jacobi data
z = Mc * x_NW(0) and h = P/Mc) together with internal coordinates
(eta_i, kappa_i) living on the instantaneous 3-space orthogonal to the total
momentum (the Wigner 3-space) with the covariant center as origin.  The
internal data satisfy two rest-frame conditions:

    sum_i kappa_i = 0            (internal momentum vanishes)
    K_int = 0                    (energy-weighted moment vanishes, which
                                  pins the origin to the covariant center)

to_rest_frame builds that representation from an arbitrary lab snapshot;
evolve integrates the two-body relative motion with the invariant mass as
Hamiltonian; reconstruct_worldlines maps an internal trajectory back to lab
world-lines x_i(tau) = X_FP(tau) + eps_r(h) eta_i^r(tau), with eps_r(h) the
spatial columns of the standard boost.

Internally c = 1 style units: tau is a length (c times rest time), momenta
are in momentum units, and the Hamiltonian is Mc (an energy divided by c).
"""

from dataclasses import dataclass, field

import numpy as np

from . import collective
from .errors import CollisionError, NonConvergenceError
from .foliation import Embedding
from .minkowski import boost_from_h
from .potentials import (
    POTENTIALS,
    relative_potential_energy,
    relative_potential_gradients,
)

__all__ = [
    "RestFrameState",
    "InternalGenerators",
    "RelativeState",
    "Trajectory",
    "ReconstructedWorldlines",
    "to_rest_frame",
    "internal_generators",
    "relative_state",
    "rest_frame_from_relative",
    "invariant_mass_hamiltonian",
    "evolve",
    "reconstruct_worldlines",
    "wigner_hyperplane_embedding",
]


@dataclass
class RestFrameState:
    """Internal (Wigner 3-space) representation of a snapshot.

    etas and kappas have shape (n, 3) and satisfy the two rest-frame
    conditions; (Mc, h, z) are the frozen collective data, identical to what
    module collective computes for the same snapshot.
    """

    masses: np.ndarray
    etas: np.ndarray
    kappas: np.ndarray
    charges: np.ndarray
    potential: str
    Mc: float
    h: np.ndarray
    z: np.ndarray
    S_bar: np.ndarray
    tau: float = 0.0
    c: float = 1.0
    sgn: int = 1
    projection_residual: tuple = (0.0, 0.0)

    @property
    def n(self):
        return self.masses.shape[0]

    def internal_energies(self):
        return np.sqrt((self.masses * self.c) ** 2 + np.sum(self.kappas**2, axis=1))


def _pair_terms(masses, positions, momenta, charges, potential, c):
    """[(i, j, V_ij)] evaluated from internal data; energies."""
    out = []
    if potential == "none":
        return out
    n = masses.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            q1q2 = charges[i] * charges[j]
            if q1q2 == 0.0:
                continue
            rvec = positions[i] - positions[j]
            # relative momentum of the pair: (kappa_i - kappa_j)/2 matches the
            # two-body rest-frame convention and the frozen Darwin form
            pij = 0.5 * (momenta[i] - momenta[j])
            v = relative_potential_energy(potential, q1q2, masses[i], masses[j], c, rvec, pij)
            out.append((i, j, v))
    return out


def to_rest_frame(sys, sgn=1):
    """Map a lab snapshot to its rest-frame instant-form representation.

    Boosts every particle with the standard boost of -h (3-vectors land in
    the Wigner 3-space, so no extra rotation is applied), re-synchronizes the
    boosted events at rest time zero along straight lines, and translates the
    origin so the energy-weighted moment vanishes.  For free systems the
    straight-line step is exact and the rest-frame conditions hold to
    rounding; for interacting snapshots in motion the drift ignores forces,
    so the conditions are enforced by an exact constraint projection whose
    size is recorded in ``projection_residual``.
    """
    g = collective.poincare_generators(sys, sgn)
    mc, h, s_bar = invariants = collective.invariant_mass_spin(g)
    _, z, _ = collective.newton_wigner_and_jacobi(g)

    lam = boost_from_h(-h)
    e = sys.energies()
    p4 = np.concatenate((e[:, None], sys.momenta), axis=1) @ lam.T
    events = np.concatenate((np.full((sys.n, 1), sys.x0), sys.positions), axis=1) @ lam.T
    vel = p4[:, 1:] / p4[:, :1]
    x_rest = events[:, 1:] + vel * (0.0 - events[:, :1])     # straight-line resync

    kappas = p4[:, 1:].copy()
    kap_residual = float(np.linalg.norm(kappas.sum(axis=0)))
    kappas -= kappas.sum(axis=0) / sys.n

    energies = np.sqrt((sys.masses * sys.c) ** 2 + np.sum(kappas**2, axis=1))
    pairs = _pair_terms(sys.masses, x_rest, kappas, sys.charges, sys.potential, sys.c)
    e_int = energies.sum() + sum(v for _, _, v in pairs) / sys.c
    moment = x_rest.T @ energies
    for i, j, v in pairs:
        moment = moment + (v / sys.c) * 0.5 * (x_rest[i] + x_rest[j])
    shift = moment / e_int
    etas = x_rest - shift

    return RestFrameState(
        masses=sys.masses.copy(),
        etas=etas,
        kappas=kappas,
        charges=sys.charges.copy(),
        potential=sys.potential,
        Mc=mc,
        h=h,
        z=z,
        S_bar=s_bar,
        tau=0.0,
        c=sys.c,
        sgn=sgn,
        projection_residual=(kap_residual, float(np.linalg.norm(shift))),
    )


@dataclass
class InternalGenerators:
    """Internal realization of mass, momentum, spin and boost moment."""

    E_int: float          # internal energy in momentum units; equals Mc
    P_int: np.ndarray     # sum of internal momenta; zero on the constraint
    S_bar: np.ndarray     # internal spin sum eta x kappa
    K_int: np.ndarray     # energy-weighted moment; zero at the covariant center


def internal_generators(st):
    """Evaluate the internal generators of a rest-frame state."""
    energies = st.internal_energies()
    pairs = _pair_terms(st.masses, st.etas, st.kappas, st.charges, st.potential, st.c)
    e_int = float(energies.sum() + sum(v for _, _, v in pairs) / st.c)
    p_int = st.kappas.sum(axis=0)
    s_bar = np.sum(np.cross(st.etas, st.kappas), axis=0)
    k_int = st.etas.T @ energies
    for i, j, v in pairs:
        k_int = k_int + (v / st.c) * 0.5 * (st.etas[i] + st.etas[j])
    return InternalGenerators(E_int=e_int, P_int=p_int, S_bar=s_bar, K_int=k_int)


@dataclass
class RelativeState:
    """Two-body relative coordinates on the Wigner 3-space."""

    m1: float
    m2: float
    rho: np.ndarray
    pi: np.ndarray
    charge_product: float = 0.0
    c: float = 1.0

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float)
        self.pi = np.asarray(self.pi, dtype=float)
        if self.rho.shape != (3,) or self.pi.shape != (3,):
            raise ValueError("rho and pi must be 3-vectors")
        if not (self.m1 > 0 and self.m2 > 0):
            raise ValueError("masses must be positive")
        if not self.c > 0:
            raise ValueError("c must be positive")


def relative_state(st):
    """Extract the two-body relative coordinates from a rest-frame state."""
    if st.n != 2:
        raise ValueError(f"relative coordinates need exactly 2 particles, got {st.n}")
    return RelativeState(
        m1=float(st.masses[0]),
        m2=float(st.masses[1]),
        rho=st.etas[0] - st.etas[1],
        pi=0.5 * (st.kappas[0] - st.kappas[1]),
        charge_product=float(st.charges[0] * st.charges[1]),
        c=st.c,
    )


def rest_frame_from_relative(rel, potential, z=None, h=None, sgn=1, charges=None):
    """Embed relative coordinates back into a full rest-frame state.

    The individual positions follow from the conditions kappa_1 = -kappa_2 =
    pi and K_int = 0, which give energy weights

        eta_1 = (E2 + V/2c)/Mc * rho,     eta_2 = -(E1 + V/2c)/Mc * rho.
    """
    if potential not in POTENTIALS:
        raise ValueError(f"potential must be one of {POTENTIALS}")
    e1 = np.sqrt((rel.m1 * rel.c) ** 2 + rel.pi @ rel.pi)
    e2 = np.sqrt((rel.m2 * rel.c) ** 2 + rel.pi @ rel.pi)
    v = relative_potential_energy(
        potential, rel.charge_product, rel.m1, rel.m2, rel.c, rel.rho, rel.pi
    )
    mc = e1 + e2 + v / rel.c
    w1 = (e2 + 0.5 * v / rel.c) / mc
    w2 = (e1 + 0.5 * v / rel.c) / mc
    etas = np.array([w1 * rel.rho, -w2 * rel.rho])
    kappas = np.array([rel.pi, -rel.pi])
    if charges is None:
        # any split with the right product reproduces the pair potential
        q = np.sqrt(abs(rel.charge_product))
        charges = np.array([q, np.sign(rel.charge_product) * q]) if q else np.zeros(2)
    if z is None:
        z = np.zeros(3)
    if h is None:
        h = np.zeros(3)
    return RestFrameState(
        masses=np.array([rel.m1, rel.m2]),
        etas=etas,
        kappas=kappas,
        charges=np.asarray(charges, dtype=float),
        potential=potential,
        Mc=float(mc),
        h=np.asarray(h, dtype=float),
        z=np.asarray(z, dtype=float),
        S_bar=np.cross(rel.rho, rel.pi),
        tau=0.0,
        c=rel.c,
        sgn=sgn,
    )


def invariant_mass_hamiltonian(rel, potential):
    """Mc(rho, pi): the invariant mass of the pair, in momentum units."""
    e1 = np.sqrt((rel.m1 * rel.c) ** 2 + rel.pi @ rel.pi)
    e2 = np.sqrt((rel.m2 * rel.c) ** 2 + rel.pi @ rel.pi)
    v = relative_potential_energy(
        potential, rel.charge_product, rel.m1, rel.m2, rel.c, rel.rho, rel.pi
    )
    return float(e1 + e2 + v / rel.c)


def _gradients(rel, potential, rho, pi):
    """(dH/drho, dH/dpi) of the invariant-mass Hamiltonian."""
    e1 = np.sqrt((rel.m1 * rel.c) ** 2 + pi @ pi)
    e2 = np.sqrt((rel.m2 * rel.c) ** 2 + pi @ pi)
    g_rho, g_pi = relative_potential_gradients(
        potential, rel.charge_product, rel.m1, rel.m2, rel.c, rho, pi
    )
    return g_rho / rel.c, pi * (1.0 / e1 + 1.0 / e2) + g_pi / rel.c


@dataclass
class Trajectory:
    """Sampled relative trajectory with conserved quantities along the way."""

    tau: np.ndarray
    rho: np.ndarray
    pi: np.ndarray
    H: np.ndarray
    L: np.ndarray
    m1: float
    m2: float
    charge_product: float
    potential: str
    c: float
    dtau: float
    scheme: str
    meta: dict = field(default_factory=dict)

    @property
    def energy_drift(self):
        return float(np.max(np.abs(self.H - self.H[0])) / abs(self.H[0]))


def evolve(rel, potential, dtau, n_steps, fp_tol=1e-12, fp_max_iter=50,
           collision_fraction=1e-3):
    """Integrate the relative motion under the invariant-mass Hamiltonian.

    A fixed-step second-order symmetric (generalized leapfrog) scheme:
    momentum-independent potentials use the explicit kick-drift-kick form;
    the Darwin term makes dH/drho depend on pi and dH/dpi on rho, so those
    substeps turn implicit and are solved by fixed-point iteration to
    ``fp_tol`` (NonConvergenceError after ``fp_max_iter`` sweeps).

    Raises CollisionError, carrying the last good sample, when a step passes
    within ``collision_fraction`` times the initial separation of rho = 0
    (checked against the whole straight segment swept during the step, so a
    plunge cannot tunnel through the singularity between samples).
    """
    if potential not in POTENTIALS:
        raise ValueError(f"potential must be one of {POTENTIALS}")
    if not dtau > 0:
        raise ValueError("dtau must be positive")
    n_steps = int(n_steps)
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")

    implicit = potential == "coulomb+darwin"
    rho = np.array(rel.rho, dtype=float)
    pi = np.array(rel.pi, dtype=float)
    r_floor = collision_fraction * np.linalg.norm(rho)

    taus = dtau * np.arange(n_steps + 1)
    rhos = np.empty((n_steps + 1, 3))
    pis = np.empty((n_steps + 1, 3))
    hs = np.empty(n_steps + 1)
    ls = np.empty((n_steps + 1, 3))

    def record(k, rho, pi):
        rhos[k] = rho
        pis[k] = pi
        state = RelativeState(rel.m1, rel.m2, rho, pi, rel.charge_product, rel.c)
        hs[k] = invariant_mass_hamiltonian(state, potential)
        ls[k] = np.cross(rho, pi)

    def check_separation(k, rho_old, rho):
        # closest approach of the swept segment to the origin
        d = rho - rho_old
        dd = d @ d
        t = 0.0 if dd == 0.0 else float(np.clip(-(rho_old @ d) / dd, 0.0, 1.0))
        closest = rho_old + t * d
        if np.linalg.norm(closest) <= r_floor:
            raise CollisionError(
                f"separation fell below {r_floor:.3e} during step {k}",
                last_state=(float(taus[k - 1]), rhos[k - 1].copy(), pis[k - 1].copy()),
            )

    record(0, rho, pi)
    max_sweeps = 0
    for k in range(1, n_steps + 1):
        rho_old = rho
        if implicit:
            # half kick, implicit in the updated momentum
            pi_h = pi.copy()
            for sweep in range(fp_max_iter):
                g_rho, _ = _gradients(rel, potential, rho, pi_h)
                pi_new = pi - 0.5 * dtau * g_rho
                delta = np.max(np.abs(pi_new - pi_h))
                pi_h = pi_new
                if delta <= fp_tol * max(1.0, np.max(np.abs(pi_h))):
                    break
            else:
                raise NonConvergenceError(
                    f"implicit momentum substep stalled at step {k} "
                    f"(last update {delta:.3e})"
                )
            max_sweeps = max(max_sweeps, sweep + 1)
            # symmetric drift, implicit in the updated position
            _, g_pi_old = _gradients(rel, potential, rho, pi_h)
            rho_new = rho + dtau * g_pi_old
            for sweep in range(fp_max_iter):
                _, g_pi_new = _gradients(rel, potential, rho_new, pi_h)
                rho_next = rho + 0.5 * dtau * (g_pi_old + g_pi_new)
                delta = np.max(np.abs(rho_next - rho_new))
                rho_new = rho_next
                if delta <= fp_tol * max(1.0, np.max(np.abs(rho_new))):
                    break
            else:
                raise NonConvergenceError(
                    f"implicit position substep stalled at step {k} "
                    f"(last update {delta:.3e})"
                )
            max_sweeps = max(max_sweeps, sweep + 1)
            rho = rho_new
            g_rho_end, _ = _gradients(rel, potential, rho, pi_h)
            pi = pi_h - 0.5 * dtau * g_rho_end
        else:
            g_rho, _ = _gradients(rel, potential, rho, pi)
            pi_h = pi - 0.5 * dtau * g_rho
            _, g_pi = _gradients(rel, potential, rho, pi_h)
            rho = rho + dtau * g_pi
            g_rho_end, _ = _gradients(rel, potential, rho, pi_h)
            pi = pi_h - 0.5 * dtau * g_rho_end
        check_separation(k, rho_old, rho)
        record(k, rho, pi)

    scheme = "generalized-leapfrog(implicit)" if implicit else "leapfrog"
    traj = Trajectory(
        tau=taus, rho=rhos, pi=pis, H=hs, L=ls,
        m1=rel.m1, m2=rel.m2, charge_product=rel.charge_product,
        potential=potential, c=rel.c, dtau=float(dtau), scheme=scheme,
        meta={"fp_tol": fp_tol, "max_fixed_point_sweeps": max_sweeps},
    )
    return traj


@dataclass
class ReconstructedWorldlines:
    """Lab world-lines of both particles sampled along a trajectory."""

    tau: np.ndarray
    events: np.ndarray         # shape (2, n_samples, 4)
    fp_events: np.ndarray      # covariant center world-line samples
    tetrad: np.ndarray         # eps_r(h): columns 1..3 of the standard boost
    h: np.ndarray
    Mc: float
    timelike: np.ndarray       # per particle, per segment

    @property
    def all_timelike(self):
        return bool(np.all(self.timelike))


def reconstruct_worldlines(traj, z, h, sgn=1):
    """Map an internal trajectory to lab world-lines.

    x_i(tau) = X_FP(tau) + eps_r(h) eta_i^r(tau): the covariant center
    world-line is rebuilt from the frozen Jacobi data (z, h) with Mc and
    S_bar taken from the trajectory's initial sample, and the internal
    positions are inserted along the boost tetrad.  Each segment of each
    world-line is checked to be causal (non-spacelike); flags are reported
    per segment in ``timelike``.
    """
    z = np.asarray(z, dtype=float)
    h = np.asarray(h, dtype=float)
    mc = float(traj.H[0])
    s_bar = np.cross(traj.rho[0], traj.pi[0])
    g = collective.external_generators(z, h, mc, s_bar, sgn=sgn, c=traj.c)
    fp = collective.fokker_pryce_worldline(g)
    boost = boost_from_h(h)
    tetrad = boost[:, 1:]

    n = traj.tau.shape[0]
    fp_events = fp(traj.tau)
    events = np.empty((2, n, 4))
    rel = RelativeState(traj.m1, traj.m2, traj.rho[0], traj.pi[0],
                        traj.charge_product, traj.c)
    for k in range(n):
        rel.rho = traj.rho[k]
        rel.pi = traj.pi[k]
        st = rest_frame_from_relative(rel, traj.potential)
        for i in range(2):
            events[i, k] = fp_events[k] + tetrad @ st.etas[i]

    deltas = np.diff(events, axis=1)
    timelike = deltas[..., 0] ** 2 - np.sum(deltas[..., 1:] ** 2, axis=-1) >= -1e-12
    return ReconstructedWorldlines(
        tau=traj.tau.copy(),
        events=events,
        fp_events=fp_events,
        tetrad=tetrad,
        h=h,
        Mc=mc,
        timelike=timelike,
    )


def wigner_hyperplane_embedding(z, h, mc, s_bar, sgn=1):
    """The foliation whose 3-spaces are the Wigner hyperplanes of (z, h).

    z_W(tau, sigma) = X_FP(tau) + eps_r(h) sigma^r.  The chart is inertial
    (its induced metric is exactly Minkowski), so radar_coordinates inverts
    it in one Newton step; useful for round-trip tests against reconstructed
    world-lines.
    """
    g = collective.external_generators(z, h, mc, s_bar, sgn=sgn)
    fp = collective.fokker_pryce_worldline(g)
    boost = boost_from_h(np.asarray(h, dtype=float))
    jac = np.empty((4, 4))
    jac[:, 0] = boost[:, 0]
    jac[:, 1:] = boost[:, 1:]

    def zfun(tau, sigma):
        return fp(tau) + boost[:, 1:] @ sigma

    return Embedding(zfun, jacobian=lambda tau, sigma: jac.copy(),
                     name="wigner-hyperplane")
