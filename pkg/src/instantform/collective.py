"""Collective observables of relativistic particle snapshots.

A snapshot lists particle positions at one common lab time together with
their momenta.  From it we build the ten Poincare generators, then the
frame-invariant content (invariant mass Mc, velocity parameter h = P/Mc,
rest spin S_bar) and the three inequivalent relativistic collective centers:

* the center of energy (Moller): the energy-weighted average position.  It is
  NOT the spatial part of any four-vector; different frames disagree about
  where it is, and the disagreement fills a world-tube;
* the center of inertia (Fokker-Pryce): the unique covariant center
  world-line, obtained by boosting the rest-frame center back to the lab;
* the canonical center (Newton-Wigner): the position with canonical Poisson
  brackets, which lies between the other two.

Conventions: four-momenta in momentum units (p0 = E/c = sqrt(m^2 c^2 + p^2));
interaction energies enter the time components divided by c.  The boost
moment of an interacting pair is the pair potential weighted at the midpoint
of the two positions, which reduces to the standard free-particle generators
as charges go to zero.

The energy radius |S_bar| / Mc bounds the center-of-energy world-tube:
moller_tube_sample measures the tube by computing the center of energy in
many boosted frames and mapping the results back.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NonTimelikeError, SingularPotentialError
from .minkowski import boost_from_h, levi_civita4, metric
from .potentials import POTENTIALS, coulomb_energy, darwin_energy

__all__ = [
    "ParticleSystem",
    "PoincareGenerators",
    "CenterTriple",
    "TubeSample",
    "poincare_generators",
    "invariant_mass_spin",
    "center_of_energy",
    "fokker_pryce_worldline",
    "newton_wigner_and_jacobi",
    "tube_radius",
    "center_triple",
    "external_generators",
    "poincare_transform_free",
    "moller_tube_sample",
]

_EPS4 = levi_civita4()


@dataclass
class ParticleSystem:
    """Particle snapshot at one common lab time ``x0`` (a length, = c*t).

    positions and momenta have shape (n, 3); momenta are in momentum units.
    ``potential`` is one of "none", "coulomb", "coulomb+darwin" and applies
    pairwise between all charged particles.
    """

    masses: np.ndarray
    positions: np.ndarray
    momenta: np.ndarray
    charges: np.ndarray = None
    potential: str = "none"
    x0: float = 0.0
    c: float = 1.0

    def __post_init__(self):
        self.masses = np.atleast_1d(np.asarray(self.masses, dtype=float))
        self.positions = np.asarray(self.positions, dtype=float)
        self.momenta = np.asarray(self.momenta, dtype=float)
        n = self.masses.shape[0]
        if self.charges is None:
            self.charges = np.zeros(n)
        self.charges = np.atleast_1d(np.asarray(self.charges, dtype=float))
        if self.positions.shape != (n, 3) or self.momenta.shape != (n, 3):
            raise ValueError(
                f"positions and momenta must have shape ({n}, 3); got "
                f"{self.positions.shape} and {self.momenta.shape}"
            )
        if self.charges.shape != (n,):
            raise ValueError(f"charges must have shape ({n},)")
        if np.any(self.masses <= 0.0):
            raise ValueError("masses must be positive")
        if self.potential not in POTENTIALS:
            raise ValueError(f"potential must be one of {POTENTIALS}")
        if not self.c > 0.0:
            raise ValueError("c must be positive")
        self.x0 = float(self.x0)
        if self.potential != "none":
            for i in range(n):
                for j in range(i + 1, n):
                    if np.linalg.norm(self.positions[i] - self.positions[j]) == 0.0:
                        raise SingularPotentialError(
                            f"particles {i} and {j} coincide; {self.potential} "
                            "potential undefined"
                        )

    @property
    def n(self):
        return self.masses.shape[0]

    def energies(self):
        """Kinetic particle energies in momentum units, sqrt(m^2 c^2 + p^2)."""
        return np.sqrt(
            (self.masses * self.c) ** 2 + np.sum(self.momenta**2, axis=1)
        )

    def pair_potential_energies(self):
        """List of (i, j, V_ij) with V_ij an energy; empty for potential none."""
        out = []
        if self.potential == "none":
            return out
        for i in range(self.n):
            for j in range(i + 1, self.n):
                q1q2 = self.charges[i] * self.charges[j]
                if q1q2 == 0.0:
                    continue
                rvec = self.positions[i] - self.positions[j]
                v = coulomb_energy(q1q2, rvec)
                if self.potential == "coulomb+darwin":
                    v += darwin_energy(
                        q1q2,
                        self.masses[i],
                        self.masses[j],
                        self.c,
                        rvec,
                        self.momenta[i],
                        self.momenta[j],
                    )
                out.append((i, j, v))
        return out


@dataclass
class PoincareGenerators:
    """Ten conserved generators of a snapshot: P^mu and antisymmetric J^{mu nu}.

    J[k, 0] holds J^{k0} = sum_i x_i^k E_i/c + potential moments - x0 P^k,
    which is time-independent along the motion, so the center of energy at
    any lab time y0 is (J^{k0} + y0 P^k) / P^0.
    """

    P: np.ndarray
    J: np.ndarray
    evaluation_time: float
    sgn: int
    c: float = 1.0


def poincare_generators(sys, sgn=1):
    """Build the ten Poincare generators from a snapshot."""
    if sgn not in (1, -1):
        raise ValueError("sgn must be +1 or -1")
    e = sys.energies()
    pairs = sys.pair_potential_energies()
    vsum = sum(v for _, _, v in pairs)

    p4 = np.empty(4)
    p4[0] = e.sum() + vsum / sys.c
    p4[1:] = sys.momenta.sum(axis=0)

    jmat = np.zeros((4, 4))
    orbital = sys.positions.T @ sys.momenta            # sum_i x_i^j p_i^k
    jmat[1:, 1:] = orbital - orbital.T                 # J^{jk} = sum x^j p^k - x^k p^j
    boost_moment = sys.positions.T @ e                 # sum_i x_i^k E_i (momentum units)
    for i, j, v in pairs:
        boost_moment = boost_moment + (v / sys.c) * 0.5 * (
            sys.positions[i] + sys.positions[j]
        )
    jk0 = boost_moment - sys.x0 * p4[1:]
    jmat[1:, 0] = jk0
    jmat[0, 1:] = -jk0
    return PoincareGenerators(P=p4, J=jmat, evaluation_time=sys.x0, sgn=sgn, c=sys.c)


def invariant_mass_spin(g):
    """(Mc, h, S_bar) of a set of generators.

    Mc = sqrt(sgn P.P) in momentum units, h = P/(Mc), and S_bar the rest-frame
    spin obtained from the Pauli-Lubanski vector W^mu = eps^{mu nu rho si}/2
    J_{nu rho} P_si, boosted to the rest frame and divided by Mc.  Raises
    NonTimelikeError for non-timelike or past-pointing total momentum.
    """
    p4 = g.P
    m2 = p4[0] ** 2 - p4[1:] @ p4[1:]
    if m2 <= 0.0 or p4[0] <= 0.0:
        raise NonTimelikeError(
            f"total momentum {p4} is not future timelike; invariant mass undefined"
        )
    mc = float(np.sqrt(m2))
    h = p4[1:] / mc
    w_down = 0.5 * np.einsum("mnrs,nr,s->m", _EPS4, g.J, p4)
    w_up = metric(g.sgn) @ w_down
    w_rest = boost_from_h(-h) @ w_up
    s_bar = g.sgn * w_rest[1:] / mc
    return mc, h, s_bar


def center_of_energy(g, time=None):
    """Moller center of energy X_E at lab time ``time`` (default: g's time)."""
    if time is None:
        time = g.evaluation_time
    return (g.J[1:, 0] + time * g.P[1:]) / g.P[0]


def fokker_pryce_worldline(g):
    """Covariant center of inertia as a map tau -> event (tau = rest time c t).

    Constructed by transforming the generators to the rest frame, where all
    three centers coincide at the static point J_rest^{k0}/Mc, and boosting
    that world-line back with the standard boost of h.
    """
    mc, h, _ = invariant_mass_spin(g)
    to_rest = boost_from_h(-h)
    j_rest = to_rest @ g.J @ to_rest.T
    x_rest = j_rest[1:, 0] / mc
    back = boost_from_h(h)

    def line(tau):
        tau = np.asarray(tau, dtype=float)
        ev = np.empty(tau.shape + (4,))
        ev[..., 0] = tau
        ev[..., 1:] = x_rest
        return ev @ back.T

    line.x_rest = x_rest
    line.h = h
    line.Mc = mc
    return line


def newton_wigner_and_jacobi(g):
    """Canonical (Newton-Wigner) center at lab time 0 and frozen Jacobi data.

    x_NW(0) = [J^{k0} + (S_bar x P) / (Mc + P^0)] / P^0, which has vanishing
    mutual Poisson brackets and canonical brackets with P (checked by the
    test suite via finite-difference brackets), and lies on the segment
    between the center of energy and the center of inertia.  The Jacobi data
    are z = Mc * x_NW(0) and h = P/Mc.
    """
    mc, h, s_bar = invariant_mass_spin(g)
    x_nw = (g.J[1:, 0] + np.cross(s_bar, g.P[1:]) / (mc + g.P[0])) / g.P[0]
    return x_nw, mc * x_nw, h


def tube_radius(g):
    """Energy radius |S_bar| / Mc of the center-of-energy world-tube."""
    mc, _, s_bar = invariant_mass_spin(g)
    return float(np.linalg.norm(s_bar) / mc)


@dataclass
class CenterTriple:
    """The three collective centers of one snapshot plus tube data."""

    Mc: float
    h: np.ndarray
    S_bar: np.ndarray
    X_E0: np.ndarray           # center of energy at lab time 0
    x_NW0: np.ndarray          # canonical center at lab time 0
    fp_line: object            # callable tau -> event
    tube_radius: float


def center_triple(sys, sgn=1):
    g = poincare_generators(sys, sgn)
    mc, h, s_bar = invariant_mass_spin(g)
    x_nw, _, _ = newton_wigner_and_jacobi(g)
    return CenterTriple(
        Mc=mc,
        h=h,
        S_bar=s_bar,
        X_E0=center_of_energy(g, 0.0),
        x_NW0=x_nw,
        fp_line=fokker_pryce_worldline(g),
        tube_radius=tube_radius(g),
    )


def external_generators(z, h, mc, s_bar, sgn=1, c=1.0):
    """Generators of a collective pseudo-particle from frozen Jacobi data.

    Inverts newton_wigner_and_jacobi: given (z, h) plus the invariants
    (Mc, S_bar), rebuild (P, J) so that center constructions can be reused.
    """
    z = np.asarray(z, dtype=float)
    h = np.asarray(h, dtype=float)
    s_bar = np.asarray(s_bar, dtype=float)
    if not mc > 0:
        raise NonTimelikeError("Mc must be positive")
    gamma = np.sqrt(1.0 + h @ h)
    p4 = np.empty(4)
    p4[0] = mc * gamma
    p4[1:] = mc * h
    x_nw = z / mc
    jk0 = p4[0] * x_nw - np.cross(s_bar, p4[1:]) / (mc + p4[0])
    jvec = np.cross(x_nw, p4[1:]) + s_bar      # total angular momentum
    jmat = np.zeros((4, 4))
    jmat[1:, 0] = jk0
    jmat[0, 1:] = -jk0
    # J^{jk} = eps^{jkl} Jvec_l
    jmat[1, 2], jmat[2, 1] = jvec[2], -jvec[2]
    jmat[2, 3], jmat[3, 2] = jvec[0], -jvec[0]
    jmat[3, 1], jmat[1, 3] = jvec[1], -jvec[1]
    return PoincareGenerators(P=p4, J=jmat, evaluation_time=0.0, sgn=sgn, c=c)


def poincare_transform_free(sys, lam=None, translation=None, new_time=0.0):
    """Exact Poincare transform of a free snapshot (re-synchronized).

    Each straight world-line is mapped event-wise by x -> lam x + translation
    and intersected with the new common time ``new_time``.  Valid only for
    potential "none"; interacting snapshots are not a collection of straight
    lines, so their exact transform needs the dynamics.
    """
    if sys.potential != "none":
        raise ValueError("exact snapshot transforms require a free system")
    if lam is None:
        lam = np.eye(4)
    lam = np.asarray(lam, dtype=float)
    a = np.zeros(4) if translation is None else np.asarray(translation, dtype=float)

    e = sys.energies()
    p4 = np.concatenate((e[:, None], sys.momenta), axis=1)
    p4_new = p4 @ lam.T
    events = np.concatenate(
        (np.full((sys.n, 1), sys.x0), sys.positions), axis=1
    )
    ev_new = events @ lam.T + a
    vel = p4_new[:, 1:] / p4_new[:, :1]          # dx/dx0 = p/p0
    x_new = ev_new[:, 1:] + vel * (new_time - ev_new[:, :1])
    return ParticleSystem(
        masses=sys.masses.copy(),
        positions=x_new,
        momenta=p4_new[:, 1:].copy(),
        charges=sys.charges.copy(),
        potential="none",
        x0=float(new_time),
        c=sys.c,
    )


@dataclass
class TubeSample:
    """Result of sampling the center-of-energy world-tube over random frames.

    ``distances[k]`` is the rest-frame transverse offset of frame k's center
    of energy from the covariant center; all of them are bounded by
    ``bound`` = |S_bar| / Mc, and the supremum approaches the bound as the
    rapidity range grows.
    """

    distances: np.ndarray
    rapidities: np.ndarray
    directions: np.ndarray
    bound: float
    events_lab: np.ndarray = field(repr=False, default=None)

    @property
    def max_distance(self):
        return float(np.max(self.distances))


def moller_tube_sample(sys, n_frames, rapidity_max, seed=0, sgn=1):
    """Sample the Moller world-tube of a snapshot.

    For each of ``n_frames`` random frames (isotropic boost direction,
    rapidity uniform on [0, rapidity_max]), compute the center of energy in
    that frame from the tensor-transformed generators, map the event back to
    the lab, then measure its transverse distance from the covariant center
    in the system rest frame (where the covariant center is static, so the
    distance is time-independent).  rapidity_max = 0 reproduces the lab
    center of energy itself.
    """
    if n_frames < 1:
        raise ValueError("n_frames must be >= 1")
    if rapidity_max < 0:
        raise ValueError("rapidity_max must be >= 0")
    g = poincare_generators(sys, sgn)
    mc, h, s_bar = invariant_mass_spin(g)
    to_rest = boost_from_h(-h)
    j_rest = to_rest @ g.J @ to_rest.T
    x_rest = j_rest[1:, 0] / mc

    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(n_frames, 3))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    xis = rng.uniform(0.0, rapidity_max, size=n_frames)

    distances = np.empty(n_frames)
    events_lab = np.empty((n_frames, 4))
    for k in range(n_frames):
        hf = np.sinh(xis[k]) * dirs[k]
        lam = boost_from_h(hf)
        p_f = lam @ g.P
        j_f = lam @ g.J @ lam.T
        xe_f = j_f[1:, 0] / p_f[0]               # center of energy at frame time 0
        y_f = np.concatenate(([0.0], xe_f))
        y_lab = boost_from_h(-hf) @ y_f
        events_lab[k] = y_lab
        y_rest = to_rest @ y_lab
        distances[k] = np.linalg.norm(y_rest[1:] - x_rest)
    return TubeSample(
        distances=distances,
        rapidities=xis,
        directions=dirs,
        bound=float(np.linalg.norm(s_bar) / mc),
        events_lab=events_lab,
    )
