import numpy as np
import pytest

from instantform.errors import NonConvergenceError
from instantform.relquant import (
    build_radial_hamiltonian,
    cartesian_ground_state,
    kinetic_dispersion,
    nonrel_fd_levels,
    radial_grid,
    radial_levels,
)

# weak-coupling hydrogen-like setup shared by several tests
M1 = M2 = 1.0
MU = 0.5
ALPHA = 0.01
LENGTH = 8000.0
NPTS = 1024
BOHR1 = -MU * ALPHA**2 / 2.0


def test_radial_grid_is_uniform_interior():
    r, k = radial_grid(8, 9.0)
    np.testing.assert_allclose(r, np.arange(1, 9) * 1.0)
    np.testing.assert_allclose(k, np.arange(1, 9) * np.pi / 9.0)


def test_kinetic_dispersion_values():
    k = np.array([0.0, 0.3, 2.0])
    m1, m2, c = 1.0, 1.5, 2.0
    want = (c * np.hypot(m1 * c, k) + c * np.hypot(m2 * c, k)
            - (m1 + m2) * c**2)
    np.testing.assert_allclose(kinetic_dispersion(k, m1, m2, c), want, rtol=1e-14)
    mu = m1 * m2 / (m1 + m2)
    np.testing.assert_allclose(
        kinetic_dispersion(k, m1, m2, c, kind="nonrelativistic"),
        k**2 / (2 * mu), rtol=1e-14,
    )
    with pytest.raises(ValueError):
        kinetic_dispersion(k, m1, m2, c, kind="bogus")


def test_small_momentum_expansion_agrees():
    # salpeter -> nonrel as k/mc -> 0
    k = np.array([1e-4])
    sal = kinetic_dispersion(k, 1.0, 1.0, 1.0)
    nr = kinetic_dispersion(k, 1.0, 1.0, 1.0, kind="nonrelativistic")
    assert abs(sal[0] - nr[0]) < 1e-12 * nr[0] + 1e-16


def test_hamiltonian_is_symmetric():
    h, r = build_radial_hamiltonian(128, 200.0, 1.0, 2.0, 0.1)
    np.testing.assert_allclose(h, h.T, atol=0)
    assert r.shape == (128,)


def test_nonrel_ground_matches_bohr():
    levels = radial_levels(NPTS, LENGTH, M1, M2, ALPHA,
                           kinetic="nonrelativistic", n_levels=3)
    assert abs(levels[0] - BOHR1) / abs(BOHR1) < 0.01


def test_excited_levels_follow_balmer():
    levels = radial_levels(NPTS, LENGTH, M1, M2, ALPHA,
                           kinetic="nonrelativistic", n_levels=3)
    for i in (1, 2):
        target = BOHR1 / (i + 1) ** 2
        assert abs(levels[i] - target) / abs(target) < 0.02


def test_salpeter_strictly_below_nonrel():
    """Relativistic kinetic energy is pointwise smaller, so every level drops.

    Both spectra live in the same sine basis with the same softened
    potential; only the dispersion differs.
    """
    nonrel = radial_levels(NPTS, LENGTH, M1, M2, ALPHA,
                           kinetic="nonrelativistic", n_levels=4)
    sal = radial_levels(NPTS, LENGTH, M1, M2, ALPHA,
                        kinetic="salpeter", n_levels=4)
    assert np.all(sal < nonrel)


def test_fd_oracle_agrees_with_sine_basis():
    """Independent tridiagonal discretization lands on the same ground level."""
    dst = radial_levels(NPTS, LENGTH, M1, M2, ALPHA,
                        kinetic="nonrelativistic", n_levels=1)
    fd = nonrel_fd_levels(NPTS, LENGTH, MU, ALPHA, n_levels=1)
    assert abs(fd[0] - dst[0]) / abs(dst[0]) < 5e-3


def test_doubling_convergence_at_fixed_softening():
    eps = LENGTH / (4 * NPTS)
    e_n = radial_levels(NPTS, LENGTH, M1, M2, ALPHA, softening=eps, n_levels=1)
    e_2n = radial_levels(2 * NPTS, LENGTH, M1, M2, ALPHA, softening=eps,
                         n_levels=1)
    assert abs(e_2n[0] - e_n[0]) / abs(e_2n[0]) < 1e-3


def test_eigenvectors_orthonormal():
    vals, vecs, r = radial_levels(512, LENGTH, M1, M2, ALPHA, n_levels=5,
                                  return_states=True)
    gram = vecs.T @ vecs
    assert np.max(np.abs(gram - np.eye(5))) < 1e-8
    assert vals.shape == (5,)
    assert vecs.shape == (512, 5)


def test_ell_one_ground_near_bohr_n2():
    levels = radial_levels(NPTS, LENGTH, M1, M2, ALPHA,
                           kinetic="nonrelativistic", ell=1, n_levels=1)
    target = BOHR1 / 4
    assert abs(levels[0] - target) / abs(target) < 0.05


def test_nonpositive_alpha_warns_not_raises():
    with pytest.warns(UserWarning):
        h, _ = build_radial_hamiltonian(64, 50.0, 1.0, 1.0, -0.5)
    # repulsive spectrum is entirely positive
    assert np.linalg.eigvalsh(h)[0] > 0
    with pytest.warns(UserWarning):
        radial_levels(64, 50.0, 1.0, 1.0, 0.0, n_levels=1)


def test_cartesian_cross_check_both_modes():
    """3-d grid vs radial reduction at strong coupling, both dispersions.

    The box edge (52) is chosen so the exponential tail is negligible at
    the faces; agreement at 3e-3 and matching relativistic shifts mean the
    radial reduction and the full 3-d operator describe the same problem.
    """
    alpha, eps = 0.5, 0.8
    rad_nr = radial_levels(2048, 100.0, M1, M2, alpha,
                           kinetic="nonrelativistic", softening=eps,
                           n_levels=1)[0]
    rad_s = radial_levels(2048, 100.0, M1, M2, alpha, kinetic="salpeter",
                          softening=eps, n_levels=1)[0]
    cart_nr = cartesian_ground_state(64, 52.0, M1, M2, alpha,
                                     kinetic="nonrelativistic",
                                     softening=eps, tol=1e-7)[0]
    cart_s = cartesian_ground_state(64, 52.0, M1, M2, alpha,
                                    kinetic="salpeter",
                                    softening=eps, tol=1e-7)[0]
    assert abs(cart_nr - rad_nr) / abs(rad_nr) < 3e-3
    assert abs(cart_s - rad_s) / abs(rad_s) < 3e-3
    shift_rad = rad_s - rad_nr
    shift_cart = cart_s - cart_nr
    assert shift_rad < 0  # the relativistic level sits deeper
    assert abs(shift_cart - shift_rad) / abs(shift_rad) < 0.05


def test_cartesian_deterministic():
    a = cartesian_ground_state(24, 30.0, 1.0, 1.0, 0.5, tol=1e-8)[0]
    b = cartesian_ground_state(24, 30.0, 1.0, 1.0, 0.5, tol=1e-8)[0]
    assert a == b


def test_cartesian_nonconvergence_raises():
    with pytest.raises(NonConvergenceError):
        cartesian_ground_state(24, 30.0, 1.0, 1.0, 0.5, maxiter=2)
