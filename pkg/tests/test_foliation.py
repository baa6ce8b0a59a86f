import numpy as np
import pytest

from instantform.foliation import (
    Embedding,
    GridSpec,
    check_admissibility,
    euler_zyz_from_rotation,
    extrinsic_curvature,
    identity_embedding,
    induced_geometry,
    make_rotating_embedding,
    metric_eigendecomposition,
    rotation_from_euler_zyz,
    tilted_embedding,
)
from oracles import ETA, stencil_extrinsic_curvature


def all_families():
    return [
        identity_embedding(),
        tilted_embedding(0.4),
        tilted_embedding(np.array([0.2, -0.5, 0.1])),
        make_rotating_embedding("rigid", omega=0.35),
        make_rotating_embedding("differential", omega=0.8, r0=1.2),
    ]


def test_identity_embedding_is_minkowski():
    emb = identity_embedding()
    geo = induced_geometry(emb, 0.7, np.array([0.3, -1.0, 2.0]))
    np.testing.assert_array_equal(geo.g4, ETA)
    assert geo.lapse == 1.0
    np.testing.assert_array_equal(geo.shift_cov, 0.0)
    np.testing.assert_array_equal(geo.normal, [1.0, 0.0, 0.0, 0.0])


def test_lapse_shift_metric_identities():
    """Internal consistency of every geometry output, both signatures.

    The lapse and shift are computed from the covariant normal (cofactor
    route) while g4 comes straight from the Jacobian, so these identities
    genuinely cross two code paths:

      sgn g_tt  = N^2 - N_r N^r
      g_tr      = -sgn N_r
      g_rs      = -sgn h_rs        (h the positive spatial metric)
      n . dz/dsigma^r = 0,  n . n = 1  (eta inner products)
    """
    rng = np.random.default_rng(41)
    for emb in all_families():
        for _ in range(8):
            tau = float(rng.uniform(-1.5, 1.5))
            sigma = rng.uniform(-1.8, 1.8, size=3)
            for sgn in (1, -1):
                geo = induced_geometry(emb, tau, sigma, sgn=sgn)
                n2 = geo.lapse**2 - geo.shift_cov @ geo.shift_con
                assert sgn * geo.g4[0, 0] == pytest.approx(n2, abs=1e-10)
                np.testing.assert_allclose(
                    geo.g4[0, 1:], -sgn * geo.shift_cov, atol=1e-10
                )
                np.testing.assert_allclose(
                    geo.g4[1:, 1:], -sgn * geo.g3, atol=1e-10
                )
                jac = emb.jacobian(tau, sigma)
                for r in range(3):
                    assert geo.normal @ ETA @ jac[:, r + 1] == pytest.approx(
                        0.0, abs=1e-10
                    )
                assert geo.normal @ ETA @ geo.normal == pytest.approx(
                    1.0, abs=1e-10
                )
                assert geo.normal[0] > 0  # future pointing


def test_fd_jacobian_agrees_with_analytic():
    emb = make_rotating_embedding("differential", omega=0.9, r0=0.8)
    twin = Embedding(lambda t, s: emb(t, s))
    tau, sigma = 0.4, np.array([0.7, -0.3, 0.5])
    np.testing.assert_allclose(
        induced_geometry(twin, tau, sigma).g4,
        induced_geometry(emb, tau, sigma).g4,
        atol=1e-7,
    )


def test_rigid_rotation_node_classification_is_exact():
    """Condition 2 must fail exactly where omega * rho_perp >= c.

    Every grid node is classified independently from the closed form and
    compared against the reported violations, no tolerance games: nodes
    within 1e-9 of the critical cylinder would be excluded, but this grid
    has none.
    """
    omega = 0.8
    emb = make_rotating_embedding("rigid", omega=omega)
    grid = GridSpec(-1.0, 1.0, 5, 2.0, 9)
    rep = check_admissibility(emb, grid)
    assert not rep.passed
    assert rep.conditions_passed[0] and not rep.conditions_passed[1]

    flagged = {
        (v.tau, tuple(v.sigma)) for v in rep.violations if v.condition == 2
    }
    n_boundary = 0
    for tau in grid.tau_values():
        for sa in grid.sigma_axis():
            for sb in grid.sigma_axis():
                for sc in grid.sigma_axis():
                    margin = 1.0 - (omega * np.hypot(sa, sb)) ** 2
                    if abs(margin) <= 1e-9:
                        n_boundary += 1
                        continue
                    expect = margin <= 0.0
                    got = (tau, (sa, sb, sc)) in flagged
                    assert got == expect, (tau, sa, sb, sc, margin)
    assert n_boundary == 0
    assert len(flagged) > 0


def test_differential_rotation_is_admissible():
    emb = make_rotating_embedding("differential", omega=1.4, r0=1.0)
    rep = check_admissibility(emb, GridSpec(-1.0, 1.0, 5, 3.0, 9))
    assert rep.passed
    assert rep.conditions_passed == (True, True, True)
    assert rep.violations == []


def test_differential_rotation_preserves_volume():
    """The smooth rotation profile has unit conformal factor everywhere."""
    emb = make_rotating_embedding("differential", omega=1.1, r0=0.9)
    rng = np.random.default_rng(7)
    for _ in range(12):
        geo = induced_geometry(
            emb, float(rng.uniform(-1, 1)), rng.uniform(-2, 2, size=3)
        )
        data = metric_eigendecomposition(geo.g3)
        assert data.phi_tilde == pytest.approx(1.0, abs=1e-12)


def test_extrinsic_curvature_identity_family_is_zero():
    emb = identity_embedding()
    k = extrinsic_curvature(emb, 0.2, np.array([1.0, -0.4, 0.3]))
    np.testing.assert_array_equal(k, np.zeros((3, 3)))


def test_extrinsic_curvature_against_stencil_oracle():
    """Lapse-shift route vs. Gram-Schmidt projection route, both signatures."""
    rng = np.random.default_rng(13)
    embs = [
        make_rotating_embedding("rigid", omega=0.3),
        make_rotating_embedding("differential", omega=1.0, r0=1.1),
    ]
    for emb in embs:
        for _ in range(6):
            tau = float(rng.uniform(-1, 1))
            sigma = rng.uniform(-1.5, 1.5, size=3)
            want = stencil_extrinsic_curvature(emb, tau, sigma)
            for sgn in (1, -1):
                got = extrinsic_curvature(emb, tau, sigma, sgn=sgn)
                np.testing.assert_allclose(got, got.T, atol=1e-12)
                np.testing.assert_allclose(got, want, atol=1e-5)


def test_extrinsic_curvature_sgn_independent():
    emb = make_rotating_embedding("rigid", omega=0.4)
    tau, sigma = -0.6, np.array([0.9, 0.2, -1.1])
    np.testing.assert_allclose(
        extrinsic_curvature(emb, tau, sigma, sgn=1),
        extrinsic_curvature(emb, tau, sigma, sgn=-1),
        atol=1e-12,
    )


def test_eigendecomposition_round_trip():
    rng = np.random.default_rng(31)
    for _ in range(40):
        a = rng.standard_normal((3, 3))
        g3 = a @ a.T + 0.05 * np.eye(3)
        data = metric_eigendecomposition(g3)
        np.testing.assert_allclose(data.reconstruct(), g3, atol=1e-10)
        # eigenvalues of g3 are lam^2, so phi_tilde = prod(lam) = sqrt(det)
        assert data.phi_tilde**2 == pytest.approx(np.linalg.det(g3), rel=1e-9)
        # shape coordinates are trace-free by construction of the gamma basis
        lam = data.lam
        assert np.prod(lam / data.phi_tilde ** (1.0 / 3.0)) == pytest.approx(
            1.0, rel=1e-9
        )


def test_gamma_basis_columns():
    data = metric_eigendecomposition(np.diag([1.0, 2.0, 3.0]))
    gamma = data.gamma
    np.testing.assert_allclose(gamma.T @ gamma, np.eye(2), atol=1e-14)
    np.testing.assert_allclose(gamma.sum(axis=0), [0.0, 0.0], atol=1e-14)


def test_euler_zyz_round_trip():
    rng = np.random.default_rng(19)
    for _ in range(30):
        q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        if np.linalg.det(q) < 0:
            q[:, 0] = -q[:, 0]
        angles = euler_zyz_from_rotation(q)
        np.testing.assert_allclose(rotation_from_euler_zyz(angles), q, atol=1e-10)


def test_euler_zyz_gimbal_case():
    # rotation about z alone: middle angle 0, convention fixes the third to 0
    q = rotation_from_euler_zyz(np.array([0.7, 0.0, 0.0]))
    angles = euler_zyz_from_rotation(q)
    assert angles[1] == pytest.approx(0.0, abs=1e-12)
    assert angles[2] == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(rotation_from_euler_zyz(angles), q, atol=1e-12)


def test_tilted_embedding_rejects_superluminal():
    with pytest.raises(ValueError):
        tilted_embedding(1.0)
    with pytest.raises(ValueError):
        tilted_embedding(np.array([0.8, 0.7, 0.0]))
