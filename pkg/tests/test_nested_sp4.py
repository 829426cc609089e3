"""Symplectic nesting: block monodromies on W0, B-string pairing and
exchange, dressed monodromies and their RTT, reduced vacuum, second-level
ansatz, and the final eigenvector/eigenvalue pipeline."""

from fractions import Fraction as Fr

import numpy as np
import pytest

from betheforge.chain import Chain, ChainSpec, default_inhomogeneities
from betheforge.linalg import EXACT, Mat, residual
from betheforge.nested_gl import ZeroVectorError
from betheforge.nested_sp4 import (BOperatorChain, Sp4BetheConfig,
                                   b_chain, b_reorder_residual,
                                   block_aux_matrix,
                                   block_commutativity_residuals,
                                   block_monodromy, block_rtt_residual,
                                   dressed_rtt_residual,
                                   hatted_matrix, mu_weight,
                                   multi_exchange_residual,
                                   offblock_annihilation_residual, omega_hat,
                                   pairing_matrix, prop_eigenvalue,
                                   reduced_vacuum, reduced_vacuum_residuals,
                                   sp4_bethe_vector, sp4_eigenvalue,
                                   sp4_residuals, tilde_creation_residuals,
                                   tilde_eigen_residuals,
                                   tilde_offshell_residuals,
                                   tilde_rtt_residual, tilde_state,
                                   w0_basis)
from betheforge.scalars import F_left, PoleError, RootSet


@pytest.fixture(scope="module")
def sp1():
    return Chain(ChainSpec("sp4", 1, (Fr(0),)))


@pytest.fixture(scope="module")
def sp2():
    return Chain(ChainSpec("sp4", 2, default_inhomogeneities(2)))


def _pts(rng, n, taken=(Fr(0), Fr(1, 2))):
    pool = list(taken)
    out = []
    while len(out) < n:
        c = Fr(int(rng.integers(-9, 10)), int(rng.choice([2, 3, 5])))
        if all(c - p not in (0, 1, -1, 2, -2, 3, -3) for p in pool):
            out.append(c)
            pool.append(c)
    return out


# -- block level -------------------------------------------------------


def test_w0_is_the_plus_sector(sp1, sp2):
    assert len(w0_basis(sp1)) == 2
    assert len(w0_basis(sp2)) == 4
    # every basis vector is supported on plus-valued local states
    for v in w0_basis(sp2):
        for idx, x in enumerate(v.num[:, 0]):
            if x != 0:
                assert idx // 4 in (2, 3) and idx % 4 in (2, 3)


def test_offblock_annihilation(sp1, sp2):
    rng = np.random.default_rng(31)
    for ch in (sp1, sp2):
        for _ in range(3):
            (x,) = _pts(rng, 1)
            assert offblock_annihilation_residual(ch, x) == 0


def test_block_rtt_on_w0(sp1, sp2):
    rng = np.random.default_rng(32)
    for ch in (sp1, sp2):
        x, y = _pts(rng, 2)
        for e1 in "+-":
            for e2 in "+-":
                assert block_rtt_residual(ch, e1, e2, x, y) == 0


def test_sector_rtt_and_commutativity(sp1, sp2):
    rng = np.random.default_rng(33)
    for ch in (sp1, sp2):
        x, y = _pts(rng, 2)
        assert tilde_rtt_residual(ch, x, y) == 0
    x, y = _pts(rng, 2)
    assert all(r == 0 for r in block_commutativity_residuals(sp1, x, y))


def test_block_monodromy_entries(sp2):
    x = Fr(17, 5)
    bm = block_monodromy(sp2, x)
    assert residual(bm.entry("+", 1, 2), sp2.t(1, 2, x)) == 0
    assert residual(bm.entry("-", 2, 1), sp2.t(-2, -1, x)) == 0
    aux = bm.aux_matrix("+")
    assert residual(aux.block(0, 1, sp2.dim, sp2.dim), sp2.t(1, 2, x)) == 0


# -- B-string ----------------------------------------------------------


def test_b_chain_entries_and_pairing(sp1):
    u = Fr(9, 4)
    bc = b_chain(sp1, (u,))
    assert isinstance(bc, BOperatorChain)
    for i in (1, 2):
        for k in (1, 2):
            assert residual(bc.entry((i,), (k,)), sp1.t(i, -k, u)) == 0
    # pairing the reduced vacuum picks the (1,-1) entry
    om = omega_hat(sp1, 1)
    paired = bc.pair(om)
    direct = sp1.t(1, -1, u) @ sp1.vacuum().omega
    assert residual(paired, direct) == 0
    with pytest.raises(ValueError):
        b_chain(sp1, (u, u))


def test_empty_pairing_is_identity(sp1):
    p = pairing_matrix(sp1, [])
    assert residual(p, Mat.identity(sp1.dim, EXACT)) == 0


def test_b_reorder_rule(sp1):
    rng = np.random.default_rng(34)
    x, y = _pts(rng, 2, taken=(Fr(0),))
    assert b_reorder_residual(sp1, x, y) == 0


@pytest.mark.parametrize("n", [1, 2])
def test_b_exchange_identities(sp1, n):
    rng = np.random.default_rng(35 + n)
    pts = _pts(rng, n + 1, taken=(Fr(0),))
    for sign in "+-":
        assert multi_exchange_residual(sp1, sign, pts[-1],
                                       tuple(pts[:n])) == 0


# -- dressed level -------------------------------------------------------


def test_dressing_is_trivial_for_empty_roots(sp1):
    x = Fr(17, 5)
    assert residual(hatted_matrix(sp1, "+", x, ()),
                    block_aux_matrix(sp1, "+", x)) == 0
    assert residual(hatted_matrix(sp1, "-", x, ()),
                    block_aux_matrix(sp1, "-", x)) == 0


@pytest.mark.parametrize("n", [1, 2])
def test_dressed_rtt(sp1, n):
    rng = np.random.default_rng(37 + n)
    pts = _pts(rng, n + 2, taken=(Fr(0),))
    for e0 in "+-":
        for e0p in "+-":
            assert dressed_rtt_residual(sp1, e0, e0p, pts[-2], pts[-1],
                                        tuple(pts[:n])) == 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_reduced_vacuum_relations(sp1, n):
    rng = np.random.default_rng(40 + n)
    for _ in range(2):
        pts = _pts(rng, n + 1, taken=(Fr(0),))
        rs = reduced_vacuum_residuals(sp1, tuple(pts[:n]), pts[-1])
        assert all(r == 0 for r in rs)


def test_reduced_vacuum_weights_formulas(sp1):
    uvec = (Fr(9, 4), Fr(31, 6))
    x = Fr(41, 8)
    om, mu = reduced_vacuum(sp1, uvec)
    u = RootSet(uvec)
    from betheforge.scalars import F_right
    assert mu(2, x) * F_left(u, x) == sp1.lam(2, x)
    assert mu(1, x) == sp1.lam(1, x) * F_left(u, x - 1)
    assert mu(-1, x) == sp1.lam(-1, x) * F_right(x + 1, u)
    assert mu(-2, x) * F_right(x, u) == sp1.lam(-2, x)
    # trivial dressing reduces to the chain weights
    _, mu0 = reduced_vacuum(sp1, ())
    for i in (1, 2, -1, -2):
        assert mu0(i, x) == sp1.lam(i, x)


# -- second level --------------------------------------------------------


def test_second_level_exchange_relations(sp1):
    rng = np.random.default_rng(50)
    pts = _pts(rng, 6, taken=(Fr(0),))
    rs = tilde_creation_residuals(sp1, (pts[0],), pts[1],
                                  (pts[2], pts[3]), (pts[4], pts[5]))
    assert all(r == 0 for r in rs)


@pytest.mark.parametrize("pq", [(1, 1), (2, 2)])
def test_second_level_offshell_action(sp1, pq):
    p, q = pq
    rng = np.random.default_rng(51 + p + q)
    pts = _pts(rng, p + q + 2, taken=(Fr(0),))
    rs = tilde_offshell_residuals(sp1, (pts[0],), pts[1],
                                  tuple(pts[2:2 + p]), tuple(pts[2 + p:]))
    assert all(r == 0 for r in rs)


def test_second_level_state_symmetry(sp2):
    # exact invariance under permutations inside v-bar and inside w-bar
    u = (Fr(9, 4),)
    v1, v2 = Fr(-7, 3), Fr(41, 8)
    w1, w2 = Fr(19, 6), Fr(-13, 5)
    a = tilde_state(sp2, u, (v1, v2), (w1, w2))
    b = tilde_state(sp2, u, (v2, v1), (w2, w1))
    assert residual(a, b) == 0


# -- final pipeline -------------------------------------------------------


def test_trivial_configuration(sp2):
    cfg = Sp4BetheConfig((), (), ())
    psi = sp4_bethe_vector(sp2, cfg)
    assert residual(psi, sp2.vacuum().omega) == 0
    x = Fr(13, 3)
    assert sp4_eigenvalue(sp2, x, cfg) == \
        sum(sp2.lam(i, x) for i in (-2, -1, 1, 2))
    assert sp4_residuals(sp2, cfg) == {"u": [], "v": [], "w": []}


def test_single_outer_root_contracts_to_zero(sp1, sp2):
    # the (1,0,0) pairing hits T^1_{-1}(u) omega, which vanishes identically
    for ch in (sp1, sp2):
        with pytest.raises(ZeroVectorError):
            sp4_bethe_vector(ch, Sp4BetheConfig((Fr(9, 4),), (), ()))
    # while its condition is identically satisfied (equal edge weights)
    res = sp4_residuals(sp1, Sp4BetheConfig((Fr(9, 4),), (), ()))
    assert res["u"][0] == (0, 0)


def test_single_outer_root_eigenvalue_is_the_scalar_transfer(sp1):
    # on one site H(x) is scalar and the ansatz eigenvalue is root-free
    for u in (Fr(9, 4), Fr(-13, 5)):
        cfg = Sp4BetheConfig((u,), (), ())
        for x in (Fr(13, 3), Fr(-9, 2)):
            e = sp4_eigenvalue(sp1, x, cfg)
            assert sp1.transfer(x).entry(0, 0) == e


def test_plus_wing_exact_eigenvector(sp2):
    # lam1(v) = lam2(v) = 1 linearizes to v = -1/4 on the default chain
    cfg = Sp4BetheConfig((), (Fr(-1, 4),), ())
    assert sp4_residuals(sp2, cfg)["v"][0] == (0, 0)
    psi = sp4_bethe_vector(sp2, cfg)
    for x in (Fr(13, 3), Fr(-9, 2), Fr(7, 6)):
        e = sp4_eigenvalue(sp2, x, cfg)
        assert residual(sp2.transfer(x) @ psi, psi.scale(e)) == 0
    # second-level eigen relations hold for the same configuration
    assert all(r == 0 for r in tilde_eigen_residuals(sp2, cfg, Fr(13, 3)))


def test_minus_wing_exact_eigenvector(sp2):
    # lam-1(w) = lam-2(w) gives w = -9/4 on the default chain
    cfg = Sp4BetheConfig((), (), (Fr(-9, 4),))
    assert sp4_residuals(sp2, cfg)["w"][0] == (0, 0)
    psi = sp4_bethe_vector(sp2, cfg)
    for x in (Fr(13, 3), Fr(-9, 2)):
        e = sp4_eigenvalue(sp2, x, cfg)
        assert residual(sp2.transfer(x) @ psi, psi.scale(e)) == 0
    # the two wing descriptions produce the same physical state
    psi_v = sp4_bethe_vector(sp2, Sp4BetheConfig((), (Fr(-1, 4),), ()))
    a, b = psi.to_complex()[:, 0], psi_v.to_complex()[:, 0]
    overlap = abs(np.vdot(a, b)) / np.linalg.norm(a) / np.linalg.norm(b)
    assert overlap == pytest.approx(1.0, abs=1e-12)


def test_wing_states_are_level_merge_consistent(sp2):
    cfg = Sp4BetheConfig((), (Fr(-1, 4),), ())
    x = Fr(13, 3)
    # with no outer roots the eigenvalue is the plain sum of the two halves
    e = prop_eigenvalue(sp2, "+", x, cfg) + prop_eigenvalue(sp2, "-", x, cfg)
    assert e == sp4_eigenvalue(sp2, x, cfg)


def test_bare_set_product_still_raises_on_collision():
    # the displayed conditions never evaluate F(u-bar, u_k) with u_k inside;
    # the building block itself must refuse the collision
    roots = RootSet((Fr(1), Fr(3)))
    with pytest.raises(PoleError):
        F_left(roots, Fr(3))


def test_collision_configuration_null_and_off_spectrum():
    # the (1,1,0) family forces u = v - 1; the paired state contracts to
    # float noise and is reported as a null vector
    ch = Chain(ChainSpec("sp4", 2, (0j, 0.5 + 0j), backend="float"))
    v = (-1 + 1j * np.sqrt(3)) / 4
    cfg = Sp4BetheConfig((v - 1,), (v,), ())
    res = sp4_residuals(ch, cfg)
    assert abs(res["u"][0][1]) < 1e-12 and abs(res["v"][0][1]) < 1e-12
    with pytest.raises(ZeroVectorError):
        sp4_bethe_vector(ch, cfg)


def test_singlet_configuration_full_pipeline():
    # honest three-family configuration on two sites (found by the solver,
    # frozen here): u = -5/4 with a (v, w) pair symmetric about it
    ch = Chain(ChainSpec("sp4", 2, (0j, 0.5 + 0j), backend="float"))
    u, v, w = -1.25 + 0j, -0.7704165 + 0j, -1.7295835 + 0j
    cfg = Sp4BetheConfig((u,), (v,), (w,))
    res = sp4_residuals(ch, cfg)
    worst = max(abs(r) for fam in res.values() for _, r in fam)
    assert worst < 1e-6  # frozen digits; the solver refines further
    psi = sp4_bethe_vector(ch, cfg)
    x = 4.3 + 0j
    e = complex(sp4_eigenvalue(ch, x, cfg))
    pv = psi.to_complex()[:, 0]
    hm = ch.transfer(x).to_complex()
    assert np.linalg.norm(hm @ pv - e * pv) / np.linalg.norm(pv) < 1e-5


def test_outer_root_permutation_behaviour_reported(sp2):
    # the ordered string makes no symmetry promise for the outer roots:
    # measured and reported, not asserted
    u1, u2 = Fr(9, 4), Fr(31, 6)
    vb, wb = (Fr(-7, 3),), (Fr(19, 6),)
    a = sp4_bethe_vector(sp2, Sp4BetheConfig((u1, u2), vb, wb))
    b = sp4_bethe_vector(sp2, Sp4BetheConfig((u2, u1), vb, wb))
    diff = residual(a, b)
    print(f"outer-root permutation residual (informational): {diff}")


def test_mu_weight_requires_known_index(sp1):
    with pytest.raises(ValueError):
        mu_weight(sp1, 3, Fr(1), ())


def test_reduced_vacuum_mismatch_detected(sp1, monkeypatch):
    # a wrong reference vector must trip the annihilation assertions
    import betheforge.nested_sp4 as mod
    from betheforge.nested_sp4 import VacuumMismatchError

    def bad_omega(chain, n):
        legs = None
        for _ in range(2 * n):
            leg = Mat.basis_vector(2, 1, chain.backend)  # wrong slot
            legs = leg if legs is None else legs.kron(leg)
        om = chain.vacuum().omega
        return om if legs is None else legs.kron(om)

    monkeypatch.setattr(mod, "omega_hat", bad_omega)
    with pytest.raises(VacuumMismatchError):
        mod.reduced_vacuum(sp1, (Fr(9, 4),))
