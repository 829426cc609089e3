"""Algebraic Bethe ansatz for the gl(2) chain and the nested ansatz for
gl(3), with the dual-space machinery realized on concrete coordinate legs.

gl(2): states T^1_2(u_1)...T^1_2(u_N) omega, eigenvalue
lam1(x) F(u-bar, x) + lam2(x) F(x, u-bar), one Bethe family.

gl(3): the outer level applies T^a_3(v_j) (a = 1, 2); coefficients live in
(V*)^(x)M (x) W and are produced by the dressed 2x2 monodromy

    That(x; v) = Rhat_{0,1*}(x, v_1) ... Rhat_{0,M*}(x, v_M) Ttil_0(x),

whose reduced vacuum is f^2 (x) ... (x) f^2 (x) omega with weights
mu1 = lam1/F(v-bar, x), mu2 = lam2.  The inner level is a plain gl(2)
ansatz in the dressed generators, creation operator That^1_2.
"""

from __future__ import annotations

from .chain import Chain
from .linalg import EXACT, Mat, lift, residual
from .rmatrix import PLUS, build_gl_r, unit_E, unit_F
from .scalars import F_left, F_right, RootSet, f, g


class ZeroVectorError(Exception):
    """The constructed Bethe vector vanishes identically."""


def _roots(seq):
    return seq if isinstance(seq, RootSet) else RootSet(tuple(seq))


def check_nonzero(vec: Mat, what="state"):
    if vec.backend == EXACT:
        if vec.is_zero():
            raise ZeroVectorError(f"{what} is exactly zero")
    elif vec.norm() < 1e-12:
        raise ZeroVectorError(f"{what} has norm {vec.norm():.3e}")
    return vec


# ---------------------------------------------------------------------
# gl(2)
# ---------------------------------------------------------------------


def gl2_vector(chain: Chain, roots):
    """T^1_2(u_1) ... T^1_2(u_N) omega."""
    roots = _roots(roots)
    vec = chain.vacuum().omega
    for u in reversed(roots.values):
        vec = chain.t(1, 2, u) @ vec
    return check_nonzero(vec, "gl2 Bethe vector")


def gl2_eigenvalue(chain: Chain, x, roots):
    roots = _roots(roots)
    return chain.lam(1, x) * F_left(roots, x) + chain.lam(2, x) * F_right(x, roots)


def gl2_residuals(chain: Chain, roots):
    """Per-root Bethe residuals, (raw, relative) pairs."""
    roots = _roots(roots)
    out = []
    for i, u in enumerate(roots):
        rest = roots.removing(i)
        lhs = chain.lam(1, u) * F_left(rest, u)
        rhs = chain.lam(2, u) * F_right(u, rest)
        out.append(_residual_pair(lhs, rhs))
    return out


def _residual_pair(lhs, rhs):
    raw = lhs - rhs
    scale = max(abs(lhs), abs(rhs), 1)
    return raw, raw / scale


def _ordered_creation(chain: Chain, values):
    """T^1_2(s_1) @ ... @ T^1_2(s_n) as one chain operator."""
    out = Mat.identity(chain.dim, chain.backend)
    for s in values:
        out = out @ chain.t(1, 2, s)
    return out


def gl2_exchange_residuals(chain: Chain, roots, x):
    """Both diagonal-entry exchange relations through the creation string.

    Returns max-abs residuals of the T^1_1 and T^2_2 identities as full
    operator equations on the chain space.
    """
    roots = _roots(roots)
    b = _ordered_creation(chain, roots.values)
    lhs1 = chain.t(1, 1, x) @ b
    rhs1 = (b @ chain.t(1, 1, x)).scale(F_left(roots, x))
    lhs2 = chain.t(2, 2, x) @ b
    rhs2 = (b @ chain.t(2, 2, x)).scale(F_right(x, roots))
    for i, u in enumerate(roots):
        rest = roots.removing(i)
        swapped = _ordered_creation(chain, rest.appending(x).values)
        rhs1 = rhs1 - (swapped @ chain.t(1, 1, u)).scale(g(u, x) * F_left(rest, u))
        rhs2 = rhs2 - (swapped @ chain.t(2, 2, u)).scale(g(x, u) * F_right(u, rest))
    return residual(lhs1, rhs1), residual(lhs2, rhs2)


# ---------------------------------------------------------------------
# gl(3): dressed 2x2 monodromy on dual legs
# ---------------------------------------------------------------------


def _sub_monodromy(chain: Chain, x):
    """Ttil(x) = sum E^b_a (x) T^a_b(x), the 2x2 block on an auxiliary leg."""
    out = Mat.zeros((2 * chain.dim, 2 * chain.dim), chain.backend)
    for a in (1, 2):
        for b in (1, 2):
            piece = Mat.zeros((2, 2), chain.backend)
            piece.num[a - 1, b - 1] = 1 if chain.backend == EXACT else 1.0
            if chain.backend == EXACT:
                piece._amax = 1
            out = out + piece.kron(chain.t(a, b, x))
    return out


def _gl3_dressing(x, v, backend, coincident=False):
    """Rhat_{0,j*}: (1/f(v,x)) (I (x) I* + g(v,x) sum E^a_b (x) F^b_a)."""
    m = Mat.zeros((4, 4), backend)
    if coincident:
        for a in (1, 2):
            for b in (1, 2):
                m = m + unit_E(PLUS, a, b, backend).kron(unit_F(PLUS, b, a, backend))
        return m
    gv = g(v, x)
    m = Mat.identity(4, backend)
    for a in (1, 2):
        for b in (1, 2):
            m = m + unit_E(PLUS, a, b, backend).kron(
                unit_F(PLUS, b, a, backend)).scale(gv)
    return m.scale(1 / f(v, x))


def gl3_hatted_matrix(chain: Chain, x, vvec, coincident_slot=None):
    """That(x; v) as a full matrix on [aux(2), dual_1..dual_M, chain]."""
    M = len(vvec)
    dims = [2] + [2] * M + [chain.dim]
    out = lift(_sub_monodromy(chain, x), [0, M + 1], dims)
    for j in reversed(range(M)):
        coin = coincident_slot is not None and j == coincident_slot
        fac = lift(_gl3_dressing(x, vvec[j], chain.backend, coincident=coin),
                   [0, j + 1], dims)
        out = fac @ out
    return out


def gl3_block_apply(chain: Chain, ab, x, vvec, vec, coincident_slot=None):
    """Apply That^a_b(x; v) to a vector on [duals, chain]."""
    a, b = ab
    M = len(vvec)
    dims = [2] + [2] * M + [chain.dim]
    n = vec.shape[0]
    aux = Mat.basis_vector(2, b - 1, chain.backend)
    big = aux.kron(vec)
    cur = lift(_sub_monodromy(chain, x), [0, M + 1], dims) @ big
    for j in reversed(range(M)):
        coin = coincident_slot is not None and j == coincident_slot
        cur = lift(_gl3_dressing(x, vvec[j], chain.backend, coincident=coin),
                   [0, j + 1], dims) @ cur
    out = Mat(chain.backend, cur.num[(a - 1) * n:a * n, :].copy(), cur.den)
    return out


def gl3_omega_hat(chain: Chain, M):
    """f^2 (x) ... (x) f^2 (x) omega as a coordinate vector."""
    omega = chain.vacuum().omega
    dual = Mat.basis_vector(2, 1, chain.backend)  # covector f^2 -> slot 1
    out = None
    for _ in range(M):
        out = dual if out is None else out.kron(dual)
    return omega if out is None else out.kron(omega)


def gl3_mu(chain: Chain, i, x, vvec):
    """Reduced vacuum weights mu1 = lam1/F(v-bar, x), mu2 = lam2."""
    if i == 1:
        return chain.lam(1, x) / F_left(RootSet(tuple(vvec)), x)
    return chain.lam(2, x)


def gl3_vacuum_relation_residuals(chain: Chain, vvec, x):
    """Annihilation and the two weight relations on the reduced vacuum."""
    om = gl3_omega_hat(chain, len(vvec))
    r21 = gl3_block_apply(chain, (2, 1), x, vvec, om).max_abs()
    r11 = (gl3_block_apply(chain, (1, 1), x, vvec, om)
           - om.scale(gl3_mu(chain, 1, x, vvec))).max_abs()
    r22 = (gl3_block_apply(chain, (2, 2), x, vvec, om)
           - om.scale(gl3_mu(chain, 2, x, vvec))).max_abs()
    return r21, r11, r22


def gl3_inner_state(chain: Chain, uroots, vvec):
    """Phi(u-bar; v) = That^1_2(u_1; v) ... That^1_2(u_N; v) OmegaHat."""
    uroots = _roots(uroots)
    phi = gl3_omega_hat(chain, len(vvec))
    for u in reversed(uroots.values):
        phi = gl3_block_apply(chain, (1, 2), u, vvec, phi)
    return phi


def gl3_pair(chain: Chain, vvec, phi):
    """<b_{1..M}(v), Phi>: contract the M dual legs against T^a_3(v_j)."""
    M = len(vvec)
    D = chain.dim
    out = Mat.zeros((D, 1), chain.backend)
    for idx in range(2 ** M):
        digits = [(idx >> (M - 1 - j)) & 1 for j in range(M)]
        comp = Mat(chain.backend, phi.num[idx * D:(idx + 1) * D, :].copy(), phi.den)
        if comp.is_zero():
            continue
        vec = comp
        for j in reversed(range(M)):
            vec = chain.t(digits[j] + 1, 3, vvec[j]) @ vec
        out = out + vec
    return out


def gl3_vector(chain: Chain, uroots, vvec):
    """Full nested state <b(v), Phi(u-bar; v)>."""
    phi = gl3_inner_state(chain, uroots, vvec)
    return check_nonzero(gl3_pair(chain, vvec, phi), "gl3 Bethe vector")


def gl3_eigenvalue(chain: Chain, x, uroots, vroots):
    u, v = _roots(uroots), _roots(vroots)
    return (chain.lam(1, x) * F_left(u, x)
            + chain.lam(2, x) * F_right(x, u) * F_left(v, x)
            + chain.lam(3, x) * F_right(x, v))


def gl3_residuals(chain: Chain, uroots, vroots):
    """Both Bethe families, (raw, relative) pairs keyed "u" and "v"."""
    u, v = _roots(uroots), _roots(vroots)
    fam_u, fam_v = [], []
    for i, uk in enumerate(u):
        rest = u.removing(i)
        lhs = chain.lam(1, uk) * F_left(rest, uk)
        rhs = chain.lam(2, uk) * F_left(v, uk) * F_right(uk, rest)
        fam_u.append(_residual_pair(lhs, rhs))
    for r, vr in enumerate(v):
        rest = v.removing(r)
        lhs = chain.lam(3, vr) * F_right(vr, rest)
        rhs = chain.lam(2, vr) * F_left(rest, vr) * F_right(vr, u)
        fam_v.append(_residual_pair(lhs, rhs))
    return {"u": fam_u, "v": fam_v}


def gl3_hatted_rtt_residual(chain: Chain, vvec, x, y):
    """RTT residual of the dressed monodromies against the gl(2) R-matrix."""
    M = len(vvec)
    dims = [2, 2] + [2] * M + [chain.dim]

    def lift_hat(z, aux_slot):
        mat = gl3_hatted_matrix(chain, z, vvec)
        legs = [aux_slot] + list(range(2, 2 + M)) + [2 + M]
        return lift(mat, legs, dims)

    tx = lift_hat(x, 0)
    ty = lift_hat(y, 1)
    r = lift(build_gl_r(2, x, y).mat, [0, 1], dims)
    return residual(r @ tx @ ty, ty @ tx @ r)
