"""Nested Bethe ansatz for the symplectic rank-two chain.

The 4x4 monodromy splits into two 2x2 sign-block monodromies T(+), T(-)
which satisfy block RTT relations on the subspace W0 (the part of the
module generated by the two block subalgebras).  Eigenvectors are sought
through the B-operator string

    B(u) = sum e_i (x) f^{-k} (x) T^i_{-k}(u),

whose coefficients live in Vhat = (V+*)^(x)N (x) (V-)^(x)N (x) W0.  Acting
with T(+-) through the string produces the dressed monodromies

    That(eps)(x; u) = Rhat(eps,+)(x,u_1)...Rhat(eps,+)(x,u_N) T(eps)(x)
                      R(eps,-)(x,u_N)...R(eps,-)(x,u_1)

which realize a two-sector auxiliary RTT algebra on Vhat with reduced
vacuum f^1...f^1 (x) e_{-1}...e_{-1} (x) omega and weights

    mu_1  = lam_1(x) F(u-bar, x-1)      mu_2  = lam_2(x)/F(u-bar, x)
    mu_-1 = lam_-1(x) F(x+1, u-bar)     mu_-2 = lam_-2(x)/F(x, u-bar).

The second-level states are That^2_1(v-bar) That^{-1}_{-2}(w-bar) OmegaHat;
pairing them back through B gives the final eigenvectors, whose eigenvalue
and three root-family conditions are evaluated with pole-safe double-step
products where one root set enters at two arguments a unit apart.

Equal-argument dressing factors are always taken from their explicit
summed specializations, never from the generic formulas at the pole.
State construction uses "monic" dressing (each prefactored R multiplied
by its scalar f), which rescales states but keeps them finite at the
collision points the middle-family condition forces.
"""

from __future__ import annotations

from dataclasses import dataclass

from .chain import Chain
from .linalg import EXACT, Mat, hstack, lift, residual, rref_basis
from .nested_gl import ZeroVectorError, check_nonzero, _residual_pair, _roots
from .rmatrix import (build_block_r, build_dual_pp, build_hatted_r,
                      coincident_block_r, coincident_hatted_r)
from .scalars import F2_left, F2_right, F_left, F_right, RootSet, f, g


class VacuumMismatchError(Exception):
    """A reduced-vacuum relation failed: triangularity conventions are off."""


# ---------------------------------------------------------------------
# block monodromies and W0
# ---------------------------------------------------------------------


def block_aux_matrix(chain: Chain, sign, x):
    """T(+) or T(-) as one matrix on [aux(2), W].

    Entry (i, k) of the plus grid is T^i_k, of the minus grid T^{-i}_{-k};
    both families use auxiliary slots (i-1, k-1).
    """
    D = chain.dim
    out = Mat.zeros((2 * D, 2 * D), chain.backend)
    sgn = 1 if sign == "+" else -1
    for i in (1, 2):
        for k in (1, 2):
            piece = Mat.zeros((2, 2), chain.backend)
            piece.num[i - 1, k - 1] = 1 if chain.backend == EXACT else 1.0
            if chain.backend == EXACT:
                piece._amax = 1
            out = out + piece.kron(chain.t(sgn * i, sgn * k, x))
    return out


@dataclass
class BlockMonodromy:
    """The two 2x2 sign-block grids at a common evaluation point."""

    chain: Chain
    x: object

    def entry(self, sign, i, k):
        sgn = 1 if sign == "+" else -1
        return self.chain.t(sgn * i, sgn * k, self.x)

    def aux_matrix(self, sign):
        return block_aux_matrix(self.chain, sign, self.x)


def block_monodromy(chain: Chain, x) -> BlockMonodromy:
    return BlockMonodromy(chain, x)


def _w0_points(chain):
    return chain._scan_points(2)


def w0_basis(chain: Chain):
    """Exact basis of W0: closure of omega under T(-) then T(+) generators."""
    if getattr(chain, "_w0_cache", None) is not None:
        return chain._w0_cache
    pts = _w0_points(chain)
    basis = [chain.vacuum().omega]

    def close_under(signs):
        nonlocal basis
        while True:
            cand = list(basis)
            for v in basis:
                for sgn in signs:
                    for i in (1, 2):
                        for k in (1, 2):
                            for p in pts:
                                w = chain.t(sgn * i, sgn * k, p) @ v
                                if not w.is_zero():
                                    cand.append(w)
            keep = rref_basis(cand)
            new_basis = [cand[i] for i in keep]
            if len(new_basis) == len(basis):
                return
            basis = new_basis

    close_under((-1,))
    close_under(( 1,))
    chain._w0_cache = basis
    return basis


def w0_columns(chain: Chain) -> Mat:
    return hstack(w0_basis(chain))


def offblock_annihilation_residual(chain: Chain, x):
    """max over i,k of |T^{-i}_k(x) w| on a spanning set of W0."""
    cols = w0_columns(chain)
    worst = None
    for i in (1, 2):
        for k in (1, 2):
            r = (chain.t(-i, k, x) @ cols).max_abs()
            worst = r if worst is None else max(worst, r)
    return worst


def block_rtt_residual(chain: Chain, eps1, eps2, x, y):
    """Block RTT relation residual, restricted to W0."""
    D = chain.dim
    dims = [2, 2, D]
    r = lift(build_block_r(eps1, eps2, x, y).mat, [0, 1], dims)
    t1 = lift(block_aux_matrix(chain, eps1, x), [0, 2], dims)
    t2 = lift(block_aux_matrix(chain, eps2, y), [1, 2], dims)
    diff = (r @ t1 @ t2) - (t2 @ t1 @ r)
    restrict = Mat.identity(4, chain.backend).kron(w0_columns(chain))
    return (diff @ restrict).max_abs()


def tilde_rtt_residual(chain: Chain, x, y):
    """RTT of T(+) + T(-) against the two-sector 16x16 R-matrix, on W0."""
    from .rmatrix import SP4_SPACE, build_tilde_r
    D = chain.dim
    dims = [4, 4, D]
    # block-diagonal part of the full monodromy on a 4-dim auxiliary leg
    t_tilde = {}
    for z in (x, y):
        out = Mat.zeros((4 * D, 4 * D), chain.backend)
        for sgn in (1, -1):
            for i in (1, 2):
                for k in (1, 2):
                    piece = Mat.zeros((4, 4), chain.backend)
                    si = SP4_SPACE.index(sgn * i)
                    sk = SP4_SPACE.index(sgn * k)
                    piece.num[si, sk] = 1 if chain.backend == EXACT else 1.0
                    if chain.backend == EXACT:
                        piece._amax = 1
                    out = out + piece.kron(chain.t(sgn * i, sgn * k, z))
        t_tilde[z] = out
    r = lift(build_tilde_r(x, y).mat, [0, 1], dims)
    t1 = lift(t_tilde[x], [0, 2], dims)
    t2 = lift(t_tilde[y], [1, 2], dims)
    diff = (r @ t1 @ t2) - (t2 @ t1 @ r)
    restrict = Mat.identity(16, chain.backend).kron(w0_columns(chain))
    return (diff @ restrict).max_abs()


def block_commutativity_residuals(chain: Chain, x, y):
    """Same-entry commutativity, opposite-corner commutativity (i != k),
    and the three block-trace commutators, all on W0."""
    cols = w0_columns(chain)
    out = []
    for sgn in (1, -1):
        for i in (1, 2):
            for k in (1, 2):
                a = chain.t(sgn * i, sgn * k, x)
                b = chain.t(sgn * i, sgn * k, y)
                out.append(((a @ b - b @ a) @ cols).max_abs())
    for i in (1, 2):
        for k in (1, 2):
            if i == k:
                continue
            a = chain.t(i, k, x)
            b = chain.t(-k, -i, y)
            out.append(((a @ b - b @ a) @ cols).max_abs())
    hp = lambda z: chain.t(1, 1, z) + chain.t(2, 2, z)
    hm = lambda z: chain.t(-1, -1, z) + chain.t(-2, -2, z)
    for a, b in ((hp(x), hp(y)), (hm(x), hm(y)), (hp(x), hm(y))):
        out.append(((a @ b - b @ a) @ cols).max_abs())
    return out


# ---------------------------------------------------------------------
# B-operator pairing
# ---------------------------------------------------------------------


def pairing_matrix(chain: Chain, args, n_aux=0) -> Mat:
    """Contraction against the ordered B-string, as an explicit matrix.

    `args` is the ordered list of (slot, value) pairs; slot j populates the
    j-th plus-dual and minus tensor legs while the operator factors multiply
    in list order.  Maps [aux^n (x) duals (x) minuses (x) W] -> [aux^n (x) W].
    """
    N = len(args)
    p = _assemble_pairing(chain, args, N, chain.dim)
    if n_aux:
        return Mat.identity(2 ** n_aux, chain.backend).kron(p)
    return p


def _assemble_pairing(chain: Chain, args, N, D):
    from fractions import Fraction
    import numpy as np
    cols = (2 ** N) * (2 ** N) * D
    if chain.backend == EXACT:
        num = np.zeros((D, cols), dtype=object)
        den = 1
        blocks = {}
        for si in range(2 ** N):
            ii = [(si >> (N - 1 - j)) & 1 for j in range(N)]
            for sk in range(2 ** N):
                kk = [(sk >> (N - 1 - j)) & 1 for j in range(N)]
                op = Mat.identity(D, EXACT)
                for slot, val in args:
                    op = op @ chain.t(ii[slot] + 1, -(kk[slot] + 1), val)
                blocks[(si, sk)] = op
                from math import gcd
                den = den * op.den // gcd(den, op.den)
        for (si, sk), op in blocks.items():
            scale = den // op.den
            col0 = (si * (2 ** N) + sk) * D
            num[:, col0:col0 + D] = op.num * scale
        return Mat(EXACT, num, den)._reduced()
    num = np.zeros((D, cols), dtype=np.complex128)
    for si in range(2 ** N):
        ii = [(si >> (N - 1 - j)) & 1 for j in range(N)]
        for sk in range(2 ** N):
            kk = [(sk >> (N - 1 - j)) & 1 for j in range(N)]
            op = Mat.identity(D, chain.backend)
            for slot, val in args:
                op = op @ chain.t(ii[slot] + 1, -(kk[slot] + 1), val)
            col0 = (si * (2 ** N) + sk) * D
            num[:, col0:col0 + D] = op.num
    return Mat(chain.backend, num)


@dataclass
class BOperatorChain:
    """Ordered B-string B_1(u_1)...B_N(u_N) with its contraction matrix."""

    chain: Chain
    uvec: tuple

    def entry(self, ivec, kvec):
        op = Mat.identity(self.chain.dim, self.chain.backend)
        for j, u in enumerate(self.uvec):
            op = op @ self.chain.t(ivec[j], -kvec[j], u)
        return op

    def matrix(self, n_aux=0):
        args = [(j, u) for j, u in enumerate(self.uvec)]
        return pairing_matrix(self.chain, args, n_aux=n_aux)

    def pair(self, phi: Mat) -> Mat:
        return self.matrix() @ phi


def b_chain(chain: Chain, uvec) -> BOperatorChain:
    vals = tuple(uvec)
    RootSet(vals)  # validates distinctness
    return BOperatorChain(chain, vals)


def b_reorder_residual(chain: Chain, x, y):
    """Two-root exchange through the B-string:

    <B_1(x) B_2(y), .> = <B_2(y) B_1(x), (R*)_{2+,1+}(y,x) R(--)_{1-,2-}(x,y) .>.
    """
    dims = [2, 2, 2, 2, chain.dim]  # dual1, dual2, minus1, minus2, W
    lhs = pairing_matrix(chain, [(0, x), (1, y)])
    rhs = pairing_matrix(chain, [(1, y), (0, x)])
    rs = lift(build_dual_pp(y, x).mat, [1, 0], dims)
    rmm = lift(build_block_r("-", "-", x, y).mat, [2, 3], dims)
    return residual(lhs, rhs @ rs @ rmm)


# ---------------------------------------------------------------------
# dressed monodromies
# ---------------------------------------------------------------------


def _hat_dims(chain: Chain, N):
    return [2] + [2] * N + [2] * N + [chain.dim]


def hatted_factors(chain: Chain, sign, x, uvec, coincident_slot=None,
                   monic=False):
    """Left-to-right factor list of That(sign)(x; u) on [aux, duals, minuses, W]."""
    N = len(uvec)
    dims = _hat_dims(chain, N)
    backend = chain.backend
    facs = []
    for j in range(N):
        if coincident_slot is not None and j == coincident_slot:
            m = coincident_hatted_r(sign, backend).mat
        else:
            m = build_hatted_r(sign, x, uvec[j], monic=monic).mat
        facs.append(lift(m, [0, 1 + j], dims))
    facs.append(lift(block_aux_matrix(chain, sign, x), [0, 1 + 2 * N], dims))
    for j in reversed(range(N)):
        if coincident_slot is not None and j == coincident_slot:
            m = coincident_block_r(sign, "-", backend).mat
        else:
            m = build_block_r(sign, "-", x, uvec[j], monic=monic).mat
        facs.append(lift(m, [0, 1 + N + j], dims))
    return facs


def hatted_matrix(chain: Chain, sign, x, uvec, coincident_slot=None,
                  monic=False) -> Mat:
    out = None
    for fac in hatted_factors(chain, sign, x, uvec, coincident_slot, monic):
        out = fac if out is None else out @ fac
    return out


def hatted_apply(chain: Chain, sign, x, uvec, vec, coincident_slot=None,
                 monic=False) -> Mat:
    """Apply That(sign)(x; u) to a vector carrying the auxiliary leg."""
    facs = hatted_factors(chain, sign, x, uvec, coincident_slot, monic)
    cur = vec
    for fac in reversed(facs):
        cur = fac @ cur
    return cur


def hatted_block_apply(chain: Chain, sign, ik, x, uvec, vec,
                       coincident_slot=None, monic=False) -> Mat:
    """Apply the grid entry That^{si}_{sk} to a vector on [duals, minuses, W].

    For sign "+" the entry is That^i_k, for sign "-" it is That^{-i}_{-k};
    both live at auxiliary slots (i-1, k-1).
    """
    i, k = ik
    aux = Mat.basis_vector(2, k - 1, chain.backend)
    big = aux.kron(vec)
    big = hatted_apply(chain, sign, x, uvec, big, coincident_slot, monic)
    n = vec.shape[0]
    return Mat(chain.backend, big.num[(i - 1) * n:i * n, :].copy(), big.den)


# ---------------------------------------------------------------------
# reduced vacuum
# ---------------------------------------------------------------------


def omega_hat(chain: Chain, N) -> Mat:
    """f^1 (x) ... (x) f^1 (x) e_{-1} (x) ... (x) e_{-1} (x) omega."""
    out = None
    for _ in range(2 * N):
        leg = Mat.basis_vector(2, 0, chain.backend)
        out = leg if out is None else out.kron(leg)
    om = chain.vacuum().omega
    return om if out is None else out.kron(om)


def mu_weight(chain: Chain, i, x, uroots):
    """Reduced-vacuum weights of the dressed two-sector algebra."""
    u = _roots(uroots)
    if i == 1:
        return chain.lam(1, x) * F_left(u, x - 1)
    if i == 2:
        return chain.lam(2, x) / F_left(u, x)
    if i == -1:
        return chain.lam(-1, x) * F_right(x + 1, u)
    if i == -2:
        return chain.lam(-2, x) / F_right(x, u)
    raise ValueError(f"no weight index {i}")


def reduced_vacuum(chain: Chain, uvec):
    """OmegaHat plus its weight evaluator; checks both annihilations."""
    vals = tuple(uvec)
    om = omega_hat(chain, len(vals))
    x0 = chain._scan_points(1)[0]
    for sign, ik in (("+", (1, 2)), ("-", (2, 1))):
        r = hatted_block_apply(chain, sign, ik, x0, vals, om).max_abs()
        zero = (r == 0) if chain.backend == EXACT else r < 1e-10
        if not zero:
            raise VacuumMismatchError(
                f"annihilation entry {sign}{ik} fails on the reduced vacuum: {r}")
    return om, (lambda i, x: mu_weight(chain, i, x, vals))


def reduced_vacuum_residuals(chain: Chain, uvec, x):
    """All six reduced-vacuum relations at the point x."""
    vals = tuple(uvec)
    om = omega_hat(chain, len(vals))
    out = []
    out.append(hatted_block_apply(chain, "+", (1, 2), x, vals, om).max_abs())
    out.append(hatted_block_apply(chain, "-", (2, 1), x, vals, om).max_abs())
    for sign, ik, w in (("+", (1, 1), 1), ("+", (2, 2), 2),
                        ("-", (1, 1), -1), ("-", (2, 2), -2)):
        v = hatted_block_apply(chain, sign, ik, x, vals, om)
        out.append((v - om.scale(mu_weight(chain, w, x, vals))).max_abs())
    return out


# ---------------------------------------------------------------------
# single and multi-root exchange through the B-string
# ---------------------------------------------------------------------


def multi_exchange_residual(chain: Chain, sign, x, uvec):
    """Residual of the exchange of T(sign)(x) through B_1..N(u), as one
    matrix identity over all insertions (the N = 1 case is the single-root
    relation)."""
    vals = tuple(uvec)
    N = len(vals)
    u = RootSet(vals)
    std_args = [(j, vals[j]) for j in range(N)]
    p_std = pairing_matrix(chain, std_args, n_aux=1)
    lhs = block_aux_matrix(chain, sign, x) @ p_std
    coeff = F_left(u, x) if sign == "+" else F_right(x, u)
    rhs = (p_std @ hatted_matrix(chain, sign, x, vals)).scale(coeff)
    for k in range(N):
        rest = u.removing(k)
        if sign == "+":
            c = g(vals[k], x) * F_left(rest, vals[k])
        else:
            c = g(x, vals[k]) * F_right(vals[k], rest)
        args_k = [(k, x)] + [(j, vals[j]) for j in range(N) if j != k]
        p_k = pairing_matrix(chain, args_k, n_aux=1)
        chain_op = _reorder_chain(chain, vals, k) @ hatted_matrix(
            chain, sign, vals[k], vals, coincident_slot=k)
        rhs = rhs - (p_k @ chain_op).scale(c)
    return residual(lhs, rhs)


def _reorder_chain(chain: Chain, vals, k):
    """(R*)(u_k,u_1)...(R*)(u_k,u_{k-1}) R(--)(u_1,u_k)...R(--)(u_{k-1},u_k)."""
    N = len(vals)
    dims = _hat_dims(chain, N)
    dim_tot = 1
    for d in dims:
        dim_tot *= d
    out = Mat.identity(dim_tot, chain.backend)
    for j in range(k):
        out = out @ lift(build_dual_pp(vals[k], vals[j]).mat,
                         [1 + k, 1 + j], dims)
    for j in range(k):
        out = out @ lift(build_block_r("-", "-", vals[j], vals[k]).mat,
                         [1 + N + j, 1 + N + k], dims)
    return out


# ---------------------------------------------------------------------
# dressed RTT
# ---------------------------------------------------------------------


def w0hat_columns(chain: Chain, N) -> Mat:
    """Spanning columns of Vhat: full dual/minus legs (x) W0 basis."""
    return Mat.identity(4 ** N, chain.backend).kron(w0_columns(chain))


def dressed_rtt_residual(chain: Chain, eps0, eps0p, x, y, uvec):
    """RTT of the dressed monodromies against the sign-block R, on Vhat."""
    vals = tuple(uvec)
    N = len(vals)
    D = chain.dim
    dims = [2, 2] + [2] * N + [2] * N + [D]
    inner_legs = list(range(2, 2 + 2 * N)) + [2 + 2 * N]

    tx = lift(hatted_matrix(chain, eps0, x, vals), [0] + inner_legs, dims)
    ty = lift(hatted_matrix(chain, eps0p, y, vals), [1] + inner_legs, dims)
    r = lift(build_block_r(eps0, eps0p, x, y).mat, [0, 1], dims)
    diff = (r @ tx @ ty) - (ty @ tx @ r)
    restrict = Mat.identity(4, chain.backend).kron(w0hat_columns(chain, N))
    return (diff @ restrict).max_abs()


# ---------------------------------------------------------------------
# second-level (tilde) ansatz
# ---------------------------------------------------------------------


def tilde_state(chain: Chain, uvec, vbar, wbar, monic=True) -> Mat:
    """That^2_1(v_1)...That^2_1(v_P) That^{-1}_{-2}(w_1)...(w_Q) OmegaHat."""
    vals = tuple(uvec)
    phi = omega_hat(chain, len(vals))
    for w in reversed(tuple(wbar)):
        phi = hatted_block_apply(chain, "-", (1, 2), w, vals, phi, monic=monic)
    for v in reversed(tuple(vbar)):
        phi = hatted_block_apply(chain, "+", (2, 1), v, vals, phi, monic=monic)
    return phi


def tilde_creation_residuals(chain: Chain, uvec, x, vbar, wbar):
    """The eight exchange relations of the second-level creation strings,
    applied to a spanning set of Vhat.  Returns a list of residuals."""
    vals = tuple(uvec)
    N = len(vals)
    v = RootSet(tuple(vbar))
    w = RootSet(tuple(wbar))
    cols = w0hat_columns(chain, N)

    def ap(sign, ik, z, m):
        return hatted_block_apply(chain, sign, ik, z, vals, m)

    def creation_v(roots, m):
        for vr in reversed(tuple(roots)):
            m = ap("+", (2, 1), vr, m)
        return m

    def creation_w(roots, m):
        for ws in reversed(tuple(roots)):
            m = ap("-", (1, 2), ws, m)
        return m

    out = []
    # diagonal entries through the plus-creation string
    lhs = ap("+", (1, 1), x, creation_v(v, cols))
    rhs = creation_v(v, ap("+", (1, 1), x, cols)).scale(F_right(x, v))
    for r, vr in enumerate(v):
        rest = v.removing(r)
        rhs = rhs - creation_v(rest.appending(x), ap("+", (1, 1), vr, cols)).scale(
            g(x, vr) * F_right(vr, rest))
    out.append(residual(lhs, rhs))

    lhs = ap("+", (2, 2), x, creation_v(v, cols))
    rhs = creation_v(v, ap("+", (2, 2), x, cols)).scale(F_left(v, x))
    for r, vr in enumerate(v):
        rest = v.removing(r)
        rhs = rhs - creation_v(rest.appending(x), ap("+", (2, 2), vr, cols)).scale(
            g(vr, x) * F_left(rest, vr))
    out.append(residual(lhs, rhs))

    # diagonal entries through the minus-creation string
    lhs = ap("-", (1, 1), x, creation_w(w, cols))
    rhs = creation_w(w, ap("-", (1, 1), x, cols)).scale(F_left(w, x))
    for s, ws in enumerate(w):
        rest = w.removing(s)
        rhs = rhs - creation_w(rest.appending(x), ap("-", (1, 1), ws, cols)).scale(
            g(ws, x) * F_left(rest, ws))
    out.append(residual(lhs, rhs))

    lhs = ap("-", (2, 2), x, creation_w(w, cols))
    rhs = creation_w(w, ap("-", (2, 2), x, cols)).scale(F_right(x, w))
    for s, ws in enumerate(w):
        rest = w.removing(s)
        rhs = rhs - creation_w(rest.appending(x), ap("-", (2, 2), ws, cols)).scale(
            g(x, ws) * F_right(ws, rest))
    out.append(residual(lhs, rhs))

    # cross relations with the shifted arguments x -+ 2
    lhs = ap("+", (1, 1), x, creation_w(w, cols))
    rhs = creation_w(w, ap("+", (1, 1), x, cols)).scale(F_right(x - 2, w))
    for s, ws in enumerate(w):
        rest = w.removing(s)
        rhs = rhs + ap("+", (2, 1), x, creation_w(rest, ap("-", (2, 2), ws, cols))).scale(
            g(x - 2, ws) * F_right(ws, rest))
    out.append(residual(lhs, rhs))

    lhs = ap("+", (2, 2), x, creation_w(w, cols))
    rhs = creation_w(w, ap("+", (2, 2), x, cols)).scale(F_left(w, x - 2))
    for s, ws in enumerate(w):
        rest = w.removing(s)
        rhs = rhs + ap("+", (2, 1), x, creation_w(rest, ap("-", (1, 1), ws, cols))).scale(
            g(ws, x - 2) * F_left(rest, ws))
    out.append(residual(lhs, rhs))

    lhs = ap("-", (1, 1), x, creation_v(v, cols))
    rhs = creation_v(v, ap("-", (1, 1), x, cols)).scale(F_left(v, x + 2))
    for r, vr in enumerate(v):
        rest = v.removing(r)
        rhs = rhs + creation_v(rest, ap("-", (1, 2), x, ap("+", (2, 2), vr, cols))).scale(
            g(vr, x + 2) * F_left(rest, vr))
    out.append(residual(lhs, rhs))

    lhs = ap("-", (2, 2), x, creation_v(v, cols))
    rhs = creation_v(v, ap("-", (2, 2), x, cols)).scale(F_right(x + 2, v))
    for r, vr in enumerate(v):
        rest = v.removing(r)
        rhs = rhs + creation_v(rest, ap("-", (1, 2), x, ap("+", (1, 1), vr, cols))).scale(
            g(x + 2, vr) * F_right(vr, rest))
    out.append(residual(lhs, rhs))

    return out


def tilde_offshell_residuals(chain: Chain, uvec, x, vbar, wbar):
    """Off-shell action of the four diagonal dressed entries on the
    second-level state, against the explicit weight expansion."""
    vals = tuple(uvec)
    v = RootSet(tuple(vbar))
    w = RootSet(tuple(wbar))
    mu = lambda i, z: mu_weight(chain, i, z, vals)
    state = lambda vb, wb: tilde_state(chain, vals, vb, wb, monic=False)
    base = state(v, w)
    out = []

    def ap(sign, ik, z, m):
        return hatted_block_apply(chain, sign, ik, z, vals, m)

    # plus-plus diagonal
    lhs = ap("+", (1, 1), x, base)
    rhs = base.scale(mu(1, x) * F_right(x, v) * F_right(x - 2, w))
    for r, vr in enumerate(v):
        rest = v.removing(r)
        rhs = rhs - state(rest.appending(x), w).scale(
            mu(1, vr) * g(x, vr) * F_right(vr, rest) * F_right(vr - 2, w))
    for s, ws in enumerate(w):
        rest = w.removing(s)
        rhs = rhs + state(v.appending(x), rest).scale(
            mu(-2, ws) * g(x - 2, ws) * F_right(ws + 2, v) * F_right(ws, rest))
    out.append(residual(lhs, rhs))

    lhs = ap("+", (2, 2), x, base)
    rhs = base.scale(mu(2, x) * F_left(v, x) * F_left(w, x - 2))
    for r, vr in enumerate(v):
        rest = v.removing(r)
        rhs = rhs - state(rest.appending(x), w).scale(
            mu(2, vr) * g(vr, x) * F_left(rest, vr) * F_left(w, vr - 2))
    for s, ws in enumerate(w):
        rest = w.removing(s)
        rhs = rhs + state(v.appending(x), rest).scale(
            mu(-1, ws) * g(ws, x - 2) * F_left(v, ws + 2) * F_left(rest, ws))
    out.append(residual(lhs, rhs))

    lhs = ap("-", (1, 1), x, base)
    rhs = base.scale(mu(-1, x) * F_left(v, x + 2) * F_left(w, x))
    for r, vr in enumerate(v):
        rest = v.removing(r)
        rhs = rhs + state(rest, w.appending(x)).scale(
            mu(2, vr) * g(vr, x + 2) * F_left(rest, vr) * F_left(w, vr - 2))
    for s, ws in enumerate(w):
        rest = w.removing(s)
        rhs = rhs - state(v, rest.appending(x)).scale(
            mu(-1, ws) * g(ws, x) * F_left(v, ws + 2) * F_left(rest, ws))
    out.append(residual(lhs, rhs))

    lhs = ap("-", (2, 2), x, base)
    rhs = base.scale(mu(-2, x) * F_right(x + 2, v) * F_right(x, w))
    for r, vr in enumerate(v):
        rest = v.removing(r)
        rhs = rhs + state(rest, w.appending(x)).scale(
            mu(1, vr) * g(x + 2, vr) * F_right(vr, rest) * F_right(vr - 2, w))
    for s, ws in enumerate(w):
        rest = w.removing(s)
        rhs = rhs - state(v, rest.appending(x)).scale(
            mu(-2, ws) * g(x, ws) * F_right(ws + 2, v) * F_right(ws, rest))
    out.append(residual(lhs, rhs))

    return out


# ---------------------------------------------------------------------
# final eigenvectors, eigenvalue, conditions
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class Sp4BetheConfig:
    """Root data (u-vec; v-bar; w-bar) for the three-family ansatz."""

    uvec: tuple
    vbar: tuple
    wbar: tuple

    def __post_init__(self):
        RootSet(self.uvec)
        RootSet(self.vbar)
        RootSet(self.wbar)

    @property
    def counts(self):
        return len(self.uvec), len(self.vbar), len(self.wbar)


def sp4_bethe_vector(chain: Chain, cfg: Sp4BetheConfig) -> Mat:
    """<B_1..N(u), Phi(u; v-bar; w-bar)> on the chain space."""
    phi = tilde_state(chain, cfg.uvec, cfg.vbar, cfg.wbar, monic=True)
    args = [(j, u) for j, u in enumerate(cfg.uvec)]
    psi = pairing_matrix(chain, args) @ phi
    if chain.backend != EXACT and psi.norm() < 1e-10 * max(1.0, phi.norm()):
        # contraction cancels to float noise: treat as a vanishing state
        raise ZeroVectorError(
            f"sp4 Bethe vector contracts to norm {psi.norm():.3e}")
    return check_nonzero(psi, "sp4 Bethe vector")


def prop_eigenvalue(chain: Chain, sign, x, cfg: Sp4BetheConfig):
    """Second-level eigenvalues of the dressed traces (the two halves that
    merge into the final eigenvalue)."""
    u, v, w = RootSet(cfg.uvec), RootSet(cfg.vbar), RootSet(cfg.wbar)
    if sign == "+":
        return (chain.lam(1, x) * F_left(u, x - 1) * F_right(x, v) * F_right(x - 2, w)
                + chain.lam(2, x) * F_left(v, x) * F_left(w, x - 2) / F_left(u, x))
    return (chain.lam(-1, x) * F_right(x + 1, u) * F_left(v, x + 2) * F_left(w, x)
            + chain.lam(-2, x) * F_right(x + 2, v) * F_right(x, w) / F_right(x, u))


def sp4_eigenvalue(chain: Chain, x, cfg: Sp4BetheConfig):
    """E(x) = lam1 FF(u,x) F(x,v) F(x-2,w) + lam2 F(v,x) F(w,x-2)
            + lam-1 FF(x,u) F(v,x+2) F(w,x) + lam-2 F(x+2,v) F(x,w),
    with FF the pole-safe double-step products."""
    u, v, w = RootSet(cfg.uvec), RootSet(cfg.vbar), RootSet(cfg.wbar)
    return (chain.lam(1, x) * F2_left(u, x) * F_right(x, v) * F_right(x - 2, w)
            + chain.lam(2, x) * F_left(v, x) * F_left(w, x - 2)
            + chain.lam(-1, x) * F2_right(x, u) * F_left(v, x + 2) * F_left(w, x)
            + chain.lam(-2, x) * F_right(x + 2, v) * F_right(x, w))


def sp4_residuals(chain: Chain, cfg: Sp4BetheConfig):
    """The three Bethe families, (raw, relative) pairs keyed "u", "v", "w"."""
    u, v, w = RootSet(cfg.uvec), RootSet(cfg.vbar), RootSet(cfg.wbar)
    fam_u, fam_v, fam_w = [], [], []
    for kk, uk in enumerate(u):
        rest = u.removing(kk)
        lhs = (chain.lam(1, uk) * F2_left(rest, uk)
               * F_right(uk, v) * F_right(uk - 2, w))
        rhs = (chain.lam(-1, uk) * F2_right(uk, rest)
               * F_left(v, uk + 2) * F_left(w, uk))
        fam_u.append(_residual_pair(lhs, rhs))
    for r, vr in enumerate(v):
        rest = v.removing(r)
        lhs = (chain.lam(1, vr) * F2_left(u, vr)
               * F_right(vr, rest) * F_right(vr - 2, w))
        rhs = chain.lam(2, vr) * F_left(rest, vr) * F_left(w, vr - 2)
        fam_v.append(_residual_pair(lhs, rhs))
    for s, ws in enumerate(w):
        rest = w.removing(s)
        lhs = (chain.lam(-1, ws) * F2_right(ws, u)
               * F_left(v, ws + 2) * F_left(rest, ws))
        rhs = chain.lam(-2, ws) * F_right(ws + 2, v) * F_right(ws, rest)
        fam_w.append(_residual_pair(lhs, rhs))
    return {"u": fam_u, "v": fam_v, "w": fam_w}


def tilde_eigen_residuals(chain: Chain, cfg: Sp4BetheConfig, x):
    """|Hhat(+-)(x) Phi - E(+-)(x) Phi| for the second-level state."""
    phi = tilde_state(chain, cfg.uvec, cfg.vbar, cfg.wbar, monic=True)
    out = []
    for sign in ("+", "-"):
        hphi = (hatted_block_apply(chain, sign, (1, 1), x, cfg.uvec, phi)
                + hatted_block_apply(chain, sign, (2, 2), x, cfg.uvec, phi))
        e = prop_eigenvalue(chain, sign, x, cfg)
        out.append(residual(hphi, phi.scale(e)))
    return out


def level_merge_residual(chain: Chain, cfg: Sp4BetheConfig, k):
    """Matching condition between the two second-level eigenvalue halves at
    the k-th outer root, in the pole-cancelled combined form (identical to
    the outer Bethe family)."""
    return sp4_residuals(chain, cfg)["u"][k]
