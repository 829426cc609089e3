"""R-matrix families on concrete tensor legs.

Index conventions (the single canonical table for the whole package):

* the 4-dimensional symplectic local space carries index values
  (-2, -1, 1, 2) mapped to slots (0, 1, 2, 3);
* gl(n) local spaces carry values (1..n) mapped to slots (0..n-1);
* 2-dimensional sign-block legs carry values (1, 2) resp. (-1, -2), both
  mapped to slots (0, 1);
* ``E(a, b)`` is the matrix unit with E^a_b e_c = delta^a_c e_b, i.e. a 1 in
  row slot(b), column slot(a);
* dual legs are 2-dimensional coordinate spaces on which
  ``F(a, b)`` acts by F^a_b f^d = delta^d_b f^a (1 in row slot(a),
  column slot(b)); these satisfy F^a_b F^c_d = delta^c_b F^a_d.

Builders produce `ROperator`s (matrix + leg signature + kind tag); the
checkers verify the Yang-Baxter equation, unitarity, and the auxiliary
reordering identities used by the dressed-monodromy constructions.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .linalg import EXACT, FLOAT, Mat, lift, residual, swap_mat
from .scalars import PoleError, f, g, h, is_exact, k


def recip(x):
    """Guarded reciprocal: raising PoleError instead of dividing by ~0."""
    if is_exact(x):
        if x == 0:
            raise PoleError("reciprocal of exact zero")
    elif abs(x) < 1e-12:
        raise PoleError(f"reciprocal of near-zero {abs(x):.3e}")
    return 1 / x

SP4_SPACE = (-2, -1, 1, 2)
PLUS = (1, 2)
MINUS = (-1, -2)


def gl_space(n):
    return tuple(range(1, n + 1))


def eps(i):
    """Sign of an index value."""
    return 1 if i > 0 else -1


def _backend_of(x):
    return EXACT if is_exact(x) else FLOAT


def unit_E(space, upper, lower, backend):
    """Matrix unit E^upper_lower on the given space."""
    d = len(space)
    m = Mat.zeros((d, d), backend)
    m.num[space.index(lower), space.index(upper)] = 1 if backend == EXACT else 1.0
    if backend == EXACT:
        m._amax = 1
    return m


def unit_F(space, upper, lower, backend):
    """Dual-leg mapping F^upper_lower (acts on covector coordinates)."""
    d = len(space)
    m = Mat.zeros((d, d), backend)
    m.num[space.index(upper), space.index(lower)] = 1 if backend == EXACT else 1.0
    if backend == EXACT:
        m._amax = 1
    return m


class RKind(Enum):
    GL2 = "gl2"
    GL3 = "gl3"
    SP4 = "sp4"
    SP4_TILDE = "sp4tilde"
    BLOCK_PP = "block++"
    BLOCK_PM = "block+-"
    BLOCK_MP = "block-+"
    BLOCK_MM = "block--"
    DUAL_PP = "dual++"
    HATTED_PP = "hatted++"
    HATTED_MP = "hatted-+"


@dataclass(frozen=True)
class ROperator:
    """Concrete matrix with its tensor-leg signature and family tag."""

    mat: Mat
    legs: tuple
    kind: RKind

    @property
    def dim(self):
        return self.mat.shape[0]


def build_gl_r(n, x, y):
    """gl(n) R-matrix (1/f)(I (x) I + g P) on n (x) n."""
    backend = _backend_of(x)
    fv, gv = f(x, y), g(x, y)
    sp = gl_space(n)
    m = Mat.identity(n * n, backend)
    for i in sp:
        for kk in sp:
            m = m + unit_E(sp, i, kk, backend).kron(unit_E(sp, kk, i, backend)).scale(gv)
    m = m.scale(recip(fv))
    return ROperator(m, (n, n), RKind.GL2 if n == 2 else RKind.GL3)


def build_sp4_r(x, y):
    """Symplectic 16x16 R-matrix with the extra rank-one h-term."""
    backend = _backend_of(x)
    fv, gv, hv = f(x, y), g(x, y), h(x, y)
    sp = SP4_SPACE
    m = Mat.identity(16, backend)
    for i in sp:
        for kk in sp:
            m = m + unit_E(sp, i, kk, backend).kron(unit_E(sp, kk, i, backend)).scale(gv)
            m = m + unit_E(sp, i, kk, backend).kron(
                unit_E(sp, -i, -kk, backend)).scale(-hv * eps(i) * eps(kk))
    m = m.scale(recip(fv))
    return ROperator(m, (4, 4), RKind.SP4)


_BLOCK_KIND = {("+", "+"): RKind.BLOCK_PP, ("+", "-"): RKind.BLOCK_PM,
               ("-", "+"): RKind.BLOCK_MP, ("-", "-"): RKind.BLOCK_MM}


def build_block_r(eps1, eps2, x, y, monic=False):
    """Sign-block R-matrices on the 2 (x) 2 block legs.

    (+,+) and (-,-) are gl(2)-type with the 1/f prefactor; (+,-) carries
    k(x,y) and (-,+) carries h(x,y), both without prefactor.  `monic`
    drops the 1/f prefactor of the same-sign ones (used where Bethe
    vectors are built up to scale at collision points of the prefactor).
    """
    backend = _backend_of(x)
    if eps1 == eps2:
        gv = g(x, y)
        sp = PLUS if eps1 == "+" else MINUS
        m = Mat.identity(4, backend)
        sgn = 1 if eps1 == "+" else -1
        for i in (1, 2):
            for kk in (1, 2):
                m = m + unit_E(sp, sgn * i, sgn * kk, backend).kron(
                    unit_E(sp, sgn * kk, sgn * i, backend)).scale(gv)
        if not monic:
            m = m.scale(recip(f(x, y)))
    elif eps1 == "+":
        if monic:
            # (x-y-1) R^(+,-)(x,y): regular at the k-pole, where it becomes
            # minus the rank-one pair coupling
            m = Mat.identity(4, backend).scale(x - y - 1)
            kv = 1
        else:
            kv = k(x, y)
            m = Mat.identity(4, backend)
        for i in (1, 2):
            for kk in (1, 2):
                m = m + unit_E(PLUS, i, kk, backend).kron(
                    unit_E(MINUS, -i, -kk, backend)).scale(-kv)
    else:
        hv = h(x, y)
        m = Mat.identity(4, backend)
        for i in (1, 2):
            for kk in (1, 2):
                m = m + unit_E(MINUS, -i, -kk, backend).kron(
                    unit_E(PLUS, i, kk, backend)).scale(-hv)
    return ROperator(m, (2, 2), _BLOCK_KIND[(eps1, eps2)])


def coincident_block_r(eps1, eps2, backend):
    """Equal-argument specializations of the block R-matrices.

    Built from their explicit summed forms, never by evaluating the generic
    formulas at the pole: (+,-) and (-,+) become I + sum E (x) E,
    (+,+) and (-,-) become the plain exchange operator.
    """
    m = Mat.zeros((4, 4), backend)
    if eps1 == eps2:
        sgn = 1 if eps1 == "+" else -1
        sp = PLUS if eps1 == "+" else MINUS
        for r in (1, 2):
            for s in (1, 2):
                m = m + unit_E(sp, sgn * r, sgn * s, backend).kron(
                    unit_E(sp, sgn * s, sgn * r, backend))
    elif eps1 == "+":
        m = Mat.identity(4, backend)
        for r in (1, 2):
            for s in (1, 2):
                m = m + unit_E(PLUS, r, s, backend).kron(unit_E(MINUS, -r, -s, backend))
    else:
        m = Mat.identity(4, backend)
        for r in (1, 2):
            for s in (1, 2):
                m = m + unit_E(MINUS, -r, -s, backend).kron(unit_E(PLUS, r, s, backend))
    return ROperator(m, (2, 2), _BLOCK_KIND[(eps1, eps2)])


def build_tilde_r(x, y):
    """Two-sector 16x16 R-matrix: direct sum of the four sign blocks."""
    backend = _backend_of(x)
    m = Mat.zeros((16, 16), backend)
    spaces = {"+": PLUS, "-": MINUS}
    for e1 in ("+", "-"):
        for e2 in ("+", "-"):
            blk = build_block_r(e1, e2, x, y).mat
            s1, s2 = spaces[e1], spaces[e2]
            for a in range(2):
                for b in range(2):
                    for c in range(2):
                        for d in range(2):
                            val = blk.num[a * 2 + b, c * 2 + d]
                            if val == 0:
                                continue
                            row = SP4_SPACE.index(s1[a]) * 4 + SP4_SPACE.index(s2[b])
                            col = SP4_SPACE.index(s1[c]) * 4 + SP4_SPACE.index(s2[d])
                            if backend == EXACT:
                                num = Fraction(int(val), blk.den)
                                m = m + _entry_mat(16, row, col, num, backend)
                            else:
                                m = m + _entry_mat(16, row, col, complex(val), backend)
    return ROperator(m, (4, 4), RKind.SP4_TILDE)


def _entry_mat(n, row, col, value, backend):
    m = Mat.zeros((n, n), backend)
    if backend == EXACT:
        value = Fraction(value)
        m.num[row, col] = value.numerator
        m.den = value.denominator
        m._amax = abs(value.numerator)
    else:
        m.num[row, col] = value
    return m


def build_dual_pp(x, y):
    """Dual-dual gl(2)-type matrix (1/f)(I* (x) I* + g sum F^i_k (x) F^k_i)."""
    backend = _backend_of(x)
    fv, gv = f(x, y), g(x, y)
    m = Mat.identity(4, backend)
    for i in (1, 2):
        for kk in (1, 2):
            m = m + unit_F(PLUS, i, kk, backend).kron(unit_F(PLUS, kk, i, backend)).scale(gv)
    m = m.scale(recip(fv))
    return ROperator(m, (2, 2), RKind.DUAL_PP)


def coincident_dual_pp(backend):
    """Equal-argument dual-dual specialization sum F^i_k (x) F^k_i."""
    m = Mat.zeros((4, 4), backend)
    for i in (1, 2):
        for kk in (1, 2):
            m = m + unit_F(PLUS, i, kk, backend).kron(unit_F(PLUS, kk, i, backend))
    return ROperator(m, (2, 2), RKind.DUAL_PP)


def build_hatted_r(sign, x, u, monic=False):
    """Block-leg/dual-leg dressing matrices.

    sign "+": (1/f(u,x)) (I_+ (x) I* + g(u,x) sum E^r_s (x) F^s_r);
    sign "-": I_- (x) I* - k(u,x) sum E^{-r}_{-s} (x) F^r_s.
    `monic` drops the "+" prefactor (Bethe vectors are scale-free and the
    prefactor diverges at u - x = -1, a collision the middle Bethe family
    forces).
    """
    backend = _backend_of(x)
    if sign == "+":
        gv = g(u, x)
        m = Mat.identity(4, backend)
        for r in (1, 2):
            for s in (1, 2):
                m = m + unit_E(PLUS, r, s, backend).kron(
                    unit_F(PLUS, s, r, backend)).scale(gv)
        if not monic:
            m = m.scale(recip(f(u, x)))
        return ROperator(m, (2, 2), RKind.HATTED_PP)
    if monic:
        # (u-x-1) Rhat^(-,+)(x,u), regular at the k-pole
        m = Mat.identity(4, backend).scale(u - x - 1)
        kv = 1
    else:
        kv = k(u, x)
        m = Mat.identity(4, backend)
    for r in (1, 2):
        for s in (1, 2):
            m = m + unit_E(MINUS, -r, -s, backend).kron(
                unit_F(PLUS, r, s, backend)).scale(-kv)
    return ROperator(m, (2, 2), RKind.HATTED_MP)


def coincident_hatted_r(sign, backend):
    """Equal-argument dressing matrices: "+" -> sum E^r_s (x) F^s_r,
    "-" -> I (x) I* + sum E^{-r}_{-s} (x) F^r_s."""
    if sign == "+":
        m = Mat.zeros((4, 4), backend)
        for r in (1, 2):
            for s in (1, 2):
                m = m + unit_E(PLUS, r, s, backend).kron(unit_F(PLUS, s, r, backend))
        return ROperator(m, (2, 2), RKind.HATTED_PP)
    m = Mat.identity(4, backend)
    for r in (1, 2):
        for s in (1, 2):
            m = m + unit_E(MINUS, -r, -s, backend).kron(unit_F(PLUS, r, s, backend))
    return ROperator(m, (2, 2), RKind.HATTED_MP)


_BUILDERS = {
    "gl2": (lambda x, y: build_gl_r(2, x, y), 2),
    "gl3": (lambda x, y: build_gl_r(3, x, y), 3),
    "sp4": (build_sp4_r, 4),
    "sp4tilde": (build_tilde_r, 4),
}


def check_ybe(kind, x, y, z):
    """Max-abs residual of R12(x,y) R13(x,z) R23(y,z) - R23 R13 R12."""
    build, d = _BUILDERS[kind]
    dims = [d, d, d]
    r12 = lift(build(x, y).mat, [0, 1], dims)
    r13 = lift(build(x, z).mat, [0, 2], dims)
    r23 = lift(build(y, z).mat, [1, 2], dims)
    return residual(r12 @ r13 @ r23, r23 @ r13 @ r12)


def check_unitarity(kind, x, y):
    """Max-abs residual of R12(x,y) R21(y,x) - I."""
    build, d = _BUILDERS[kind]
    backend = _backend_of(x)
    s = swap_mat(d, d, backend)
    prod = build(x, y).mat @ (s @ build(y, x).mat @ s)
    return residual(prod, Mat.identity(d * d, backend))


def mixed_ybe_residual(eps1, eps2, x, y, z):
    """Compatibility of the sign-block R with the dual-leg dressings:

    R^(e1,e2)_12(x,y) Rhat^(e1,+)_13*(x,z) Rhat^(e2,+)_23*(y,z)
      = Rhat^(e2,+)_23*(y,z) Rhat^(e1,+)_13*(x,z) R^(e1,e2)_12(x,y).
    """
    dims = [2, 2, 2]
    r = lift(build_block_r(eps1, eps2, x, y).mat, [0, 1], dims)
    h1 = lift(build_hatted_r(eps1, x, z).mat, [0, 2], dims)
    h2 = lift(build_hatted_r(eps2, y, z).mat, [1, 2], dims)
    return residual(r @ h1 @ h2, h2 @ h1 @ r)


def dual_reorder_residuals(u1, u2):
    """The four reordering identities behind the multi-root exchange proof.

    Returns the list of max-abs residuals (six comparisons: two of the four
    identities also collapse to the bare equal-argument matrix).
    """
    backend = _backend_of(u1)
    dims = [2, 2, 2]
    out = []

    # plus-aux against two dual legs
    rs = lift(build_dual_pp(u2, u1).mat, [2, 1], dims)
    rh = lift(build_hatted_r("+", u2, u1).mat, [0, 1], dims)
    rc = lift(coincident_hatted_r("+", backend).mat, [0, 2], dims)
    out.append(residual(rs @ rh @ rc, rc @ rh @ rs))
    out.append(residual(rs @ rh @ rc, rc))

    # plus-aux against two minus legs
    rmm = lift(build_block_r("-", "-", u1, u2).mat, [1, 2], dims)
    rpmc = lift(coincident_block_r("+", "-", backend).mat, [0, 2], dims)
    rpm = lift(build_block_r("+", "-", u2, u1).mat, [0, 1], dims)
    out.append(residual(rmm @ rpmc @ rpm, rpm @ rpmc @ rmm))

    # minus-aux against two dual legs
    rhm = lift(build_hatted_r("-", u2, u1).mat, [0, 1], dims)
    rcm = lift(coincident_hatted_r("-", backend).mat, [0, 2], dims)
    out.append(residual(rs @ rhm @ rcm, rcm @ rhm @ rs))

    # minus-aux against two minus legs
    rmmc = lift(coincident_block_r("-", "-", backend).mat, [0, 2], dims)
    rmm01 = lift(build_block_r("-", "-", u2, u1).mat, [0, 1], dims)
    out.append(residual(rmm @ rmmc @ rmm01, rmm01 @ rmmc @ rmm))
    out.append(residual(rmm @ rmmc @ rmm01, rmmc))
    return out
