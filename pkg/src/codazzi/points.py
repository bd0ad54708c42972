"""Pointwise (derivative-free) quantities of a statistical structure.

A statistical structure at a point is a metric g together with a totally
symmetric cubic form A; K = A with the last slot raised, E = tr_g K, and
tau = g(E, .) is the trace form.  Everything here is algebra in those
components: the commutator curvature [K,K], its Ricci tensor and scalar,
the sectional invariant of [K,K], the sharp trace inequalities with their
equality certificates, and the squared-norm quantities entering the
Laplacian bounds for the cubic form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, PreconditionError
from .tensors import (
    CubicForm,
    CurvTensor,
    MetricPoint,
    Tensor,
    frame_components,
    inner,
    norm,
    orthonormal_frame,
    r0_curvature,
    raise_last,
    ricci_from_curvature,
    scalar_from_ricci,
    symmetrize,
)

TRACE_FREE_TOL = 1e-12
CERTIFICATE_TOL = 1e-9


class StatPoint:
    """A pointwise statistical structure (g, A) with its derived quantities.

    Immutable after construction; derived arrays are cached on first use.
    """

    __slots__ = ("n", "g", "A", "_k", "_e", "_tau", "_frame_a")

    def __init__(self, g: MetricPoint, a: CubicForm):
        if g.n != a.n:
            raise DimensionMismatchError(f"metric has n={g.n}, cubic form has n={a.n}")
        self.n = g.n
        self.g = g
        self.A = a
        self._k = None
        self._e = None
        self._tau = None
        self._frame_a = None

    @classmethod
    def from_components(cls, g_matrix, a_dense, tol: float = 1e-9) -> "StatPoint":
        return cls(MetricPoint(g_matrix), CubicForm.from_dense(a_dense, tol=tol))

    @property
    def K(self) -> Tensor:
        """Difference tensor as a (1,2) tensor: K^m_ij = g^{ml} A_ijl."""
        if self._k is None:
            self._k = raise_last(self.g, self.A)
        return self._k

    @property
    def E(self) -> np.ndarray:
        """Trace vector E^m = g^{ij} K^m_ij."""
        if self._e is None:
            e = np.einsum("ij,mij->m", self.g.inverse, self.K.array)
            e.setflags(write=False)
            self._e = e
        return self._e

    @property
    def tau(self) -> np.ndarray:
        """Trace form tau_i = tr(K_{e_i}) = g(E, e_i)."""
        if self._tau is None:
            t = self.g.components @ self.E
            t.setflags(write=False)
            self._tau = t
        return self._tau

    @property
    def trace_free(self) -> bool:
        return self.g.norm(self.E) < TRACE_FREE_TOL

    @property
    def frame_cubic(self) -> np.ndarray:
        """Cubic form components in the deterministic orthonormal frame of g."""
        if self._frame_a is None:
            b = orthonormal_frame(self.g)
            fa = frame_components(b, self.A.dense)
            fa.setflags(write=False)
            self._frame_a = fa
        return self._frame_a

    def k_operator(self, x) -> np.ndarray:
        """Endomorphism K_X as a matrix: (K_X)^m_j = K^m_ij x^i."""
        return np.einsum("mij,i->mj", self.K.array, np.asarray(x, dtype=float))

    def operator_pairing(self, x, y) -> float:
        """g(K_X, K_Y): scalar product of the endomorphisms w.r.t. g."""
        kx = self.k_operator(x)
        ky = self.k_operator(y)
        return float(np.einsum("ab,mn,ma,nb->", self.g.inverse, self.g.components, kx, ky))

    def norm_a_sq(self) -> float:
        """||A||^2 = ||K||^2 (full contraction with g^{-1})."""
        return inner(self.g, self.A, self.A)

    def tau_circ_k(self) -> np.ndarray:
        """(tau o K)(Y,Z) = tau(K(Y,Z)) as a symmetric 2-form."""
        return np.einsum("m,mij->ij", self.tau, self.K.array)

    def gram_k(self) -> np.ndarray:
        """g(K_., K_.) as a symmetric 2-form: entry (i,j) is g(K_{e_i}, K_{e_j})."""
        k = self.K.array
        return np.einsum("ab,mn,mia,njb->ij", self.g.inverse, self.g.components, k, k)

    def __repr__(self):
        return f"StatPoint(n={self.n})"


@dataclass
class EqualityCertificate:
    """Named residual witnesses for an equality characterization.

    holds is True exactly when every witness residual is below the
    tolerance; best_effort marks certificates whose witnesses live in a
    searched (not canonical) basis, where failure to certify does not
    disprove equality.
    """

    holds: bool
    witnesses: list[tuple[str, float]]
    tolerance: float = CERTIFICATE_TOL
    best_effort: bool = False

    @classmethod
    def from_witnesses(cls, witnesses, tolerance=CERTIFICATE_TOL, best_effort=False):
        holds = all(abs(v) < tolerance for _, v in witnesses)
        return cls(holds=holds, witnesses=list(witnesses), tolerance=tolerance, best_effort=best_effort)


# ---------------------------------------------------------------------------
# commutator curvature


def bracket_kk(sp: StatPoint) -> CurvTensor:
    """[K,K](X,Y)Z = K_X K_Y Z - K_Y K_X Z, lowered to a (0,4) curvature tensor."""
    k = sp.K.array
    up = np.einsum("mip,pjk->mijk", k, k)
    up = up - np.swapaxes(up, 1, 2)
    low = np.einsum("lm,mijk->ijkl", sp.g.components, up)
    out = CurvTensor(low)
    out.check(tol=1e-10 * (1.0 + float(np.max(np.abs(low)))), riemannian=True)
    return out


def ric_k(sp: StatPoint) -> np.ndarray:
    """Ricci tensor of [K,K] through the trace identity tau(K(Y,Z)) - g(K_Y, K_Z)."""
    return sp.tau_circ_k() - sp.gram_k()


def ric_k_from_bracket(sp: StatPoint) -> np.ndarray:
    """Ricci tensor of [K,K] as the direct trace of X -> [K,K](X,Y)Z."""
    return ricci_from_curvature(sp.g, bracket_kk(sp))


def rho_k(sp: StatPoint) -> tuple[float, float]:
    """Scalar curvature of [K,K], computed two independent ways.

    Returns (trace of ric_k, ||E||^2 - ||K||^2); the two agree for every
    structure and the harness reports their difference as a residual.
    """
    via_trace = scalar_from_ricci(sp.g, ric_k(sp))
    via_norms = sp.g.norm(sp.E) ** 2 - sp.norm_a_sq()
    return via_trace, via_norms


def _gram_schmidt_plane(g: MetricPoint, x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    nx = g.norm(x)
    if nx == 0.0:
        raise PreconditionError("plane vectors must be nonzero")
    e1 = x / nx
    y2 = y - g.pair(e1, y) * e1
    ny = g.norm(y2)
    if ny <= 1e-12 * max(g.norm(y), 1.0):
        raise PreconditionError("plane vectors are linearly dependent")
    return e1, y2 / ny


def sectional_k(sp: StatPoint, x, y) -> float:
    """Sectional invariant of [K,K] on the plane spanned by x, y."""
    e1, e2 = _gram_schmidt_plane(sp.g, x, y)
    b = bracket_kk(sp).array
    return float(np.einsum("ijkl,i,j,k,l->", b, e1, e2, e2, e1))


# ---------------------------------------------------------------------------
# trace inequalities with equality certificates


def _adapted_frame(sp: StatPoint, u) -> np.ndarray:
    """g-orthonormal frame whose first column is u/|u| (Gram-Schmidt completion)."""
    g = sp.g
    u = np.asarray(u, dtype=float)
    cols = [u / g.norm(u)]
    for i in range(sp.n):
        v = np.zeros(sp.n)
        v[i] = 1.0
        for c in cols:
            v = v - g.pair(c, v) * c
        nv = g.norm(v)
        if nv > 1e-9:
            cols.append(v / nv)
        if len(cols) == sp.n:
            break
    return np.column_stack(cols)


def check_ineq_quarter(sp: StatPoint, u) -> tuple[float, float, EqualityCertificate]:
    """(tau o K)(U,U) - g(K_U, K_U) <= ||tau||^2 g(U,U) / 4.

    Equality (for U != 0) holds exactly when tau = 0 and K_U = 0; the
    certificate reports both witness norms.
    """
    u = np.asarray(u, dtype=float)
    if sp.g.norm(u) == 0.0:
        raise PreconditionError("U must be nonzero")
    kuu = np.einsum("mij,i,j->m", sp.K.array, u, u)
    lhs = float(sp.tau @ kuu) - sp.operator_pairing(u, u)
    tau_sq = float(sp.tau @ sp.g.inverse @ sp.tau)
    rhs = 0.25 * tau_sq * sp.g.pair(u, u)
    ku = sp.k_operator(u)
    ku_norm = float(np.sqrt(np.einsum("ab,mn,ma,nb->", sp.g.inverse, sp.g.components, ku, ku)))
    cert = EqualityCertificate.from_witnesses(
        [("|tau|", float(np.sqrt(tau_sq))), ("|K_U|", ku_norm)]
    )
    return lhs, rhs, cert


def check_ineq_eighth(sp: StatPoint, u) -> tuple[float, float, EqualityCertificate]:
    """Sharper bound ||tau||^2 g(U,U) / 8, valid when A(U,U,U) = 0.

    A violated precondition raises PreconditionError rather than counting
    as an inequality failure.  The certificate (for unit U) witnesses:
    A(U,V,W) = 0 for V,W orthogonal to U; E orthogonal to U; E = 4K(U,U).
    """
    u = np.asarray(u, dtype=float)
    nu = sp.g.norm(u)
    if nu == 0.0:
        raise PreconditionError("U must be nonzero")
    auuu = sp.A(u, u, u)
    if abs(auuu) >= 1e-10 * max(nu**3, 1.0):
        raise PreconditionError(f"A(U,U,U) = {auuu:g} is not zero; the 1/8 bound does not apply")
    kuu = np.einsum("mij,i,j->m", sp.K.array, u, u)
    lhs = float(sp.tau @ kuu) - sp.operator_pairing(u, u)
    tau_sq = float(sp.tau @ sp.g.inverse @ sp.tau)
    rhs = 0.125 * tau_sq * sp.g.pair(u, u)

    frame = _adapted_frame(sp, u)
    a_hat = frame_components(frame, sp.A.dense)
    u_hat = u / nu
    k_u_hat = np.einsum("mij,i,j->m", sp.K.array, u_hat, u_hat)
    ortho_block = float(np.max(np.abs(a_hat[0, 1:, 1:]))) if sp.n > 1 else 0.0
    cert = EqualityCertificate.from_witnesses(
        [
            ("max |A(U,V,W)| for V,W perp U", ortho_block),
            ("tau(U)", float(sp.tau @ u_hat)),
            ("|E - 4K(U,U)|", sp.g.norm(sp.E - 4.0 * k_u_hat)),
        ]
    )
    return lhs, rhs, cert


def _equality_frames(sp: StatPoint, rotations: int = 64, seed: int = 20240) -> list[np.ndarray]:
    """Candidate orthonormal frames for the norm-gap equality search."""
    b = orthonormal_frame(sp.g)
    a_hat = sp.frame_cubic
    frames = [b]
    for i in range(sp.n):
        _, vecs = np.linalg.eigh(a_hat[i])
        frames.append(b @ vecs)
    rng = np.random.default_rng(seed)
    for _ in range(rotations):
        q, r = np.linalg.qr(rng.standard_normal((sp.n, sp.n)))
        q = q @ np.diag(np.sign(np.diag(r)))
        frames.append(b @ q)
    return frames


def check_ineq_n2over3(sp: StatPoint) -> tuple[float, EqualityCertificate]:
    """Nonnegativity of (n+2)/3 ||A||^2 - ||E||^2.

    The equality condition (A_iii = 3 A_jji and vanishing off-diagonal
    entries) is stated in an adapted basis the structure does not name, so
    the certificate searches the K-operator eigenframes plus seeded random
    rotations and is labeled best-effort: a failed certificate never means
    the inequality failed.
    """
    n = sp.n
    residual = (n + 2) / 3.0 * sp.norm_a_sq() - sp.g.norm(sp.E) ** 2
    best = np.inf
    for frame in _equality_frames(sp):
        a_hat = frame_components(frame, sp.A.dense)
        worst = 0.0
        for i in range(n):
            for j in range(n):
                if j != i:
                    worst = max(worst, abs(a_hat[i, i, i] - 3.0 * a_hat[j, j, i]))
        for i in range(n):
            for j in range(n):
                for r in range(n):
                    if i != j and i != r and j != r:
                        worst = max(worst, abs(a_hat[i, j, r]))
        best = min(best, worst)
        if best < CERTIFICATE_TOL:
            break
    cert = EqualityCertificate.from_witnesses(
        [("min over searched bases of the equality-condition defect", float(best))],
        best_effort=True,
    )
    return residual, cert


def scalar_gap_bounds(sp: StatPoint) -> tuple[float, float, float]:
    """Norm gap ||A||^2 - ||E||^2 with its two algebraic lower bounds.

    Returns (gap, -(n-1)/3 ||A||^2, -(n-1)/(n+2) ||E||^2); the gap dominates
    both bounds for every structure.
    """
    n = sp.n
    a2 = sp.norm_a_sq()
    e2 = sp.g.norm(sp.E) ** 2
    return a2 - e2, -(n - 1) / 3.0 * a2, -(n - 1) / (n + 2) * e2


# ---------------------------------------------------------------------------
# squared-norm tensors of the cubic form (Laplacian bound ingredients)


def lpq(sp: StatPoint) -> tuple[float, float, Tensor, float]:
    """Squared norms of L(X,Y,W,Z) = g(K(X,Y),K(W,Z)) and its antisymmetrization P,
    together with the contraction tensor Q and the pairing g(Q, A).

    Q(Y,W,Z) = trace over X of the derivation action of [K_X, K_Y] on A;
    -g(Q,A) = ||L||^2 + ||P||^2.  Everything is computed in the deterministic
    orthonormal frame of g (the returned Q carries frame components); the
    scalars are frame-invariant.
    """
    a_hat = sp.frame_cubic
    a_ij = np.einsum("ikl,jkl->ij", a_hat, a_hat)
    normsq_l = float(np.sum(a_ij**2))
    b = np.einsum("ijm,klm->ijkl", a_hat, a_hat)
    b = b - np.transpose(b, (2, 1, 0, 3))
    normsq_p = float(np.sum(b**2))

    comm = np.einsum("xab,ybc->xyac", a_hat, a_hat)
    comm = comm - np.transpose(comm, (1, 0, 2, 3))
    q = (
        -np.einsum("xyax,awz->ywz", comm, a_hat)
        - np.einsum("xyaw,xaz->ywz", comm, a_hat)
        - np.einsum("xyaz,xwa->ywz", comm, a_hat)
    )
    pairing = float(np.sum(q * a_hat))
    return normsq_l, normsq_p, Tensor(sp.n, 3, 0, q), pairing


def constant_curvature_residual(rt: CurvTensor, g: MetricPoint, h: float) -> float:
    """g-norm of R - H R0: zero exactly on constant-curvature structures."""
    if rt.n != g.n:
        raise DimensionMismatchError(f"metric has n={g.n}, curvature has n={rt.n}")
    diff = rt.array - h * r0_curvature(g).array
    return norm(g, diff)


def lagrangian_gauss_residual(sp: StatPoint, rhat: CurvTensor, c: float) -> tuple[float, float]:
    """Residual of c R0 = Rhat - [K,K], plus the scalar-curvature consistency check.

    Returns (||c R0 - Rhat + [K,K]||, |rho_hat - (c n(n-1) + ||E||^2 - ||A||^2)|).
    """
    g = sp.g
    diff = c * r0_curvature(g).array - rhat.array + bracket_kk(sp).array
    residual = norm(g, diff)
    rho_hat = scalar_from_ricci(g, ricci_from_curvature(g, rhat))
    n = sp.n
    scalar_residual = abs(rho_hat - (c * n * (n - 1) + g.norm(sp.E) ** 2 - sp.norm_a_sq()))
    return residual, scalar_residual


def best_fit_curvature_coefficient(g: MetricPoint, rt: CurvTensor) -> float:
    """Least-squares H minimizing ||R - H R0||: inner(R, R0) / ||R0||^2."""
    r0 = r0_curvature(g)
    return inner(g, rt, r0) / inner(g, r0, r0)


# ---------------------------------------------------------------------------
# random structures


def trace_free_part(g: MetricPoint, a: CubicForm) -> CubicForm:
    """Remove the g-trace part: subtract (w_i g_jk + w_j g_ik + w_k g_ij) with w = tau/(n+2)."""
    dense = a.dense
    tau = np.einsum("ab,abm->m", g.inverse, dense)
    w = tau / (g.n + 2)
    gm = g.components
    correction = (
        np.einsum("i,jk->ijk", w, gm)
        + np.einsum("j,ik->ijk", w, gm)
        + np.einsum("k,ij->ijk", w, gm)
    )
    return CubicForm.from_dense(dense - correction, tol=1e-10)


def random_metric(n: int, rng: np.random.Generator) -> MetricPoint:
    """Well-conditioned random SPD metric: L L^T for a unit-diagonal lower factor."""
    l = np.eye(n) + 0.4 * np.tril(rng.uniform(-1.0, 1.0, (n, n)), k=-1)
    m = l @ l.T
    return MetricPoint(0.5 * (m + m.T))


def random_stat_point(
    n: int,
    rng_or_seed,
    trace_free: bool = False,
    metric: str = "identity",
) -> StatPoint:
    """Seeded random structure: A_ijk i.i.d. uniform[-1,1] then symmetrized."""
    rng = (
        rng_or_seed
        if isinstance(rng_or_seed, np.random.Generator)
        else np.random.default_rng(rng_or_seed)
    )
    g = MetricPoint(np.eye(n)) if metric == "identity" else random_metric(n, rng)
    a = CubicForm.from_dense(symmetrize(rng.uniform(-1.0, 1.0, (n, n, n))), tol=1e-9)
    if trace_free:
        a = trace_free_part(g, a)
    return StatPoint(g, a)
