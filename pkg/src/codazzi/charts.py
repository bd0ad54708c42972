"""Finite-difference differential calculus on coordinate charts.

A ChartStructure carries closed-form fields x -> g(x) and x -> A(x) over an
axis-aligned box.  Every derivative is a second-order central difference
with a fixed step h in chart coordinates; nested differences give covariant
second derivatives, Laplacians and curvature.  All residual checks of the
differential identities (curvature decompositions, Ricci identities,
Laplacian formulas for 1-forms, symmetric 2-forms and cubic forms) live
here, each returning a plain residual number that the harness compares
against a tol(h) = C * h^2 budget.

Index conventions: connection coefficients are stored as gamma[k, i, j] =
Gamma^k_ij, curvature as up[m, i, j, k] with R(e_i, e_j)e_k = up[:, i, j, k]
and fully covariant curvature R[i, j, k, l] = g(R(e_i,e_j)e_k, e_l).
A covariant derivative prepends the derivative slot: (nabla s)[a, ...] =
(nabla_a s)(...).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Callable

import numpy as np

from .errors import ConstructionError, PreconditionError
from .expressions import parse_expression, partial
from .points import StatPoint
from .tensors import (
    CubicForm,
    CurvTensor,
    MetricPoint,
    symmetrize,
)

Field = Callable[[np.ndarray], np.ndarray]

CONJUGATE_SYMMETRY_THRESHOLD = 1e-6


@dataclass(frozen=True)
class AuxField:
    """Named auxiliary covariant tensor field attached to a chart."""

    degree: int
    fn: Field
    source: dict | None = None


class ChartStructure:
    """Smooth fields g(x), A(x) over a coordinate box, differentiated by finite differences.

    Fields must be globally evaluable closed forms (expression trees or
    closures); periodic axes mark torus directions used by the integral
    checks.  SPD of g and symmetry of A are spot-checked on a 5^n lattice
    at construction.
    """

    def __init__(
        self,
        n: int,
        domain,
        g_field: Field,
        a_field: Field,
        h: float = 1e-3,
        periodic=None,
        g_source=None,
        a_source=None,
        aux_fields: dict[str, AuxField] | None = None,
        spot_check: bool = True,
    ):
        domain = np.asarray(domain, dtype=float)
        if domain.shape != (n, 2) or not np.all(domain[:, 1] > domain[:, 0]):
            raise ConstructionError(f"domain must be an (n,2) box with lo < hi, got {domain!r}")
        if h <= 0:
            raise ConstructionError("finite-difference step h must be positive")
        self.n = n
        self.domain = domain
        self.h = float(h)
        self.periodic = tuple(bool(p) for p in (periodic or [False] * n))
        if len(self.periodic) != n:
            raise ConstructionError("periodic flags must list one boolean per axis")
        self.g_field = g_field
        self.a_field = a_field
        self.g_source = g_source
        self.a_source = a_source
        self.aux_fields = dict(aux_fields or {})
        self._cache: dict = {}
        if spot_check:
            self._spot_check()

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_expressions(
        cls,
        n: int,
        domain,
        g_exprs,
        a_entries: dict,
        h: float = 1e-3,
        periodic=None,
        aux_fields: dict | None = None,
    ) -> "ChartStructure":
        """Build from an n x n matrix of expression strings and {"ijk": expr} cubic entries.

        Cubic keys use 1-based digit strings over sorted indices ("112");
        the stored value is assigned to every permutation.
        """
        g_parsed = [[parse_expression(g_exprs[i][j], n) for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                if g_parsed[i][j].source() != g_parsed[j][i].source():
                    g_parsed[j][i] = g_parsed[i][j]
        g_fns = [[g_parsed[i][j].compile(n) for j in range(n)] for i in range(n)]

        a_parsed = {}
        for key, expr in a_entries.items():
            idx = tuple(sorted(int(c) - 1 for c in str(key)))
            if len(idx) != 3 or not all(0 <= i < n for i in idx):
                raise ConstructionError(f"cubic entry key {key!r} invalid for n={n}")
            a_parsed[idx] = parse_expression(expr, n)
        a_fns = {idx: e.compile(n) for idx, e in a_parsed.items()}

        def g_field(x):
            return np.array([[g_fns[i][j](x) for j in range(n)] for i in range(n)])

        def a_field(x):
            arr = np.zeros((n, n, n))
            for (i, j, k), fn in a_fns.items():
                value = fn(x)
                arr[i, j, k] = arr[i, k, j] = arr[j, i, k] = value
                arr[j, k, i] = arr[k, i, j] = arr[k, j, i] = value
            return arr

        g_source = [[g_parsed[i][j].source() for j in range(n)] for i in range(n)]
        a_source = {
            "".join(str(i + 1) for i in idx): e.source() for idx, e in sorted(a_parsed.items())
        }
        parsed_aux = None
        if aux_fields:
            parsed_aux = {}
            for name, spec in aux_fields.items():
                parsed_aux[name] = _parse_aux_field(n, spec)
        return cls(
            n,
            domain,
            g_field,
            a_field,
            h=h,
            periodic=periodic,
            g_source=g_source,
            a_source=a_source,
            aux_fields=parsed_aux,
        )

    def _spot_check(self):
        axes = []
        for a in range(self.n):
            lo, hi = self.domain[a]
            pts = np.linspace(lo, hi, 5, endpoint=not self.periodic[a])
            axes.append(pts)
        mesh = np.meshgrid(*axes, indexing="ij")
        points = np.stack([m.ravel() for m in mesh], axis=-1)
        for x in points:
            g = np.asarray(self.g_field(x), dtype=float)
            try:
                MetricPoint(0.5 * (g + g.T))
            except ConstructionError as exc:
                raise ConstructionError(f"metric field fails at x={x.tolist()}: {exc}") from exc
            a = np.asarray(self.a_field(x), dtype=float)
            scale = float(np.max(np.abs(a))) or 1.0
            if float(np.max(np.abs(a - symmetrize(a)))) > 1e-8 * scale:
                raise ConstructionError(f"cubic field is not symmetric at x={x.tolist()}")

    # -- point access ----------------------------------------------------------

    def require_interior(self, x):
        x = np.asarray(x, dtype=float)
        margin = 2.0 * self.h
        for a in range(self.n):
            if self.periodic[a]:
                continue
            lo, hi = self.domain[a]
            if not (lo + margin - 1e-12 <= x[a] <= hi - margin + 1e-12):
                raise PreconditionError(
                    f"point {x.tolist()} too close to the boundary on axis {a} "
                    f"(margin 2h = {margin:g})"
                )
        return x

    def metric_at(self, x) -> np.ndarray:
        return self._memo("g", x, lambda: np.asarray(self.g_field(np.asarray(x, float)), float))

    def metric_inverse_at(self, x) -> np.ndarray:
        return self._memo("ginv", x, lambda: np.linalg.inv(self.metric_at(x)))

    def cubic_at(self, x) -> np.ndarray:
        return self._memo("a", x, lambda: np.asarray(self.a_field(np.asarray(x, float)), float))

    def k_at(self, x) -> np.ndarray:
        """Difference tensor K^m_ij = g^{ml} A_ijl at x."""
        return self._memo(
            "k", x, lambda: np.einsum("ml,ijl->mij", self.metric_inverse_at(x), self.cubic_at(x))
        )

    def tau_at(self, x) -> np.ndarray:
        """Trace form tau_i = K^m_im at x."""
        return self._memo("tau", x, lambda: np.einsum("mim->i", self.k_at(x)))

    def point(self, x) -> StatPoint:
        g = self.metric_at(x)
        return StatPoint(MetricPoint(0.5 * (g + g.T)), CubicForm.from_dense(self.cubic_at(x)))

    def _memo(self, tag, x, compute):
        key = (tag, np.asarray(x, dtype=float).tobytes())
        out = self._cache.get(key)
        if out is None:
            if len(self._cache) > 200000:
                self._cache.clear()
            out = compute()
            self._cache[key] = out
        return out

    def __repr__(self):
        return f"ChartStructure(n={self.n}, h={self.h}, periodic={self.periodic})"


def _parse_aux_field(n: int, spec) -> AuxField:
    if isinstance(spec, AuxField):
        return spec
    degree = int(spec["degree"])
    comps = {
        tuple(int(c) - 1 for c in str(key)): parse_expression(expr, n).compile(n)
        for key, expr in spec["components"].items()
    }
    sources = {
        str(key): parse_expression(expr, n).source() for key, expr in spec["components"].items()
    }

    def fn(x):
        arr = np.zeros((n,) * degree)
        for idx, f in comps.items():
            arr[idx] = f(x)
        return arr

    return AuxField(degree=degree, fn=fn, source={"degree": degree, "components": sources})


# ---------------------------------------------------------------------------
# derivative engine


def _shift(x, a, h):
    y = np.array(x, dtype=float)
    y[a] += h
    return y


def _central(field: Field, x, a: int, h: float):
    return (np.asarray(field(_shift(x, a, h)), float) - np.asarray(field(_shift(x, a, -h)), float)) / (2.0 * h)


@dataclass(frozen=True)
class ConnectionAt:
    """Connection coefficients Gamma^k_ij at a point (not tensorial under chart change)."""

    gamma: np.ndarray
    point: np.ndarray = dataclass_field(default=None, repr=False)

    def torsion_defect(self) -> float:
        return float(np.max(np.abs(self.gamma - np.swapaxes(self.gamma, 1, 2))))


def christoffel_array(cs: ChartStructure, x) -> np.ndarray:
    """Levi-Civita coefficients gamma[k,i,j] of g at x (exactly torsion-free)."""

    def compute():
        n = cs.n
        dg = np.empty((n, n, n))
        for a in range(n):
            dg[a] = _central(cs.g_field, x, a, cs.h)
        ginv = cs.metric_inverse_at(x)
        first = 0.5 * (
            np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - np.einsum("lij->lij", dg)
        )
        # first[l,i,j] = (d_i g_jl + d_j g_il - d_l g_ij) / 2
        gamma = np.einsum("kl,lij->kij", ginv, first)
        return 0.5 * (gamma + np.swapaxes(gamma, 1, 2))

    return cs._memo("gamma", x, compute)


def christoffel(cs: ChartStructure, x) -> ConnectionAt:
    x = cs.require_interior(x)
    return ConnectionAt(gamma=christoffel_array(cs, x), point=np.asarray(x, float))


def metricity_residual(cs: ChartStructure, x) -> float:
    """Max |nabla_hat g| component; O(h^2) since the coefficients come from FD."""
    ng = nabla_at(cs, cs.g_field, x)
    return float(np.max(np.abs(ng)))


def nabla_at(cs: ChartStructure, field: Field, x, gamma_field=None) -> np.ndarray:
    """Covariant derivative of a covariant field at x; derivative slot first."""
    x = np.asarray(x, dtype=float)
    s0 = np.asarray(field(x), dtype=float)
    k = s0.ndim
    n = cs.n
    gamma = christoffel_array(cs, x) if gamma_field is None else gamma_field(x)
    out = np.empty((n,) + s0.shape)
    for a in range(n):
        out[a] = _central(field, x, a, cs.h)
    for slot in range(k):
        corr = np.tensordot(gamma, s0, axes=(0, slot))
        out -= np.moveaxis(corr, 1, 1 + slot)
    return out


def nabla_field(cs: ChartStructure, field: Field, gamma_field=None) -> Field:
    return lambda x: nabla_at(cs, field, x, gamma_field=gamma_field)


def nabla2_at(cs: ChartStructure, field: Field, x) -> np.ndarray:
    return nabla_at(cs, nabla_field(cs, field), x)


def _trace_pair(ginv: np.ndarray, arr: np.ndarray, a: int, b: int):
    out = np.tensordot(arr, ginv, axes=((a, b), (0, 1)))
    return float(out) if out.ndim == 0 else out


def laplacian_tensor_at(cs: ChartStructure, field: Field, x) -> np.ndarray:
    """Trace Laplacian tr_g(nabla^2 s) on a covariant tensor field."""
    second = nabla2_at(cs, field, x)
    return _trace_pair(cs.metric_inverse_at(x), second, 0, 1)


def scalar_laplacian_at(cs: ChartStructure, f: Callable[[np.ndarray], float], x) -> float:
    """Laplace-Beltrami of a scalar via a direct second-order stencil."""
    x = np.asarray(x, dtype=float)
    n, h = cs.n, cs.h
    f0 = float(f(x))
    grad = np.array([(float(f(_shift(x, a, h))) - float(f(_shift(x, a, -h)))) / (2 * h) for a in range(n)])
    hess = np.empty((n, n))
    for a in range(n):
        hess[a, a] = (float(f(_shift(x, a, h))) - 2.0 * f0 + float(f(_shift(x, a, -h)))) / (h * h)
        for b in range(a + 1, n):
            xpp = _shift(_shift(x, a, h), b, h)
            xpm = _shift(_shift(x, a, h), b, -h)
            xmp = _shift(_shift(x, a, -h), b, h)
            xmm = _shift(_shift(x, a, -h), b, -h)
            hess[a, b] = hess[b, a] = (
                float(f(xpp)) - float(f(xpm)) - float(f(xmp)) + float(f(xmm))
            ) / (4 * h * h)
    gamma = christoffel_array(cs, x)
    ginv = cs.metric_inverse_at(x)
    return float(np.einsum("ab,ab->", ginv, hess - np.einsum("cab,c->ab", gamma, grad)))


def codifferential_at(cs: ChartStructure, field: Field, x):
    """Codifferential with the plus convention: + tr_g(nabla s)(., ., rest)."""
    ns = nabla_at(cs, field, x)
    return _trace_pair(cs.metric_inverse_at(x), ns, 0, 1)


def divergence_at(cs: ChartStructure, field: Field, x, slot: int = -1):
    """Divergence of a covariant field: derivative slot traced against one
    argument slot (default the last, matching the divergence of a lowered
    endomorphism-valued tensor)."""
    ns = nabla_at(cs, field, x)
    if slot < 0:
        slot = ns.ndim + slot
    return _trace_pair(cs.metric_inverse_at(x), ns, 0, slot)


def exterior_derivative_1form_at(cs: ChartStructure, taufield: Field, x) -> np.ndarray:
    """d tau as a 2-form; equals the antisymmetrized covariant derivative."""
    nt = nabla_at(cs, taufield, x)
    return nt - nt.T


# ---------------------------------------------------------------------------
# curvature


def _curvature_from_gamma(cs: ChartStructure, gamma_field: Field, x) -> np.ndarray:
    """up[m,i,j,k] from a coefficient field: dGamma terms plus quadratic terms."""
    n = cs.n
    gamma0 = gamma_field(np.asarray(x, float))
    dgamma = np.empty((n, n, n, n))  # dgamma[a, m, i, j] = d_a Gamma^m_ij
    for a in range(n):
        dgamma[a] = _central(gamma_field, x, a, cs.h)
    up = (
        np.einsum("imjk->mijk", dgamma)
        - np.einsum("jmik->mijk", dgamma)
        + np.einsum("mip,pjk->mijk", gamma0, gamma0)
        - np.einsum("mjp,pik->mijk", gamma0, gamma0)
    )
    return up


def curvature_hat_arrays(cs: ChartStructure, x) -> tuple[np.ndarray, np.ndarray]:
    def compute():
        up = _curvature_from_gamma(cs, lambda y: christoffel_array(cs, y), x)
        low = np.einsum("lm,mijk->ijkl", cs.metric_at(x), up)
        return up, low

    return cs._memo("rhat", x, compute)


def curvature_hat(cs: ChartStructure, x) -> CurvTensor:
    cs.require_interior(x)
    _, low = curvature_hat_arrays(cs, x)
    out = CurvTensor(0.5 * (low - np.swapaxes(low, 0, 1)))
    scale = 1.0 + float(np.max(np.abs(low)))
    out.check(tol=1e-8 * scale)
    return out


def ric_hat(cs: ChartStructure, x) -> np.ndarray:
    up, _ = curvature_hat_arrays(cs, x)
    ric = np.einsum("iijk->jk", up)
    return 0.5 * (ric + ric.T)


def rho_hat(cs: ChartStructure, x) -> float:
    return float(np.einsum("jk,jk->", cs.metric_inverse_at(x), ric_hat(cs, x)))


def _orthonormal_plane(g: np.ndarray, u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu = float(np.sqrt(u @ g @ u))
    if nu == 0.0:
        raise PreconditionError("plane vectors must be nonzero")
    e1 = u / nu
    v2 = v - (e1 @ g @ v) * e1
    nv = float(np.sqrt(v2 @ g @ v2))
    if nv <= 1e-12 * max(float(np.sqrt(v @ g @ v)), 1.0):
        raise PreconditionError("plane vectors are linearly dependent")
    return e1, v2 / nv


def sectional_hat(cs: ChartStructure, x, plane) -> float:
    g = cs.metric_at(x)
    e1, e2 = _orthonormal_plane(g, *plane)
    _, low = curvature_hat_arrays(cs, x)
    return float(np.einsum("ijkl,i,j,k,l->", low, e1, e2, e2, e1))


# ---------------------------------------------------------------------------
# statistical connections and the structural identities


def nabla_cubic_at(cs: ChartStructure, x) -> np.ndarray:
    """(nabla_hat A)[a, i, j, k] at x."""
    return cs._memo("nablaA", x, lambda: nabla_at(cs, cs.a_field, x))


def conjugate_symmetry_defect(cs: ChartStructure, x) -> float:
    """Scale-free asymmetry of nabla_hat A: ||asym|| / (1 + ||nabla_hat A||)."""
    na = nabla_cubic_at(cs, x)
    ginv = cs.metric_inverse_at(x)
    asym = na - symmetrize(na)
    raised_asym = asym
    raised_full = na
    for axis in range(4):
        raised_asym = np.moveaxis(np.tensordot(ginv, raised_asym, axes=(1, axis)), 0, axis)
        raised_full = np.moveaxis(np.tensordot(ginv, raised_full, axes=(1, axis)), 0, axis)
    norm_asym = float(np.sqrt(max(np.sum(asym * raised_asym), 0.0)))
    norm_full = float(np.sqrt(max(np.sum(na * raised_full), 0.0)))
    return norm_asym / (1.0 + norm_full)


def conjugate_symmetry_holds(cs: ChartStructure, x, threshold=CONJUGATE_SYMMETRY_THRESHOLD) -> bool:
    return conjugate_symmetry_defect(cs, x) < threshold


def _g_norm(ginv: np.ndarray, arr: np.ndarray) -> float:
    raised = arr
    for axis in range(arr.ndim):
        raised = np.moveaxis(np.tensordot(ginv, raised, axes=(1, axis)), 0, axis)
    return float(np.sqrt(max(np.sum(arr * raised), 0.0)))


@dataclass
class StatConnections:
    """Connection coefficients and curvature tensors of the pair (g, A) at a point."""

    gamma_hat: np.ndarray
    gamma_nabla: np.ndarray
    gamma_bar: np.ndarray
    r_hat: np.ndarray
    r_nabla: np.ndarray
    r_bar: np.ndarray
    bracket: np.ndarray
    nabla_a: np.ndarray
    residuals: dict[str, float]


def statistical_connections(cs: ChartStructure, x) -> StatConnections:
    """Both dual connections with their curvatures and the structural residuals.

    The statistical curvature is computed twice: from the coefficients of
    nabla directly, and through the decomposition into the Levi-Civita
    part, the antisymmetrized derivative of K, and the commutator term;
    the residual map reports the disagreement together with the duality
    defect, the curvature-sum defect, the conjugate reduction when it
    applies, and the product-rule defect of the dual pairing.
    """
    x = cs.require_interior(np.asarray(x, dtype=float))
    n = cs.n
    g = cs.metric_at(x)
    gamma_hat = christoffel_array(cs, x)
    k0 = cs.k_at(x)

    gamma_nabla_field = lambda y: christoffel_array(cs, y) + cs.k_at(y)
    gamma_bar_field = lambda y: christoffel_array(cs, y) - cs.k_at(y)

    _, r_hat = curvature_hat_arrays(cs, x)
    r_nabla = np.einsum("lm,mijk->ijkl", g, _curvature_from_gamma(cs, gamma_nabla_field, x))
    r_bar = np.einsum("lm,mijk->ijkl", g, _curvature_from_gamma(cs, gamma_bar_field, x))

    sp = cs.point(x)
    from .points import bracket_kk

    bracket = bracket_kk(sp).array
    na = nabla_cubic_at(cs, x)

    # curvature through the decomposition, Levi-Civita + dK terms + commutator
    r_sum = r_hat + na - np.swapaxes(na, 0, 1) + bracket

    ginv = cs.metric_inverse_at(x)
    scale = 1.0 + _g_norm(ginv, r_nabla)
    residuals = {
        "curvature-two-routes": _g_norm(ginv, r_nabla - r_sum),
        "duality": _g_norm(ginv, r_nabla + np.swapaxes(r_bar, 2, 3)),
        "curvature-sum": _g_norm(ginv, r_nabla + r_bar - 2.0 * r_hat - 2.0 * bracket),
        "dual-pairing-product-rule": _dual_pairing_residual(
            cs, x, gamma_nabla_field, gamma_bar_field
        ),
    }
    if conjugate_symmetry_holds(cs, x):
        residuals["conjugate-reduction"] = _g_norm(ginv, r_nabla - r_hat - bracket)
    residuals["scale"] = scale
    return StatConnections(
        gamma_hat=gamma_hat,
        gamma_nabla=gamma_hat + k0,
        gamma_bar=gamma_hat - k0,
        r_hat=r_hat,
        r_nabla=r_nabla,
        r_bar=r_bar,
        bracket=bracket,
        nabla_a=na,
        residuals=residuals,
    )


def conjugate_coefficients(g: np.ndarray, dg: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """Coefficients of the metric-dual connection from the product rule.

    g(nabla_a e_i, e_j) + g(e_i, conj_a e_j) = d_a g_ij solved for conj;
    applying the map twice returns the input exactly (no FD error beyond
    the supplied dg).
    """
    ginv = np.linalg.inv(g)
    # conj[m,a,j] g_im = dg[a,i,j] - gamma[l,a,i] g_lj
    rhs = dg - np.einsum("lai,lj->aij", gamma, g)
    return np.einsum("mi,aij->maj", ginv, rhs)


def duality_involution_defect(cs: ChartStructure, x) -> float:
    """Round-trip defect of conjugating the statistical connection twice."""
    x = np.asarray(x, dtype=float)
    n = cs.n
    g = cs.metric_at(x)
    dg = np.empty((n, n, n))
    for a in range(n):
        dg[a] = _central(cs.g_field, x, a, cs.h)
    gamma_nabla = christoffel_array(cs, x) + cs.k_at(x)
    back = conjugate_coefficients(g, dg, conjugate_coefficients(g, dg, gamma_nabla))
    return float(np.max(np.abs(back - gamma_nabla)))


def _dual_pairing_residual(cs, x, gamma_nabla_field, gamma_bar_field) -> float:
    """Defect of X g(Y,Z) = g(nabla_X Y, Z) + g(Y, nabla_bar_X Z) on coordinate frames."""
    n = cs.n
    g = cs.metric_at(x)
    dg = np.empty((n, n, n))
    for a in range(n):
        dg[a] = _central(cs.g_field, x, a, cs.h)
    gn = gamma_nabla_field(np.asarray(x, float))
    gb = gamma_bar_field(np.asarray(x, float))
    resid = dg - np.einsum("jm,mai->aij", g, gn) - np.einsum("im,maj->aij", g, gb)
    return float(np.max(np.abs(resid)))


def ricci_nabla(cs: ChartStructure, x) -> tuple[np.ndarray, np.ndarray]:
    """(Ric of nabla, Ric of nabla_bar) from the coefficient route."""
    gamma_nabla_field = lambda y: christoffel_array(cs, y) + cs.k_at(y)
    gamma_bar_field = lambda y: christoffel_array(cs, y) - cs.k_at(y)
    up_n = _curvature_from_gamma(cs, gamma_nabla_field, x)
    up_b = _curvature_from_gamma(cs, gamma_bar_field, x)
    return np.einsum("iijk->jk", up_n), np.einsum("iijk->jk", up_b)


def ricci_decomposition_residuals(cs: ChartStructure, x) -> dict[str, float]:
    """Residuals of the Ricci and scalar curvature decompositions at x.

    Keys: ricci-decomposition (Ric against Levi-Civita Ricci + div K -
    nabla tau + commutator Ricci), ricci-conjugate-sum, scalar-gap,
    koszul-form and koszul-trace, plus ricci-comparison-min-eig for
    trace-free structures and hessian-ricci when nabla is flat at x.
    """
    x = cs.require_interior(np.asarray(x, dtype=float))
    g = cs.metric_at(x)
    ginv = cs.metric_inverse_at(x)
    sp = cs.point(x)

    ric, ric_bar = ricci_nabla(cs, x)
    ric_hat_arr = ric_hat(cs, x)
    na = nabla_cubic_at(cs, x)
    div_k = _trace_pair(ginv, na, 0, 3)  # = divergence_at(cs, a_field, x), reusing nabla A
    nabla_tau = nabla_at(cs, lambda y: cs.tau_at(y), x)
    ric_k_arr = sp.tau_circ_k() - sp.gram_k()
    tau_circ = sp.tau_circ_k()
    gram = sp.gram_k()

    rho = float(np.einsum("jk,jk->", ginv, ric))
    rho_hat_val = float(np.einsum("jk,jk->", ginv, ric_hat_arr))
    e_sq = float(sp.g.norm(sp.E) ** 2)
    k_sq = sp.norm_a_sq()

    # Koszul form beta = nabla tau computed from the nabla coefficients directly
    gamma_nabla_field = lambda y: christoffel_array(cs, y) + cs.k_at(y)
    beta_direct = nabla_at(cs, lambda y: cs.tau_at(y), x, gamma_field=gamma_nabla_field)
    beta_formula = nabla_tau - tau_circ
    tau_sq = float(sp.tau @ ginv @ sp.tau)
    delta_tau = float(np.einsum("ab,ab->", ginv, nabla_tau))

    out = {
        "ricci-decomposition": _g_norm(ginv, ric - (ric_hat_arr + div_k - nabla_tau + ric_k_arr)),
        "ricci-conjugate-sum": _g_norm(
            ginv, ric + ric_bar - (2.0 * ric_hat_arr + 2.0 * tau_circ - 2.0 * gram)
        ),
        "scalar-gap": abs(rho_hat_val - (rho + k_sq - e_sq)),
        "koszul-form": _g_norm(ginv, beta_direct - beta_formula),
        "koszul-trace": abs(
            float(np.einsum("ab,ab->", ginv, beta_formula)) - (delta_tau - tau_sq)
        ),
    }
    if sp.trace_free:
        comparison = 2.0 * ric_hat_arr - ric - ric_bar
        b = np.linalg.cholesky(ginv)
        out["ricci-comparison-min-eig"] = float(
            np.min(np.linalg.eigvalsh(b.T @ (0.5 * (comparison + comparison.T)) @ b))
        )
    r_nabla_norm = _g_norm(
        ginv,
        np.einsum("lm,mijk->ijkl", g, _curvature_from_gamma(cs, gamma_nabla_field, x)),
    )
    if r_nabla_norm < 1e-4:
        out["hessian-ricci"] = _g_norm(ginv, ric_hat_arr - (gram - tau_circ))
    return out


def sectional_nabla(cs: ChartStructure, x, plane) -> float:
    """Sectional curvature of the averaged statistical curvature (R + R_bar)/2."""
    conn = statistical_connections(cs, x)
    g = cs.metric_at(x)
    e1, e2 = _orthonormal_plane(g, *plane)
    avg = 0.5 * (conn.r_nabla + conn.r_bar)
    return float(np.einsum("ijkl,i,j,k,l->", avg, e1, e2, e2, e1))


# ---------------------------------------------------------------------------
# Laplacian-type identities for tensor fields


def _curvature_action(up: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Derivation action out[i,j, a...] = -(sum over slots) s(..., R(e_i,e_j) e_a, ...)."""
    k = s.ndim
    n = up.shape[0]
    out = np.zeros((n, n) + s.shape)
    for slot in range(k):
        term = np.tensordot(s, up, axes=(slot, 0))
        # axes now: s-minus-slot (k-1), then (i, j, a_slot)
        term = np.moveaxis(term, (k - 1, k, k + 1), (0, 1, 2 + slot))
        out -= term
    return out


def ricci_identity_residual(cs: ChartStructure, field: Field, x) -> float:
    """g-norm of nabla^2 s antisymmetrized in the derivative slots minus the curvature action."""
    x = cs.require_interior(np.asarray(x, dtype=float))
    second = nabla2_at(cs, field, x)
    up, _ = curvature_hat_arrays(cs, x)
    action = _curvature_action(up, np.asarray(field(x), dtype=float))
    diff = second - np.moveaxis(second, (0, 1), (1, 0)) - action
    return _g_norm(cs.metric_inverse_at(x), diff)


def squared_norm_field(cs: ChartStructure, field: Field) -> Callable[[np.ndarray], float]:
    """x -> ||s(x)||^2 with all slots contracted against g(x)^{-1}."""

    def f(x):
        s = np.asarray(field(x), dtype=float)
        ginv = cs.metric_inverse_at(x)
        raised = s
        for axis in range(s.ndim):
            raised = np.moveaxis(np.tensordot(ginv, raised, axes=(1, axis)), 0, axis)
        return float(np.sum(s * raised))

    return f


def simons_residual(cs: ChartStructure, field: Field, x) -> float:
    """Defect of (1/2) Lap ||s||^2 = g(Lap s, s) + ||nabla s||^2 for a covariant field."""
    x = cs.require_interior(np.asarray(x, dtype=float))
    ginv = cs.metric_inverse_at(x)
    lhs = 0.5 * scalar_laplacian_at(cs, squared_norm_field(cs, field), x)
    lap_s = laplacian_tensor_at(cs, field, x)
    s0 = np.asarray(field(x), dtype=float)
    raised = lap_s
    for axis in range(s0.ndim):
        raised = np.moveaxis(np.tensordot(ginv, raised, axes=(1, axis)), 0, axis)
    middle = float(np.sum(s0 * raised))
    grad_norm_sq = _g_norm(ginv, nabla_at(cs, field, x)) ** 2
    return abs(lhs - middle - grad_norm_sq)


def weitzenbock_residual(cs: ChartStructure, taufield: Field, x) -> dict[str, float]:
    """Rough-vs-Hodge comparison for a 1-form, with the plus codifferential convention.

    Returns the 1-form identity residual ("weitzenbock") and the scalar
    consequence combining it with the squared-norm Laplacian identity
    ("simons-1form").
    """
    x = cs.require_interior(np.asarray(x, dtype=float))
    ginv = cs.metric_inverse_at(x)
    tau0 = np.asarray(taufield(x), dtype=float)

    rough = laplacian_tensor_at(cs, taufield, x)

    delta_tau_field = lambda y: np.asarray(codifferential_at(cs, taufield, y))
    d_delta = np.array([_central(delta_tau_field, x, a, cs.h) for a in range(cs.n)])

    dtau_field = lambda y: exterior_derivative_1form_at(cs, taufield, y)
    delta_d = codifferential_at(cs, dtau_field, x)

    ric = ric_hat(cs, x)
    e_vec = ginv @ tau0
    ric_term = ric @ e_vec

    residual_1form = _g_norm(ginv, rough - d_delta - delta_d - ric_term)

    lhs = 0.5 * scalar_laplacian_at(cs, squared_norm_field(cs, taufield), x)
    hodge_pair = float((d_delta + delta_d) @ ginv @ tau0)
    ric_ee = float(e_vec @ ric @ e_vec)
    grad_sq = _g_norm(ginv, nabla_at(cs, taufield, x)) ** 2
    residual_scalar = abs(lhs - hodge_pair - ric_ee - grad_sq)
    return {"weitzenbock": residual_1form, "simons-1form": residual_scalar}


def sym2_simons_residual(cs: ChartStructure, betafield: Field, x) -> tuple[float, float]:
    """Laplacian identity for a symmetric 2-form with symmetric covariant derivative.

    Returns (residual, eigen_term) where eigen_term is the sectional-curvature
    weighted sum over eigenvalue differences of beta relative to g.  Raises
    PreconditionError when nabla beta is not symmetric at x.
    """
    x = cs.require_interior(np.asarray(x, dtype=float))
    ginv = cs.metric_inverse_at(x)
    nb = nabla_at(cs, betafield, x)
    scale = 1.0 + _g_norm(ginv, nb)
    asym = _g_norm(ginv, nb - symmetrize(nb)) / scale
    if asym >= 1e-4:
        raise PreconditionError(f"nabla beta is not symmetric at x (defect ratio {asym:g})")

    beta0 = np.asarray(betafield(x), dtype=float)
    lhs = 0.5 * scalar_laplacian_at(cs, squared_norm_field(cs, betafield), x)
    grad_sq = _g_norm(ginv, nb) ** 2

    second = nabla2_at(cs, betafield, x)
    traced = _trace_pair(ginv, second, 2, 3)
    raised = traced
    for axis in range(2):
        raised = np.moveaxis(np.tensordot(ginv, raised, axes=(1, axis)), 0, axis)
    middle = float(np.sum(beta0 * raised))

    # generalized eigenstructure of beta against g via the orthonormal frame
    b = np.linalg.cholesky(ginv)
    beta_hat = b.T @ beta0 @ b
    eigvals, eigvecs = np.linalg.eigh(0.5 * (beta_hat + beta_hat.T))
    order = np.argsort(eigvals, kind="stable")
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]
    frame = b @ eigvecs
    _, r_low = curvature_hat_arrays(cs, x)
    eigen_term = 0.0
    for i in range(cs.n):
        for k in range(i + 1, cs.n):
            ei = frame[:, i]
            ek = frame[:, k]
            k_ik = float(np.einsum("ijkl,i,j,k,l->", r_low, ei, ek, ek, ei))
            eigen_term += k_ik * (eigvals[i] - eigvals[k]) ** 2
    residual = abs(lhs - (grad_sq + middle + eigen_term))
    return residual, eigen_term


def cubic_simons_residuals(cs: ChartStructure, x) -> dict[str, float]:
    """Laplacian formulas for the cubic form of a conjugate symmetric structure.

    Residual keys: laplace-cubic-bracket (commutator form), laplace-cubic-curvdiff
    (curvature-difference form), laplace-cubic-ricci (Ricci-pairing form), and
    laplace-cubic-tracefree when the trace vector vanishes at x.  Raises
    PreconditionError with the asymmetry norm when the structure is not
    conjugate symmetric at x.
    """
    x = cs.require_interior(np.asarray(x, dtype=float))
    defect = conjugate_symmetry_defect(cs, x)
    if defect >= CONJUGATE_SYMMETRY_THRESHOLD:
        raise PreconditionError(
            f"structure is not conjugate symmetric at x (asymmetry ratio {defect:g})"
        )
    ginv = cs.metric_inverse_at(x)
    sp = cs.point(x)
    from .points import bracket_kk

    lhs = 0.5 * scalar_laplacian_at(cs, squared_norm_field(cs, cs.a_field), x)
    grad_sq = _g_norm(ginv, nabla_cubic_at(cs, x)) ** 2

    second_tau = nabla2_at(cs, lambda y: cs.tau_at(y), x)
    a0 = cs.cubic_at(x)
    raised = second_tau
    for axis in range(3):
        raised = np.moveaxis(np.tensordot(ginv, raised, axes=(1, axis)), 0, axis)
    # pair nabla^2 tau (derivative, derivative, argument) with A on all three slots
    tau_pair = float(np.sum(a0 * raised))

    bracket = bracket_kk(sp).array
    _, r_hat_low = curvature_hat_arrays(cs, x)
    conn = statistical_connections(cs, x)
    r_low = conn.r_nabla
    ric = np.einsum("il,ijkl->jk", ginv, r_low)
    ric_hat_arr = ric_hat(cs, x)
    gram = sp.gram_k()
    tau_circ = sp.tau_circ_k()

    def pair4(a, b):
        rb = b
        for axis in range(4):
            rb = np.moveaxis(np.tensordot(ginv, rb, axes=(1, axis)), 0, axis)
        return float(np.sum(a * rb))

    def pair2(a, b):
        return float(np.einsum("ac,bd,ab,cd->", ginv, ginv, a, b))

    bracket_term = pair4(bracket, r_hat_low)
    ric_gram = pair2(ric_hat_arr, gram)

    out = {
        "laplace-cubic-bracket": abs(lhs - (grad_sq + tau_pair - bracket_term + ric_gram)),
        "laplace-cubic-curvdiff": abs(
            lhs - (grad_sq + tau_pair + pair4(r_hat_low - r_low, r_hat_low) + ric_gram)
        ),
        "laplace-cubic-ricci": abs(
            lhs
            - (
                grad_sq
                + tau_pair
                + pair4(r_hat_low, r_hat_low)
                + pair2(ric_hat_arr, ric_hat_arr)
                - pair4(r_low, r_hat_low)
                - pair2(ric, ric_hat_arr)
                + pair2(ric_hat_arr, tau_circ)
            )
        ),
    }
    if sp.trace_free:
        out["laplace-cubic-tracefree"] = abs(
            lhs
            - (
                grad_sq
                + pair4(r_hat_low, r_hat_low)
                + pair2(ric_hat_arr, ric_hat_arr)
                - pair4(r_low, r_hat_low)
                - pair2(ric, ric_hat_arr)
            )
        )
    return out


def cubic_laplace_constant_sectional_residual(cs: ChartStructure, x, kappa=None) -> float:
    """Specialized cubic Laplacian formula when the commutator curvature is kappa R0.

    kappa defaults to the least-squares fit; a poor fit raises PreconditionError.
    """
    x = cs.require_interior(np.asarray(x, dtype=float))
    ginv = cs.metric_inverse_at(x)
    sp = cs.point(x)
    from .points import best_fit_curvature_coefficient, bracket_kk, constant_curvature_residual

    bracket = bracket_kk(sp)
    if kappa is None:
        kappa = best_fit_curvature_coefficient(sp.g, bracket)
    fit = constant_curvature_residual(bracket, sp.g, kappa)
    from .tensors import inner as _inner

    if fit > 1e-6 * (1.0 + np.sqrt(abs(_inner(sp.g, bracket, bracket)))):
        raise PreconditionError(f"commutator curvature is not proportional to R0 (residual {fit:g})")

    lhs = 0.5 * scalar_laplacian_at(cs, squared_norm_field(cs, cs.a_field), x)
    grad_sq = _g_norm(ginv, nabla_cubic_at(cs, x)) ** 2
    second_tau = nabla2_at(cs, lambda y: cs.tau_at(y), x)
    a0 = cs.cubic_at(x)
    raised = second_tau
    for axis in range(3):
        raised = np.moveaxis(np.tensordot(ginv, raised, axes=(1, axis)), 0, axis)
    tau_pair = float(np.sum(a0 * raised))
    ric_hat_arr = ric_hat(cs, x)
    rho_hat_val = float(np.einsum("jk,jk->", ginv, ric_hat_arr))
    gram = cs.point(x).gram_k()
    ric_gram = float(np.einsum("ac,bd,ab,cd->", ginv, ginv, ric_hat_arr, gram))
    return abs(lhs - (grad_sq + tau_pair - 2.0 * kappa * rho_hat_val + ric_gram))


def cubic_laplace_lagrangian_residual(cs: ChartStructure, x, c=None) -> float:
    """Specialized cubic Laplacian formula when c R0 = R_hat - [K,K] holds at x.

    Note the 1/2 on the Laplacian of ||A||^2: the specialization inherits it
    from the commutator form of the identity.
    """
    x = cs.require_interior(np.asarray(x, dtype=float))
    ginv = cs.metric_inverse_at(x)
    sp = cs.point(x)
    from .points import best_fit_curvature_coefficient, bracket_kk, constant_curvature_residual
    from .tensors import CurvTensor as _CT

    bracket = bracket_kk(sp).array
    _, r_hat_low = curvature_hat_arrays(cs, x)
    diff = _CT(0.5 * ((r_hat_low - bracket) - np.swapaxes(r_hat_low - bracket, 0, 1)))
    if c is None:
        c = best_fit_curvature_coefficient(sp.g, diff)
    fit = constant_curvature_residual(diff, sp.g, c)
    if fit > 1e-4 * (1.0 + abs(c)):
        raise PreconditionError(f"R_hat - [K,K] is not proportional to R0 (residual {fit:g})")

    lhs = 0.5 * scalar_laplacian_at(cs, squared_norm_field(cs, cs.a_field), x)
    grad_sq = _g_norm(ginv, nabla_cubic_at(cs, x)) ** 2
    second_tau = nabla2_at(cs, lambda y: cs.tau_at(y), x)
    a0 = cs.cubic_at(x)
    raised = second_tau
    for axis in range(3):
        raised = np.moveaxis(np.tensordot(ginv, raised, axes=(1, axis)), 0, axis)
    tau_pair = float(np.sum(a0 * raised))

    def pair4(a, b):
        rb = b
        for axis in range(4):
            rb = np.moveaxis(np.tensordot(ginv, rb, axes=(1, axis)), 0, axis)
        return float(np.sum(a * rb))

    rhat_sq = pair4(r_hat_low, r_hat_low)
    ric_hat_arr = ric_hat(cs, x)
    rho_hat_val = float(np.einsum("jk,jk->", ginv, ric_hat_arr))
    gram = sp.gram_k()
    ric_gram = float(np.einsum("ac,bd,ab,cd->", ginv, ginv, ric_hat_arr, gram))
    return abs(lhs - (grad_sq + tau_pair - rhat_sq + 2.0 * c * rho_hat_val + ric_gram))


# ---------------------------------------------------------------------------
# construction of Hessian structures from a convex potential


def hessian_from_potential(
    potential,
    domain,
    h: float = 1e-3,
    periodic=None,
    n: int | None = None,
) -> ChartStructure:
    """Chart whose metric is the coordinate Hessian of the potential.

    The potential is an expression over x1..xn; second and third partials
    are taken symbolically, so g = Hess(potential) and the cubic form
    -(1/2) d^3(potential) are exact closed forms.  Convexity is spot-checked
    on the construction lattice; a non-convex potential raises
    ConstructionError.  The coordinate connection is flat for the resulting
    structure, which the differential suite verifies as ||R|| = O(h^2).
    """
    domain = np.asarray(domain, dtype=float)
    if n is None:
        n = domain.shape[0]
    expr = parse_expression(potential, n)
    first = [partial(expr, a) for a in range(n)]
    second = [[partial(first[a], b) for b in range(n)] for a in range(n)]
    third = [[[partial(second[a][b], c) for c in range(n)] for b in range(n)] for a in range(n)]
    second_fns = [[second[a][b].compile(n) for b in range(n)] for a in range(n)]
    third_fns = [[[third[a][b][c].compile(n) for c in range(n)] for b in range(n)] for a in range(n)]

    def g_field(x):
        m = np.array([[second_fns[a][b](x) for b in range(n)] for a in range(n)])
        return 0.5 * (m + m.T)

    def a_field(x):
        arr = np.array(
            [[[third_fns[a][b][c](x) for c in range(n)] for b in range(n)] for a in range(n)]
        )
        return -0.5 * symmetrize(arr)

    from .expressions import Const, mul

    g_source = [[second[a][b].source() for b in range(n)] for a in range(n)]
    a_source = {}
    for a in range(n):
        for b in range(a, n):
            for c in range(b, n):
                src = mul(Const(-0.5), third[a][b][c]).source()
                a_source["".join(str(i + 1) for i in (a, b, c))] = src
    try:
        return ChartStructure(
            n,
            domain,
            g_field,
            a_field,
            h=h,
            periodic=periodic,
            g_source=g_source,
            a_source=a_source,
        )
    except ConstructionError as exc:
        raise ConstructionError(f"potential is not convex on the domain: {exc}") from exc
