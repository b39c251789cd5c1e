"""Realizing an embedding by the normal exponential map of a constructed
metric: the comparison diffeomorphism, the pullback metric, and the
commutative-diagram / isometry verifications."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .embeddings import TubularEmbedding
from .errors import (
    DecompositionFailure,
    HypothesisFailure,
    NoConvergence,
    NotInDomain,
    SingularJacobian,
)
from .metrics import MetricField, exp_map, geodesic
from .numerics import Array, DifferentiableMap, solve_inverse
from .submanifolds import (
    ParametrizedSubmanifold,
    normal_basis_matrix,
    normal_representative,
)


@dataclass(frozen=True)
class CorrectionMap:
    """Tangent-valued correction of the comparison map's differential on the
    normal space: d(chi) v = v + J @ (eta @ c) for v with frame coordinates c."""

    u: Array
    eta: Array  # (k, n-k): normal-frame coords -> tangent-frame coords
    tangent_basis: Array  # (n, k)
    frame: Array  # (n, n-k)

    def apply(self, v) -> Array:
        """Tangent correction for an ambient normal vector v (frame span)."""
        c = np.linalg.lstsq(self.frame, np.asarray(v, float), rcond=None)[0]
        return self.tangent_basis @ (self.eta @ c)


def build_chi(
    psi: TubularEmbedding,
    phi: TubularEmbedding,
    invert_tol: float = 1e-12,
    domain: Optional[Callable[[Array], bool]] = None,
    fd_step: float = 1e-5,
) -> DifferentiableMap:
    """The comparison map chi = phi o psi^{-1} on the image of psi.

    The jacobian is assembled by the chain rule from the two embeddings'
    jacobians at the inverted preimage, which avoids nesting Newton solves
    inside finite differences.
    """
    n = psi.N.ambient_dim
    warm = {"x": None, "uc": None}

    def invert(x):
        # warm-start Newton from the previous preimage; geodesic tracing
        # evaluates chi on tightly clustered points, so this usually
        # converges in one or two iterations
        if warm["x"] is not None and float(np.linalg.norm(x - warm["x"])) < 0.1:
            try:
                uc = solve_inverse(psi.map, x, warm["uc"], tol=invert_tol)
            except (NoConvergence, SingularJacobian):
                uc = psi.invert(x, tol=invert_tol)
        else:
            uc = psi.invert(x, tol=invert_tol)
        warm["x"], warm["uc"] = x.copy(), uc
        return uc

    def fn(x):
        uc = invert(np.asarray(x, dtype=float))
        return phi.call_uc(uc)

    def jac(x):
        uc = invert(np.asarray(x, dtype=float))
        Dpsi = psi.map.jacobian(uc)
        Dphi = phi.map.jacobian(uc)
        return Dphi @ np.linalg.inv(Dpsi)

    return DifferentiableMap(
        domain_dim=n, codomain_dim=n, fn=fn, jac=jac, fd_step=fd_step, domain=domain
    )


def correction_eta(
    chi: DifferentiableMap,
    g_ref: MetricField,
    N: ParametrizedSubmanifold,
    u,
    tol: float = 1e-6,
) -> CorrectionMap:
    """Decompose d(chi) at p(u) on normal frame vectors as identity plus a
    tangent-valued part; the non-tangent residual must vanish within tol."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    p = N.point(u)
    D = chi.jacobian(p)
    J = N.tangent_basis(u)
    B = normal_basis_matrix(g_ref, N, u)
    k, m = J.shape[1], B.shape[1]
    basis = np.column_stack([J, B])
    eta = np.empty((k, m))
    for j in range(m):
        v = B[:, j]
        r = D @ v - v
        coef = np.linalg.solve(basis, r)
        if float(np.linalg.norm(coef[k:])) > tol:
            raise DecompositionFailure(
                f"normal residual {np.linalg.norm(coef[k:]):.3e} above {tol:.1e} at u={u}"
            )
        eta[:, j] = coef[:k]
    return CorrectionMap(u=u, eta=eta, tangent_basis=J, frame=B)


def pullback_metric(
    chi: DifferentiableMap,
    g_ref: MetricField,
    name: str = "pullback",
    fd_step: float = 1e-3,
) -> MetricField:
    """The metric making chi an isometry onto its image:
    g(x) = Dchi(x)^T gref(chi(x)) Dchi(x).

    The comparatively large fd_step is for the metric's own derivatives
    (Christoffel symbols): it balances truncation against the Newton-solve
    noise inside each chi evaluation.
    """

    def matrix(x):
        D = chi.jacobian(x)
        return D.T @ g_ref.matrix(chi(x)) @ D

    return MetricField(
        dim=chi.domain_dim,
        matrix_fn=matrix,
        domain=chi.domain,
        name=name,
        fd_step=fd_step,
    )


@dataclass(frozen=True)
class DiagramReport:
    """Residuals of the commutative-diagram check over a sample set."""

    sample_count: int
    max_residual: float
    mean_residual: float


def verify_main_diagram(
    psi: TubularEmbedding,
    g: MetricField,
    samples: Sequence[Tuple[Array, Array]],
    exp_tol: float = 1e-9,
) -> DiagramReport:
    """Check that the normal exponential map of the constructed metric sends
    the g-normal representative of each frame class back onto psi.

    ``samples`` is a sequence of (u, c) frame coordinates inside the
    certified tube.
    """
    N = psi.N
    residuals = []
    for u, c in samples:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        c = np.atleast_1d(np.asarray(c, dtype=float))
        w = psi.frame(u) @ c
        lam = normal_representative(g, N, u, w)
        y = exp_map(g, N.point(u), lam.w, tol=exp_tol)
        residuals.append(float(np.linalg.norm(y - psi(u, c))))
    residuals = np.array(residuals)
    return DiagramReport(
        sample_count=len(residuals),
        max_residual=float(np.max(residuals)),
        mean_residual=float(np.mean(residuals)),
    )


def isometry_geodesic_check(
    chi: DifferentiableMap,
    g: MetricField,
    g_ref: MetricField,
    N: ParametrizedSubmanifold,
    u,
    v_normal,
    t_samples=(0.25, 0.5, 0.75, 1.0),
    exp_tol: float = 1e-9,
) -> float:
    """Max over t of |exp_ref(t (v + eta(v))) - chi(exp_g(t v))| for a
    g-normal vector v at p(u)."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    v = np.asarray(v_normal, dtype=float)
    p = N.point(u)
    D = chi.jacobian(p)
    corrected = D @ v  # equals v + eta(v) because nu(chi) = id
    worst = 0.0
    for t in t_samples:
        lhs = exp_map(g_ref, p, t * corrected, tol=exp_tol)
        rhs = chi(exp_map(g, p, t * v, tol=exp_tol))
        worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return worst


def curve_length(g: MetricField, curve, dcurve, t0=0.0, t1=1.0, order: int = 24) -> float:
    """Gauss-Legendre quadrature of the g-length of a parametrized curve."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    total = 0.0
    for x, w in zip(nodes, weights):
        t = 0.5 * (t1 - t0) * x + 0.5 * (t0 + t1)
        total += w * g.norm(curve(t), dcurve(t))
    return 0.5 * (t1 - t0) * total


def point_case_metric(
    psi: DifferentiableMap,
    sample_vectors,
    traj_tol: float = 1e-10,
    hypothesis_tol: float = 1e-6,
    invert_tol: float = 1e-13,
) -> Tuple[MetricField, float]:
    """Single-point construction: push the flat metric through psi so the
    exponential map at psi(0) reproduces psi itself.

    Verifies exp(v) = psi(v) and gamma_v(t) = psi(t v) along the integrated
    trajectories; returns (metric, max residual).
    """
    n = psi.domain_dim
    zero = np.zeros(n)
    p = psi(zero)
    D0 = psi.jacobian(zero)
    if float(np.max(np.abs(D0 - np.eye(n)))) > hypothesis_tol:
        raise HypothesisFailure("differential of psi at 0 is not the identity")

    def matrix(y):
        x = solve_inverse(psi, y, y - p, tol=invert_tol)
        A = np.linalg.inv(psi.jacobian(x))
        return A.T @ A

    g = MetricField(dim=n, matrix_fn=matrix, name="point-case", fd_step=5e-4)
    worst = 0.0
    for v in sample_vectors:
        v = np.asarray(v, dtype=float)
        traj = geodesic(g, p, v, 1.0, traj_tol)
        if traj.exited:
            raise NotInDomain("point-case geodesic left the domain")
        for t, x in zip(traj.times, traj.points):
            worst = max(worst, float(np.linalg.norm(x - psi(t * v))))
    return g, worst
