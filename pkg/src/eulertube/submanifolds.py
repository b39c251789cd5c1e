"""Parametrized submanifolds, normal spaces, the normal exponential map and
tubular-radius certification."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np

from .errors import NotInDomain, NoValidRadius, RankDeficient
from .metrics import MetricField, exp_map
from .numerics import Array, DifferentiableMap

_RANK_TOL = 1e-8


@dataclass(frozen=True)
class ParametrizedSubmanifold:
    """A full-rank injective parametrization u -> p(u) of N inside R^n."""

    param_dim: int
    ambient_dim: int
    chart: DifferentiableMap
    param_domain: Optional[Callable[[Array], bool]] = None
    name: str = ""

    def point(self, u) -> Array:
        return self.chart(np.atleast_1d(np.asarray(u, dtype=float)))

    def tangent_basis(self, u) -> Array:
        """Columns span T_pN; shape (n, k)."""
        return self.chart.jacobian(np.atleast_1d(np.asarray(u, dtype=float)))

    def in_param_domain(self, u) -> bool:
        if self.param_domain is None:
            return True
        return bool(self.param_domain(np.atleast_1d(np.asarray(u, dtype=float))))


@dataclass(frozen=True)
class NormalVector:
    """A metric-orthogonal vector w attached at the parameter point u."""

    u: Array
    w: Array


@dataclass(frozen=True)
class RadiusFunction:
    """Sampled positive tube radius u -> delta(u)."""

    fn: Callable[[Array], float]
    grid: Sequence

    def __call__(self, u) -> float:
        return float(self.fn(np.atleast_1d(np.asarray(u, dtype=float))))


def _tangent_projection_pieces(g: MetricField, N: ParametrizedSubmanifold, u):
    p = N.point(u)
    J = N.tangent_basis(u)
    if N.param_dim > 0:
        if np.linalg.svd(J, compute_uv=False)[-1] <= _RANK_TOL:
            raise RankDeficient(f"tangent basis rank-deficient at u={u}")
    G = g.matrix(p)
    return p, J, G


def _project_normal(a: Array, J: Array, G: Array) -> Array:
    """G-orthogonal projection of a onto the normal space (kills tangents)."""
    if J.shape[1] == 0:
        return a.copy()
    M = J.T @ G @ J
    coef = np.linalg.solve(M, J.T @ G @ a)
    return a - J @ coef


def normal_space_basis(
    g: MetricField, N: ParametrizedSubmanifold, u
) -> List[NormalVector]:
    """Deterministic g-orthonormal basis of the normal space at p(u).

    Standard ambient basis vectors are projected onto the normal space and
    orthonormalized in index order; near-zero projections are skipped.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    p, J, G = _tangent_projection_pieces(g, N, u)
    n, k = N.ambient_dim, N.param_dim
    basis: List[Array] = []
    for i in range(n):
        if len(basis) == n - k:
            break
        e = np.zeros(n)
        e[i] = 1.0
        q = _project_normal(e, J, G)
        for b in basis:
            q = q - (b @ G @ q) * b
        nrm = float(np.sqrt(max(q @ G @ q, 0.0)))
        if nrm < _RANK_TOL:
            continue
        basis.append(q / nrm)
    if len(basis) != n - k:
        raise RankDeficient(f"could not build a normal basis at u={u}")
    return [NormalVector(u=u, w=b) for b in basis]


def normal_basis_matrix(g: MetricField, N: ParametrizedSubmanifold, u) -> Array:
    """Normal basis as columns of an (n, n-k) matrix."""
    vecs = normal_space_basis(g, N, u)
    return np.column_stack([nv.w for nv in vecs])


def normal_representative(
    g: MetricField, N: ParametrizedSubmanifold, u, a
) -> NormalVector:
    """g-orthogonal projection of an ambient vector onto the normal space.

    Two ambient vectors differing by a tangent vector map to the same
    result, so this realizes the canonical isomorphism from the quotient
    normal bundle onto the metric normal bundle.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    a = np.asarray(a, dtype=float)
    _, J, G = _tangent_projection_pieces(g, N, u)
    return NormalVector(u=u, w=_project_normal(a, J, G))


def normal_exponential(
    g: MetricField, N: ParametrizedSubmanifold, nv: NormalVector, tol: float = 1e-10
) -> Array:
    """Normal exponential map: exp at p(u) applied to the normal vector w."""
    return exp_map(g, N.point(nv.u), nv.w, tol=tol)


def _radius_candidate_ok(
    g: MetricField,
    N: ParametrizedSubmanifold,
    grid,
    delta: float,
    cond_limit: float,
    inj_tol: float,
    fractions,
    fd_step: float,
    tol: float,
) -> bool:
    k = N.param_dim
    preimages = []
    images = []
    for u in grid:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        B = normal_basis_matrix(g, N, u)
        m = B.shape[1]

        def E_coords(uc):
            uu, c = uc[:k], uc[k:]
            Bu = normal_basis_matrix(g, N, uu)
            return exp_map(g, N.point(uu), Bu @ c, tol=tol)

        for j in range(m):
            for sign in (1.0, -1.0):
                for frac in fractions:
                    c = np.zeros(m)
                    c[j] = sign * frac * delta
                    uc = np.concatenate([u, c])
                    try:
                        img = E_coords(uc)
                    except NotInDomain:
                        return False
                    # metric-weighted condition estimate of the tube chart
                    Jmat = np.empty((N.ambient_dim, k + m))
                    try:
                        for i in range(k + m):
                            dp = np.zeros(k + m)
                            dp[i] = fd_step
                            Jmat[:, i] = (
                                E_coords(uc + dp) - E_coords(uc - dp)
                            ) / (2.0 * fd_step)
                    except NotInDomain:
                        return False
                    G = g.matrix(img)
                    w, V = np.linalg.eigh(0.5 * (G + G.T))
                    W = V @ np.diag(np.sqrt(np.maximum(w, 0.0))) @ V.T
                    sv = np.linalg.svd(W @ Jmat, compute_uv=False)
                    if sv[-1] <= 0.0 or sv[0] / sv[-1] >= cond_limit:
                        return False
                    preimages.append(uc)
                    images.append(img)
    # sampled injectivity: well-separated preimages must stay separated
    pre = np.array(preimages)
    img = np.array(images)
    if len(pre) > 1:
        mesh = 0.0
        us = np.array([np.atleast_1d(np.asarray(u, float)) for u in grid])
        if len(us) > 1:
            mesh = max(mesh, float(np.max(np.linalg.norm(np.diff(us, axis=0), axis=1))))
        fr = sorted(fractions)
        gaps = [fr[0]] + [b - a for a, b in zip(fr, fr[1:])]
        mesh = max(mesh, delta * max(gaps))
        for i in range(len(pre)):
            d_pre = np.linalg.norm(pre[i + 1 :] - pre[i], axis=1)
            d_img = np.linalg.norm(img[i + 1 :] - img[i], axis=1)
            bad = (d_pre > 2.0 * mesh) & (d_img < inj_tol)
            if np.any(bad):
                return False
    return True


def tubular_radius_estimate(
    g: MetricField,
    N: ParametrizedSubmanifold,
    grid,
    delta0: float,
    cond_limit: float = 1e6,
    inj_tol: float = 1e-8,
    fractions=(0.25, 0.5, 0.75, 1.0),
    fd_step: float = 1e-5,
    tol: float = 1e-11,
    max_halvings: int = 20,
) -> RadiusFunction:
    """Largest delta0 * 2^-m certified on the sampled closed tube.

    Certification checks a metric-weighted condition estimate of the tube
    chart jacobian and sampled injectivity; the boundary fraction 1.0 is
    included so focal degeneracies at radius exactly delta are rejected.
    """
    if delta0 <= 0:
        raise ValueError("delta0 must be positive")
    for m in range(max_halvings + 1):
        delta = delta0 * 2.0**-m
        if _radius_candidate_ok(
            g, N, grid, delta, cond_limit, inj_tol, fractions, fd_step, tol
        ):
            return RadiusFunction(fn=lambda u, d=delta: d, grid=list(grid))
    raise NoValidRadius(f"no certified radius above {delta0 * 2.0 ** -max_halvings:.3e}")
