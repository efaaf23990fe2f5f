"""Subspace arithmetic: kernels, ranges, preimages, intersections, sums,
distances, and oblique projectors.

A subspace is stored as an orthonormal basis (possibly with zero columns for
the trivial subspace) together with its ambient dimension and the tolerance
in force when it was created.  Every operation re-orthonormalizes its result,
so tolerance decisions never compound silently.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import matrixcore as mc
from .exceptions import ContractViolation, DecompositionError

CONTAINS_TOL = 1e-8        # absolute: bases are orthonormal, so scale-free
CONDITION_WARN = 1e8


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of C^ambient_dim, held as an orthonormal basis."""

    basis: np.ndarray           # (ambient_dim, dim), orthonormal columns
    ambient_dim: int
    tol_born: float
    gap_ratio: float = math.inf  # singular-value gap of the creating rank decision

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        """Orthogonal projector onto the subspace."""
        if self.dim == 0:
            return np.zeros((self.ambient_dim, self.ambient_dim), dtype=np.complex128)
        return self.basis @ mc.adjoint(self.basis)


def trivial(ambient_dim: int) -> Subspace:
    return Subspace(np.zeros((ambient_dim, 0), dtype=np.complex128), ambient_dim, 0.0)


def full(ambient_dim: int) -> Subspace:
    return Subspace(mc.identity(ambient_dim), ambient_dim, 0.0)


def from_span(a: np.ndarray, eps_rel: float = mc.EPS_REL_DEFAULT,
              scale: float | None = None) -> Subspace:
    """Orthonormalize the column span of ``a`` (rank decided by tolerance,
    judged against ``scale`` when the input comes from a larger problem)."""
    a = np.asarray(a, dtype=np.complex128)
    ambient = a.shape[0]
    if a.shape[1] == 0:
        return trivial(ambient)
    decision = mc.rank_with_tol(a, eps_rel, scale)
    if decision.rank == 0:
        return Subspace(np.zeros((ambient, 0), dtype=np.complex128), ambient,
                        decision.tol_used, decision.gap_ratio)
    u, _, _ = mc.svd(a)
    return Subspace(np.ascontiguousarray(u[:, :decision.rank]), ambient,
                    decision.tol_used, decision.gap_ratio)


def kernel(a: np.ndarray, eps_rel: float = mc.EPS_REL_DEFAULT,
           scale: float | None = None) -> Subspace:
    """Null space of ``a`` as a subspace of C^cols (rank judged against
    ``scale`` when given)."""
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[1]
    decision = mc.rank_with_tol(a, eps_rel, scale)
    _, _, vh = np.linalg.svd(a, full_matrices=True)
    basis = mc.adjoint(vh)[:, decision.rank:]
    return Subspace(np.ascontiguousarray(basis), n, decision.tol_used, decision.gap_ratio)


def range_space(a: np.ndarray, eps_rel: float = mc.EPS_REL_DEFAULT) -> Subspace:
    """Column space of ``a`` as a subspace of C^rows."""
    return from_span(np.asarray(a, dtype=np.complex128), eps_rel)


def image(a: np.ndarray, w: Subspace, eps_rel: float = mc.EPS_REL_DEFAULT) -> Subspace:
    """The image a(W) = span of a applied to a basis of W."""
    a = np.asarray(a, dtype=np.complex128)
    if w.ambient_dim != a.shape[1]:
        raise ContractViolation(
            f"image: ambient dim {w.ambient_dim} does not match cols {a.shape[1]}")
    # basis columns are unit vectors: the right reference scale is ||a||
    return from_span(a @ w.basis, eps_rel, scale=mc.operator_norm(a))


def preimage(a: np.ndarray, w: Subspace, eps_rel: float = mc.EPS_REL_DEFAULT) -> Subspace:
    """The preimage {x : a x in W}, computed as kernel((I - P_W) a)."""
    a = np.asarray(a, dtype=np.complex128)
    if w.ambient_dim != a.shape[0]:
        raise ContractViolation(
            f"preimage: ambient dim {w.ambient_dim} does not match rows {a.shape[0]}")
    complement = np.eye(w.ambient_dim, dtype=np.complex128) - w.projector()
    return kernel(complement @ a, eps_rel, scale=mc.operator_norm(a))


def intersect(v: Subspace, w: Subspace, eps_rel: float = mc.EPS_REL_DEFAULT) -> Subspace:
    """V intersect W, via the kernel of the stacked complementary projectors."""
    _check_same_ambient(v, w)
    n = v.ambient_dim
    eye = np.eye(n, dtype=np.complex128)
    stacked = np.vstack([eye - v.projector(), eye - w.projector()])
    return kernel(stacked, eps_rel, scale=1.0)   # projector blocks are O(1)


def span_sum(v: Subspace, w: Subspace, eps_rel: float = mc.EPS_REL_DEFAULT) -> Subspace:
    """V + W, the span of both bases together."""
    _check_same_ambient(v, w)
    return from_span(np.hstack([v.basis, w.basis]), eps_rel)


def contains(v: Subspace, w: Subspace) -> bool:
    """True iff every basis vector of W lies within CONTAINS_TOL of V."""
    _check_same_ambient(v, w)
    if w.dim == 0:
        return True
    residual = w.basis - v.projector() @ w.basis
    return bool(np.linalg.norm(residual, axis=0).max() <= CONTAINS_TOL)


def distance(x: np.ndarray, w: Subspace) -> float:
    """Euclidean distance from the vector x to the subspace W."""
    x = np.asarray(x, dtype=np.complex128).reshape(-1)
    if x.size != w.ambient_dim:
        raise ContractViolation(
            f"distance: vector length {x.size} does not match ambient {w.ambient_dim}")
    if w.dim == 0:
        return float(np.linalg.norm(x))
    return float(np.linalg.norm(x - w.basis @ (mc.adjoint(w.basis) @ x)))


@dataclass(frozen=True)
class Projector:
    """An oblique projector with its range, null space, and the condition
    number of the stacked-basis solve that produced it."""

    matrix: np.ndarray
    range_space: Subspace
    null_space: Subspace
    condition: float = field(default=math.nan)


def projector_along(ran: Subspace, nul: Subspace) -> Projector:
    """Projector onto ``ran`` along ``nul`` (the two must be complementary).

    Raises DecompositionError when the spaces are not complementary; a
    stacked-basis condition number above 1e8 only warns, since nearly
    degenerate complements are legitimate boundary cases.
    """
    _check_same_ambient(ran, nul)
    n = ran.ambient_dim
    if ran.dim + nul.dim != n:
        raise DecompositionError(
            f"dims {ran.dim} + {nul.dim} != ambient {n}", math.inf)
    stacked = np.hstack([ran.basis, nul.basis])
    s = np.linalg.svd(stacked, compute_uv=False)
    smin = float(s[-1]) if s.size else 0.0
    cond = math.inf if smin == 0.0 else float(s[0] / smin)
    if smin <= n * np.finfo(float).eps * float(s[0] if s.size else 1.0):
        raise DecompositionError(
            f"subspaces are not complementary (condition {cond:.3e})", cond)
    if cond > CONDITION_WARN:
        warnings.warn(f"nearly degenerate complement pair: condition {cond:.3e}",
                      stacklevel=2)
    inv_rows = np.linalg.solve(stacked, np.eye(n, dtype=np.complex128))[:ran.dim]
    p = ran.basis @ inv_rows if ran.dim else np.zeros((n, n), dtype=np.complex128)
    return Projector(p, ran, nul, cond)


def _check_same_ambient(v: Subspace, w: Subspace):
    if v.ambient_dim != w.ambient_dim:
        raise ContractViolation(
            f"ambient dimensions differ: {v.ambient_dim} vs {w.ambient_dim}")
