"""Dense complex-matrix kernel.

Matrices are plain ``numpy.ndarray`` objects with dtype complex128 and two
dimensions; :func:`as_matrix` is the validating constructor used at every
public entry point.  Products, sums and scalar multiples are numpy's own
operators (``@``, ``+``, ``*``); numpy already raises on shape mismatch.
Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ContractViolation, SvdConvergenceError

EPS_REL_DEFAULT = 1e-10

# rank decisions with a retained/discarded singular-value gap below this are
# considered ill-determined by downstream reporting
GAP_RATIO_WARN = 1e3


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a 2-D complex128 array, rejecting NaN/Inf entries."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ContractViolation(f"expected a 2-D matrix, got ndim={m.ndim}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ContractViolation(f"matrix dimensions must be positive, got {m.shape}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ContractViolation("matrix entries must be finite")
    return m


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def adjoint(a: np.ndarray) -> np.ndarray:
    return np.conj(a.T)


def svd(a: np.ndarray):
    """Thin singular value decomposition ``a = u @ diag(sigma) @ adjoint(v)``.

    Returns
    -------
    (u, sigma, v)
        ``u`` and ``v`` have orthonormal columns and ``sigma`` is a
        non-increasing 1-D array of non-negative reals.
    """
    a = np.asarray(a, dtype=np.complex128)
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise SvdConvergenceError(f"SVD did not converge: {exc}") from exc
    return u, s, adjoint(vh)


@dataclass(frozen=True)
class RankDecision:
    """Numerical rank of a matrix, with the evidence for the decision."""

    rank: int
    singular_values: np.ndarray
    tol_used: float
    gap_ratio: float


def rank_with_tol(a: np.ndarray, eps_rel: float = EPS_REL_DEFAULT,
                  scale: float | None = None) -> RankDecision:
    """Numerical rank via SVD with tolerance eps_rel * max(m, n) * sigma_max.

    ``scale`` optionally raises the reference magnitude above sigma_max: for
    matrices derived from a larger problem (images of subspaces, projected
    blocks) the rank must be judged against the surrounding problem's scale,
    or pure round-off would masquerade as rank.

    ``gap_ratio`` is sigma_rank / sigma_{rank+1} (inf when there is no
    discarded singular value or it is exactly zero); a small gap flags an
    ill-determined rank.
    """
    if eps_rel <= 0:
        raise ContractViolation(f"eps_rel must be positive, got {eps_rel}")
    a = np.asarray(a, dtype=np.complex128)
    if a.size == 0:
        return RankDecision(0, np.zeros(0), eps_rel, math.inf)
    _, s, _ = svd(a)
    smax = float(s[0]) if s.size else 0.0
    ref = max(smax, scale if scale is not None else 0.0)
    tol = eps_rel * max(a.shape) * ref if ref > 0.0 else eps_rel
    rank = int(np.count_nonzero(s > tol))
    if rank == 0 or rank >= s.size or s[rank] == 0.0:
        gap = math.inf
    else:
        gap = float(s[rank - 1] / s[rank])
    return RankDecision(rank, s, tol, gap)


def spectral_radius(a: np.ndarray) -> float:
    """Largest eigenvalue modulus, by dense Hessenberg/QR eigenvalues."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ContractViolation(f"spectral radius needs a square matrix, got {a.shape}")
    w = np.linalg.eigvals(a)
    return float(np.max(np.abs(w))) if w.size else 0.0


def operator_norm(a: np.ndarray) -> float:
    """Spectral norm (largest singular value)."""
    a = np.asarray(a, dtype=np.complex128)
    if a.size == 0:
        return 0.0
    _, s, _ = svd(a)
    return float(s[0])


def pseudo_inverse(a: np.ndarray, eps_rel: float = EPS_REL_DEFAULT) -> np.ndarray:
    """Moore-Penrose pseudoinverse with rank_with_tol truncation."""
    a = np.asarray(a, dtype=np.complex128)
    u, s, v = svd(a)
    decision = rank_with_tol(a, eps_rel)
    r = decision.rank
    if r == 0:
        return np.zeros((a.shape[1], a.shape[0]), dtype=np.complex128)
    return (v[:, :r] / s[:r]) @ adjoint(u[:, :r])


def penrose_residuals(a: np.ndarray, x: np.ndarray):
    """The four Moore-Penrose identity residuals (operator norm each)."""
    axa = a @ x @ a
    xax = x @ a @ x
    ax = a @ x
    xa = x @ a
    return (
        operator_norm(axa - a),
        operator_norm(xax - x),
        operator_norm(ax - adjoint(ax)),
        operator_norm(xa - adjoint(xa)),
    )
