"""Matrix pencils lambda -> T - lambda*S and their nested-subspace data.

The two subspace recursions
    N_0 = {0},  N_{m+1} = preimage under T of S(N_m)      (non-decreasing)
    R_0 = C^n,  R_{m+1} = preimage under S of T(R_m)      (non-increasing)
stabilize in finite dimensions; their limits give the stability number k.
Chains are tuples (x_1, ..., x_m) with T x_i = S x_{i-1}, and gamma_m is the
largest c such that ||T x_1|| >= c * dist(x_m, N_m) holds for every chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import matrixcore as mc
from . import subspace as sub
from .exceptions import ContractViolation, NotStabilized


@dataclass(frozen=True)
class Pencil:
    """The pair (T, S) of equally shaped p x n complex matrices."""

    T: np.ndarray
    S: np.ndarray

    def __post_init__(self):
        t = mc.as_matrix(self.T)
        s = mc.as_matrix(self.S)
        if t.shape != s.shape:
            raise ContractViolation(f"T and S shapes differ: {t.shape} vs {s.shape}")
        object.__setattr__(self, "T", t)
        object.__setattr__(self, "S", s)

    @property
    def x_dim(self) -> int:
        return self.T.shape[1]

    @property
    def y_dim(self) -> int:
        return self.T.shape[0]

    def at(self, lam: complex) -> np.ndarray:
        """Evaluate T - lambda*S."""
        return self.T - lam * self.S


@dataclass(frozen=True)
class LimitSpaces:
    n_seq: list            # N_0 ... N_{m*}
    r_seq: list            # R_0 ... R_{m*}
    x_inf: sub.Subspace
    y_inf: sub.Subspace
    stabilized_at: int
    k: int
    min_gap_ratio: float


@dataclass(frozen=True)
class ChainSpace:
    """Orthonormal basis of all length-m chains, stacked in C^{m*n}."""

    m: int
    basis: np.ndarray


def default_m_cap(p: Pencil) -> int:
    return 4 * min(p.x_dim, p.y_dim) + 4


def limit_spaces(p: Pencil, m_cap: int | None = None,
                 eps_rel: float = mc.EPS_REL_DEFAULT) -> LimitSpaces:
    """Run both recursions until the dimensions stop moving.

    Stabilization is detected on integer dimensions alone: both sequences are
    nested, so one-step dimension equality already forces set equality and
    propagates to all later steps.
    """
    if m_cap is None:
        m_cap = default_m_cap(p)
    if m_cap < 1:
        raise ContractViolation(f"m_cap must be >= 1, got {m_cap}")
    n = p.x_dim
    n_seq = [sub.trivial(n)]
    r_seq = [sub.full(n)]
    stabilized = None
    for m in range(m_cap):
        n_next = sub.preimage(p.T, sub.image(p.S, n_seq[-1], eps_rel), eps_rel)
        r_next = sub.preimage(p.S, sub.image(p.T, r_seq[-1], eps_rel), eps_rel)
        if n_next.dim == n_seq[-1].dim and r_next.dim == r_seq[-1].dim:
            stabilized = m
            break
        n_seq.append(n_next)
        r_seq.append(r_next)
    if stabilized is None:
        raise NotStabilized(
            f"subspace recursion did not stabilize within m_cap={m_cap} "
            f"(dims N: {[s.dim for s in n_seq]}, R: {[s.dim for s in r_seq]})", m_cap)
    x_inf = r_seq[-1]
    y_inf = sub.image(p.T, x_inf, eps_rel)
    n_t = sub.kernel(p.T, eps_rel)
    k = n_t.dim - sub.intersect(n_t, x_inf, eps_rel).dim
    gaps = [s.gap_ratio for s in n_seq + r_seq] + [x_inf.gap_ratio, y_inf.gap_ratio,
                                                   n_t.gap_ratio]
    return LimitSpaces(n_seq, r_seq, x_inf, y_inf, stabilized, k, min(gaps))


def nth_kernel_space(p: Pencil, m: int, eps_rel: float = mc.EPS_REL_DEFAULT) -> sub.Subspace:
    """N_m alone, stopping early once the sequence stabilizes."""
    if m < 0:
        raise ContractViolation(f"m must be >= 0, got {m}")
    current = sub.trivial(p.x_dim)
    for _ in range(m):
        nxt = sub.preimage(p.T, sub.image(p.S, current, eps_rel), eps_rel)
        if nxt.dim == current.dim:
            return current
        current = nxt
    return current


def chain_space(p: Pencil, m: int, eps_rel: float = mc.EPS_REL_DEFAULT) -> ChainSpace:
    """Kernel of the block-bidiagonal chain constraints, one dense SVD."""
    if m < 1:
        raise ContractViolation(f"chain length must be >= 1, got {m}")
    n, rows = p.x_dim, p.y_dim
    if m == 1:
        return ChainSpace(1, mc.identity(n))
    k = np.zeros(((m - 1) * rows, m * n), dtype=np.complex128)
    for i in range(m - 1):
        k[i * rows:(i + 1) * rows, i * n:(i + 1) * n] = -p.S
        k[i * rows:(i + 1) * rows, (i + 1) * n:(i + 2) * n] = p.T
    ker = sub.kernel(k, eps_rel)
    return ChainSpace(m, ker.basis)


def gamma_m(p: Pencil, m: int, eps_rel: float = mc.EPS_REL_DEFAULT) -> float:
    """The chain quantity gamma_m: inf ||T x_1|| / dist(x_m, N_m) over chains.

    With Q a chain-space basis, A' = T * (first block of Q) and
    B' = (I - P_{N_m}) * (last block of Q), the value is the square root of
    the smallest eigenvalue of the Hermitian-definite pencil
    (A~* A~, B~* B~), where the kernel of B' is deflated out of A' first.
    Here that is evaluated as sigma_min(A~ @ diag(1/s_B)) reusing the SVD of
    B', which is the same number with better-behaved scaling.  Returns +inf
    when no chain leaves N_m (B' vanishes).
    """
    if m < 1:
        raise ContractViolation(f"m must be >= 1, got {m}")
    n = p.x_dim
    q = chain_space(p, m, eps_rel).basis
    if q.shape[1] == 0:
        return math.inf
    n_m = nth_kernel_space(p, m, eps_rel)
    a1 = p.T @ q[:n, :]
    complement = np.eye(n, dtype=np.complex128) - n_m.projector()
    b1 = complement @ q[(m - 1) * n:, :]

    # chain basis columns are unit vectors and the projector is O(1), so B'
    # is judged against scale 1: a B' made of round-off means no chain leaves
    # N_m at all
    decision = mc.rank_with_tol(b1, eps_rel, scale=1.0)
    if decision.rank == 0:
        return math.inf
    u, s, vh = np.linalg.svd(b1, full_matrices=True)
    r = decision.rank
    row_basis = mc.adjoint(vh)[:, :r]          # orthonormal basis of N(B')^perp
    null_basis = mc.adjoint(vh)[:, r:]         # orthonormal basis of N(B')

    a_tilde = a1 @ row_basis
    if null_basis.shape[1]:
        deflate = sub.from_span(a1 @ null_basis, eps_rel,
                                scale=mc.operator_norm(a1))
        a_tilde = a_tilde - deflate.projector() @ a_tilde
    # B' @ row_basis = u[:, :r] * s[:r] exactly, so the B-normalization is a
    # column scaling by 1/s
    scaled = a_tilde / s[:r]
    if scaled.shape[1] > scaled.shape[0]:
        return 0.0
    sv = np.linalg.svd(scaled, compute_uv=False)
    return float(sv[-1])


def gamma_m_eig(p: Pencil, m: int, eps_rel: float = mc.EPS_REL_DEFAULT) -> float:
    """gamma_m through the generalized eigenproblem route (cross-check)."""
    if m < 1:
        raise ContractViolation(f"m must be >= 1, got {m}")
    n = p.x_dim
    q = chain_space(p, m, eps_rel).basis
    if q.shape[1] == 0:
        return math.inf
    n_m = nth_kernel_space(p, m, eps_rel)
    a1 = p.T @ q[:n, :]
    complement = np.eye(n, dtype=np.complex128) - n_m.projector()
    b1 = complement @ q[(m - 1) * n:, :]
    decision = mc.rank_with_tol(b1, eps_rel, scale=1.0)
    if decision.rank == 0:
        return math.inf
    ker_b = sub.kernel(b1, eps_rel, scale=1.0)
    row_basis = sub.from_span(mc.adjoint(b1), eps_rel, scale=1.0).basis
    a_tilde = a1 @ row_basis
    if ker_b.dim:
        deflate = sub.from_span(a1 @ ker_b.basis, eps_rel,
                                scale=mc.operator_norm(a1))
        a_tilde = a_tilde - deflate.projector() @ a_tilde
    b_tilde = b1 @ row_basis
    lhs = mc.adjoint(a_tilde) @ a_tilde
    rhs = mc.adjoint(b_tilde) @ b_tilde
    w = scipy.linalg.eigh(lhs, rhs, eigvals_only=True)
    return float(math.sqrt(max(float(w[0]), 0.0)))


def reduced_min_modulus(a: np.ndarray, eps_rel: float = mc.EPS_REL_DEFAULT) -> float:
    """Smallest singular value above the rank tolerance; +inf for the zero matrix."""
    decision = mc.rank_with_tol(a, eps_rel)
    if decision.rank == 0:
        return math.inf
    return float(decision.singular_values[decision.rank - 1])


def verify_chain_columns(p: Pencil, cs: ChainSpace, tol: float = 1e-8) -> float:
    """Largest constraint residual ||T x_i - S x_{i-1}|| over basis columns."""
    n = p.x_dim
    worst = 0.0
    for col in cs.basis.T:
        blocks = col.reshape(cs.m, n)
        for i in range(1, cs.m):
            worst = max(worst, float(np.linalg.norm(p.T @ blocks[i] - p.S @ blocks[i - 1])))
    return worst
