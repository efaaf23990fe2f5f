"""Generalized inverses, resolvent families from fixed complements, the
Neumann family of an inner inverse, and spectral-radius minimization.

An inner inverse of T is any L with T L T = T; adding L T L = L makes it
reflexive.  Every inner inverse is L(Z) = L0 + Z - L0 T Z T L0 for some Z,
with L0 the pseudoinverse, which turns the minimization of the spectral
radius of S L over all inner inverses into an unconstrained search over Z.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kern
from . import matrixcore as mc
from . import subspace as sub
from .exceptions import ConstancyViolated, ContractViolation, NoComplementFound
from .pencil import Pencil

INNER_TOL = 1e-8
COMPLEMENT_CONDITION_MAX = 1e8
SURROGATE_MODES = (2, 3, 4)    # norm surrogates ||(SL)^k||^(1/k), k = 4, 8, 16


@dataclass(frozen=True)
class GenInverse:
    """A candidate inverse with its classification evidence."""

    L: np.ndarray
    inner_residual: float      # ||T L T - T||
    outer_residual: float      # ||L T L - L||
    is_inner: bool
    is_reflexive: bool
    sr_SL: float | None = None  # spectral radius of S @ L when S is known


def classify(t: np.ndarray, l: np.ndarray, s: np.ndarray | None = None) -> GenInverse:
    """Measure the two defining residuals of L against T and flag the result."""
    t = np.asarray(t, dtype=np.complex128)
    l = np.asarray(l, dtype=np.complex128)
    inner_res = mc.operator_norm(t @ l @ t - t)
    outer_res = mc.operator_norm(l @ t @ l - l)
    is_inner = inner_res <= INNER_TOL * (1.0 + mc.operator_norm(t))
    is_reflexive = is_inner and outer_res <= INNER_TOL * (1.0 + mc.operator_norm(l))
    sr = mc.spectral_radius(s @ l) if s is not None else None
    return GenInverse(l, inner_res, outer_res, is_inner, is_reflexive, sr)


def parametrize_inner(t: np.ndarray, z: np.ndarray, s: np.ndarray | None = None,
                      eps_rel: float = mc.EPS_REL_DEFAULT) -> GenInverse:
    """The inner inverse L(Z) = L0 + Z - L0 T Z T L0 (onto all inner inverses)."""
    t = mc.as_matrix(t)
    z = mc.as_matrix(z)
    if z.shape != (t.shape[1], t.shape[0]):
        raise ContractViolation(
            f"Z must be {t.shape[1]} x {t.shape[0]}, got {z.shape}")
    l0 = mc.pseudo_inverse(t, eps_rel)
    l = l0 + z - l0 @ t @ z @ t @ l0
    return classify(t, l, s)


def reflexive_closure(t: np.ndarray, l: np.ndarray,
                      s: np.ndarray | None = None) -> GenInverse:
    """L T L, a reflexive inverse whenever L is inner."""
    t = mc.as_matrix(t)
    l = mc.as_matrix(l)
    inner_res = mc.operator_norm(t @ l @ t - t)
    if inner_res > INNER_TOL * (1.0 + mc.operator_norm(t)):
        raise ContractViolation(
            f"reflexive_closure needs an inner inverse; residual {inner_res:.3e}")
    return classify(t, l @ t @ l, s)


@dataclass(frozen=True)
class ComplementPair:
    """Subspaces E, F complementary to every sampled kernel / range of the
    pencil on the disk |lambda| < valid_radius."""

    E: sub.Subspace
    F: sub.Subspace
    valid_radius: float
    samples_checked: int
    worst_condition: float


@dataclass(frozen=True)
class Resolvent:
    pencil: Pencil
    complements: ComplementPair
    eps_rel: float = mc.EPS_REL_DEFAULT


def sample_disk(radius: float, n_samples: int = 64) -> np.ndarray:
    """Deterministic samples: 0 plus four concentric circles inside the disk."""
    per_circle = max(1, n_samples // 4)
    pts = [0.0 + 0.0j]
    for c in range(4):
        r = radius * (c + 1) / 4 * 0.995
        for j in range(per_circle):
            theta = 2.0 * math.pi * (j + 0.31 * (c + 1)) / per_circle
            pts.append(r * complex(math.cos(theta), math.sin(theta)))
    return np.array(pts, dtype=np.complex128)


def haar_basis(ambient: int, dim: int, rng: np.random.Generator) -> sub.Subspace:
    """A subspace drawn from the unitary-invariant distribution."""
    if dim == 0:
        return sub.trivial(ambient)
    g = rng.standard_normal((ambient, dim)) + 1j * rng.standard_normal((ambient, dim))
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    return sub.Subspace(q, ambient, 0.0)


def _stack_condition(fixed: sub.Subspace, moving: sub.Subspace) -> float:
    if fixed.dim + moving.dim != fixed.ambient_dim:
        return math.inf
    s = np.linalg.svd(np.hstack([fixed.basis, moving.basis]), compute_uv=False)
    if s.size == 0:
        return 1.0
    return math.inf if s[-1] == 0.0 else float(s[0] / s[-1])


def find_fixed_complements(p: Pencil, radius: float, n_samples: int = 64,
                           n_attempts: int = 16, seed: int = 0,
                           eps_rel: float = mc.EPS_REL_DEFAULT) -> ComplementPair:
    """Random subspaces E, F complementary to N(T-lambda*S) and R(T-lambda*S)
    on a sampled disk of the given radius.

    Raises ConstancyViolated when the sampled kernel dimension moves (the
    disk then cannot carry fixed complements of the right size), and
    NoComplementFound when every attempt hits a degenerate pair.
    """
    if radius <= 0:
        raise ContractViolation(f"radius must be positive, got {radius}")
    lams = sample_disk(radius, n_samples)
    kernels, ranges = [], []
    dims = []
    for lam in lams:
        mat = p.at(lam)
        kernels.append(sub.kernel(mat, eps_rel))
        ranges.append(sub.range_space(mat, eps_rel))
        dims.append(kernels[-1].dim)
    if len(set(dims)) != 1:
        raise ConstancyViolated(
            f"dim N(T - lambda S) is not constant on |lambda| < {radius}: "
            f"saw dimensions {sorted(set(dims))}", dims)
    dim_n = dims[0]
    rank = p.x_dim - dim_n

    rng = np.random.default_rng(seed)
    worst_cond_seen = None
    worst_lam = None
    for _ in range(n_attempts):
        e = haar_basis(p.x_dim, p.x_dim - dim_n, rng)
        f = haar_basis(p.y_dim, p.y_dim - rank, rng)
        worst = 0.0
        worst_at = 0j
        for lam, ker, ran in zip(lams, kernels, ranges):
            c = max(_stack_condition(e, ker), _stack_condition(f, ran))
            if c > worst:
                worst, worst_at = c, lam
        if worst <= COMPLEMENT_CONDITION_MAX:
            return ComplementPair(e, f, radius, len(lams), worst)
        if worst_cond_seen is None or worst < worst_cond_seen:
            worst_cond_seen, worst_lam = worst, worst_at
    raise NoComplementFound(
        f"no complementary pair within {n_attempts} attempts "
        f"(best worst-case condition {worst_cond_seen:.3e} at lambda={worst_lam})",
        worst_lam, worst_cond_seen)


def resolvent_eval(res: Resolvent, lam: complex) -> np.ndarray:
    """G(lambda): the generalized inverse of T - lambda*S with range E and
    null space F, from the two oblique projectors and a least-squares solve."""
    cp = res.complements
    if abs(lam) >= cp.valid_radius:
        raise ContractViolation(
            f"|lambda| = {abs(lam):.6g} is outside the validated disk "
            f"radius {cp.valid_radius:.6g}")
    mat = res.pencil.at(lam)
    ker = sub.kernel(mat, res.eps_rel)
    ran = sub.range_space(mat, res.eps_rel)
    q = sub.projector_along(cp.E, ker)       # onto E along N(T - lambda S)
    p_ = sub.projector_along(ran, cp.F)      # onto R(T - lambda S) along F
    return q.matrix @ mc.pseudo_inverse(mat, res.eps_rel) @ p_.matrix


def verify_resolvent(res: Resolvent, lam: complex, mu: complex):
    """Residuals of the three defining identities at (lambda, mu)."""
    g_lam = resolvent_eval(res, lam)
    g_mu = resolvent_eval(res, mu)
    mat = res.pencil.at(lam)
    r1 = mc.operator_norm(mat @ g_lam @ mat - mat)
    r2 = mc.operator_norm(g_lam @ mat @ g_lam - g_lam)
    r3 = mc.operator_norm(g_lam - g_mu - (lam - mu) * (g_lam @ res.pencil.S @ g_mu))
    return r1, r2, r3


def taylor_coefficients(res: Resolvent, n_max: int, n_points: int = 32,
                        radius_frac: float = 0.5) -> list[np.ndarray]:
    """Taylor coefficients of lambda -> G(lambda) at 0 by circle quadrature.

    Trapezoidal quadrature of the Cauchy integral on a circle well inside the
    validated disk; spectrally accurate, and independent of any series
    identity one might want to test against.
    """
    r = radius_frac * res.complements.valid_radius
    samples = [resolvent_eval(res, r * np.exp(2j * np.pi * k / n_points))
               for k in range(n_points)]
    coeffs = []
    for n in range(n_max + 1):
        acc = np.zeros_like(samples[0])
        for k, g in enumerate(samples):
            acc = acc + g * np.exp(-2j * np.pi * k * n / n_points)
        coeffs.append(acc / (n_points * r ** n))
    return coeffs


def neumann_alpha(p: Pencil, l: np.ndarray) -> float:
    """Radius of validity min(1/||SL||, 1/||LS||) of the Neumann family."""
    nsl = mc.operator_norm(p.S @ l)
    nls = mc.operator_norm(l @ p.S)
    a1 = math.inf if nsl == 0.0 else 1.0 / nsl
    a2 = math.inf if nls == 0.0 else 1.0 / nls
    return min(a1, a2)


def neumann_family(p: Pencil, l: np.ndarray, lam: complex) -> np.ndarray:
    """F(lambda) = L (I - lambda S L)^{-1}, defined for |lambda| < alpha."""
    l = np.asarray(l, dtype=np.complex128)
    alpha = neumann_alpha(p, l)
    if abs(lam) >= alpha:
        raise ContractViolation(
            f"|lambda| = {abs(lam):.6g} is not below alpha = {alpha:.6g}")
    eye = np.eye(p.y_dim, dtype=np.complex128)
    return l @ np.linalg.inv(eye - lam * (p.S @ l))


@dataclass(frozen=True)
class OptBudget:
    starts: int = 24
    evals: int = 2000
    seed: int = 0


@dataclass(frozen=True)
class StartOutcome:
    start_index: int
    kind: str
    sr: float
    L: np.ndarray
    evals: int


@dataclass(frozen=True)
class SrMinimization:
    """Result of the spectral-radius search over inner inverses."""

    best: GenInverse
    reflexive: GenInverse
    per_start: list[StartOutcome] = field(default_factory=list)
    evaluations: int = 0
    certificate: str = "true-spectral-radius"


def thread_count() -> int:
    raw = os.environ.get("PENCIL_RADIUS_THREADS", "").strip()
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        return 1


def _char_residual(a: np.ndarray) -> np.ndarray:
    """Non-leading characteristic-polynomial coefficients of ``a`` as a real
    vector; all of them vanish exactly when ``a`` is nilpotent."""
    w = np.linalg.eigvals(a)
    c = np.poly(w)[1:]
    return np.concatenate([np.real(c), np.imag(c)])


def _flush_canonical(z, l0, left, right):
    """Re-encode through the canonical Z = L - L0 and zero out noise-level
    coordinates (kills round-off riding along dead parametrization
    directions; the result is only ever accepted after honest re-evaluation)."""
    l = kern.inner_inverse_from_coords(z, l0, left, right)
    z_can = kern.pack_coords(l - l0)
    scale = max(1.0, float(np.abs(z_can).max()))
    z_can[np.abs(z_can) <= 1e-12 * scale] = 0.0
    return z_can


def _nilpotent_polish(z, sr, l0, left, right, s, max_iters=8):
    """Gauss-Newton descent of the characteristic coefficients of S L(z).

    Nelder-Mead stalls near the r(SL) = 0 stratum: the computed spectral
    radius of a nearly defective matrix has a sqrt(machine-eps) floor, so the
    simplex cannot tell late candidates apart.  The coefficient system is
    smooth there and Gauss-Newton reaches it quadratically.  Every candidate
    is verified with the true objective and kept only when it strictly
    improves, so this never degrades a start and asserts nothing it did not
    measure.
    """
    best_z, best_sr = z, sr
    cur = np.asarray(z, dtype=np.float64).copy()
    evals = 0
    for _ in range(max_iters):
        a = s @ kern.inner_inverse_from_coords(cur, l0, left, right)
        f0 = _char_residual(a)
        if not np.all(np.isfinite(f0)) or np.linalg.norm(f0) == 0.0:
            break
        h = 1e-7 * (1.0 + float(np.abs(cur).max()))
        jac = np.empty((f0.size, cur.size))
        for j in range(cur.size):
            zp = cur.copy()
            zp[j] += h
            ap = s @ kern.inner_inverse_from_coords(zp, l0, left, right)
            jac[:, j] = (_char_residual(ap) - f0) / h
            evals += 1
        step, *_ = np.linalg.lstsq(jac, -f0, rcond=None)
        if not np.all(np.isfinite(step)):
            break
        cur = _flush_canonical(cur + step, l0, left, right)
        sr_new = float(kern.objective(cur, l0, left, right, s, 0))
        evals += 1
        if sr_new < best_sr:
            best_z, best_sr = cur.copy(), sr_new
        if np.linalg.norm(step) <= 1e-15 * (1.0 + np.linalg.norm(cur)):
            break
    return best_z, best_sr, evals


def _run_start(z0, scale, l0, left, right, s, max_evals, z_cap):
    """Surrogate stages then true-spectral-radius polish, with rescale
    restarts whenever the simplex collapses early."""
    stage_budget = [max_evals // 6, max_evals // 6, max_evals // 6, 0]
    stage_budget[3] = max_evals - sum(stage_budget[:3])
    z = z0.copy()
    total = 0
    f_final = math.inf
    for mode, budget in zip((*SURROGATE_MODES, 0), stage_budget):
        if budget <= 0:
            continue
        step = scale
        spent = 0
        while spent < budget:
            z_new, f_new, ev, converged = kern.nelder_mead(
                z, step, l0, left, right, s, mode, budget - spent, z_cap)
            spent += ev
            z = z_new
            if mode == 0:
                f_final = f_new
            if not converged:
                break
            step *= 0.25
            if step < 1e-14 * (1.0 + float(np.abs(z).max())):
                break
        total += spent
    if f_final is math.inf:
        f_final = float(kern.objective(z, l0, left, right, s, 0))
        total += 1
    return z, f_final, total


def minimize_sr(p: Pencil, budget: OptBudget = OptBudget(),
                eps_rel: float = mc.EPS_REL_DEFAULT,
                oracle_radius: float | None = None) -> SrMinimization:
    """Multi-start Nelder-Mead minimization of the spectral radius of S L
    over the inner-inverse parametrization.

    Starts: the pseudoinverse (Z = 0), the resolvent value G(0) from fixed
    complements on disks grown toward ``oracle_radius`` when available, and
    seeded random Z at several scales.  Each start runs the norm surrogates
    ||(SL)^k||^(1/k) for k = 4, 8, 16 before polishing on the true spectral
    radius, so every incumbent is a one-sided certificate.  Selection is the
    lexicographic argmin on (sr, start index) for reproducibility.
    """
    l0 = mc.pseudo_inverse(p.T, eps_rel)
    left = np.ascontiguousarray(l0 @ p.T)
    right = np.ascontiguousarray(p.T @ l0)
    s_mat = np.ascontiguousarray(p.S)
    dim = 2 * p.x_dim * p.y_dim
    rng = np.random.default_rng(budget.seed)
    scale0 = 0.25 * (1.0 + float(np.linalg.norm(l0)))

    starts: list[tuple[str, np.ndarray, float]] = [
        ("pseudoinverse", np.zeros(dim), scale0)]
    if oracle_radius is not None and math.isfinite(oracle_radius) and oracle_radius > 0:
        g0 = None
        for frac in (0.3, 0.6, 0.9):
            try:
                cp = find_fixed_complements(p, frac * oracle_radius,
                                            seed=budget.seed, eps_rel=eps_rel)
                g0 = resolvent_eval(Resolvent(p, cp, eps_rel), 0.0)
            except (ConstancyViolated, NoComplementFound):
                break
        if g0 is not None:
            starts.append(("resolvent", kern.pack_coords(g0 - l0), scale0))
    while len(starts) < max(1, budget.starts):
        sigma = scale0 * float(2.0 ** rng.integers(-1, 4))
        z = sigma * rng.standard_normal(dim)
        starts.append((f"random-{len(starts)}", z, sigma))

    per_eval = max(8, budget.evals)
    base_cap = 1e4 * (1.0 + float(np.abs(l0).max()))

    def run(idx_start):
        idx, (kind, z0, scale) = idx_start
        z_cap = base_cap + 10.0 * float(np.abs(z0).max())
        z, f, ev = _run_start(z0, scale, l0, left, right, s_mat, per_eval, z_cap)
        l = kern.inner_inverse_from_coords(z, l0, left, right)
        return StartOutcome(idx, kind, float(f), np.asarray(l), ev)

    workers = min(thread_count(), len(starts))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, enumerate(starts)))
    else:
        outcomes = [run(item) for item in enumerate(starts)]

    # polish the leading starts toward the r(SL) = 0 stratum; no-op unless it
    # verifiably improves them
    extra_evals = 0
    ranked = sorted(range(len(outcomes)), key=lambda i: (outcomes[i].sr,
                                                         outcomes[i].start_index))
    for i in ranked[:3]:
        o = outcomes[i]
        z = kern.pack_coords(o.L - l0)
        z2, sr2, ev = _nilpotent_polish(z, o.sr, l0, left, right, s_mat)
        extra_evals += ev
        if sr2 < o.sr:
            l2 = kern.inner_inverse_from_coords(z2, l0, left, right)
            outcomes[i] = StartOutcome(o.start_index, o.kind, sr2,
                                       np.asarray(l2), o.evals + ev)

    # selection gate: a winner must actually verify as an inner inverse (far
    # from the origin the parametrization identity can drown in round-off)
    norm_t = mc.operator_norm(p.T)
    verified = [o for o in outcomes
                if mc.operator_norm(p.T @ o.L @ p.T - p.T) <= INNER_TOL * (1.0 + norm_t)]
    pool_ = verified if verified else outcomes
    winner = min(pool_, key=lambda o: (o.sr, o.start_index))
    best = classify(p.T, winner.L, p.S)
    refl = reflexive_closure(p.T, winner.L, p.S)
    certificate = "true-spectral-radius" if budget.evals > 0 else "norm-surrogate"
    return SrMinimization(best, refl, outcomes,
                          sum(o.evals for o in outcomes) + extra_evals, certificate)
