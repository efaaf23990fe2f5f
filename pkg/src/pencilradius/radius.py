"""The three stability-radius estimators and their comparison report.

The stability radius of a pencil is the distance from 0 to the nearest
``drop point``: a nonzero lambda where rank(T - lambda*S) falls below its
generic value (for matrices, rank/kernel-dimension discontinuities are the
whole story).  Three independent routes are computed and compared:

* d_oracle   - locates drop points from determinants of the pencil or of
               random compressions of it, interpolated on scaled circles and
               solved through a companion matrix;
* d_bartlay  - the chain-limit estimate lim gamma_m^(1/m), read off the
               gamma table through a ratio (or root) estimator;
* d_geninv   - 1 / r(S L) for the best inner inverse the optimizer finds; a
               one-sided certificate whenever the stability number is 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import matrixcore as mc
from . import pencil as pen
from .exceptions import ContractViolation, NotStabilized, OracleUnreliable
from .geninv import OptBudget, SrMinimization, minimize_sr
from .pencil import Pencil

WARN_HYPOTHESIS = "HypothesisViolated"
WARN_ILL_RANK = "IllConditionedRank"
WARN_SLOW = "SlowConvergence"
WARN_ORACLE = "OracleUnreliable"
WARN_NOT_STABILIZED = "NotStabilized"

SR_INF_TOL = 1e-8   # r(SL) at or below this scale-relative level reports 1/r = inf
ZERO_DROP_TOL = 1e-9  # |lambda| below this (times scale) is the origin, not a drop


@dataclass(frozen=True)
class SearchConfig:
    eps_rel: float = mc.EPS_REL_DEFAULT
    r_max: float | None = None        # None: auto from the norms of T and S
    n_rank_samples: int = 16
    n_compressions: int = 3
    cluster_tol: float = 1e-6
    drop_tol_factor: float = 1e-7
    seed: int = 0


@dataclass(frozen=True)
class OracleResult:
    d: float
    drop_points: list          # complex, ascending modulus
    generic_rank: int
    r_max: float
    min_gap_ratio: float


@dataclass(frozen=True)
class GammaRow:
    m: int
    value: float
    root: float       # gamma_m^(1/m)
    ratio: float      # gamma_{m+1} / gamma_m (nan on the last row)


@dataclass(frozen=True)
class BartLayResult:
    d: float
    table: list[GammaRow]
    slow_convergence: bool


@dataclass(frozen=True)
class GenInvResult:
    d: float
    d_from_best: float
    d_from_reflexive: float
    witness: SrMinimization
    certificate: str


@dataclass(frozen=True)
class RadiusReport:
    d_oracle: float | None
    drop_points: list
    d_bartlay: float | None
    gamma_table: list[GammaRow]
    d_geninv: float | None
    witness_L: np.ndarray | None
    certificate: str
    k: int | None
    warnings: list = field(default_factory=list)
    disagreement: float | None = None
    seed: int = 0
    eps_rel: float = mc.EPS_REL_DEFAULT
    m_max: int = 12


def _auto_r_max(p: Pencil, eps_rel: float) -> float:
    s_vals = np.linalg.svd(p.S, compute_uv=False)
    tol = eps_rel * max(p.S.shape) * (float(s_vals[0]) if s_vals.size else 0.0)
    positive = s_vals[s_vals > tol]
    if positive.size == 0:
        return math.inf
    return 2.0 * (1.0 + mc.operator_norm(p.T) / float(positive[-1]))


def _det_roots(mat_at, degree_bound: int, sample_radius: float) -> np.ndarray:
    """Roots of lambda -> det(mat_at(lambda)) via FFT interpolation on a
    scaled circle and a companion-matrix solve."""
    n_pts = max(degree_bound + 1, 8)
    lams = sample_radius * np.exp(2j * np.pi * np.arange(n_pts) / n_pts)
    vals = np.array([np.linalg.det(mat_at(lam)) for lam in lams])
    vmax = float(np.abs(vals).max())
    if vmax == 0.0:
        return None  # identically singular along the circle
    vals = vals / vmax
    scaled = np.fft.fft(vals) / n_pts   # c_j * r^j  (samples sit at +2*pi*i*k/N)
    coeffs = scaled / (sample_radius ** np.arange(n_pts))
    mags = np.abs(scaled)
    keep = np.nonzero(mags > 1e-12 * mags.max())[0]
    if keep.size == 0 or keep[-1] == 0:
        return np.zeros(0, dtype=np.complex128)
    deg = int(keep[-1])
    return np.roots(coeffs[:deg + 1][::-1])


def _polish_root(mat_at, lam: complex, sigma_index: int, steps: int = 12) -> complex:
    """Local minimization of sigma_rho along small moduli moves (keeps the
    companion-matrix roots honest at 1e-8 and better)."""
    def sig(x):
        s = np.linalg.svd(mat_at(x), compute_uv=False)
        return float(s[sigma_index]) if sigma_index < s.size else 0.0

    h = 1e-6 * (1.0 + abs(lam))
    cur = lam
    val = sig(cur)
    for _ in range(steps):
        candidates = [cur + h, cur - h, cur + 1j * h, cur - 1j * h]
        vals = [sig(c) for c in candidates]
        best = int(np.argmin(vals))
        if vals[best] < val:
            cur, val = candidates[best], vals[best]
        else:
            h *= 0.25
            if h < 1e-14 * (1.0 + abs(cur)):
                break
    return cur


def d_oracle(p: Pencil, search: SearchConfig = SearchConfig()):
    """Locate drop points and the stability radius they imply.

    Returns an OracleResult; raises OracleUnreliable when independent
    compressions of a rectangular/singular pencil disagree about a confirmed
    drop point.
    """
    eps = search.eps_rel
    norm_t = mc.operator_norm(p.T)
    norm_s = mc.operator_norm(p.S)
    if norm_s <= eps * max(norm_t, 1.0):
        # S vanishes: the pencil is constant and never loses rank
        rk = mc.rank_with_tol(p.T, eps)
        return OracleResult(math.inf, [], rk.rank, math.inf, rk.gap_ratio)

    r_max = search.r_max if search.r_max is not None else _auto_r_max(p, eps)
    r0 = min(max(norm_t / norm_s, 0.25), 8.0)
    rng = np.random.default_rng(search.seed)

    min_gap = math.inf
    generic_rank = 0
    for _ in range(search.n_rank_samples):
        lam = r0 * (0.2 + 0.8 * rng.random()) * np.exp(2j * np.pi * rng.random())
        decision = mc.rank_with_tol(p.at(lam), eps)
        generic_rank = max(generic_rank, decision.rank)
        min_gap = min(min_gap, decision.gap_ratio)

    n, q = p.x_dim, p.y_dim
    sigma_index = generic_rank - 1  # 0-based index of sigma_rho

    def confirmed(lam: complex) -> bool:
        s = np.linalg.svd(p.at(lam), compute_uv=False)
        if sigma_index >= s.size:
            return False
        return float(s[sigma_index]) < search.drop_tol_factor * float(s[0])

    candidates: list[complex] = []
    if n == q and generic_rank == n:
        roots = _det_roots(p.at, n, r0)
        if roots is None:
            raise OracleUnreliable(
                "determinant vanished on the whole sampling circle despite a "
                "full generic rank", {"radius": r0})
        candidates = [complex(r) for r in roots]
    else:
        root_sets = []
        for _ in range(search.n_compressions):
            u = rng.standard_normal((generic_rank, q)) + 1j * rng.standard_normal(
                (generic_rank, q))
            v = rng.standard_normal((n, generic_rank)) + 1j * rng.standard_normal(
                (n, generic_rank))
            u /= np.linalg.norm(u)
            v /= np.linalg.norm(v)
            roots = _det_roots(lambda lam: u @ p.at(lam) @ v, generic_rank, r0)
            if roots is None:
                raise OracleUnreliable(
                    "a random compression is identically singular",
                    {"radius": r0})
            root_sets.append(np.asarray(roots, dtype=np.complex128))

        def has_match(lam, arr):
            if arr.size == 0:
                return False
            return bool(np.min(np.abs(arr - lam)) <=
                        search.cluster_tol * max(1.0, abs(lam)))

        common, strays = [], []
        for lam in root_sets[0]:
            if all(has_match(lam, other) for other in root_sets[1:]):
                common.append(complex(lam))
            else:
                strays.append(complex(lam))
        for arr in root_sets[1:]:
            for lam in arr:
                if not has_match(lam, root_sets[0]):
                    strays.append(complex(lam))

        confirmed_strays = [lam for lam in strays
                            if abs(lam) <= 4.0 * r_max and confirmed(
                                _polish_root(p.at, lam, sigma_index))]
        if confirmed_strays:
            raise OracleUnreliable(
                "compressions disagree on a confirmed drop point",
                {"strays": confirmed_strays})
        candidates = common

    drops: list[complex] = []
    for lam in candidates:
        lam = _polish_root(p.at, lam, sigma_index)
        if not confirmed(lam):
            continue
        if any(abs(lam - d) <= search.cluster_tol * max(1.0, abs(lam)) for d in drops):
            continue
        drops.append(lam)
    drops.sort(key=abs)

    zero_tol = ZERO_DROP_TOL * max(1.0, r0)
    eligible = [abs(d) for d in drops if abs(d) > zero_tol and abs(d) <= r_max * (1 + 1e-9)]
    d = min(eligible) if eligible else math.inf
    return OracleResult(d, drops, generic_rank, r_max, min_gap)


def d_bartlay(p: Pencil, m_max: int = 12,
              eps_rel: float = mc.EPS_REL_DEFAULT) -> BartLayResult:
    """Chain-limit estimate from the gamma table.

    The primary estimator is the last forward ratio gamma_{m+1}/gamma_m when
    the final three ratios agree to 1e-3 relative (for gamma_m ~ c d^m the
    ratio converges geometrically).  Otherwise the last root is used with a
    SlowConvergence flag, normalized as (gamma_m / ||S||)^(1/m): the plain
    root is off by ||S||^(1/m) under rescaling of the pencil, whereas the
    normalized form has the same limit and transforms exactly like the
    stability radius (invariant under (cT, cS), covariant under (cT, S)).
    +inf gammas propagate to +inf.
    """
    if m_max < 3:
        raise ContractViolation(f"m_max must be >= 3, got {m_max}")
    values = [pen.gamma_m(p, m, eps_rel) for m in range(1, m_max + 1)]
    rows = []
    for i, g in enumerate(values):
        m = i + 1
        root = g if math.isinf(g) else (0.0 if g == 0.0 else g ** (1.0 / m))
        nxt = values[i + 1] if i + 1 < len(values) else None
        if nxt is None or g == 0.0 or (math.isinf(g) and math.isinf(nxt)):
            ratio = math.nan
        else:
            ratio = nxt / g
        rows.append(GammaRow(m, g, root, ratio))

    if math.isinf(values[-1]):
        return BartLayResult(math.inf, rows, False)
    ratios = [r.ratio for r in rows if math.isfinite(r.ratio)]
    if len(ratios) >= 3:
        tail = ratios[-3:]
        scale = max(abs(tail[-1]), 1e-300)
        if max(tail) - min(tail) <= 1e-3 * scale:
            return BartLayResult(tail[-1], rows, False)
    norm_s = mc.operator_norm(p.S)
    last = values[-1] / norm_s if norm_s > 0.0 else values[-1]
    return BartLayResult(last ** (1.0 / m_max) if last > 0.0 else 0.0, rows, True)


def d_geninv(p: Pencil, budget: OptBudget = OptBudget(),
             eps_rel: float = mc.EPS_REL_DEFAULT,
             oracle_radius: float | None = None) -> GenInvResult:
    """1 / r(S L) for the optimizer's best inner inverse and its reflexive
    closure (both are reported; the larger is the estimate)."""
    result = minimize_sr(p, budget, eps_rel, oracle_radius)
    scale = mc.operator_norm(p.S)

    def invert(gi):
        sr = gi.sr_SL
        tol = SR_INF_TOL * (1.0 + scale * mc.operator_norm(gi.L))
        return math.inf if sr <= tol else 1.0 / sr

    from_best = invert(result.best)
    from_refl = invert(result.reflexive)
    return GenInvResult(max(from_best, from_refl), from_best, from_refl,
                        result, result.certificate)


def full_report(p: Pencil, search: SearchConfig = SearchConfig(),
                budget: OptBudget = OptBudget(), m_max: int = 12,
                eps_rel: float = mc.EPS_REL_DEFAULT) -> RadiusReport:
    """Run the stability-number gate and all three estimators, collecting
    warnings instead of failing.

    When the stability number k is nonzero the hypothesis behind the
    generalized-inverse representation fails: the report then carries
    HypothesisViolated and presents 1/r(SL) as an observation only, since
    whether the supremum equals the stability radius without that hypothesis
    is an open question.
    """
    warnings: list[dict] = []
    min_gap = math.inf

    k = None
    try:
        limits = pen.limit_spaces(p, eps_rel=eps_rel)
        k = limits.k
        min_gap = min(min_gap, limits.min_gap_ratio)
    except NotStabilized as exc:
        warnings.append({"kind": WARN_NOT_STABILIZED, "detail": str(exc)})

    oracle = None
    try:
        oracle = d_oracle(p, search)
        min_gap = min(min_gap, oracle.min_gap_ratio)
    except OracleUnreliable as exc:
        warnings.append({"kind": WARN_ORACLE, "detail": str(exc),
                         "diagnostics": repr(exc.diagnostics)})

    bartlay = d_bartlay(p, m_max, eps_rel)
    if bartlay.slow_convergence:
        warnings.append({
            "kind": WARN_SLOW,
            "detail": "gamma ratios did not settle; root estimator used"})

    geninv = d_geninv(p, budget, eps_rel,
                      oracle.d if oracle is not None else None)

    if k is not None and k != 0:
        warnings.append({
            "kind": WARN_HYPOTHESIS,
            "detail": (
                f"hypothesis dim N(T-lambda S) constant fails near 0 (k={k}); "
                "1/r(SL) is reported as an observation only - whether its "
                "supremum equals the stability radius without this hypothesis "
                "is an open question")})
    if min_gap < mc.GAP_RATIO_WARN:
        warnings.append({
            "kind": WARN_ILL_RANK,
            "detail": f"a rank decision had gap ratio {min_gap:.3e} < 1e3"})

    estimates = [x for x in (oracle.d if oracle else None, bartlay.d, geninv.d)
                 if x is not None and math.isfinite(x)]
    disagreement = None
    if len(estimates) >= 2:
        lo, hi = min(estimates), max(estimates)
        disagreement = (hi - lo) / max(hi, 1e-300)

    return RadiusReport(
        d_oracle=oracle.d if oracle else None,
        drop_points=oracle.drop_points if oracle else [],
        d_bartlay=bartlay.d,
        gamma_table=bartlay.table,
        d_geninv=geninv.d,
        witness_L=geninv.witness.best.L,
        certificate=geninv.certificate,
        k=k,
        warnings=warnings,
        disagreement=disagreement,
        seed=search.seed,
        eps_rel=eps_rel,
        m_max=m_max,
    )
