"""Hot kernels for the inner-inverse spectral-radius search.

Every function here is written as plain numpy and compiled with numba's
``@njit`` when available.  Setting the environment variable
``PENCIL_RADIUS_NO_NUMBA=1`` (or numba being absent) selects the pure-numpy
path; both paths compute the same numbers.  ``benchmarks/bench_kernels.py``
times the two against each other.

The objective of the search: given a fixed inner inverse L0 of T and the
precomputed products LEFT = L0 @ T and RIGHT = T @ L0, every real coordinate
vector z of length 2*n*p encodes a free matrix Z, and

    L(Z) = L0 + Z - LEFT @ Z @ RIGHT

is an inner inverse of T.  ``mode`` selects the figure of merit for S @ L(Z):
mode 0 is the true spectral radius, mode j >= 1 the norm surrogate
||(S L)^(2^j)||^(1/2^j), an upper bound on the spectral radius.
"""

import os

import numpy as np

_DISABLE = os.environ.get("PENCIL_RADIUS_NO_NUMBA", "").strip().lower() in {
    "1", "true", "yes", "on"}

try:
    import numba
    HAVE_NUMBA = True
except ImportError:
    numba = None
    HAVE_NUMBA = False

NUMBA_ENABLED = HAVE_NUMBA and not _DISABLE

if NUMBA_ENABLED:
    def _jit(f):
        return numba.njit(cache=True, nogil=True)(f)
else:
    def _jit(f):
        return f


@_jit
def unpack_coords(z, n, p):
    """Real coordinate vector (re, im interleaved) -> complex n x p matrix."""
    out = np.empty((n, p), dtype=np.complex128)
    for i in range(n):
        for j in range(p):
            k = 2 * (i * p + j)
            out[i, j] = complex(z[k], z[k + 1])
    return out


@_jit
def pack_coords(mat):
    """Inverse of unpack_coords."""
    n, p = mat.shape
    z = np.empty(2 * n * p, dtype=np.float64)
    for i in range(n):
        for j in range(p):
            k = 2 * (i * p + j)
            z[k] = mat[i, j].real
            z[k + 1] = mat[i, j].imag
    return z


@_jit
def inner_inverse_from_coords(z, l0, left, right):
    """L(Z) = L0 + Z - LEFT @ Z @ RIGHT for the Z encoded by z."""
    zm = unpack_coords(z, l0.shape[0], l0.shape[1])
    return l0 + zm - left @ (zm @ right)


@_jit
def max_abs_eigenvalue(a):
    w = np.linalg.eigvals(a)
    best = 0.0
    for i in range(w.shape[0]):
        v = abs(w[i])
        if v > best:
            best = v
    return best


@_jit
def surrogate_norm(a, k_log2):
    """||a^(2^k_log2)||_2 ^ (1 / 2^k_log2), overflow-safe."""
    b = a.copy()
    log_scale = 0.0
    for _ in range(k_log2):
        b = b @ b
        scale = 0.0
        for i in range(b.shape[0]):
            for j in range(b.shape[1]):
                v = abs(b[i, j])
                if v > scale:
                    scale = v
        if scale == 0.0:
            return 0.0
        b = b / scale
        log_scale = 2.0 * log_scale + np.log(scale)
    s = np.linalg.svd(b, full_matrices=False)[1]
    if s[0] == 0.0:
        return 0.0
    k = 1 << k_log2
    return np.exp((np.log(s[0]) + log_scale) / k)


@_jit
def objective(z, l0, left, right, s, mode):
    """Figure of merit for S @ L(z): spectral radius (mode 0) or surrogate."""
    l = inner_inverse_from_coords(z, l0, left, right)
    sl = s @ l
    if mode == 0:
        return max_abs_eigenvalue(sl)
    return surrogate_norm(sl, mode)


@_jit
def nelder_mead(z0, step, l0, left, right, s, mode, max_evals, z_cap):
    """Nelder-Mead simplex descent of ``objective`` starting at z0.

    Coordinates beyond z_cap in magnitude are rejected with a barrier value:
    out there the parametrized inverse is pure cancellation noise and the
    objective would reward round-off dips.  Returns (best_z, best_f, evals,
    converged) where converged means the simplex collapsed (function spread
    and edge lengths both tiny) before the evaluation budget ran out.
    """

    def _f(z):
        if np.abs(z).max() > z_cap:
            return 1e300
        return objective(z, l0, left, right, s, mode)

    dim = z0.shape[0]
    n_vert = dim + 1
    simplex = np.empty((n_vert, dim), dtype=np.float64)
    fvals = np.empty(n_vert, dtype=np.float64)
    simplex[0] = z0
    fvals[0] = _f(z0)
    evals = 1
    for i in range(dim):
        simplex[i + 1] = z0
        simplex[i + 1, i] += step
        fvals[i + 1] = _f(simplex[i + 1])
        evals += 1

    converged = False
    while evals < max_evals:
        order = np.argsort(fvals)
        simplex = simplex[order]
        fvals = fvals[order]

        spread = fvals[-1] - fvals[0]
        edge = 0.0
        for i in range(1, n_vert):
            d = 0.0
            for j in range(dim):
                v = abs(simplex[i, j] - simplex[0, j])
                if v > d:
                    d = v
            if d > edge:
                edge = d
        if spread <= 1e-14 * (abs(fvals[0]) + 1e-30) and edge <= 1e-14 * (
                1.0 + np.abs(simplex[0]).max()):
            converged = True
            break

        centroid = np.zeros(dim, dtype=np.float64)
        for i in range(dim):
            acc = 0.0
            for v in range(n_vert - 1):
                acc += simplex[v, i]
            centroid[i] = acc / (n_vert - 1)

        reflected = centroid + (centroid - simplex[-1])
        f_r = _f(reflected)
        evals += 1
        if f_r < fvals[0]:
            expanded = centroid + 2.0 * (centroid - simplex[-1])
            f_e = _f(expanded)
            evals += 1
            if f_e < f_r:
                simplex[-1] = expanded
                fvals[-1] = f_e
            else:
                simplex[-1] = reflected
                fvals[-1] = f_r
        elif f_r < fvals[-2]:
            simplex[-1] = reflected
            fvals[-1] = f_r
        else:
            if f_r < fvals[-1]:
                contracted = centroid + 0.5 * (reflected - centroid)
            else:
                contracted = centroid + 0.5 * (simplex[-1] - centroid)
            f_c = _f(contracted)
            evals += 1
            if f_c < min(f_r, fvals[-1]):
                simplex[-1] = contracted
                fvals[-1] = f_c
            else:
                # shrink toward the best vertex
                for i in range(1, n_vert):
                    simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0])
                    fvals[i] = _f(simplex[i])
                    evals += 1

    best = int(np.argmin(fvals))
    return simplex[best].copy(), fvals[best], evals, converged
