"""Test-corpus pencils with planted ground truth.

Three kinds:

* ``regular``     - square, T invertible, det(T - lambda S) vanishing exactly
                    at the requested drop points, stability number 0;
* ``rectangular`` - a 2x3 core whose rows become dependent exactly at
                    lambda = 1, padded with an identity/zero block;
* ``k-positive``  - a diag(1, 0) core against the identity, so the kernel
                    dimension jumps at the origin and k >= 1.
"""

from __future__ import annotations

import numpy as np

from .exceptions import ContractViolation
from .pencil import Pencil

KINDS = ("regular", "rectangular", "k-positive")

RECT_T = np.array([[1, 0, 0], [0, 1, 0]], dtype=np.complex128)
RECT_S = np.array([[0, 0, 0], [-1, 1, 0]], dtype=np.complex128)


def well_conditioned(n: int, rng: np.random.Generator, cond_max: float = 10.0) -> np.ndarray:
    """Random square matrix with condition number at most cond_max."""
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    u, _, vh = np.linalg.svd(a)
    spread = np.sqrt(cond_max)
    sigmas = np.exp(np.log(1.0 / spread) + rng.random(n) * np.log(spread * spread))
    return (u * sigmas) @ vh


def generate(kind: str, n: int, p: int | None, drops, seed: int):
    """Build a planted pencil; returns (Pencil, metadata dict)."""
    if kind not in KINDS:
        raise ContractViolation(f"unknown kind {kind!r}; expected one of {KINDS}")
    rng = np.random.default_rng(seed)
    if kind == "regular":
        return _regular(n, list(drops or []), rng, seed)
    if drops:
        raise ContractViolation(f"kind={kind} does not take planted drop points")
    if kind == "rectangular":
        return _rectangular(n, p, rng, seed)
    return _k_positive(n, p, rng, seed)


def _regular(n: int, drops: list[complex], rng: np.random.Generator, seed: int):
    if not drops:
        raise ContractViolation("kind=regular needs at least one drop point")
    moduli = [abs(complex(d)) for d in drops]
    if min(moduli) == 0.0:
        raise ContractViolation("drop points must be nonzero")
    if len(set(np.round(moduli, 12))) != len(moduli):
        raise ContractViolation("drop moduli must be pairwise distinct")
    if len(drops) > n:
        raise ContractViolation(f"at most n={n} drop points fit an n x n pencil")
    diag_s = np.zeros(n, dtype=np.complex128)
    diag_t = np.zeros(n, dtype=np.complex128)
    scales = np.exp(rng.uniform(np.log(0.5), np.log(2.0), size=n))
    for i, lam in enumerate(drops):
        diag_s[i] = scales[i]
        diag_t[i] = complex(lam) * scales[i]
    for i in range(len(drops), n):
        diag_s[i] = 0.0
        diag_t[i] = scales[i]        # this factor of det(T - lambda S) never vanishes
    left = well_conditioned(n, rng)
    right = well_conditioned(n, rng)
    t = left @ np.diag(diag_t) @ right
    s = left @ np.diag(diag_s) @ right
    meta = {
        "kind": "regular", "n": n, "p": n, "seed": seed,
        "planted_drops": [[complex(d).real, complex(d).imag] for d in drops],
        "planted_k": 0,
    }
    return Pencil(t, s), meta


def _rectangular(n: int, p: int | None, rng: np.random.Generator, seed: int):
    n = max(n, 3)
    p = n - 1 if p is None else p
    if p != n - 1:
        raise ContractViolation(
            f"kind=rectangular pads the 2x3 core with a square block, "
            f"so p must be n-1 (got n={n}, p={p})")
    pad = n - 3
    t = np.zeros((p, n), dtype=np.complex128)
    s = np.zeros((p, n), dtype=np.complex128)
    t[:2, :3] = RECT_T
    s[:2, :3] = RECT_S
    if pad:
        t[2:, 3:] = np.eye(pad)
    meta = {
        "kind": "rectangular", "n": n, "p": p, "seed": seed,
        "planted_drops": [[1.0, 0.0]],
        "planted_k": 0,
    }
    return Pencil(t, s), meta


def _k_positive(n: int, p: int | None, rng: np.random.Generator, seed: int):
    n = max(n, 2)
    if p is not None and p != n:
        raise ContractViolation(f"kind=k-positive is square (got n={n}, p={p})")
    diag = np.ones(n, dtype=np.complex128)
    diag[1] = 0.0
    t = np.diag(diag)
    s = np.eye(n, dtype=np.complex128)
    meta = {
        "kind": "k-positive", "n": n, "p": n, "seed": seed,
        "planted_drops": [[1.0, 0.0]],
        "planted_k": 1,
    }
    return Pencil(t, s), meta
