"""PSD-affine feasibility by Dykstra-corrected alternating projections.

The solver looks for a Hermitian matrix inside the intersection of an affine
set (given by a real linear system over Hermitian coordinates) and the PSD
cone.  The affine projection uses a precomputed pseudo-inverse, so it is
exact; the Dykstra correction is applied on the cone side only, which is the
standard simplification when the other factor is affine.

Hermitian n x n matrices are coordinatised in an orthonormal real basis, so
Euclidean geometry in coordinates coincides with Frobenius geometry on
matrices and both projections are genuine nearest-point maps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .config import DEFAULTS, resolve
from .linalg import herm_eig

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
UNDETERMINED = "undetermined"

_SQRT2 = np.sqrt(2.0)


@lru_cache(maxsize=None)
def hermitian_basis(n: int) -> np.ndarray:
    """Orthonormal real basis of the Hermitian n x n matrices, shape (n^2, n, n).

    Ordering: the n diagonal units, then the symmetric combinations over the
    upper triangle in row-major order, then the antisymmetric ones.
    """
    mats = []
    for p in range(n):
        m = np.zeros((n, n), dtype=complex)
        m[p, p] = 1.0
        mats.append(m)
    pairs = [(p, q) for p in range(n) for q in range(p + 1, n)]
    for p, q in pairs:
        m = np.zeros((n, n), dtype=complex)
        m[p, q] = 1 / _SQRT2
        m[q, p] = 1 / _SQRT2
        mats.append(m)
    for p, q in pairs:
        m = np.zeros((n, n), dtype=complex)
        m[p, q] = 1j / _SQRT2
        m[q, p] = -1j / _SQRT2
        mats.append(m)
    out = np.array(mats)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _triu(n: int):
    return np.triu_indices(n, 1)


def to_coords(m: np.ndarray, n: int) -> np.ndarray:
    """Coordinates of a Hermitian matrix in the orthonormal basis above."""
    iu, ju = _triu(n)
    off = m[iu, ju]
    return np.concatenate([np.diagonal(m).real, _SQRT2 * off.real, _SQRT2 * off.imag])


def from_coords(x: np.ndarray, n: int) -> np.ndarray:
    m = np.zeros((n, n), dtype=complex)
    iu, ju = _triu(n)
    k = len(iu)
    off = (x[n:n + k] + 1j * x[n + k:]) / _SQRT2
    m[iu, ju] = off
    m[ju, iu] = off.conj()
    m[np.diag_indices(n)] = x[:n]
    return m


def realify(a_complex: np.ndarray, b_complex: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Rewrite complex constraints on vec(C) as real constraints on Hermitian coordinates."""
    basis = hermitian_basis(n)
    v = basis.reshape(n * n, n * n).T  # column k is vec of basis element k
    m = a_complex @ v
    a_real = np.vstack([m.real, m.imag])
    b_real = np.concatenate([b_complex.real, b_complex.imag])
    return a_real, b_real


@dataclass
class ProjectionReport:
    """Outcome of one alternating-projection run."""

    status: str
    point: np.ndarray | None
    gap: float
    iterations: int
    affine_residual: float
    psd_residual: float
    gap_history: list[float] = field(default_factory=list)


def _psd_project_coords(x: np.ndarray, n: int) -> np.ndarray:
    w, v = herm_eig(from_coords(x, n))
    w = np.maximum(w, 0.0)
    m = (v * w) @ v.conj().T
    return to_coords((m + m.conj().T) / 2, n)


def solve(a_real: np.ndarray, b_real: np.ndarray, n: int,
          seed_point: np.ndarray | None = None,
          max_iter: int | None = None,
          affine_tol: float | None = None,
          psd_tol: float | None = None,
          gap_tol: float | None = None,
          stall_rel: float | None = None,
          stall_window: int | None = None) -> ProjectionReport:
    """Search the intersection of {A x = b} with the PSD cone.

    Starts from the affine projection of ``seed_point`` (of the zero matrix
    by default, the minimum-norm affine point).  Reports ``feasible`` with a
    witness once residuals drop below tolerance, ``infeasible`` once the gap
    between the two sets stalls above ``gap_tol``, and ``undetermined`` at
    the iteration cap.  Raises ``ValueError`` when the affine system itself
    is inconsistent.
    """
    max_iter = int(resolve(max_iter, DEFAULTS.max_iter))
    affine_tol = resolve(affine_tol, DEFAULTS.affine_tol)
    psd_tol = resolve(psd_tol, DEFAULTS.psd_tol)
    gap_tol = resolve(gap_tol, DEFAULTS.gap_tol)
    stall_rel = resolve(stall_rel, DEFAULTS.stall_rel)
    stall_window = int(resolve(stall_window, DEFAULTS.stall_window))

    pinv = np.linalg.pinv(a_real)
    base = pinv @ b_real
    b_floor = max(1.0, float(np.max(np.abs(b_real))) if b_real.size else 1.0)
    if a_real.size and np.max(np.abs(a_real @ base - b_real)) > affine_tol * b_floor:
        raise ValueError("affine constraint system is inconsistent")
    # projection onto {Ax = b} as one dense matrix, plus its residual bound:
    # ||A z - b||_inf <= rowmax * ||z - P(z)||_2 with rowmax the largest row norm
    proj = np.eye(a_real.shape[1]) - pinv @ a_real
    rowmax = float(np.sqrt((a_real * a_real).sum(axis=1).max())) if a_real.size else 0.0

    if seed_point is not None:
        z0 = to_coords(np.asarray(seed_point, dtype=complex), n)
        x = proj @ z0 + base
    else:
        x = base.copy()
    p = np.zeros_like(x)
    history: list[float] = []
    affine_thr = affine_tol * b_floor

    for it in range(1, max_iter + 1):
        y = _psd_project_coords(x + p, n)
        p = x + p - y
        x = proj @ y + base
        gap = float(np.linalg.norm(x - y))
        history.append(gap)

        # y is PSD exactly; accept it once its affine residual qualifies.
        if rowmax * gap <= 2 * affine_thr or gap <= affine_thr:
            affine_res = float(np.max(np.abs(a_real @ y - b_real))) if a_real.size else 0.0
            if affine_res <= affine_thr:
                return ProjectionReport(FEASIBLE, from_coords(y, n), gap, it,
                                        affine_res, 0.0, history)
        # x satisfies the affine constraints exactly and its most negative
        # eigenvalue is bounded by the gap.
        if gap <= psd_tol * max(1.0, float(np.linalg.norm(x))):
            x_mat = from_coords(x, n)
            w, _ = herm_eig(x_mat)
            return ProjectionReport(FEASIBLE, x_mat, gap, it,
                                    0.0, float(max(0.0, -w[-1])), history)
        if it > stall_window and gap > gap_tol:
            prev = history[-stall_window - 1]
            if abs(gap - prev) <= stall_rel * max(gap, 1e-300):
                return ProjectionReport(INFEASIBLE, None, gap, it,
                                        float(np.max(np.abs(a_real @ y - b_real))),
                                        gap, history)

    y_final = from_coords(x, n)
    w, _ = herm_eig(y_final)
    return ProjectionReport(UNDETERMINED, None,
                            history[-1] if history else np.inf,
                            max_iter,
                            0.0, float(max(0.0, -w[-1])), history)
