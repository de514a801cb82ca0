"""The operator system spanned by Choi matrices of quantum channels.

Inside M_d(M_r) this is the set of block matrices whose diagonal blocks all
share one trace and whose off-diagonal blocks are traceless.  It carries the
Hilbert-Schmidt inner product; the canonical basis below is the reference
ordering used by every file format that lists images of basis elements.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .channels import ChannelChoi
from .config import DEFAULTS, resolve
from .linalg import frob, herm_eig, is_hermitian, matrix_unit, rel_scale, vec


@dataclass(frozen=True)
class SpanMembership:
    """Membership verdict together with the trace-scaling factor.

    ``scale`` is the common diagonal-block trace; it is the factor by which
    the associated linear map scales traces, real for Hermitian input and 1
    for the Choi matrix of a channel.
    """

    member: bool
    scale: complex


def span_dim(d: int, r: int) -> int:
    """Dimension of the span of channel Choi matrices inside M_d(M_r)."""
    return d * d * r * r - d * d + 1


def _block_trace_matrix(c: np.ndarray, d: int, r: int) -> np.ndarray:
    return np.einsum("isjs->ij", c.reshape(d, r, d, r))


def span_membership(c: np.ndarray, d: int, r: int, tol: float | None = None) -> SpanMembership:
    """Block-trace membership test, reporting the trace-scaling factor."""
    c = np.asarray(c, dtype=complex)
    if c.shape != (d * r, d * r):
        raise ValueError(f"matrix shape {c.shape} does not match dims ({d}, {r})")
    tol = resolve(tol, DEFAULTS.rel_tol)
    cutoff = tol * rel_scale(c)
    t = _block_trace_matrix(c, d, r)
    lam = complex(np.trace(t) / d)
    off = t - np.diag(np.diagonal(t))
    member = bool(np.max(np.abs(off)) <= cutoff if d > 1 else True)
    member = member and bool(np.max(np.abs(np.diagonal(t) - lam)) <= cutoff)
    if is_hermitian(c):
        lam = complex(lam.real)
    return SpanMembership(member, lam)


def project_to_span(c: np.ndarray, d: int, r: int) -> np.ndarray:
    """Hilbert-Schmidt orthogonal projection onto the channel span.

    Off-diagonal blocks lose their trace component; diagonal block traces are
    evened out to their mean.  The map is idempotent and self-adjoint.
    """
    c = np.asarray(c, dtype=complex)
    if c.shape != (d * r, d * r):
        raise ValueError(f"matrix shape {c.shape} does not match dims ({d}, {r})")
    t = _block_trace_matrix(c, d, r)
    mean = np.trace(t) / d
    excess = t - mean * np.eye(d)
    correction = np.einsum("ij,st->isjt", excess / r, np.eye(r, dtype=complex))
    out = c.reshape(d, r, d, r) - correction
    return out.reshape(d * r, d * r)


@lru_cache(maxsize=None)
def span_basis(d: int, r: int) -> tuple:
    """Canonical orthonormal basis of the channel span.

    Deterministic construction: project every matrix unit of M_{dr} in
    row-major order onto the span, then run modified Gram-Schmidt under the
    Hilbert-Schmidt inner product, dropping numerically null vectors.
    """
    n = d * r
    kept: list[np.ndarray] = []
    for p in range(n):
        for q in range(n):
            v = vec(project_to_span(matrix_unit(n, p, q), d, r))
            for b in kept:
                v = v - np.vdot(b, v) * b
            for b in kept:  # second pass stabilises near-dependent vectors
                v = v - np.vdot(b, v) * b
            norm = np.linalg.norm(v)
            if norm > DEFAULTS.gs_drop_tol:
                kept.append(v / norm)
    if len(kept) != span_dim(d, r):
        raise RuntimeError(
            f"basis construction produced {len(kept)} elements, expected {span_dim(d, r)}")
    mats = []
    for v in kept:
        m = v.reshape(n, n)
        m.setflags(write=False)
        mats.append(m)
    return tuple(mats)


def decompose_into_channels(c: np.ndarray, d: int, r: int,
                            tol: float | None = None) -> list[tuple[complex, ChannelChoi]]:
    """Write a span element as a combination of at most four channel Choi matrices.

    Each Hermitian part H splits as the difference of the positive matrices
    (||H|| I +- H) / 2, which stay in the span because the identity does;
    scaling each nonzero part to diagonal-block trace one yields CPTP maps.
    A PSD input with positive scale short-circuits to a single term.  The
    zero matrix decomposes to the empty list.
    """
    tol = resolve(tol, DEFAULTS.rel_tol)
    c = np.asarray(c, dtype=complex)
    mem = span_membership(c, d, r, tol)
    if not mem.member:
        raise ValueError("matrix is not in the channel span")
    if frob(c) <= tol:
        return []
    if is_hermitian(c):
        w, _ = herm_eig(c)
        if w[-1] >= -tol * rel_scale(c) and mem.scale.real > tol:
            lam = mem.scale.real
            return [(complex(lam), ChannelChoi(d, r, c / lam))]
    eye = np.eye(d * r, dtype=complex)
    h1 = (c + c.conj().T) / 2
    h2 = (c - c.conj().T) / (2j)
    terms: list[tuple[complex, ChannelChoi]] = []
    for h, unit in ((h1, 1.0 + 0j), (h2, 1j)):
        if frob(h) <= tol * rel_scale(c):
            continue
        w, _ = herm_eig(h)
        opnorm = float(np.max(np.abs(w)))
        for part, sign in (((opnorm * eye + h) / 2, 1.0), ((opnorm * eye - h) / 2, -1.0)):
            tr = float(np.trace(part).real)
            if tr <= tol * rel_scale(c):
                continue  # a positive span element with zero trace is zero
            lam = tr / d
            terms.append((unit * sign * lam, ChannelChoi(d, r, part / lam)))
    return terms


def tensor_dimension_gap(d1: int, r1: int, d2: int, r2: int) -> int:
    """Dimension deficit of the tensor of two channel spans inside the big one."""
    if min(d1, r1, d2, r2) < 1:
        raise ValueError("dimensions must be positive")
    return span_dim(d1 * d2, r1 * r2) - span_dim(d1, r1) * span_dim(d2, r2)


def hermitian_span(mats) -> tuple:
    """Hermitian spanning set of a *-closed family, via real and imaginary parts."""
    out = []
    for m in mats:
        m = np.asarray(m, dtype=complex)
        for h in ((m + m.conj().T) / 2, (m - m.conj().T) / (2j)):
            if frob(h) > 1e-12 * rel_scale(m):
                out.append(h)
    return tuple(out)
