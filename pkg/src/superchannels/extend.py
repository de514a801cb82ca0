"""CP supermap extensions of a map given only on the channel span.

A map defined on the span of channel Choi matrices extends to a superchannel
exactly when the PSD cone meets the affine set of supermap Choi matrices that
reproduce the given images.  The search runs Dykstra-corrected alternating
projections between the two sets; infeasibility is reported with a numeric
gap estimate, never a proof.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import feasibility
from .channels import choi_action_rows
from .config import DEFAULTS, resolve
from .feasibility import FEASIBLE
from .linalg import frob, vec
from .opsys import span_basis, span_dim, span_membership
from .supermaps import Superchannel, apply_superchannel, aux_dim


@dataclass(frozen=True)
class SpanAction:
    """A linear map recorded by its images on the canonical span basis.

    ``images[k]`` is the (d2 r2) x (d2 r2) image of the k-th canonical basis
    element of the channel span inside M_{d1}(M_{r1}).
    """

    d1: int
    r1: int
    d2: int
    r2: int
    images: tuple

    def __post_init__(self):
        expected = span_dim(self.d1, self.r1)
        images = tuple(np.asarray(m, dtype=complex) for m in self.images)
        if len(images) != expected:
            raise ValueError(f"{len(images)} images given, the canonical basis has {expected}")
        n2 = self.d2 * self.r2
        for m in images:
            if m.shape != (n2, n2):
                raise ValueError(f"image shape {m.shape}, expected ({n2}, {n2})")
        object.__setattr__(self, "images", images)


@dataclass
class FeasibilityReport:
    """Outcome of an extension search."""

    status: str
    witness: Superchannel | None
    gap: float
    iterations: int
    affine_residual: float
    psd_residual: float
    gap_history: list[float] = field(default_factory=list)


@dataclass(frozen=True)
class SpreadReport:
    """Range of auxiliary dimensions seen over a family of found extensions.

    ``min_e`` is only an upper bound on the true minimum; the search is a
    heuristic sweep over seeds and pairwise midpoints, not an enumeration.
    """

    min_e: int
    max_e: int
    witnesses: tuple
    aux_dims: tuple


def restrict_superchannel(sc: Superchannel) -> SpanAction:
    """Record the action of a supermap on the canonical span basis."""
    images = tuple(apply_superchannel(sc, x) for x in span_basis(sc.d1, sc.r1))
    return SpanAction(sc.d1, sc.r1, sc.d2, sc.r2, images)


def validate_action(action: SpanAction, tol: float | None = None) -> None:
    """Check that the images sit in the target span with matching scales."""
    tol = resolve(tol, DEFAULTS.rel_tol)
    basis = span_basis(action.d1, action.r1)
    for x, y in zip(basis, action.images):
        lam = span_membership(x, action.d1, action.r1, tol).scale
        mem = span_membership(y, action.d2, action.r2, tol)
        if not mem.member:
            raise ValueError("an image leaves the target channel span")
        if abs(mem.scale - lam) > tol * max(1.0, abs(lam)):
            raise ValueError("an image breaks the trace-scaling factor")


def _constraint_system(action: SpanAction,
                       include_tp: bool) -> tuple[np.ndarray, np.ndarray]:
    n1 = action.d1 * action.r1
    n2 = action.d2 * action.r2
    blocks = [choi_action_rows(x, n1, n2) for x in span_basis(action.d1, action.r1)]
    rhs = [vec(y) for y in action.images]
    if include_tp:
        big = n1 * n2
        rows = np.zeros((n1 * n1, big * big), dtype=complex)
        b_tp = np.zeros(n1 * n1, dtype=complex)
        for p in range(n1):
            for q in range(n1):
                for u in range(n2):
                    rows[p * n1 + q, (p * n2 + u) * big + (q * n2 + u)] += 1.0
                b_tp[p * n1 + q] = 1.0 if p == q else 0.0
        blocks.append(rows)
        rhs.append(b_tp)
    return feasibility.realify(np.vstack(blocks), np.concatenate(rhs), n1 * n2)


def extend_action(action: SpanAction,
                  seed_point=None,
                  trace_preserving: bool = False,
                  max_iter: int | None = None,
                  **solver_kwargs) -> FeasibilityReport:
    """Search for a CP supermap extension of the recorded action.

    The affine set fixes the image of every canonical basis element (plus
    full trace preservation when ``trace_preserving``); the other set is the
    PSD cone.  ``seed_point`` may be a Hermitian matrix or a Superchannel;
    by default the iteration starts from the minimum-norm affine point.
    """
    validate_action(action)
    a_real, b_real = _constraint_system(action, trace_preserving)
    if isinstance(seed_point, Superchannel):
        seed_point = seed_point.choi
    n = action.d1 * action.r1 * action.d2 * action.r2
    res = feasibility.solve(a_real, b_real, n, seed_point=seed_point,
                            max_iter=max_iter, **solver_kwargs)
    witness = None
    if res.status == FEASIBLE:
        witness = Superchannel(action.d1, action.r1, action.d2, action.r2, res.point)
    return FeasibilityReport(res.status, witness, res.gap, res.iterations,
                             res.affine_residual, res.psd_residual, res.gap_history)


def tp_extension(action: SpanAction, **kwargs) -> FeasibilityReport:
    """Search for a trace-preserving CP extension."""
    return extend_action(action, trace_preserving=True, **kwargs)


def extension_spread(action: SpanAction, seeds, eps: float | None = None,
                     **solver_kwargs) -> SpreadReport:
    """Sweep extension searches over seeds and report the aux-dimension range.

    Midpoints of every witness pair are included, exploiting convexity of
    the extension set.
    """
    witnesses: list[Superchannel] = []
    for seed in seeds:
        report = extend_action(action, seed_point=seed, **solver_kwargs)
        if report.status == FEASIBLE and report.witness is not None:
            witnesses.append(report.witness)
    if not witnesses:
        raise ValueError("no feasible extension found from the given seeds")
    for a, b in combinations(list(witnesses), 2):
        mid = (a.choi + b.choi) / 2
        witnesses.append(Superchannel(action.d1, action.r1, action.d2, action.r2, mid))
    dims = tuple(aux_dim(w, eps) for w in witnesses)
    return SpreadReport(min(dims), max(dims), tuple(witnesses), dims)
