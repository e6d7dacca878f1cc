"""Brute-force dimension verification for generalized spline spaces.

Independent of the determining-set machinery: assemble the smoothness
constraints as sampled linear equations in all B-coefficients and count the
nullity of the matrix by singular-value thresholding.  Across each interior
edge segment, the traces of the relevant normal derivatives live in the global
univariate section space, so sampling more points than its dimension makes
the system deliberately over-determined and the nullity saturate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RankAmbiguousError
from .gspace import GSplineSpace
from .util import cheb_points

_RANK_RTOL = 1e-8
_AMBIGUITY_BAND = 10.0


@dataclass
class ConstraintSystem:
    """Sampled smoothness equations in all B-coefficient variables."""

    matrix: np.ndarray
    variables: list[tuple[int, int, int]]

    @property
    def var_count(self) -> int:
        return len(self.variables)


def assemble_constraints(space: GSplineSpace, sample_factor: int = 1,
                         include_vertex_rows: bool = False) -> ConstraintSystem:
    """One row per (segment, normal-derivative order, sample point).

    ``sample_factor`` scales the per-segment point count; doubling it must not
    change the nullity once the base count saturates.  ``include_vertex_rows``
    adds mixed-derivative matching at shared vertices, which is implied by the
    trace constraints and must leave the nullity unchanged as well.
    """
    mesh = space.mesh
    n1, n2 = space.n1, space.n2
    variables = [(c.index, i, j) for c in mesh.cells
                 for i in range(n1) for j in range(n2)]
    col = {v: k for k, v in enumerate(variables)}
    points_per_segment = sample_factor * (n1 + n2 + 2)

    rows: list[np.ndarray] = []
    if include_vertex_rows:
        rows.extend(_vertex_rows(space, col))
    for seg in mesh.edge_segments:
        if not seg.is_interior:
            continue
        if seg.axis == 1:
            # vertical segment: match s-derivative traces in t
            orders = space.r1 + 1
            neg_norm = space.basis_s(seg.neg_cell).endpoint_table("b")
            pos_norm = space.basis_s(seg.pos_cell).endpoint_table("a")
            ts = cheb_points(points_per_segment, float(seg.lo), float(seg.hi),
                             interior=True)
            neg_tan = space.basis_t(seg.neg_cell).eval_all(ts)
            pos_tan = space.basis_t(seg.pos_cell).eval_all(ts)
        else:
            orders = space.r2 + 1
            neg_norm = space.basis_t(seg.neg_cell).endpoint_table("b")
            pos_norm = space.basis_t(seg.pos_cell).endpoint_table("a")
            ts = cheb_points(points_per_segment, float(seg.lo), float(seg.hi),
                             interior=True)
            neg_tan = space.basis_s(seg.neg_cell).eval_all(ts)
            pos_tan = space.basis_s(seg.pos_cell).eval_all(ts)

        for h in range(orders):
            for m in range(len(ts)):
                row = np.zeros(len(variables))
                for inorm in range(neg_norm.shape[1]):
                    for itan in range(neg_tan.shape[0]):
                        if seg.axis == 1:
                            key_n = (seg.neg_cell, inorm, itan)
                            key_p = (seg.pos_cell, inorm, itan)
                        else:
                            key_n = (seg.neg_cell, itan, inorm)
                            key_p = (seg.pos_cell, itan, inorm)
                        row[col[key_n]] += neg_norm[h, inorm] * neg_tan[itan, m]
                        row[col[key_p]] -= pos_norm[h, inorm] * pos_tan[itan, m]
                rows.append(row)

    matrix = np.array(rows) if rows else np.zeros((0, len(variables)))
    # row scaling preserves the nullspace and keeps the threshold meaningful
    if matrix.shape[0]:
        norms = np.max(np.abs(matrix), axis=1)
        norms[norms == 0] = 1.0
        matrix = matrix / norms[:, None]
    return ConstraintSystem(matrix=matrix, variables=variables)


def _vertex_rows(space: GSplineSpace, col) -> list[np.ndarray]:
    """Mixed-derivative matching at shared vertices, up to the smoothness orders."""
    mesh = space.mesh
    rows = []
    for w, cells in mesh.cells_at_vertex.items():
        if len(cells) < 2:
            continue
        base = cells[0]
        rows_s0, gs0, rows_t0, gt0 = space.corner_maps(base, w)
        for other in cells[1:]:
            rows_s1, gs1, rows_t1, gt1 = space.corner_maps(other, w)
            for h in range(space.r1 + 1):
                for k in range(space.r2 + 1):
                    row = np.zeros(len(col))
                    for a, i in enumerate(rows_s0):
                        for b, j in enumerate(rows_t0):
                            row[col[(base, int(i), int(j))]] += gs0[h, a] * gt0[k, b]
                    for a, i in enumerate(rows_s1):
                        for b, j in enumerate(rows_t1):
                            row[col[(other, int(i), int(j))]] -= gs1[h, a] * gt1[k, b]
                    rows.append(row)
    return rows


def matrix_nullity(matrix: np.ndarray, var_count: int) -> int:
    """Nullity by singular-value thresholding, refusing close calls."""
    if matrix.shape[0] == 0:
        return var_count
    sv = np.linalg.svd(matrix, compute_uv=False)
    cutoff = _RANK_RTOL * sv[0]
    in_band = (sv > cutoff / _AMBIGUITY_BAND) & (sv < cutoff * _AMBIGUITY_BAND)
    if np.any(in_band):
        raise RankAmbiguousError(
            "singular values straddle the rank threshold; increase sampling "
            "or inspect the mesh")
    rank = int(np.count_nonzero(sv > cutoff))
    return var_count - rank


def brute_force_dimension(space: GSplineSpace, sample_factor: int = 1,
                          include_vertex_rows: bool = False) -> int:
    """Nullity of the sampled constraint system.

    Raises :class:`RankAmbiguousError` when singular values sit within a
    factor of the threshold band, so an unclear rank is reported as
    inconclusive rather than as a wrong dimension.
    """
    system = assemble_constraints(space, sample_factor, include_vertex_rows)
    return matrix_nullity(system.matrix, system.var_count)
