"""Additive Vanka-type smoothers built from overlapping patch solves.

The smoother operator is ``M = sum_i V_i^T W_i A_i^{-1} V_i`` where ``V_i``
gathers the unknowns of patch ``i``, ``A_i`` is the principal submatrix of
the system operator on that patch, and ``W_i`` is the diagonal partition of
unity with entry ``1/m_j`` for an unknown contained in ``m_j`` patches.

Two patch layouts are supported:

* element-wise: one patch per mesh cell, covering the ``2**dim`` interior
  cell corners (boundary cells keep whatever corners are interior);
* vertex-wise: one patch per interior unknown, covering the unknown and its
  ``2*dim`` axis neighbours (truncated near the boundary).

In the interior both layouts reduce to translation-invariant stencils with
exact rational coefficients, exposed by :func:`closed_form_stencil` and used
as the oracle for assembly tests on periodic grids.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np
import scipy.sparse as sp

from .stencils import GridSpec, Stencil

__all__ = [
    "PatchLayout",
    "Patch",
    "VankaOperator",
    "build_vanka",
    "apply_vanka",
    "closed_form_stencil",
    "assemble_sparse",
    "assemble_dense",
    "export_triplets",
]

DENSE_CAP = 4096  # refuse to densify anything larger than this many unknowns


@dataclass(frozen=True)
class PatchLayout:
    """Which overlapping decomposition to use: ``element`` or ``vertex``."""

    kind: str
    dim: int

    def __post_init__(self):
        if self.kind not in ("element", "vertex"):
            raise ValueError(f"unknown patch kind {self.kind!r}")
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")


@dataclass
class Patch:
    """One overlapping subdomain: its id, flat unknown indices, local matrix."""

    key: tuple
    dofs: np.ndarray
    matrix: np.ndarray
    inverse: np.ndarray


class VankaOperator:
    """Assembled additive Vanka operator for one grid and layout.

    Instances are built by :func:`build_vanka`.  ``apply`` evaluates ``M r``;
    the result is independent of patch order up to floating-point summation
    order, and a sequential mode is available for order tests.
    """

    def __init__(self, layout: PatchLayout, grid: GridSpec, patches, weights):
        self.layout = layout
        self.grid = grid
        self.patches = patches
        self.weights = weights
        self._groups = None

    def _build_groups(self):
        # batch patches sharing a cached inverse into one gather/scatter
        groups = {}
        for patch in self.patches:
            key = (id(patch.inverse), patch.dofs.size)
            groups.setdefault(key, (patch.inverse, []))[1].append(patch.dofs)
        self._groups = [(inv, np.vstack(dofs)) for inv, dofs in groups.values()]

    def apply(self, r: np.ndarray, sequential: bool = False) -> np.ndarray:
        """Evaluate ``M r`` over all patches."""
        r = np.asarray(r, dtype=float)
        if r.shape != (self.grid.npoints,):
            raise ValueError(f"expected flat array of length {self.grid.npoints}")
        out = np.zeros_like(r)
        if sequential:
            for patch in self.patches:
                local = patch.inverse @ r[patch.dofs]
                out[patch.dofs] += self.weights[patch.dofs] * local
            return out
        if self._groups is None:
            self._build_groups()
        for inv, dofs in self._groups:
            local = r[dofs] @ inv.T
            local *= self.weights[dofs]
            np.add.at(out, dofs.reshape(-1), local.reshape(-1))
        return out

    def as_dense(self) -> np.ndarray:
        if self.grid.npoints > DENSE_CAP:
            raise ValueError(f"refusing dense assembly beyond {DENSE_CAP} unknowns")
        m = np.zeros((self.grid.npoints, self.grid.npoints))
        for patch in self.patches:
            block = self.weights[patch.dofs, None] * patch.inverse
            m[np.ix_(patch.dofs, patch.dofs)] += block
        return m


def apply_vanka(op: VankaOperator, r: np.ndarray, sequential: bool = False) -> np.ndarray:
    """Functional alias for :meth:`VankaOperator.apply`."""
    return op.apply(r, sequential=sequential)


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def _axes_points(n, dim):
    return list(product(range(n), repeat=dim))


def _patch_index_sets(layout: PatchLayout, grid: GridSpec):
    """Yield (key, list-of-lattice-coord-tuples) for every patch."""
    n, dim = grid.n, grid.dim
    periodic = grid.boundary == "periodic"
    if layout.kind == "element":
        cell_range = range(n) if periodic else range(n + 1)
        for cell in product(cell_range, repeat=dim):
            coords = []
            for corner in product((0, 1), repeat=dim):
                point = tuple(c + k for c, k in zip(cell, corner))
                if periodic:
                    coords.append(tuple(p % n for p in point))
                else:
                    # node indices 1..n are interior; shift to 0-based lattice
                    if all(1 <= p <= n for p in point):
                        coords.append(tuple(p - 1 for p in point))
            if coords:
                yield cell, coords
    else:
        for center in product(range(n), repeat=dim):
            coords = [center]
            for axis in range(dim):
                for sign in (-1, 1):
                    point = list(center)
                    point[axis] += sign
                    if periodic:
                        point[axis] %= n
                        coords.append(tuple(point))
                    elif 0 <= point[axis] < n:
                        coords.append(tuple(point))
            yield center, coords


def _local_matrix_from_stencil(stencil, coords, grid):
    n = grid.n
    periodic = grid.boundary == "periodic"
    k = len(coords)
    a = np.zeros((k, k))
    for i, p in enumerate(coords):
        for j, q in enumerate(coords):
            offset = tuple(qc - pc for pc, qc in zip(p, q))
            if periodic:
                offset = tuple((o + n // 2) % n - n // 2 for o in offset)
            coef = stencil.entries.get(offset)
            if coef is not None:
                a[i, j] = float(coef)
    return a


def build_vanka(layout: PatchLayout, grid: GridSpec, operator) -> VankaOperator:
    """Assemble the patches, partition-of-unity weights and local inverses.

    Parameters
    ----------
    layout : PatchLayout
    grid : GridSpec
    operator : Stencil or scipy sparse matrix
        System operator whose principal submatrices define the patch solves.

    Notes
    -----
    Patch unknowns are ordered lexicographically by lattice coordinate, and
    local inverses are cached by matrix content, so all interior patches of
    a translation-invariant operator share one factorisation.
    """
    if layout.dim == 3:
        raise NotImplementedError("patch assembly is implemented for dim 1 and 2 only")
    if layout.dim != grid.dim:
        raise ValueError(f"layout dim {layout.dim} != grid dim {grid.dim}")
    if grid.boundary == "periodic" and isinstance(operator, Stencil) \
            and grid.n <= 2 * operator.reach:
        raise ValueError(f"periodic wrap needs n > {2 * operator.reach}")

    matrix = None
    if not isinstance(operator, Stencil):
        matrix = sp.csr_matrix(operator)
        if matrix.shape != (grid.npoints, grid.npoints):
            raise ValueError("operator matrix does not match the grid")

    patches = []
    counts = np.zeros(grid.npoints, dtype=np.int64)
    inverse_cache = {}
    for key, coords in _patch_index_sets(layout, grid):
        coords = sorted(coords)
        dofs = np.array([grid.ravel_index(c) for c in coords], dtype=np.int64)
        if matrix is None:
            a = _local_matrix_from_stencil(operator, coords, grid)
        else:
            a = matrix[np.ix_(dofs, dofs)].toarray()
        cache_key = (a.shape[0], a.tobytes())
        cached = inverse_cache.get(cache_key)
        if cached is None:
            cached = np.linalg.inv(a)
            inverse_cache[cache_key] = cached
        patches.append(Patch(key, dofs, a, cached))
        counts[dofs] += 1

    if counts.min() <= 0:
        raise RuntimeError("patch layout left some unknowns uncovered")
    weights = 1.0 / counts
    return VankaOperator(layout, grid, patches, weights)


# ---------------------------------------------------------------------------
# closed-form interior stencils
# ---------------------------------------------------------------------------

def _cross_entries(center, axis1, diag, axis2, dim):
    entries = {(0,) * dim: center}
    for axis in range(dim):
        for sign in (-1, 1):
            o = [0] * dim
            o[axis] = sign
            entries[tuple(o)] = axis1
            o = [0] * dim
            o[axis] = 2 * sign
            entries[tuple(o)] = axis2
    if dim == 2:
        for sx in (-1, 1):
            for sy in (-1, 1):
                entries[(sx, sy)] = diag
    return entries


def closed_form_stencil(layout: PatchLayout, h) -> Stencil:
    """Exact interior stencil of the additive Vanka operator.

    These are the translation-invariant rows the assembled operator takes
    away from the boundary (equivalently, everywhere on a periodic grid):

    * element 1D: ``h^2/6 [1 4 1]``
    * vertex 1D:  ``h^2/12 [1 4 10 4 1]``
    * element 2D: ``h^2/96 [[1 4 1] [4 28 4] [1 4 1]]``
    * vertex 2D:  ``h^2/240`` with centre 68, axis 8, diagonal 2, axis-2 1.
    """
    hh = Fraction(h) ** 2
    kind, dim = layout.kind, layout.dim
    if (kind, dim) == ("element", 1):
        entries = {(-1,): Fraction(1, 6), (0,): Fraction(4, 6), (1,): Fraction(1, 6)}
    elif (kind, dim) == ("vertex", 1):
        entries = {(-2,): Fraction(1, 12), (-1,): Fraction(4, 12), (0,): Fraction(10, 12),
                   (1,): Fraction(4, 12), (2,): Fraction(1, 12)}
    elif (kind, dim) == ("element", 2):
        entries = {}
        for (ox, cx) in ((-1, 1), (0, 4), (1, 1)):
            for (oy, cy) in ((-1, 1), (0, 4), (1, 1)):
                entries[(ox, oy)] = Fraction(cx * cy if (ox, oy) != (0, 0) else 28, 96)
        entries[(0, 0)] = Fraction(28, 96)
    elif (kind, dim) == ("vertex", 2):
        entries = _cross_entries(Fraction(68, 240), Fraction(8, 240),
                                 Fraction(2, 240), Fraction(1, 240), 2)
    else:
        raise NotImplementedError(f"no closed form for {kind} patches in dim {dim}")
    return Stencil(dim, entries).scaled(hh)


# ---------------------------------------------------------------------------
# dense/sparse assembly and export
# ---------------------------------------------------------------------------

def assemble_sparse(operator, grid: GridSpec = None) -> sp.csr_matrix:
    """Explicit sparse matrix of a stencil or Vanka operator.

    For a stencil the grid must be given; its boundary mode decides between
    Dirichlet truncation and periodic wrap-around.
    """
    if isinstance(operator, VankaOperator):
        if operator.grid.npoints > DENSE_CAP:
            # patches are dense blocks; go through the same guarded path
            raise ValueError(f"refusing assembly beyond {DENSE_CAP} unknowns")
        return sp.csr_matrix(operator.as_dense())
    if grid is None:
        raise ValueError("assembling a stencil requires a grid")
    if operator.dim != grid.dim:
        raise ValueError(f"stencil dim {operator.dim} != grid dim {grid.dim}")
    n, dim = grid.n, grid.dim
    periodic = grid.boundary == "periodic"
    if periodic and n <= 2 * operator.reach:
        raise ValueError(f"periodic wrap needs n > {2 * operator.reach}")
    rows, cols, vals = [], [], []
    for offset, coef in operator.entries.items():
        if periodic:
            axes = [np.arange(n)] * dim
            shifted = [(np.arange(n) + o) % n for o in offset]
        else:
            axes, shifted = [], []
            ok = True
            for o in offset:
                lo, hi = max(0, -o), n - max(0, o)
                if lo >= hi:
                    ok = False
                    break
                axes.append(np.arange(lo, hi))
                shifted.append(np.arange(lo + o, hi + o))
            if not ok:
                continue
        dst = np.meshgrid(*axes, indexing="ij")
        src = np.meshgrid(*shifted, indexing="ij")
        rows.append(np.ravel_multi_index([d.reshape(-1) for d in dst], grid.shape))
        cols.append(np.ravel_multi_index([s.reshape(-1) for s in src], grid.shape))
        vals.append(np.full(rows[-1].size, float(coef)))
    mat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(grid.npoints, grid.npoints))
    return mat.tocsr()


def assemble_dense(operator, grid: GridSpec = None) -> np.ndarray:
    """Dense matrix of a stencil or Vanka operator, capped at 4096 unknowns."""
    if isinstance(operator, VankaOperator):
        return operator.as_dense()
    if grid is None:
        raise ValueError("assembling a stencil requires a grid")
    if grid.npoints > DENSE_CAP:
        raise ValueError(f"refusing dense assembly beyond {DENSE_CAP} unknowns")
    return assemble_sparse(operator, grid).toarray()


def export_triplets(matrix, path=None) -> str:
    """Serialize a matrix as ``row col value`` lines (sorted, zeros dropped)."""
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    lines = [f"{int(coo.row[i])} {int(coo.col[i])} {float(coo.data[i])!r}"
             for i in order if coo.data[i] != 0.0]
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
