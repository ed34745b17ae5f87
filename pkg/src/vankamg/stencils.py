"""Constant-coefficient stencils on uniform grids.

A stencil is a finite map from integer offsets to coefficients.  Coefficients
are kept as exact rationals (`fractions.Fraction`) whenever they come from a
closed-form expression, so that algebraic identities between operators can be
checked without floating-point slack; float coefficients are accepted for
derived or measured operators.

Grids are uniform lattices on the unit cube with Dirichlet values eliminated:
a grid with ``n`` points per dimension and spacing ``h`` represents the
interior nodes ``(i_1+1)h, ..., (i_d+1)h`` with ``0 <= i_k < n``.  A periodic
wrap-around mode exists solely as an oracle for dense-assembly tests, where
every row of an operator must reduce to the same translation-invariant row.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from numbers import Rational

import numpy as np

__all__ = [
    "Stencil",
    "GridSpec",
    "delta_stencil",
    "laplacian_stencil",
    "mass_stencil",
    "tensor_product",
    "apply",
]


def _exact(value):
    """Coerce ints and rationals to Fraction, leave floats alone."""
    if isinstance(value, float):
        return value
    if isinstance(value, Rational):
        return Fraction(value)
    raise TypeError(f"stencil coefficient must be rational or float, got {type(value)!r}")


@dataclass(frozen=True)
class GridSpec:
    """Uniform lattice of interior points on the unit cube.

    Parameters
    ----------
    dim : int
        Spatial dimension, 1 to 3.
    n : int
        Interior points per dimension; the total unknown count is ``n**dim``.
    h : float
        Mesh spacing.  For the Dirichlet-eliminated Poisson problem on the
        unit interval/square/cube, ``h = 1/(n+1)``.
    boundary : str
        ``"dirichlet"`` (eliminated boundary values, the production mode) or
        ``"periodic"`` (wrap-around, oracle use only).
    """

    dim: int
    n: int
    h: float
    boundary: str = "dirichlet"

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if self.n < 3:
            raise ValueError(f"need at least 3 points per dimension, got n={self.n}")
        if not self.h > 0:
            raise ValueError(f"mesh spacing must be positive, got h={self.h}")
        if self.boundary not in ("dirichlet", "periodic"):
            raise ValueError(f"unknown boundary mode {self.boundary!r}")

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.dim

    @property
    def npoints(self) -> int:
        return self.n**self.dim

    def ravel_index(self, coords) -> int:
        """Flat index (C order) of a lattice point given per-axis coordinates."""
        return int(np.ravel_multi_index(tuple(coords), self.shape))


@dataclass(frozen=True)
class Stencil:
    """Finite-difference stencil with exact or floating coefficients.

    ``entries`` maps offset tuples of length ``dim`` to coefficients.  The
    mapping is copied and normalised at construction; zero coefficients are
    kept if explicitly given (they matter for sparsity-pattern tests).
    """

    dim: int
    entries: dict = field(compare=True)

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if not self.entries:
            raise ValueError("stencil needs at least one entry")
        clean = {}
        for offset, coef in self.entries.items():
            offset = tuple(int(o) for o in offset)
            if len(offset) != self.dim:
                raise ValueError(f"offset {offset} does not match dim={self.dim}")
            clean[offset] = _exact(coef)
        object.__setattr__(self, "entries", clean)

    # -- queries -----------------------------------------------------------

    @property
    def offsets(self) -> list:
        return sorted(self.entries)

    @property
    def reach(self) -> int:
        """Largest absolute offset component; wrap-around needs n > 2*reach."""
        return max(abs(c) for o in self.entries for c in o)

    @property
    def is_symmetric(self) -> bool:
        """True when s[-o] == s[o] for every offset (exact comparison)."""
        return all(self.entries.get(tuple(-c for c in o)) == v
                   for o, v in self.entries.items())

    @cached_property
    def _arrays(self):
        offs = np.array(self.offsets, dtype=np.int64).reshape(len(self.entries), self.dim)
        coefs = np.array([float(self.entries[tuple(o)]) for o in offs])
        return offs, coefs

    # -- algebra -----------------------------------------------------------

    def scaled(self, factor) -> "Stencil":
        factor = _exact(factor)
        return Stencil(self.dim, {o: c * factor for o, c in self.entries.items()})

    def plus(self, other: "Stencil") -> "Stencil":
        if other.dim != self.dim:
            raise ValueError("cannot add stencils of different dimension")
        out = dict(self.entries)
        for o, c in other.entries.items():
            out[o] = out.get(o, Fraction(0)) + c
        return Stencil(self.dim, out)

    # -- serialization -----------------------------------------------------

    def to_json(self) -> str:
        """Serialize; rational coefficients become strings, floats stay numbers."""
        entries = []
        for o in self.offsets:
            c = self.entries[o]
            coef = str(c) if isinstance(c, Fraction) else c
            entries.append({"offset": list(o), "coef": coef})
        return json.dumps({"dim": self.dim, "entries": entries},
                          sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "Stencil":
        data = json.loads(text)
        entries = {}
        for item in data["entries"]:
            coef = item["coef"]
            coef = Fraction(coef) if isinstance(coef, str) else float(coef)
            entries[tuple(item["offset"])] = coef
        return cls(int(data["dim"]), entries)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def delta_stencil(dim: int) -> Stencil:
    """Identity operator: a single unit coefficient at the origin."""
    return Stencil(dim, {(0,) * dim: Fraction(1)})


def laplacian_stencil(dim: int, h) -> Stencil:
    """Second-order central-difference negative Laplacian.

    ``1/h**2 * [-1 2 -1]`` in 1D, the 5-point and 7-point versions in 2D/3D.
    Pass ``h`` as a Fraction (or a dyadic float, which converts exactly) to
    keep the coefficients rational.
    """
    hh = Fraction(h) ** 2
    entries = {(0,) * dim: Fraction(2 * dim) / hh}
    for axis in range(dim):
        for sign in (-1, 1):
            offset = [0] * dim
            offset[axis] = sign
            entries[tuple(offset)] = Fraction(-1) / hh
    return Stencil(dim, entries)


_MASS_1D = {(-1,): Fraction(1, 6), (0,): Fraction(4, 6), (1,): Fraction(1, 6)}


def mass_stencil(dim: int, h) -> Stencil:
    """Lumped Q1 mass-matrix stencil scaled to pair with the Laplacian.

    Returns ``h/6 [1 4 1]`` in 1D, ``h^2/36 [[1,4,1],[4,16,4],[1,4,1]]`` in
    2D, and the rank-3 tensor product ``h^2/216 [1 4 1]^(x3)`` in 3D.  The
    3D variant is normalised so the product with the 7-point Laplacian
    symbol stays dimensionless.
    """
    hf = Fraction(h)
    if dim == 1:
        return Stencil(1, _MASS_1D).scaled(hf)
    if dim == 2:
        base = tensor_product(Stencil(1, _MASS_1D), Stencil(1, _MASS_1D))
        return base.scaled(hf**2)
    if dim == 3:
        base = tensor_product(tensor_product(Stencil(1, _MASS_1D), Stencil(1, _MASS_1D)),
                              Stencil(1, _MASS_1D))
        return base.scaled(hf**2)
    raise ValueError(f"dim must be 1, 2 or 3, got {dim}")


def tensor_product(a: Stencil, b: Stencil) -> Stencil:
    """Outer product of stencils; symbols multiply accordingly."""
    entries = {}
    for oa, ca in a.entries.items():
        for ob, cb in b.entries.items():
            key = oa + ob
            prior = entries.get(key)
            term = ca * cb if not isinstance(ca, float) and not isinstance(cb, float) \
                else float(ca) * float(cb)
            entries[key] = term if prior is None else prior + term
    return Stencil(a.dim + b.dim, entries)


# ---------------------------------------------------------------------------
# application
# ---------------------------------------------------------------------------

def apply(stencil: Stencil, grid: GridSpec, u: np.ndarray) -> np.ndarray:
    """Apply a stencil to a flat grid function, honouring the boundary mode.

    Dirichlet mode treats out-of-range neighbours as zero; periodic mode
    wraps indices (oracle use).  The result is a new flat array; the input
    is never modified.
    """
    if stencil.dim != grid.dim:
        raise ValueError(f"stencil dim {stencil.dim} != grid dim {grid.dim}")
    u = np.asarray(u, dtype=float)
    if u.shape != (grid.npoints,):
        raise ValueError(f"expected flat array of length {grid.npoints}, got shape {u.shape}")
    v = u.reshape(grid.shape)
    out = np.zeros_like(v)
    if grid.boundary == "periodic":
        if grid.n <= 2 * stencil.reach:
            raise ValueError(f"periodic wrap needs n > {2 * stencil.reach}, got n={grid.n}")
        for offset, coef in stencil.entries.items():
            out += float(coef) * np.roll(v, tuple(-o for o in offset), axis=range(grid.dim))
        return out.reshape(-1)
    for offset, coef in stencil.entries.items():
        dst, src = [], []
        for o in offset:
            lo, hi = max(0, -o), grid.n - max(0, o)
            if lo >= hi:
                break
            dst.append(slice(lo, hi))
            src.append(slice(lo + o, hi + o))
        else:
            out[tuple(dst)] += float(coef) * v[tuple(src)]
    return out.reshape(-1)
