"""Points, functions, and varieties on the grid F_q^n.

Canonical indexing is big-endian: a point with coordinate element-indices
(c_0, ..., c_{n-1}) has index sum(c_i * q**(n-1-i)), so the first
coordinate is the most significant digit.  This order is part of the file
format and must not change.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np

from .field import FieldElement, FieldSpec

Exponent = Union[int, float]
INF = float("inf")


# -- point indexing ------------------------------------------------------------


def point_index(spec: FieldSpec, coords: Sequence[int]) -> int:
    idx = 0
    for c in coords:
        idx = idx * spec.q + int(c)
    return idx


def point_coords(spec: FieldSpec, dim: int, idx: int) -> tuple[int, ...]:
    out = []
    for _ in range(dim):
        out.append(idx % spec.q)
        idx //= spec.q
    return tuple(reversed(out))


@lru_cache(maxsize=32)
def coords_matrix(spec: FieldSpec, dim: int) -> np.ndarray:
    """(q^dim, dim) array: row i holds the coordinate element-indices of
    the point with canonical index i."""
    q = spec.q
    idx = np.arange(q**dim, dtype=np.int64)
    cols = [(idx // q ** (dim - 1 - i)) % q for i in range(dim)]
    return np.stack(cols, axis=1)


@lru_cache(maxsize=32)
def norm_values(spec: FieldSpec, dim: int) -> np.ndarray:
    """Element index of sum_i x_i^2 for every point of F_q^dim."""
    coords = coords_matrix(spec, dim)
    sq = spec.mul_idx(np.arange(spec.q, dtype=np.int64), np.arange(spec.q, dtype=np.int64))
    acc = sq[coords[:, 0]]
    for i in range(1, dim):
        acc = spec.add_idx(acc, sq[coords[:, i]])
    return acc


@lru_cache(maxsize=32)
def scalar_mult_perm(spec: FieldSpec, dim: int, t: int) -> np.ndarray:
    """Permutation pi with pi[i] = canonical index of t * (point i)."""
    coords = coords_matrix(spec, dim)
    scaled = spec.mul_idx(t, coords)
    pows = spec.q ** np.arange(dim - 1, -1, -1, dtype=np.int64)
    return scaled @ pows


@dataclass(frozen=True)
class Point:
    spec: FieldSpec
    coords: tuple[int, ...]  # element indices, most significant first

    @classmethod
    def from_elements(cls, elems: Sequence[FieldElement]) -> "Point":
        spec = elems[0].spec
        return cls(spec, tuple(e.idx for e in elems))

    @classmethod
    def from_index(cls, spec: FieldSpec, dim: int, idx: int) -> "Point":
        return cls(spec, point_coords(spec, dim, idx))

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def index(self) -> int:
        return point_index(self.spec, self.coords)

    def elements(self) -> tuple[FieldElement, ...]:
        return tuple(FieldElement(self.spec, c) for c in self.coords)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)


def norm_value(m: Point) -> FieldElement:
    """sum of squared coordinates, as a field element."""
    spec = m.spec
    acc = 0
    for c in m.coords:
        acc = spec.add_idx(acc, spec.mul_idx(c, c))
    return FieldElement(spec, int(acc))


# -- grid and radial functions ---------------------------------------------------


class GridFunction:
    """Dense complex-valued function on F_q^dim in canonical index order."""

    def __init__(self, spec: FieldSpec, dim: int, values):
        values = np.asarray(values, dtype=np.complex128)
        if values.shape != (spec.q**dim,):
            raise ValueError(f"expected {spec.q**dim} values, got {values.shape}")
        if not np.all(np.isfinite(values.view(np.float64))):
            raise ValueError("values contain NaN or Inf")
        self.spec = spec
        self.dim = dim
        self.values = values

    @classmethod
    def zero(cls, spec: FieldSpec, dim: int) -> "GridFunction":
        return cls(spec, dim, np.zeros(spec.q**dim, dtype=np.complex128))

    @classmethod
    def delta(cls, spec: FieldSpec, dim: int, at: Union[Point, int]) -> "GridFunction":
        idx = at.index if isinstance(at, Point) else int(at)
        v = np.zeros(spec.q**dim, dtype=np.complex128)
        v[idx] = 1.0
        return cls(spec, dim, v)

    @classmethod
    def constant(cls, spec: FieldSpec, dim: int, c: complex = 1.0) -> "GridFunction":
        return cls(spec, dim, np.full(spec.q**dim, c, dtype=np.complex128))

    @classmethod
    def indicator(cls, variety: "Variety") -> "GridFunction":
        v = np.zeros(variety.spec.q**variety.dim, dtype=np.complex128)
        v[variety.points] = 1.0
        return cls(variety.spec, variety.dim, v)

    def __call__(self, m: Union[Point, int]) -> complex:
        idx = m.index if isinstance(m, Point) else int(m)
        return complex(self.values[idx])

    def to_dict(self) -> dict:
        return {
            "q": self.spec.q,
            "alpha": self.spec.alpha,
            "modulus": list(self.spec.modulus),
            "dim": self.dim,
            "values": [[float(z.real), float(z.imag)] for z in self.values],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GridFunction":
        spec = _spec_from_file_fields(d)
        vals = np.array([complex(re, im) for re, im in d["values"]], dtype=np.complex128)
        return cls(spec, int(d["dim"]), vals)


class RadialFunction:
    """Function determined by one value per norm level j in F_q."""

    def __init__(self, spec: FieldSpec, dim: int, radial):
        radial = np.asarray(radial, dtype=np.complex128)
        if radial.shape != (spec.q,):
            raise ValueError(f"expected {spec.q} radial values, got {radial.shape}")
        if not np.all(np.isfinite(radial.view(np.float64))):
            raise ValueError("radial values contain NaN or Inf")
        self.spec = spec
        self.dim = dim
        self.radial = radial

    @classmethod
    def shell(cls, spec: FieldSpec, dim: int, j: int) -> "RadialFunction":
        v = np.zeros(spec.q, dtype=np.complex128)
        v[int(j)] = 1.0
        return cls(spec, dim, v)

    def to_dict(self) -> dict:
        return {
            "q": self.spec.q,
            "alpha": self.spec.alpha,
            "modulus": list(self.spec.modulus),
            "dim": self.dim,
            "radial": [[float(z.real), float(z.imag)] for z in self.radial],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RadialFunction":
        spec = _spec_from_file_fields(d)
        vals = np.array([complex(re, im) for re, im in d["radial"]], dtype=np.complex128)
        return cls(spec, int(d["dim"]), vals)


def _spec_from_file_fields(d: dict) -> FieldSpec:
    q = int(d["q"])
    alpha = int(d.get("alpha", 1))
    p = round(q ** (1.0 / alpha))
    if p**alpha != q:
        raise ValueError(f"q={q} is not p^alpha for alpha={alpha}")
    modulus = d.get("modulus")
    return FieldSpec(p, alpha, modulus)


def load_function(path: str) -> Union[GridFunction, RadialFunction]:
    """Read a grid-function or radial-function JSON file."""
    with open(path) as fh:
        d = json.load(fh)
    if "radial" in d:
        return RadialFunction.from_dict(d)
    return GridFunction.from_dict(d)


def expand_radial(rf: RadialFunction) -> GridFunction:
    nv = norm_values(rf.spec, rf.dim)
    return GridFunction(rf.spec, rf.dim, rf.radial[nv])


def is_radial(f: GridFunction) -> bool:
    nv = norm_values(f.spec, f.dim)
    for j in range(f.spec.q):
        shell = f.values[nv == j]
        if shell.size and not np.allclose(shell, shell[0], rtol=0, atol=1e-12):
            return False
    return True


# -- varieties --------------------------------------------------------------------


@dataclass(frozen=True)
class Variety:
    spec: FieldSpec
    dim: int
    points: np.ndarray  # sorted canonical indices
    tag: str = "custom"

    def __post_init__(self):
        pts = np.unique(np.asarray(self.points, dtype=np.int64))
        if pts.size and (pts[0] < 0 or pts[-1] >= self.spec.q**self.dim):
            raise ValueError("point index out of range")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return int(self.points.size)

    def contains(self, m: Union[Point, int]) -> bool:
        idx = m.index if isinstance(m, Point) else int(m)
        pos = np.searchsorted(self.points, idx)
        return pos < self.points.size and self.points[pos] == idx


def sphere(spec: FieldSpec, j, d: int) -> Variety:
    """All points of F_q^d with sum of squared coordinates equal to j."""
    if d < 2:
        raise ValueError("sphere requires d >= 2")
    j_idx = j.idx if isinstance(j, FieldElement) else int(j)
    nv = norm_values(spec, d)
    pts = np.nonzero(nv == j_idx)[0]
    return Variety(spec, d, pts, tag=f"sphere({j_idx},{d})")


@lru_cache(maxsize=64)
def sphere_sizes(spec: FieldSpec, d: int) -> np.ndarray:
    """Exact |sphere(j, d)| for every j, via additive convolution of the
    squared-value histogram; O(d q^2) so it scales far past enumeration."""
    q = spec.q
    r = np.arange(q, dtype=np.int64)
    sq = spec.mul_idx(r, r)
    hist = np.bincount(np.asarray(sq, dtype=np.int64), minlength=q).astype(np.int64)
    counts = hist.copy()
    if spec.alpha == 1:
        for _ in range(d - 1):
            full = np.convolve(counts, hist)
            folded = full[:q].copy()
            folded[: q - 1] += full[q:]
            counts = folded
    else:
        for _ in range(d - 1):
            nxt = np.zeros(q, dtype=np.int64)
            for v in range(q):
                if hist[v]:
                    np.add.at(nxt, spec.add_idx(r, v), hist[v] * counts)
            counts = nxt
    return counts


def h_variety(spec: FieldSpec, j, d: int) -> Variety:
    """Homogeneous variety in F_q^{d+1}: points (x, x_{d+1}) whose first-d
    norm equals j * x_{d+1}^2.  Requires j != 0."""
    j_idx = j.idx if isinstance(j, FieldElement) else int(j)
    if j_idx == 0:
        raise ValueError("h_variety requires a nonzero j")
    if d < 2:
        raise ValueError("h_variety requires d >= 2")
    q = spec.q
    idx = np.arange(q ** (d + 1), dtype=np.int64)
    first = norm_values(spec, d)[idx // q]
    last = idx % q
    target = spec.mul_idx(j_idx, spec.mul_idx(last, last))
    pts = np.nonzero(first == target)[0]
    return Variety(spec, d + 1, pts, tag=f"hvariety({j_idx},{d})")


def line_punctured(x0: Point) -> Variety:
    """The scalar multiples {t*x0 : t != 0}; q-1 points."""
    if x0.is_zero():
        raise ValueError("line requires a nonzero base point")
    spec = x0.spec
    perms = [scalar_mult_perm(spec, x0.dim, t)[x0.index] for t in range(1, spec.q)]
    return Variety(spec, x0.dim, np.sort(np.array(perms, dtype=np.int64)), tag="line_punctured")


def subspace(spec: FieldSpec, basis: Sequence[Point]) -> Variety:
    """Span of the basis points; raises if they are linearly dependent."""
    if not basis:
        raise ValueError("empty basis")
    dim = basis[0].dim
    k = len(basis)
    span = {0}
    for b in basis:
        if b.dim != dim:
            raise ValueError("basis points have mixed dimensions")
        new = set()
        for t in range(spec.q):
            shift = scalar_mult_perm(spec, dim, t)[b.index]
            shift_pt = point_coords(spec, dim, int(shift))
            for s in span:
                s_pt = point_coords(spec, dim, s)
                summed = tuple(int(spec.add_idx(a, c)) for a, c in zip(s_pt, shift_pt))
                new.add(point_index(spec, summed))
        span = new
    if len(span) != spec.q**k:
        raise ValueError("basis is linearly dependent")
    return Variety(spec, dim, np.array(sorted(span), dtype=np.int64), tag=f"subspace(k={k})")


def full_space(spec: FieldSpec, dim: int) -> Variety:
    return Variety(spec, dim, np.arange(spec.q**dim, dtype=np.int64), tag=f"subspace(k={dim})")


# -- norms -------------------------------------------------------------------------


def lp_norm(f: GridFunction, p: Exponent) -> float:
    """Counting-measure norm (sum |f|^p)^(1/p); max |f| at p = inf."""
    if p == INF:
        return float(np.max(np.abs(f.values))) if f.values.size else 0.0
    if p < 1:
        raise ValueError(f"p={p} must be >= 1")
    mags = np.abs(f.values)
    return float(np.sum(mags**p) ** (1.0 / p))


def Lr_norm_on_variety(f: GridFunction, V: Variety, r: Exponent) -> float:
    """Normalized-counting-measure norm over V: (|V|^-1 sum_V |f|^r)^(1/r)."""
    if len(V) == 0:
        raise ValueError("normalized norm over an empty variety")
    vals = np.abs(f.values[V.points])
    if r == INF:
        return float(np.max(vals))
    if r < 1:
        raise ValueError(f"r={r} must be >= 1")
    return float((np.sum(vals**r) / len(V)) ** (1.0 / r))


def radial_lp_norm(rf: RadialFunction, p: Exponent) -> float:
    """lp norm of the expansion, computed shell-by-shell with exact sizes."""
    sizes = sphere_sizes(rf.spec, rf.dim).astype(np.float64)
    mags = np.abs(rf.radial)
    if p == INF:
        return float(np.max(mags[sizes > 0])) if np.any(sizes > 0) else 0.0
    if p < 1:
        raise ValueError(f"p={p} must be >= 1")
    return float(np.sum(sizes * mags**p) ** (1.0 / p))


# -- distance sets -------------------------------------------------------------------


def distance_set(spec: FieldSpec, E: Union[Sequence[Point], np.ndarray], dim: Optional[int] = None) -> set[int]:
    """{ norm(x - y) : x, y in E } as a set of element indices."""
    if isinstance(E, np.ndarray):
        if dim is None:
            raise ValueError("dim required when passing raw indices")
        idxs = np.asarray(E, dtype=np.int64)
    else:
        if not E:
            raise ValueError("distance set of an empty set")
        dim = E[0].dim
        idxs = np.array([pt.index for pt in E], dtype=np.int64)
    coords = coords_matrix(spec, dim)[idxs]  # (N, dim)
    n = idxs.size
    sq = spec.mul_idx(np.arange(spec.q, dtype=np.int64), np.arange(spec.q, dtype=np.int64))
    out: set[int] = set()
    for i in range(n):
        diff = spec.sub_idx(coords, coords[i])  # (N, dim) broadcast per row
        acc = sq[diff[:, 0]]
        for c in range(1, dim):
            acc = spec.add_idx(acc, sq[diff[:, c]])
        out.update(np.unique(acc).tolist())
    return out


def random_point_set(spec: FieldSpec, dim: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform sample of `size` distinct point indices."""
    total = spec.q**dim
    if size > total:
        raise ValueError(f"requested {size} points from a grid of {total}")
    return np.sort(rng.choice(total, size=size, replace=False))
