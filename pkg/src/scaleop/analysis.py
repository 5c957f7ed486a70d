"""Boundedness-region geometry, certified bounds, and extremal families.

Exponent pairs live at (1/p, 1/s) with exact rational coordinates.  Two
regions matter: the general one with vertices (0,0), (1,0), (1,1/2),
(1/2,1/2), and the radial one where the corner lifts to (1, d/(d+1)).
Inside the general region an algebraic upper bound ((q-1)/q)^(1-1/s) is
certified by interpolating the exact sup-norm and L^2 endpoint constants;
outside, explicit test families (point mass, subspace indicator, sphere
indicators, modulated exponential) give lower bounds whose growth in q is
fitted against exact rational predictions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .chars import char_table, osc_sum
from .field import FieldSpec, get_field
from .grid import (
    GridFunction,
    Lr_norm_on_variety,
    RadialFunction,
    h_variety,
    lp_norm,
    scalar_mult_perm,
    sphere,
    sphere_sizes,
)
from .transform import fourier, s_apply, s_apply_radial

INF = float("inf")
RationalLike = Union[Fraction, int, str, float]

FAMILIES = ("delta", "subspace", "sphere0", "sphere1", "exponential", "radial", "random")
DEFAULT_FAMILIES = ("delta", "subspace", "sphere0", "sphere1", "exponential", "radial")


def _as_fraction(v: RationalLike) -> Fraction:
    if isinstance(v, float):
        if v == INF:
            return Fraction(0)
        return Fraction(v).limit_denominator(10**9)
    return Fraction(v)


@dataclass(frozen=True)
class ExponentPair:
    """The point (1/p, 1/s); infinity maps to coordinate 0."""

    x: Fraction  # 1/p
    y: Fraction  # 1/s

    def __post_init__(self):
        x = _as_fraction(self.x)
        y = _as_fraction(self.y)
        if not (0 <= x <= 1 and 0 <= y <= 1):
            raise ValueError(f"exponent pair ({x}, {y}) outside the unit square")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_ps(cls, p, s) -> "ExponentPair":
        x = Fraction(0) if p == INF else 1 / Fraction(p)
        y = Fraction(0) if s == INF else 1 / Fraction(s)
        return cls(x, y)

    @property
    def p(self) -> Union[Fraction, float]:
        return INF if self.x == 0 else 1 / self.x

    @property
    def s(self) -> Union[Fraction, float]:
        return INF if self.y == 0 else 1 / self.y


@dataclass(frozen=True)
class RegionSpec:
    """Sharp boundedness region, as a vertex list with an equivalent
    half-space form a_x*x + a_y*y <= b (exact rational tests)."""

    kind: str  # "general" or "radial"
    d: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("general", "radial"):
            raise ValueError(f"unknown region kind {self.kind!r}")
        if self.kind == "radial":
            if self.d is None or self.d < 2:
                raise ValueError("radial region requires d >= 2")

    def vertices(self) -> list[tuple[Fraction, Fraction]]:
        if self.kind == "general":
            return [
                (Fraction(0), Fraction(0)),
                (Fraction(1), Fraction(0)),
                (Fraction(1), Fraction(1, 2)),
                (Fraction(1, 2), Fraction(1, 2)),
            ]
        d = self.d
        return [
            (Fraction(0), Fraction(0)),
            (Fraction(1), Fraction(0)),
            (Fraction(1), Fraction(d, d + 1)),
            (Fraction(1, 2), Fraction(1, 2)),
        ]

    def halfspaces(self) -> list[tuple[Fraction, Fraction, Fraction]]:
        common = [
            (Fraction(-1), Fraction(0), Fraction(0)),  # x >= 0
            (Fraction(1), Fraction(0), Fraction(1)),   # x <= 1
            (Fraction(0), Fraction(-1), Fraction(0)),  # y >= 0
            (Fraction(-1), Fraction(1), Fraction(0)),  # y <= x
        ]
        if self.kind == "general":
            return common + [(Fraction(0), Fraction(1), Fraction(1, 2))]  # y <= 1/2
        d = self.d
        return common + [(Fraction(-(d - 1)), Fraction(d + 1), Fraction(1))]

    def contains(self, e: ExponentPair) -> bool:
        return all(ax * e.x + ay * e.y <= b for ax, ay, b in self.halfspaces())


def region_contains(region: RegionSpec, e: ExponentPair) -> bool:
    return region.contains(e)


def is_exceptional(d: int, q: int) -> bool:
    """The degenerate isotropic-circle case: d = 2 with q = 3 mod 4."""
    return d == 2 and q % 4 == 3


# -- certified upper bound ---------------------------------------------------------


def certified_upper_bound(e: ExponentPair, q: int) -> float:
    """Algebraic bound ((q-1)/q)^(1 - 1/s), valid inside the general region.

    Composition: nesting in the input exponent reduces (p, s) to (s, s),
    and interpolation between the exact endpoint constants (q-1)/q at
    sup-norm and sqrt((q-1)/q) at L^2 gives the claimed power.
    """
    if not RegionSpec("general").contains(e):
        raise ValueError(f"exponent pair ({e.x}, {e.y}) is outside the general region")
    return float(Fraction(q - 1, q)) ** float(1 - e.y)


# -- family lower bounds (exact closed forms) --------------------------------------


def lower_bound_delta(e: ExponentPair, q: int, d: int = 2) -> float:
    """Point-mass witness: ||S delta||_s = ((q-1) q^(1-s))^(1/s), input norm 1.

    The closed form (q-1)^y * q^(y-1) extends continuously to s = inf.
    """
    y = float(e.y)
    return (q - 1) ** y * float(q) ** (y - 1.0)


def _subspace_level_sum(q: int, y: float) -> float:
    """c(q, s)^y with c = ((q-1)/q)^s + (q-1) q^(-s); the sup value (q-1)/q
    at y = 0 (s = inf)."""
    if y == 0.0:
        return (q - 1) / q
    s = 1.0 / y
    c = ((q - 1) / q) ** s + (q - 1) * float(q) ** (-s)
    return c**y


def lower_bound_subspace(e: ExponentPair, q: int, d: int, k: Optional[int] = None) -> float:
    """Subspace-indicator witness of dimension k (default k = d)."""
    k = d if k is None else k
    if not 1 <= k <= d:
        raise ValueError(f"k={k} must satisfy 1 <= k <= d={d}")
    x, y = float(e.x), float(e.y)
    L = float(q) ** (k * y) * _subspace_level_sum(q, y)
    R = float(q) ** (k * x)
    return L / R


def lower_bound_exponential_ratio(e: ExponentPair, q: int, d: int) -> float:
    """Modulated-exponential witness g(m) = chi(a.m): |Sg| matches the full-
    space subspace pattern, so the ratio is the k = d closed form."""
    return lower_bound_subspace(e, q, d, k=d)


def _osc_sum_real(spec: FieldSpec, s: float) -> float:
    return osc_sum(char_table(spec), s)


def lower_bound_sphere_radial(e: ExponentPair, spec: FieldSpec, d: int, j: int) -> float:
    """Sphere-indicator witness g = 1 on sphere(j, d), j in {0, 1}.

    Shell arithmetic: the operator output at a point of norm k depends only
    on the solutions of t^2 k = j, so the s-norm collapses to exact sphere
    sizes times a one-dimensional character sum.
    """
    if j not in (0, 1):
        raise ValueError("only j in {0, 1} is used by the necessity tests")
    q = spec.q
    x, y = float(e.x), float(e.y)
    sizes = sphere_sizes(spec, d)
    eta = spec._eta
    if j == 0:
        if y == 0.0:
            L = (q - 1) / q
        else:
            s = 1.0 / y
            L = (float(sizes[0]) * ((q - 1.0) ** s + (q - 1.0))) ** y / q
        R = float(sizes[0]) ** x
        return L / R
    n_same = float(np.sum(sizes[np.asarray(eta) == 1]))
    if y == 0.0:
        L = 2.0 / q
    else:
        s = 1.0 / y
        L = (n_same * _osc_sum_real(spec, s)) ** y / q
    R = float(sizes[1]) ** x
    return L / R


def lower_bound_sphere_radial_oracle(e: ExponentPair, spec: FieldSpec, d: int, j: int) -> float:
    """Same quantity through the radial fast path (small q only)."""
    rf = RadialFunction.shell(spec, d, j)
    table = s_apply_radial(rf)
    sizes = sphere_sizes(spec, d).astype(np.float64)
    mags = np.abs(table)
    if e.y == 0:
        L = float(np.max(mags[sizes > 0, :]))
    else:
        s = float(1 / Fraction(e.y))
        L = float(np.sum(sizes[:, None] * mags**s) ** (1.0 / s))
    R = float(sizes[j]) ** float(e.x)
    return L / R


def exponential_witness(spec: FieldSpec, d: int, j: int = 1) -> tuple[GridFunction, int]:
    """g0(m) = chi(a.m) with a the least-index point on sphere(j, d); returns
    the witness and the index of a."""
    sph = sphere(spec, j, d)
    if len(sph) == 0:
        raise ValueError(f"sphere j={j} is empty")
    a_idx = int(sph.points[0])
    table = char_table(spec)
    # chi(a.m) for every m, via one scalar product per coordinate
    from .grid import coords_matrix, point_coords

    a_coords = point_coords(spec, d, a_idx)
    cm = coords_matrix(spec, d)
    acc = spec.mul_idx(a_coords[0], cm[:, 0])
    for i in range(1, d):
        acc = spec.add_idx(acc, spec.mul_idx(a_coords[i], cm[:, i]))
    return GridFunction(spec, d, table.values[acc]), a_idx


def s_of_exponential(spec: FieldSpec, d: int, a_idx: int) -> GridFunction:
    """Closed-form image of the modulated exponential: (q-1)/q on the
    hyperplane u + a.m = 0 and -1/q elsewhere."""
    from .grid import coords_matrix, point_coords

    q = spec.q
    a_coords = point_coords(spec, d, a_idx)
    idx = np.arange(q ** (d + 1), dtype=np.int64)
    m_idx = idx // q
    u = idx % q
    cm = coords_matrix(spec, d)
    acc = spec.mul_idx(a_coords[0], cm[:, 0])
    for i in range(1, d):
        acc = spec.add_idx(acc, spec.mul_idx(a_coords[i], cm[:, i]))
    lin = spec.add_idx(u, acc[m_idx])
    vals = np.where(lin == 0, (q - 1.0) / q, -1.0 / q).astype(np.complex128)
    return GridFunction(spec, d + 1, vals)


def lower_bound_exponential(spec: FieldSpec, d: int, j: int = 1) -> tuple[float, float]:
    """(||S g0||_2, restricted L^2 norm of its Fourier transform over the
    homogeneous variety); the first value is exactly sqrt(q^(d-1)(q-1))."""
    if j == 0:
        raise ValueError("the modulated-exponential family needs j != 0")
    _, a_idx = exponential_witness(spec, d, j)
    sg = s_of_exponential(spec, d, a_idx)
    l2 = lp_norm(sg, 2)
    hv = h_variety(spec, j, d)
    restricted = Lr_norm_on_variety(fourier(sg), hv, 2)
    return l2, restricted


# -- radial extremes and homogeneous class -----------------------------------------


def radial_extreme_ratio(e: ExponentPair, spec: FieldSpec, d: int) -> float:
    """max over shells j of ||S(shell_j)||_s / ||shell_j||_p; for p = 1 this
    is the exact operator norm on radial inputs (shell indicators scaled to
    unit l1 mass are the extreme points of the radial l1 ball)."""
    q = spec.q
    x, y = float(e.x), float(e.y)
    sizes = sphere_sizes(spec, d)
    eta = np.asarray(spec._eta)
    n_plus = float(np.sum(sizes[eta == 1]))
    n_minus = float(np.sum(sizes[eta == -1]))
    if y == 0.0:
        L0 = (q - 1.0) / q
        L_nonzero = {1: 2.0 / q, -1: 2.0 / q}
    else:
        s = 1.0 / y
        osc = _osc_sum_real(spec, s)
        L0 = (float(sizes[0]) * ((q - 1.0) ** s + (q - 1.0))) ** y / q
        L_nonzero = {
            1: (n_plus * osc) ** y / q,
            -1: (n_minus * osc) ** y / q,
        }
    best = L0 / float(sizes[0]) ** x
    for j in range(1, q):
        best = max(best, L_nonzero[int(eta[j])] / float(sizes[j]) ** x)
    return best


def radial_p1_norm_exact(spec: FieldSpec, d: int, s) -> float:
    """Exact operator norm on radial inputs from l1 to l^s."""
    e = ExponentPair.from_ps(1, s if s != INF else INF)
    return radial_extreme_ratio(e, spec, d)


@dataclass(frozen=True)
class _ProjectiveStructure:
    reps: np.ndarray          # representative index per point
    unique_reps: np.ndarray   # sorted unique representatives
    slot: np.ndarray          # position of each point's rep in unique_reps


def _projective_structure(spec: FieldSpec, d: int) -> _ProjectiveStructure:
    q = spec.q
    reps = np.arange(q**d, dtype=np.int64)
    for t in range(2, q):
        reps = np.minimum(reps, scalar_mult_perm(spec, d, t))
    unique_reps = np.unique(reps)
    slot = np.searchsorted(unique_reps, reps)
    return _ProjectiveStructure(reps, unique_reps, slot)


def sample_homogeneous(spec: FieldSpec, d: int, rng: np.random.Generator) -> GridFunction:
    """Random degree-zero homogeneous function: one complex Gaussian value
    per scaling class (the origin is its own class)."""
    ps = _projective_structure(spec, d)
    n_classes = ps.unique_reps.size
    vals = rng.standard_normal(n_classes) + 1j * rng.standard_normal(n_classes)
    return GridFunction(spec, d, vals[ps.slot])


def homogeneous_class_ratio(spec: FieldSpec, d: int, p, trials: int, seed: int) -> float:
    """max over sampled degree-zero homogeneous g of ||Sg||_p / ||g||_p."""
    best = 0.0
    for trial in range(trials):
        rng = np.random.default_rng([seed, spec.q, d, trial])
        g = sample_homogeneous(spec, d, rng)
        sg = s_apply(g)
        best = max(best, lp_norm(sg, p) / lp_norm(g, p))
    return best


# -- reports, scans, growth fits ----------------------------------------------------


@dataclass
class NormReport:
    q: int
    d: int
    pair: ExponentPair
    lower_bounds: dict[str, float]
    upper: Optional[float]
    in_general: bool
    in_radial: bool
    flags: str


@dataclass
class GrowthFit:
    family: str
    x: Fraction
    y: Fraction
    qs: list[int]
    slope: float
    predicted: Optional[Fraction]
    residual: float

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "x": float(self.x),
            "y": float(self.y),
            "qs": list(self.qs),
            "slope": self.slope,
            "predicted": None if self.predicted is None else float(self.predicted),
            "residual": self.residual,
        }


def predicted_slope(family: str, e: ExponentPair, d: int) -> Optional[Fraction]:
    """Exact rational growth exponent of the family's lower bound in q."""
    x, y = e.x, e.y
    if family == "delta":
        return 2 * y - 1
    if family in ("subspace", "exponential"):
        return d * (y - x)
    if family == "sphere0":
        return (d - 1) * (y - x)
    if family == "sphere1":
        return (d + 1) * y - 1 - (d - 1) * x
    return None


def family_lower_bound(
    family: str,
    e: ExponentPair,
    spec: FieldSpec,
    d: int,
    *,
    trials: int = 0,
    seed: int = 0,
    random_cache: Optional[list[tuple[np.ndarray, np.ndarray]]] = None,
) -> float:
    q = spec.q
    if family == "delta":
        return lower_bound_delta(e, q, d)
    if family == "subspace":
        return lower_bound_subspace(e, q, d, k=d)
    if family == "exponential":
        return lower_bound_exponential_ratio(e, q, d)
    if family == "sphere0":
        return lower_bound_sphere_radial(e, spec, d, 0)
    if family == "sphere1":
        return lower_bound_sphere_radial(e, spec, d, 1)
    if family == "radial":
        return radial_extreme_ratio(e, spec, d)
    if family == "random":
        if not random_cache:
            return 0.0
        best = 0.0
        p = e.p
        s = e.s
        for g_mags, sg_mags in random_cache:
            gn = _norm_from_mags(g_mags, p)
            sn = _norm_from_mags(sg_mags, s)
            best = max(best, sn / gn)
        return best
    raise ValueError(f"unknown family {family!r}")


def _norm_from_mags(mags: np.ndarray, p) -> float:
    if p == INF:
        return float(np.max(mags))
    pf = float(p)
    return float(np.sum(mags**pf) ** (1.0 / pf))


def build_random_cache(spec: FieldSpec, d: int, trials: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    cache = []
    for trial in range(trials):
        rng = np.random.default_rng([seed, spec.q, d, trial, 7])
        vals = rng.standard_normal(spec.q**d) + 1j * rng.standard_normal(spec.q**d)
        g = GridFunction(spec, d, vals)
        cache.append((np.abs(g.values), np.abs(s_apply(g).values)))
    return cache


def rational_grid(resolution: int) -> list[tuple[Fraction, Fraction]]:
    if resolution < 2:
        raise ValueError(f"grid resolution {resolution} must be >= 2")
    step = resolution - 1
    return [
        (Fraction(i, step), Fraction(j, step))
        for i in range(resolution)
        for j in range(resolution)
    ]


def norm_report(
    spec: FieldSpec,
    d: int,
    e: ExponentPair,
    families: Sequence[str],
    *,
    trials: int = 0,
    seed: int = 0,
    random_cache=None,
) -> NormReport:
    general = RegionSpec("general")
    radial_region = RegionSpec("radial", d)
    in_general = general.contains(e)
    lower = {
        fam: family_lower_bound(fam, e, spec, d, trials=trials, seed=seed, random_cache=random_cache)
        for fam in families
    }
    upper = certified_upper_bound(e, spec.q) if in_general else None
    flags = "exceptional" if is_exceptional(d, spec.q) else ""
    return NormReport(
        q=spec.q,
        d=d,
        pair=e,
        lower_bounds=lower,
        upper=upper,
        in_general=in_general,
        in_radial=radial_region.contains(e),
        flags=flags,
    )


def scan(
    d: int,
    qs: Sequence[int],
    grid_resolution: int,
    families: Sequence[str] = DEFAULT_FAMILIES,
    trials: int = 0,
    seed: int = 0,
    threads: int = 1,
) -> list[dict]:
    """One flattened row per (grid point, q, family), sorted so output is
    independent of thread count."""
    for fam in families:
        if fam not in FAMILIES:
            raise ValueError(f"unknown family {fam!r}")
    grid_pts = rational_grid(grid_resolution)

    def rows_for_q(q: int) -> list[dict]:
        spec = get_field(q)
        cache = build_random_cache(spec, d, trials, seed) if "random" in families else None
        out = []
        for x, y in grid_pts:
            e = ExponentPair(x, y)
            rep = norm_report(spec, d, e, families, trials=trials, seed=seed, random_cache=cache)
            for fam in families:
                out.append(
                    {
                        "d": d,
                        "q": q,
                        "p_inv": float(x),
                        "s_inv": float(y),
                        "family": fam,
                        "lower": rep.lower_bounds[fam],
                        "upper": rep.upper,
                        "in_general": rep.in_general,
                        "in_radial": rep.in_radial,
                        "flags": rep.flags,
                    }
                )
        return out

    rows: list[dict] = []
    if threads > 1 and len(qs) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            for chunk in pool.map(rows_for_q, qs):
                rows.extend(chunk)
    else:
        for q in qs:
            rows.extend(rows_for_q(q))
    rows.sort(key=lambda r: (r["p_inv"], r["s_inv"], r["q"], r["family"]))
    return rows


def fit_growth(rows: Iterable[dict], d: Optional[int] = None) -> list[GrowthFit]:
    """Least-squares slope of log(lower bound) against log q per
    (family, grid point); needs at least four q values."""
    groups: dict[tuple[str, float, float], list[tuple[int, float]]] = {}
    dims: dict[tuple[str, float, float], int] = {}
    for r in rows:
        key = (r["family"], r["p_inv"], r["s_inv"])
        groups.setdefault(key, []).append((r["q"], r["lower"]))
        dims[key] = r["d"]
    fits = []
    for key in sorted(groups):
        family, x, y = key
        pts = sorted(set(groups[key]))
        qs = [q for q, _ in pts]
        if len(qs) < 4:
            raise ValueError(f"growth fit needs >= 4 q values, got {len(qs)} for {key}")
        lows = np.array([lo for _, lo in pts], dtype=np.float64)
        if np.any(lows <= 0):
            continue
        lx = np.log(np.array(qs, dtype=np.float64))
        ly = np.log(lows)
        slope, intercept = np.polyfit(lx, ly, 1)
        resid = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
        e = ExponentPair(Fraction(x).limit_denominator(10**6), Fraction(y).limit_denominator(10**6))
        fits.append(
            GrowthFit(
                family=family,
                x=e.x,
                y=e.y,
                qs=qs,
                slope=float(slope),
                predicted=predicted_slope(family, e, d if d is not None else dims[key]),
                residual=resid,
            )
        )
    return fits
