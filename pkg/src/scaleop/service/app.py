"""HTTP facade over the core package.

Every computation the CLI offers is an endpoint here; the CLI is a thin
client of this app (in-process by default, remote with --server).
"""

from __future__ import annotations

from contextlib import contextmanager
from fractions import Fraction

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import analysis, grid, suites, transform
from ..field import clear_custom_moduli, register_modulus
from ..grid import GridFunction, RadialFunction
from . import models

INF = float("inf")


@contextmanager
def _field_override(req, qs):
    """Install a per-request custom modulus (validated), restoring the
    default construction afterwards.  alpha alone is a consistency check.

    The registry is process-global: concurrent requests overriding the
    same q with different moduli would race.  Fine for the in-process CLI
    and single-user servers; do not rely on it under parallel load."""
    if req.modulus is None and req.alpha is None:
        yield
        return
    if qs is None or len(set(qs)) != 1:
        raise HTTPException(
            status_code=422, detail="a field override needs exactly one q value"
        )
    q = next(iter(qs))
    try:
        if req.modulus is not None:
            register_modulus(q, req.modulus, alpha=req.alpha)
        else:
            from ..field import FieldSpec

            base = FieldSpec.from_q(q)
            if req.alpha != base.alpha:
                raise ValueError(
                    f"alpha={req.alpha} inconsistent with q={q} = {base.p}^{base.alpha}"
                )
        yield
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    finally:
        clear_custom_moduli()

app = FastAPI(
    title="scaleop",
    description="Exact norms and certification checks for the scaling-average "
    "operator on finite-field grids",
    version="0.1.0",
)


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/verify", response_model=models.VerifyResponse)
def verify(req: models.VerifyRequest) -> models.VerifyResponse:
    with _field_override(req, req.qs):
        results = suites.run_suites(
            suites=req.suites, qs=req.qs, ds=req.ds, seed=req.seed, osc_n=req.osc_n
        )
    checks = [models.CheckModel(**r.to_dict()) for r in results]
    return models.VerifyResponse(passed=all(c.passed for c in checks), seed=req.seed, checks=checks)


@app.post("/scan", response_model=models.ScanResponse)
def scan(req: models.ScanRequest) -> models.ScanResponse:
    if req.fit and len(set(req.qs)) < 4:
        raise HTTPException(status_code=422, detail="--fit needs at least 4 distinct q values")
    with _field_override(req, req.qs):
        rows = analysis.scan(
            d=req.d,
            qs=sorted(set(req.qs)),
            grid_resolution=req.grid,
            families=req.families,
            trials=req.trials,
            seed=req.seed,
            threads=req.threads,
        )
    fits = None
    if req.fit:
        fits = [models.GrowthFitModel(**f.to_dict()) for f in analysis.fit_growth(rows, d=req.d)]
    return models.ScanResponse(seed=req.seed, rows=[models.ScanRow(**r) for r in rows], fits=fits)


def _parse_exponent(v) -> float:
    if isinstance(v, str):
        if v.lower() in ("inf", "infinity", "oo"):
            return INF
        return float(Fraction(v))
    return float(v)


@app.post("/norm", response_model=models.NormResponse)
def norm(req: models.NormRequest) -> models.NormResponse:
    if (req.function is None) == (req.radial is None):
        raise HTTPException(status_code=422, detail="provide exactly one of function/radial")
    p = _parse_exponent(req.p)
    s = _parse_exponent(req.s)
    if p < 1 or s < 1:
        raise HTTPException(status_code=422, detail="exponents must be >= 1")
    try:
        if req.function is not None:
            g = GridFunction.from_dict(req.function.model_dump())
            input_norm = grid.lp_norm(g, p)
            if input_norm == 0.0:
                raise HTTPException(status_code=422, detail="zero function: ratio undefined")
            sg = transform.s_apply(g)
            output_norm = grid.lp_norm(sg, s)
            fast = False
        else:
            rf = RadialFunction.from_dict(req.radial.model_dump())
            input_norm = grid.radial_lp_norm(rf, p)
            if input_norm == 0.0:
                raise HTTPException(status_code=422, detail="zero function: ratio undefined")
            table = transform.s_apply_radial(rf)
            sizes = grid.sphere_sizes(rf.spec, rf.dim).astype(np.float64)
            mags = np.abs(table)
            if s == INF:
                output_norm = float(np.max(mags[sizes > 0, :]))
            else:
                output_norm = float(np.sum(sizes[:, None] * mags**s) ** (1.0 / s))
            fast = True
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return models.NormResponse(
        input_norm=input_norm,
        output_norm=output_norm,
        ratio=output_norm / input_norm,
        p="inf" if p == INF else repr(p),
        s="inf" if s == INF else repr(s),
        radial_fast_path=fast,
    )


@app.post("/region", response_model=models.RegionResponse)
def region(req: models.RegionRequest) -> models.RegionResponse:
    try:
        spec = analysis.RegionSpec(req.kind, req.d)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    verts = spec.vertices()
    return models.RegionResponse(
        kind=req.kind,
        d=req.d,
        vertices=[(str(vx), str(vy)) for vx, vy in verts],
        vertices_float=[(float(vx), float(vy)) for vx, vy in verts],
        halfspaces=[
            models.HalfspaceModel(a_x=str(ax), a_y=str(ay), b=str(b))
            for ax, ay, b in spec.halfspaces()
        ],
    )


@app.post("/distance", response_model=models.DistanceResponse)
def distance(req: models.DistanceRequest) -> models.DistanceResponse:
    from ..field import get_field

    if req.size > req.q**req.d:
        raise HTTPException(
            status_code=422,
            detail=f"size {req.size} exceeds the number of grid points {req.q**req.d}",
        )
    threshold = 2 * req.q ** ((req.d + 1) / 2)
    trials = []
    with _field_override(req, [req.q]):
        spec = get_field(req.q)
        for trial in range(req.trials):
            rng = np.random.default_rng([req.seed, trial, 14])
            E = grid.random_point_set(spec, req.d, req.size, rng)
            trials.append(
                models.DistanceTrial(
                    trial=trial, distinct_distances=len(grid.distance_set(spec, E, dim=req.d))
                )
            )
    return models.DistanceResponse(
        q=req.q,
        d=req.d,
        size=req.size,
        threshold=threshold,
        above_threshold=req.size > threshold,
        all_full=all(t.distinct_distances == req.q for t in trials),
        seed=req.seed,
        trials=trials,
    )
