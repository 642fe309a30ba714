"""HTTP service exposing the analysis pipeline over a loaded bundle.

Endpoints:

    GET  /api/groupings                 groupings + per-class group sizes
    POST /api/analyze                   run one analysis, canonical JSON
    GET  /api/features/{f}/top          most-activating rows for a feature
    GET  /api/heatmap/{f}/{row}         rendered PGM heatmap (binary)

POST /api/analyze returns the exact canonical report bytes the CLI
writes for the same configuration — responses bypass the framework's
serializer so the two paths cannot drift. Invalid request payloads map
to 400 (not the framework default 422); unknown classes, features, and
missing feature maps map to 404. Analyses are memoized in a small
insertion-ordered LRU keyed by the canonical form of the request.
"""

from __future__ import annotations

import threading
from collections import OrderedDict
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from barlow import __version__, rules, viz
from barlow.dataset import DatasetBundle, Grouping, load_bundle
from barlow.report import build_report, canonical_json
from barlow.rules import AnalysisConfig
from barlow.selection import top_activating

ANALYZE_CACHE_SIZE = 128


class AnalyzeRequest(BaseModel):
    grouping: Literal["label", "prediction"]
    class_index: int
    k: int = 20
    max_depth: int = 1
    rho: float = 0.1
    tau: float = 0.2
    min_samples_split: int = 2
    disabled_features: list[int] = Field(default_factory=list)
    top_count: int = 6


class ClassGroupInfo(BaseModel):
    index: int
    name: str
    label_size: int
    label_errors: int
    prediction_size: int
    prediction_errors: int


class GroupingsResponse(BaseModel):
    tool: str
    version: str
    n_images: int
    n_features: int
    groupings: list[str]
    classes: list[ClassGroupInfo]


class FeatureTopResponse(BaseModel):
    feature: int
    grouping: str
    class_index: int
    rows: list[int]
    image_ids: list[str]
    activations: list[float]


def create_app(
    bundle: DatasetBundle | str | Path, static_dir: str | Path | None = None
) -> FastAPI:
    """Build the service around one bundle (path or already-loaded)."""
    if not isinstance(bundle, DatasetBundle):
        bundle = load_bundle(bundle)

    app = FastAPI(title="barlow", version=__version__)
    cache: OrderedDict[bytes, bytes] = OrderedDict()
    cache_lock = threading.Lock()

    @app.exception_handler(RequestValidationError)
    def invalid_request(_, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    def resolve_grouping(value: str) -> Grouping:
        return Grouping(value)

    def require_class(class_index: int) -> None:
        if class_index not in bundle.classes:
            raise HTTPException(
                status_code=404, detail=f"unknown class index {class_index}"
            )

    def require_feature(feature_index: int) -> None:
        if not 0 <= feature_index < bundle.n_features:
            raise HTTPException(
                status_code=404, detail=f"unknown feature index {feature_index}"
            )

    @app.get("/api/groupings", response_model=GroupingsResponse)
    def groupings() -> GroupingsResponse:
        classes = []
        for index in sorted(bundle.classes):
            label_rows = bundle.group_rows(Grouping.LABEL, index)
            pred_rows = bundle.group_rows(Grouping.PREDICTION, index)
            classes.append(
                ClassGroupInfo(
                    index=index,
                    name=bundle.classes[index],
                    label_size=int(label_rows.size),
                    label_errors=int(bundle.failures[label_rows].sum()),
                    prediction_size=int(pred_rows.size),
                    prediction_errors=int(bundle.failures[pred_rows].sum()),
                )
            )
        return GroupingsResponse(
            tool="barlow",
            version=__version__,
            n_images=bundle.n_images,
            n_features=bundle.n_features,
            groupings=[g.value for g in Grouping],
            classes=classes,
        )

    @app.post("/api/analyze")
    def analyze(request: AnalyzeRequest) -> Response:
        require_class(request.class_index)
        try:
            config = AnalysisConfig(
                k=request.k,
                max_depth=request.max_depth,
                rho=request.rho,
                tau=request.tau,
                min_samples_split=request.min_samples_split,
                disabled_features=tuple(request.disabled_features),
                top_count=request.top_count,
            )
        except (ValueError, IndexError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        if any(
            not 0 <= f < bundle.n_features for f in config.disabled_features
        ):
            raise HTTPException(
                status_code=400,
                detail=f"disabled features out of range [0, {bundle.n_features})",
            )

        cache_key = canonical_json(
            {
                "grouping": request.grouping,
                "class_index": request.class_index,
                "k": config.k,
                "max_depth": config.max_depth,
                "rho": config.rho,
                "tau": config.tau,
                "min_samples_split": config.min_samples_split,
                "disabled_features": list(config.disabled_features),
                "top_count": config.top_count,
            }
        )
        with cache_lock:
            if cache_key in cache:
                cache.move_to_end(cache_key)
                body = cache[cache_key]
                return Response(content=body, media_type="application/json")

        result = rules.analyze_grouping(
            bundle, resolve_grouping(request.grouping), request.class_index, config
        )
        body = build_report(bundle, result).canonical()
        with cache_lock:
            cache[cache_key] = body
            cache.move_to_end(cache_key)
            while len(cache) > ANALYZE_CACHE_SIZE:
                cache.popitem(last=False)
        return Response(content=body, media_type="application/json")

    @app.get("/api/features/{feature_index}/top", response_model=FeatureTopResponse)
    def feature_top(
        feature_index: int,
        grouping: Literal["label", "prediction"] = Query(...),
        class_index: int = Query(...),
        count: int = Query(default=6, ge=1, le=64),
    ) -> FeatureTopResponse:
        require_feature(feature_index)
        require_class(class_index)
        rows = bundle.group_rows(resolve_grouping(grouping), class_index)
        top_rows = top_activating(bundle.features, rows, feature_index, count)
        return FeatureTopResponse(
            feature=feature_index,
            grouping=grouping,
            class_index=class_index,
            rows=top_rows,
            image_ids=[bundle.records[r].image_id for r in top_rows],
            activations=[float(bundle.features[r, feature_index]) for r in top_rows],
        )

    @app.get("/api/heatmap/{feature_index}/{image_row}")
    def heatmap(
        feature_index: int,
        image_row: int,
        width: int = Query(default=224, ge=1, le=4096),
        height: int = Query(default=224, ge=1, le=4096),
    ) -> Response:
        require_feature(feature_index)
        if not 0 <= image_row < bundle.n_images:
            raise HTTPException(status_code=404, detail=f"unknown image row {image_row}")
        if bundle.feature_maps_dir is None:
            raise HTTPException(
                status_code=404, detail="bundle carries no feature maps"
            )
        path = viz.fmap_path(bundle.feature_maps_dir, feature_index, image_row)
        if not path.is_file():
            raise HTTPException(
                status_code=404,
                detail=f"no feature map for feature {feature_index}, row {image_row}",
            )
        fmap = viz.read_fmap(path, feature_index=feature_index, image_row=image_row)
        try:
            rendered = viz.upsample_bilinear(viz.normalize(fmap), height, width)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return Response(
            content=viz.pgm_bytes(rendered), media_type="image/x-portable-graymap"
        )

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="static")

    return app
