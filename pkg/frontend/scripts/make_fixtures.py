"""Capture real server responses as frontend test fixtures.

The explorer is tested against byte-exact payloads from the analysis
server, not hand-written approximations.  This script builds a small
synthetic bundle, runs the FastAPI app against it in-process, and saves
selected responses under tests/fixtures/.  Re-run it whenever the server's
wire format changes:

    python3 frontend/scripts/make_fixtures.py
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from fastapi.testclient import TestClient

from barlow.service import create_app
from barlow.synth import SyntheticSpec, generate_suite
from barlow.dataset import save_bundle
from barlow import viz

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

SPECS = [
    SyntheticSpec(
        n_images=400,
        n_features=32,
        class_index=3,
        class_name="purse",
        planted_feature=7,
        planted_threshold=2.0,
        p_high=0.7,
        p_low=0.05,
        seed=11,
    ),
    SyntheticSpec(
        n_images=300,
        n_features=32,
        class_index=5,
        class_name="rhodesian ridgeback",
        planted_feature=19,
        planted_threshold=1.0,
        p_high=0.6,
        p_low=0.1,
        seed=12,
    ),
]


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    bundle_dir = FIXTURES.parent / "_bundle"

    features, records, classes = generate_suite(SPECS)
    save_bundle(bundle_dir, features, records, classes, feature_maps_dir="fmaps")

    client = TestClient(create_app(bundle_dir))

    def save(name: str, payload: bytes) -> None:
        (FIXTURES / name).write_bytes(payload)
        print(f"wrote {name} ({len(payload)} bytes)")

    save("groupings.json", client.get("/api/groupings").content)

    base = {"grouping": "label", "class_index": 3}
    default = client.post("/api/analyze", json=base)
    assert default.status_code == 200, default.text
    save("report_default.json", default.content)

    root_feature = json.loads(default.content)["tree"]["split"]["feature"]

    depth2 = client.post("/api/analyze", json={**base, "max_depth": 2})
    assert depth2.status_code == 200, depth2.text
    save("report_depth2.json", depth2.content)

    disabled = client.post(
        "/api/analyze", json={**base, "disabled_features": [root_feature]}
    )
    assert disabled.status_code == 200, disabled.text
    save("report_disabled.json", disabled.content)

    top = client.get(
        f"/api/features/{root_feature}/top",
        params={"grouping": "label", "class_index": 3, "count": 6},
    )
    assert top.status_code == 200, top.text
    save("feature_top.json", top.content)

    # One spatial map so the heatmap route has something to render.
    top_row = json.loads(top.content)["rows"][0]
    rng = np.random.default_rng(99)
    viz.write_fmap(
        viz.fmap_path(bundle_dir / "fmaps", root_feature, top_row),
        viz.FeatureMap(rng.random((7, 7)).astype("float32")),
    )
    heatmap = client.get(f"/api/heatmap/{root_feature}/{top_row}")
    assert heatmap.status_code == 200, heatmap.text
    save("heatmap.pgm", heatmap.content)

    meta = {
        "root_feature": root_feature,
        "heatmap_row": top_row,
        "class_index": 3,
        "grouping": "label",
    }
    save("meta.json", (json.dumps(meta, indent=2) + "\n").encode())


if __name__ == "__main__":
    main()
