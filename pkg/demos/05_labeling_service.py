"""Driving the human-in-the-loop labeling service end to end.

The adaptive labeler also runs behind an HTTP API: the service proposes
point locations inside a unit, a human (here: a script that reads the true
raster) labels them one by one, and the service recomputes proportions, the
confidence interval, and the stop decision after every click.  This demo
exercises the real FastAPI app in-process and prints the session as an
interpreter would experience it.

For the interactive version, start `subsample-lab serve --port 8000` and
open the browser client in frontend/ — it renders the same payloads.

Run:  python3 demos/05_labeling_service.py
"""

import numpy as np
from fastapi.testclient import TestClient

from subsample_lab.raster import generate_patch_mosaic
from subsample_lab.service import SessionStore, create_app

SIDE = 30

raster = generate_patch_mosaic(SIDE, SIDE, class_count=3, patch_density=300,
                               seed=21)
client = TestClient(create_app(SessionStore()))

created = client.post("/sessions", json={
    "legend": {"type": "binary", "classes": [1], "threshold": 0.5},
    "alpha": 0.05,
    "n_max": 60,
    "unit": {"side": SIDE},
    "class_count": 3,
    "seed": 7,
}).json()
session_id = created["session_id"]
print(f"session {session_id}: {len(created['proposed_points'])} points proposed\n")

state = client.get(f"/sessions/{session_id}").json()
while state["status"] == "Active":
    point = next(p for p in state["proposed_points"] if "class" not in p)
    row, col = int(point["y"] * SIDE), int(point["x"] * SIDE)
    label = int(raster.values[row, col])
    state = client.post(f"/sessions/{session_id}/labels",
                        json={"point_index": point["index"],
                              "class": label}).json()
    ci = state["ci"]
    print(f"point {point['index']:2d} at ({point['x']:.3f}, {point['y']:.3f}) "
          f"-> class {label} | n={state['n_used']:2d} "
          f"target share {state['proportions'][1]:.2f} "
          f"ci [{ci['lower']:.3f}, {ci['upper']:.3f}]")

final = state["final_label"]
print(f"\n{state['status']}: label {final['value']} "
      f"after {state['n_used']} of {state['n_max']} points")

trace = client.get(f"/sessions/{session_id}/trace").json()["trace"]
print(f"stop-check trace has {len(trace)} entries; last: {trace[-1]}")
