#!/usr/bin/env python3
"""Build a small demo store (motions, annotations, profiles) for the server.

Writes a store snapshot JSON plus an exported dataset ZIP; point the
server at the snapshot with `annotool serve --store demo_store.json`.
"""

import argparse
import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import random

from annotool.ingest import MotionDocument, MotionFrame, standard_dof_names, write_c3d
from annotool.ingest.c3d import C3dDocument
from annotool.store import MotionStore

import numpy as np

SENTENCES = [
    "a person walks forward and stops",
    "a person walks in a circle to the left",
    "a person walks in a circle to the right",
    "someone picks up a box and puts it down",
    "a person kicks a ball with the right foot",
    "a person dances a waltz with a partner",
    "someone waves with the left hand",
    "a person turns around and keeps walking",
]


def demo_motion(rng: random.Random, frames: int = 120, rate: float = 100.0) -> MotionDocument:
    dof = standard_dof_names()
    n_joints = len(dof) - 6
    phase = [rng.uniform(0, 2 * math.pi) for _ in range(n_joints)]
    amp = [rng.uniform(0.05, 0.4) for _ in range(n_joints)]
    out = []
    for i in range(frames):
        t = i / rate
        out.append(
            MotionFrame(
                timestamp=t,
                root_position=(0.3 * t, 0.0, 0.9),
                root_rotation=(0.0, 0.0, 0.05 * math.sin(t)),
                joint_values=tuple(
                    amp[j] * math.sin(2.0 * math.pi * 0.8 * t + phase[j])
                    for j in range(n_joints)
                ),
            )
        )
    return MotionDocument(model_name="reference-body", dof_names=dof, frames=tuple(out))


def demo_c3d(rng: random.Random, frames: int = 60) -> bytes:
    points = np.array(
        [
            [
                [100.0 * math.sin(0.1 * f + m), 50.0 * m, 900.0 + 10.0 * math.cos(0.1 * f)]
                for m in range(4)
            ]
            for f in range(frames)
        ],
        dtype=np.float32,
    )
    doc = C3dDocument(
        marker_labels=("LSHO", "RSHO", "LKNE", "RKNE"),
        sample_rate=100.0,
        points=points,
        residuals=np.zeros((frames, 4), dtype=np.float32),
    )
    return write_c3d(doc)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--motions", type=int, default=24)
    parser.add_argument("--annotations", type=int, default=60)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--store-out", default="demo_store.json")
    parser.add_argument("--zip-out", default="demo_dataset.zip")
    args = parser.parse_args()

    rng = random.Random(args.seed)
    store = MotionStore()
    for i in range(args.motions):
        store.add_motion(
            motion=demo_motion(rng),
            raw_c3d=demo_c3d(rng) if i % 3 == 0 else None,
            source_institution=("KIT", "CMU", "EKUT")[i % 3],
            source_database_id=f"demo-{i:04d}",
        )
    ids = store.entry_ids()
    annotators = ["maya", "jon", "ines", "pat"]
    for k in range(args.annotations):
        store.add_annotation(
            ids[rng.randrange(len(ids))],
            annotators[rng.randrange(len(annotators))],
            SENTENCES[rng.randrange(len(SENTENCES))],
        )
    store.save(args.store_out)
    Path(args.zip_out).write_bytes(store.export_dataset("demo"))
    print(f"wrote {args.store_out} ({args.motions} motions, {args.annotations} annotations)")
    print(f"wrote {args.zip_out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
