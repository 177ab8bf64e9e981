import math

import pytest

from annotool.ingest import MotionDocument, MotionFrame, standard_dof_names
from annotool.store import MotionStore

# Walking-dominated corpus with a small dissimilar cluster and one
# injected fragment; shared by the selection/analysis tests.
WALK_TEXTS = [
    "a person walks forward and stops",
    "a person walks in a circle to the left",
    "a person walks in a circle to the right",
    "a person walks forward quickly",
    "a person walks backward slowly",
]
CARTWHEEL_TEXTS = [
    "a person performs a slow cartwheel to the left",
    "a person performs a fast cartwheel to the right",
]
FRAGMENT_TEXT = "person dancing the"

DOMINANT_KEYWORD = "walks"
RARE_KEYWORD = "cartwheel"


def two_cluster_texts_by_motion():
    """10 walking motions x 3 annotations, 2 rare motions x 2, 1 fragment."""
    grouped = {}
    for i in range(10):
        grouped[f"walk-{i}"] = [WALK_TEXTS[(i + k) % len(WALK_TEXTS)] for k in range(3)]
    grouped["rare-0"] = [CARTWHEEL_TEXTS[0], CARTWHEEL_TEXTS[0]]
    grouped["rare-1"] = [CARTWHEEL_TEXTS[1], CARTWHEEL_TEXTS[1]]
    grouped["fragment-0"] = [FRAGMENT_TEXT]
    return grouped


def all_two_cluster_texts():
    return [t for texts in two_cluster_texts_by_motion().values() for t in texts]


def make_motion_document(
    n_frames: int = 2, rate: float = 100.0, amplitude: float = 0.1, name: str = "reference-body"
) -> MotionDocument:
    dof = standard_dof_names()
    n_joints = len(dof) - 6
    frames = []
    for i in range(n_frames):
        t = i / rate
        frames.append(
            MotionFrame(
                timestamp=t,
                root_position=(0.01 * i, 0.0, 0.9),
                root_rotation=(0.0, 0.0, 0.001 * i),
                joint_values=tuple(
                    amplitude * math.sin(0.5 * j + 2.0 * t) for j in range(n_joints)
                ),
            )
        )
    return MotionDocument(model_name=name, dof_names=dof, frames=tuple(frames))


def populate_store(
    n_motions: int = 5, *, with_docs: bool = True, clock=None
) -> MotionStore:
    store = MotionStore() if clock is None else MotionStore(clock=clock)
    for i in range(n_motions):
        store.add_motion(
            motion=make_motion_document(n_frames=3 + i) if with_docs else None,
            source_institution="KIT" if i % 2 == 0 else "CMU",
            source_database_id=f"db-{i:03d}",
        )
    return store


@pytest.fixture
def motion_document():
    return make_motion_document(n_frames=5)


@pytest.fixture
def small_store():
    return populate_store(5)
