"""Regenerate the synthetic camera fixtures and canned vision responses.

    python tools/make_fixtures.py [output_dir]

Images are drawn procedurally with a seeded generator so the bytes are
stable.  Each canned response is indexed under the hash of the raw image and
of the image as the default workflow sends it (after gating/enhancement).
"""

import json
import sys
from pathlib import Path

import numpy as np

from softgrip.agent.enhance import enhance, should_enhance
from softgrip.agent.image import Image, luminance_stats
from softgrip.agent.workflow import AgentConfig

W, H = 96, 72
OUT = Path(__file__).resolve().parents[1] / "src" / "softgrip" / "data" / "fixtures"


def scene(seed, background, objects, noise=6.0):
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:H, 0:W]
    img = np.empty((H, W, 3), dtype=float)
    img[:] = background
    img += (xx / W)[..., None] * 12.0  # mild lighting gradient
    for cx, cy, rx, ry, color in objects:
        mask = ((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2 <= 1.0
        img[mask] = color
    img += rng.normal(0.0, noise, img.shape)
    return Image(np.clip(np.rint(img), 0, 255).astype(np.uint8))


# gripper fingers drawn at the top edge of every scene
GRIPPER = [(20, 6, 5, 6, (170, 170, 175)), (76, 6, 5, 6, (170, 170, 175))]
GRIPPER_DET = {"label": "gripper", "class": None, "box": [14, 0, 68, 13], "confidence": 0.97}


def det(label, cls, box, conf):
    return {"label": label, "class": cls, "box": box, "confidence": conf}


FIXTURES = {
    "jelly_bright": (
        scene(1, (150, 140, 130), GRIPPER + [(48, 44, 14, 11, (230, 120, 150))]),
        {"detections": [GRIPPER_DET, det("jelly", "fragile", [34, 33, 29, 23], 0.93)],
         "grasp_box": [40, 38, 17, 13], "level": 0},
        [{"result": "correct"}],
    ),
    "pear": (
        scene(2, (120, 118, 110), GRIPPER + [(45, 46, 12, 15, (170, 190, 70))]),
        {"detections": [det("pear", "deformable", [33, 31, 25, 31], 0.91)],
         "grasp_box": None, "level": 1},
        [{"result": "correct"}],
    ),
    "durian_lowlight": (
        scene(3, (18, 16, 14), GRIPPER + [(50, 45, 17, 14, (60, 58, 25))], noise=4.0),
        {"detections": [GRIPPER_DET, det("durian shell", "deformable", [33, 31, 35, 29], 0.78)],
         "grasp_box": [40, 36, 21, 18], "level": 1},
        [{"result": "slip", "cue": "hard"}, {"result": "correct"}],
    ),
    "towel_noon": (
        scene(4, (232, 230, 226), GRIPPER + [(48, 47, 22, 12, (250, 250, 248))], noise=3.0),
        {"detections": [det("towel", "tough-deformable", [26, 35, 45, 25], 0.88)],
         "grasp_box": None, "level": 2},
        [{"result": "correct"}],
    ),
    "dumbbell": (
        scene(5, (110, 112, 115), GRIPPER + [(48, 48, 20, 7, (60, 62, 66))]),
        {"detections": [det("dumbbell", None, [28, 41, 41, 15], 0.95), det("mouse", "hard", [5, 55, 14, 10], 0.95)],
         "grasp_box": None, "level": None},
        [{"result": "correct"}],
    ),
    "gripper_only": (
        scene(6, (125, 125, 125), GRIPPER),
        {"detections": [GRIPPER_DET], "grasp_box": None, "level": None},
        [],
    ),
    "empty_table": (
        scene(7, (135, 130, 120), []),
        {"detections": [], "grasp_box": None, "level": None},
        [],
    ),
}


def main(out=OUT):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    config = AgentConfig()
    index = {}
    for name, (img, response, script) in FIXTURES.items():
        img.save(out / f"{name}.ppm")
        (out / f"{name}.json").write_text(json.dumps(response, indent=2) + "\n")
        if script:
            (out / f"{name}.script.json").write_text(json.dumps(script, indent=2) + "\n")
        mode = should_enhance(luminance_stats(img), config.thresholds)
        sent = enhance(img, mode, config.enhance_params)
        for digest in {img.sha256(), sent.sha256()}:
            index[digest] = f"{name}.json"
        print(f"{name}: mean luma {luminance_stats(img).mean:.1f} -> {mode.value}")
    (out / "index.json").write_text(json.dumps(index, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main(*sys.argv[1:])
