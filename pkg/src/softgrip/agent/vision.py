"""Wire contract to the vision-language model, a fixture-backed mock, and grasp-area selection.

Request body: ``{"prompt": str, "image_b64": str, "tools": [str]}``.
Response body: ``{"detections": [{"label", "class", "box": [x, y, w, h],
"confidence"}], "grasp_box": [x, y, w, h] | null, "level": int | null}``.
"""

from __future__ import annotations

import base64
import hashlib
import json
import math
import time
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol, Sequence

from ..policy import MaterialClass, normalize
from .image import Image

Box = tuple[int, int, int, int]


class VisionError(RuntimeError):
    pass


class VisionTransportError(VisionError):
    pass


class VisionSchemaError(VisionError, ValueError):
    pass


class MissingFixture(VisionError, LookupError):
    pass


@dataclass(frozen=True)
class VisionRequest:
    prompt: str
    image_b64: str
    tools: tuple[str, ...] = ()

    @classmethod
    def for_image(cls, prompt: str, img: Image, tools: Sequence[str] = ()) -> "VisionRequest":
        return cls(prompt, base64.b64encode(img.to_bytes()).decode("ascii"), tuple(tools))

    def to_json(self) -> dict:
        return {"prompt": self.prompt, "image_b64": self.image_b64, "tools": list(self.tools)}


@dataclass(frozen=True)
class Detection:
    label: str
    material_class: MaterialClass | None
    box: Box
    confidence: float

    @property
    def is_gripper(self) -> bool:
        return "gripper" in normalize(self.label)

    @property
    def area(self) -> int:
        return self.box[2] * self.box[3]

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "class": None if self.material_class is None else self.material_class.value,
            "box": list(self.box),
            "confidence": self.confidence,
        }


@dataclass(frozen=True)
class VisionResponse:
    detections: tuple[Detection, ...]
    grasp_box: Box | None = None
    level: int | None = None

    @property
    def targets(self) -> tuple[Detection, ...]:
        return tuple(d for d in self.detections if not d.is_gripper)

    def to_dict(self) -> dict:
        return {
            "detections": [d.to_dict() for d in self.detections],
            "grasp_box": None if self.grasp_box is None else list(self.grasp_box),
            "level": self.level,
        }


def _box(value, size: tuple[int, int], what: str) -> Box:
    if not isinstance(value, (list, tuple)) or len(value) != 4:
        raise VisionSchemaError(f"{what} must be [x, y, w, h]")
    if any(isinstance(v, bool) or not isinstance(v, int) for v in value):
        raise VisionSchemaError(f"{what} must hold integers")
    x, y, w, h = value
    width, height = size
    if w <= 0 or h <= 0 or x < 0 or y < 0 or x + w > width or y + h > height:
        raise VisionSchemaError(f"{what} {list(value)} lies outside the {width}x{height} image")
    return (x, y, w, h)


def parse_response(body, image_size: tuple[int, int]) -> VisionResponse:
    if not isinstance(body, dict):
        raise VisionSchemaError("response must be a JSON object")
    unknown = set(body) - {"detections", "grasp_box", "level"}
    if unknown:
        raise VisionSchemaError(f"unexpected response keys {sorted(unknown)}")
    raw = body.get("detections")
    if not isinstance(raw, list):
        raise VisionSchemaError("detections must be a list")
    detections = []
    for i, d in enumerate(raw):
        if not isinstance(d, dict) or set(d) != {"label", "class", "box", "confidence"}:
            raise VisionSchemaError(f"detection {i} must have exactly label, class, box, confidence")
        label = d["label"]
        if not isinstance(label, str) or not label.strip():
            raise VisionSchemaError(f"detection {i}: label must be a nonempty string")
        cls = d["class"]
        if cls is not None:
            try:
                cls = MaterialClass(cls)
            except ValueError:
                raise VisionSchemaError(f"detection {i}: unknown class {cls!r}") from None
        conf = d["confidence"]
        if isinstance(conf, bool) or not isinstance(conf, (int, float)) or not math.isfinite(conf) \
                or not 0.0 <= conf <= 1.0:
            raise VisionSchemaError(f"detection {i}: confidence must lie in [0, 1]")
        detections.append(Detection(label, cls, _box(d["box"], image_size, f"detection {i} box"), float(conf)))
    grasp = body.get("grasp_box")
    grasp = None if grasp is None else _box(grasp, image_size, "grasp_box")
    level = body.get("level")
    if level is not None and (isinstance(level, bool) or not isinstance(level, int) or not 0 <= level <= 4):
        raise VisionSchemaError("level must be an integer 0-4 or null")
    return VisionResponse(tuple(detections), grasp, level)


class VisionClient(Protocol):
    def send(self, body: dict) -> dict: ...


class HttpVisionClient:
    """POSTs the request JSON to a live endpoint."""

    def __init__(self, url: str, timeout: float = 30.0):
        self.url = url
        self.timeout = timeout

    def send(self, body: dict) -> dict:
        data = json.dumps(body).encode("utf-8")
        req = urllib.request.Request(self.url, data=data, method="POST",
                                     headers={"Content-Type": "application/json"})
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                payload = resp.read()
        except (urllib.error.URLError, OSError) as exc:
            raise VisionTransportError(f"vision endpoint unreachable: {exc}") from exc
        try:
            return json.loads(payload)
        except json.JSONDecodeError as exc:
            raise VisionSchemaError("vision endpoint returned invalid JSON") from exc


class MockVisionClient:
    """Answers from canned files keyed by the SHA-256 of the PNM bytes sent.

    ``index.json`` in the fixtures directory maps hex digests to response
    file names relative to that directory.
    """

    def __init__(self, fixtures_dir):
        self.root = Path(fixtures_dir)
        index_path = self.root / "index.json"
        if not index_path.is_file():
            raise MissingFixture(f"no index.json in {self.root}")
        self.index = json.loads(index_path.read_text(encoding="utf-8"))
        self.calls = 0

    def send(self, body: dict) -> dict:
        self.calls += 1
        try:
            raw = base64.b64decode(body["image_b64"], validate=True)
        except (KeyError, ValueError) as exc:
            raise VisionSchemaError("request lacks a valid image_b64") from exc
        digest = hashlib.sha256(raw).hexdigest()
        name = self.index.get(digest)
        if name is None:
            raise MissingFixture(f"no canned response for image {digest[:12]}")
        return json.loads((self.root / name).read_text(encoding="utf-8"))


def query_vision_model(req: VisionRequest, client: VisionClient, image_size: tuple[int, int],
                       retries: int = 2, backoff: float = 0.05,
                       sleep: Callable[[float], None] = time.sleep) -> VisionResponse:
    """Send ``req`` and validate the answer, retrying transport failures."""
    attempt = 0
    while True:
        try:
            body = client.send(req.to_json())
            break
        except VisionTransportError:
            if attempt >= retries:
                raise
            sleep(backoff * 2 ** attempt)
            attempt += 1
    return parse_response(body, image_size)


def best_target(detections: Sequence[Detection]) -> Detection | None:
    targets = [d for d in detections if not d.is_gripper]
    if not targets:
        return None
    # confidence, then larger area, then leftmost, then topmost
    return min(targets, key=lambda d: (-d.confidence, -d.area, d.box[0], d.box[1]))


def central_third(box: Box) -> Box:
    x, y, w, h = box
    dx, dy = w // 3, h // 3
    return (x + dx, y + dy, w - 2 * dx, h - 2 * dy)


def select_grasp_area(response: VisionResponse, img: Image) -> tuple[Detection, Box] | None:
    """Target and grasp rectangle, or ``None`` when only the gripper (or nothing) is seen."""
    target = best_target(response.detections)
    if target is None:
        return None
    box = response.grasp_box if response.grasp_box is not None else central_third(target.box)
    x, y, w, h = box
    x0, y0 = max(0, x), max(0, y)
    x1, y1 = min(img.width, x + w), min(img.height, y + h)
    return target, (x0, y0, max(1, x1 - x0), max(1, y1 - y0))
