"""The grasp workflow as a deterministic state machine.

Enhance -> Identify -> GraspArea -> Execute -> Record, then either Done or
Adapt -> Execute again until the attempt succeeds or retries run out.
"""

from __future__ import annotations

import enum
import hashlib
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Protocol, Sequence

from ..ledger import JsonlLedger, dumps
from ..policy import (
    GripPlan,
    OutcomeRecord,
    PretensionTable,
    UnclassifiedMaterial,
    adapt,
    classify_material,
    make_plan,
    normalize,
)
from .enhance import (
    EnhanceParams,
    EnhancerHookError,
    GateThresholds,
    Mode,
    enhance,
    run_external_enhancer,
    should_enhance,
)
from .image import Image, luminance_stats
from .prompt import DEFAULT_TOOLS, MemoryNote, build_prompt
from .vision import (
    VisionClient,
    VisionRequest,
    VisionSchemaError,
    VisionTransportError,
    query_vision_model,
    select_grasp_area,
)


class Stage(str, enum.Enum):
    ENHANCE = "Enhance"
    IDENTIFY = "Identify"
    GRASP_AREA = "GraspArea"
    EXECUTE = "Execute"
    RECORD = "Record"
    ADAPT = "Adapt"
    DONE = "Done"


TRANSITIONS = {
    None: {Stage.ENHANCE},
    Stage.ENHANCE: {Stage.IDENTIFY},
    Stage.IDENTIFY: {Stage.GRASP_AREA, Stage.DONE},
    Stage.GRASP_AREA: {Stage.EXECUTE, Stage.DONE},
    Stage.EXECUTE: {Stage.RECORD},
    Stage.RECORD: {Stage.ADAPT, Stage.DONE},
    Stage.ADAPT: {Stage.EXECUTE},
    Stage.DONE: set(),
}

STATUSES = ("correct", "abnormal", "no-target", "aborted")


class WorkflowError(RuntimeError):
    pass


@dataclass(frozen=True)
class AgentConfig:
    task: str = "Pick up the target object in front of the gripper without damaging it."
    thresholds: GateThresholds = GateThresholds()
    enhance_params: EnhanceParams = EnhanceParams()
    pretension: PretensionTable = PretensionTable()
    max_retries: int = 2
    memory_k: int = 5
    vision_retries: int = 2
    enhancer_command: tuple[str, ...] | None = None
    reuse_history: bool = True

    def __post_init__(self):
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.memory_k < 0:
            raise ValueError("memory_k must be >= 0")

    def fingerprint(self) -> dict:
        return {
            "task": self.task,
            "thresholds": [self.thresholds.low, self.thresholds.high],
            "enhance": self.enhance_params.to_dict(),
            "pretension": [list(self.pretension.ratios), self.pretension.actuator_gain],
            "max_retries": self.max_retries,
            "memory_k": self.memory_k,
            "enhancer_command": None if self.enhancer_command is None else list(self.enhancer_command),
            "reuse_history": self.reuse_history,
        }


# -- executors ---------------------------------------------------------------


@dataclass(frozen=True)
class ExecutionResult:
    outcome: str  # "correct" | "abnormal"
    failure: str = "none"
    rigidity_cue: str | None = None


class Executor(Protocol):
    def execute(self, plan: GripPlan, attempt: int) -> ExecutionResult: ...


class ScriptedExecutor:
    """Replays a fixed list of results, one per attempt.

    Steps are dicts like ``{"result": "slip", "cue": "hard"}`` where result
    is ``correct``, ``slip`` or ``crush``.
    """

    def __init__(self, steps: Sequence[dict]):
        if not steps:
            raise ValueError("script needs at least one step")
        self.steps = [self._parse(s) for s in steps]

    @staticmethod
    def _parse(step: dict) -> ExecutionResult:
        result = step["result"]
        cue = step.get("cue")
        if result == "correct":
            return ExecutionResult("correct", "none", cue)
        if result in ("slip", "crush"):
            return ExecutionResult("abnormal", result, cue)
        raise ValueError(f"unknown scripted result {result!r}")

    def execute(self, plan: GripPlan, attempt: int) -> ExecutionResult:
        if attempt >= len(self.steps):
            raise WorkflowError(f"script has no step for attempt {attempt}")
        return self.steps[attempt]


class StochasticExecutor:
    """Seeded simulated grasp: a matching level usually holds, a wrong one usually fails.

    Too-soft plans fail by slipping (with a hard-surface cue when the miss is
    two or more levels); too-stiff plans fail by crushing.
    """

    def __init__(self, true_level: int, seed: int = 0, p_match: float = 0.95, p_miss: float = 0.3):
        self.true_level = true_level
        self.rng = random.Random(seed)
        self.p_match = p_match
        self.p_miss = p_miss

    def execute(self, plan: GripPlan, attempt: int) -> ExecutionResult:
        diff = plan.level - self.true_level
        p = self.p_match if diff == 0 else self.p_miss / abs(diff)
        if self.rng.random() < p:
            return ExecutionResult("correct")
        if diff < 0:
            return ExecutionResult("abnormal", "slip", "hard" if diff <= -2 else None)
        if diff > 0:
            return ExecutionResult("abnormal", "crush", "soft" if diff >= 2 else None)
        return ExecutionResult("abnormal", self.rng.choice(("slip", "crush")))


class TickClock:
    """Logical clock; wall time would break byte-identical episodes."""

    def __init__(self, start: float = 0.0, step: float = 1.0):
        self.t = start - step
        self.step = step

    def __call__(self) -> float:
        self.t += self.step
        return self.t


# -- episode -----------------------------------------------------------------


@dataclass
class Attempt:
    plan: GripPlan
    record: OutcomeRecord
    revised_level: int | None = None

    def to_dict(self) -> dict:
        return {"plan": self.plan.to_dict(), "record": self.record.to_dict(),
                "revised_level": self.revised_level}

    @classmethod
    def from_dict(cls, d: dict) -> "Attempt":
        return cls(GripPlan.from_dict(d["plan"]), OutcomeRecord.from_dict(d["record"]), d["revised_level"])


@dataclass
class Episode:
    id: str
    image_sha256: str
    image_ref: str | None = None
    enhancement: dict = field(default_factory=dict)
    stages: list = field(default_factory=list)  # [stage name, time]
    target: dict | None = None
    attempts: list = field(default_factory=list)
    retries: int = 0
    status: str | None = None
    error: str | None = None

    @property
    def current(self) -> Stage | None:
        return Stage(self.stages[-1][0]) if self.stages else None

    def visit(self, stage: Stage, t: float) -> None:
        if stage not in TRANSITIONS[self.current]:
            raise WorkflowError(f"illegal transition {self.current} -> {stage}")
        if stage is Stage.ADAPT and (not self.attempts or self.attempts[-1].record.outcome != "abnormal"):
            raise WorkflowError("Adapt requires a preceding abnormal Record")
        self.stages.append([stage.value, t])

    def finish(self, status: str, t: float, error: str | None = None) -> None:
        if status not in STATUSES:
            raise ValueError(f"bad status {status!r}")
        self.visit(Stage.DONE, t)
        self.status = status
        self.error = error

    @property
    def plan(self) -> GripPlan | None:
        return self.attempts[-1].plan if self.attempts else None

    @property
    def records(self) -> list[OutcomeRecord]:
        return [a.record for a in self.attempts]

    def memory_note(self) -> MemoryNote | None:
        if self.target is None or not self.attempts:
            return None
        return MemoryNote(self.target["label"], tuple(a.record.level for a in self.attempts),
                          tuple(a.record.failure for a in self.attempts), self.status or "?")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "image_sha256": self.image_sha256,
            "image_ref": self.image_ref,
            "enhancement": self.enhancement,
            "stages": [list(s) for s in self.stages],
            "target": self.target,
            "attempts": [a.to_dict() for a in self.attempts],
            "retries": self.retries,
            "status": self.status,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Episode":
        return cls(
            id=d["id"],
            image_sha256=d["image_sha256"],
            image_ref=d["image_ref"],
            enhancement=d["enhancement"],
            stages=[list(s) for s in d["stages"]],
            target=d["target"],
            attempts=[Attempt.from_dict(a) for a in d["attempts"]],
            retries=d["retries"],
            status=d["status"],
            error=d["error"],
        )

    def serialize(self) -> str:
        return dumps(self.to_dict())


EPISODE_SCHEMA = "softgrip.episode"
EPISODE_SCHEMA_VERSION = 1


def episode_ledger(path) -> JsonlLedger[Episode]:
    return JsonlLedger(path, EPISODE_SCHEMA, EPISODE_SCHEMA_VERSION, Episode.to_dict, Episode.from_dict)


# -- run ---------------------------------------------------------------------


def _episode_id(img: Image, config: AgentConfig, seed: int | None, prior: int) -> str:
    key = dumps({"image": img.sha256(), "config": config.fingerprint(), "seed": seed, "prior": prior})
    return "ep-" + hashlib.sha256(key.encode()).hexdigest()[:16]


def _enhance_stage(img: Image, config: AgentConfig, ep: Episode) -> Image:
    stats = luminance_stats(img)
    mode = should_enhance(stats, config.thresholds)
    info = {"mode": mode.value, "applied": mode is not Mode.NONE, "stats": stats.to_dict(),
            "params": None, "hook": None}
    out = img
    if mode is not Mode.NONE:
        info["params"] = config.enhance_params.to_dict()
        if config.enhancer_command:
            try:
                out = run_external_enhancer(list(config.enhancer_command), img)
                info["hook"] = "external"
            except EnhancerHookError as exc:
                info["hook"] = f"fallback: {exc}"
                out = enhance(img, mode, config.enhance_params)
        else:
            out = enhance(img, mode, config.enhance_params)
    ep.enhancement = info
    return out


def run_episode(
    img: Image,
    config: AgentConfig,
    client: VisionClient,
    executor: Executor,
    ledger: JsonlLedger[Episode] | None = None,
    clock: Callable[[], float] | None = None,
    seed: int | None = None,
    image_ref: str | None = None,
    sleep: Callable[[float], None] | None = None,
    prior: Iterable[Episode] | None = None,
) -> Episode:
    """Run one image through the workflow and append the episode to ``ledger``.

    ``prior`` overrides the episodes read from ``ledger`` for memory and
    outcome history.
    """
    clock = clock or TickClock()
    past = list(prior) if prior is not None else (ledger.records() if ledger is not None else [])
    ep = Episode(id=_episode_id(img, config, seed, len(past)), image_sha256=img.sha256(), image_ref=image_ref)
    history: list[OutcomeRecord] = [r for e in past for r in e.records]

    try:
        _drive(ep, img, config, client, executor, clock, past, history, sleep)
    finally:
        if ep.status is None:
            ep.stages.append([Stage.DONE.value, clock()])
            ep.status, ep.error = "aborted", ep.error or "internal error"
        if ledger is not None:
            ledger.append(ep)
    return ep


def _drive(ep, img, config, client, executor, clock, past, history, sleep):
    ep.visit(Stage.ENHANCE, clock())
    seen = _enhance_stage(img, config, ep)

    ep.visit(Stage.IDENTIFY, clock())
    notes = [n for n in (e.memory_note() for e in past) if n is not None]
    prompt = build_prompt(config.task, DEFAULT_TOOLS, notes, config.memory_k)
    req = VisionRequest.for_image(prompt, seen, [t.name for t in DEFAULT_TOOLS])
    kwargs = {} if sleep is None else {"sleep": sleep}
    try:
        response = query_vision_model(req, client, seen.size, retries=config.vision_retries, **kwargs)
    except VisionTransportError as exc:
        ep.finish("aborted", clock(), f"transport: {exc}")
        return
    except VisionSchemaError as exc:
        ep.finish("aborted", clock(), f"schema: {exc}")
        return

    chosen = select_grasp_area(response, seen)
    if chosen is None:
        ep.finish("no-target", clock())
        return
    target, box = chosen

    ep.visit(Stage.GRASP_AREA, clock())
    ep.target = {
        "label": target.label,
        "class": None if target.material_class is None else target.material_class.value,
        "confidence": target.confidence,
        "box": list(target.box),
        "grasp_box": list(box),
    }
    level = _initial_level(target, response, history, config)
    if level is None:
        ep.finish("aborted", clock(), f"unclassified material: {target.label!r}")
        return
    plan = make_plan(level, box, seen.size, config.pretension)

    while True:
        ep.visit(Stage.EXECUTE, clock())
        result = executor.execute(plan, len(ep.attempts))
        ep.visit(Stage.RECORD, clock())
        record = OutcomeRecord(target.label, plan.level, result.outcome, result.failure,
                               ep.stages[-1][1], ep.id, result.rigidity_cue)
        ep.attempts.append(Attempt(plan, record))
        if record.outcome == "correct":
            ep.finish("correct", clock())
            return
        if ep.retries >= config.max_retries:
            ep.finish("abnormal", clock())
            return
        ep.visit(Stage.ADAPT, clock())
        new_level = adapt(history, record)
        history.append(record)
        ep.attempts[-1].revised_level = new_level
        ep.retries += 1
        plan = make_plan(new_level, box, seen.size, config.pretension)


def _initial_level(target, response, history, config) -> int | None:
    if config.reuse_history:
        key = normalize(target.label)
        for rec in reversed(history):
            if rec.outcome == "correct" and normalize(rec.label) == key:
                return rec.level
    try:
        return classify_material(target.label, target.material_class)
    except UnclassifiedMaterial:
        return response.level
