"""Stiffness taxonomy, level-to-pretension mapping and failure-driven adaptation.

Five stiffness levels run from 0 (the soft rest state) to 4 (heavy grasp).
Each level corresponds to one material class.  A level is turned into a
spring pretension ratio ``rho`` that scales the spring stiffness before it
is combined in series with the tendon and soft material.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .ledger import JsonlLedger
from .mechanics.core import StiffnessChain, total_stiffness

MIN_LEVEL, MAX_LEVEL = 0, 4
LEVELS = tuple(range(MIN_LEVEL, MAX_LEVEL + 1))


class MaterialClass(str, enum.Enum):
    FRAGILE = "fragile"
    DEFORMABLE = "deformable"
    TOUGH_DEFORMABLE = "tough-deformable"
    HARD = "hard"
    HEAVY_METAL = "heavy-metal"

    @property
    def level(self) -> int:
        return _CLASS_ORDER.index(self)

    @classmethod
    def for_level(cls, level: int) -> "MaterialClass":
        return _CLASS_ORDER[check_level(level)]


_CLASS_ORDER = list(MaterialClass)


class GripMode(str, enum.Enum):
    PINCH = "pinch"
    ENVELOPE = "envelope"
    HOOK = "hook"
    LIFT = "lift"


class UnclassifiedMaterial(LookupError):
    """No lexicon entry matched and no class hint was supplied."""


class ConfigError(ValueError):
    pass


def check_level(level) -> int:
    if isinstance(level, bool) or not isinstance(level, int) or not MIN_LEVEL <= level <= MAX_LEVEL:
        raise ValueError(f"stiffness level must be an integer in [0, 4], got {level!r}")
    return level


def clamp_level(level: int) -> int:
    return max(MIN_LEVEL, min(MAX_LEVEL, level))


# -- classification ----------------------------------------------------------

_TOKEN = re.compile(r"[a-z0-9]+")


def _singular(token: str) -> str:
    if len(token) > 4 and token.endswith("ies"):
        return token[:-3] + "y"
    if len(token) > 4 and token.endswith(("ches", "shes", "xes", "sses")):
        return token[:-2]
    if len(token) > 3 and token.endswith("s") and not token.endswith(("ss", "us")):
        return token[:-1]
    return token


def normalize(label: str) -> tuple[str, ...]:
    return tuple(_singular(t) for t in _TOKEN.findall(label.lower()))


class Lexicon:
    """Keyword phrases mapped to material classes; the longest match wins."""

    def __init__(self, entries: Iterable[tuple[str, MaterialClass]] = ()):
        self._entries: dict[tuple[str, ...], MaterialClass] = {}
        for phrase, cls in entries:
            self.add(phrase, cls)

    def add(self, phrase: str, cls) -> None:
        key = normalize(phrase)
        if not key:
            raise ConfigError(f"empty lexicon keyword {phrase!r}")
        self._entries[key] = MaterialClass(cls)

    def __len__(self):
        return len(self._entries)

    def lookup(self, label: str) -> MaterialClass | None:
        tokens = normalize(label)
        best = None  # (length, end position, class)
        for start in range(len(tokens)):
            for end in range(start + 1, len(tokens) + 1):
                cls = self._entries.get(tokens[start:end])
                if cls is not None:
                    cand = (end - start, end, cls)
                    if best is None or cand[:2] > best[:2]:
                        best = cand
        return None if best is None else best[2]

    @classmethod
    def parse(cls, text: str, source: str = "<lexicon>") -> "Lexicon":
        lex = cls()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = re.split(r"\s*(?:->|→)\s*", line)
            if len(parts) != 2 or not parts[0]:
                raise ConfigError(f"{source}:{lineno}: expected 'keyword -> class', got {raw!r}")
            try:
                lex.add(parts[0], parts[1])
            except ValueError as exc:
                raise ConfigError(f"{source}:{lineno}: {exc}") from exc
        return lex

    @classmethod
    def load(cls, path) -> "Lexicon":
        path = Path(path)
        return cls.parse(path.read_text(encoding="utf-8"), str(path))

    @classmethod
    def default(cls) -> "Lexicon":
        text = resources.files("softgrip.data").joinpath("lexicon.txt").read_text(encoding="utf-8")
        return cls.parse(text, "lexicon.txt")


_default_lexicon: Lexicon | None = None


def default_lexicon() -> Lexicon:
    global _default_lexicon
    if _default_lexicon is None:
        _default_lexicon = Lexicon.default()
    return _default_lexicon


def classify_material(label: str, class_hint=None, lexicon: Lexicon | None = None) -> int:
    if not label or not label.strip():
        raise ValueError("label must be nonempty")
    if class_hint is not None:
        return MaterialClass(class_hint).level
    cls = (lexicon or default_lexicon()).lookup(label)
    if cls is None:
        raise UnclassifiedMaterial(f"no stiffness class known for {label!r}")
    return cls.level


# -- pretension --------------------------------------------------------------

DEFAULT_RATIOS = (1.0, 1.25, 1.5, 2.0, 3.0)
DEFAULT_ACTUATOR_GAIN = 45.0  # motor degrees per unit of (rho - 1)


@dataclass(frozen=True)
class PretensionTable:
    ratios: tuple[float, ...] = DEFAULT_RATIOS
    actuator_gain: float = DEFAULT_ACTUATOR_GAIN

    def __post_init__(self):
        ratios = tuple(float(r) for r in self.ratios)
        if len(ratios) != len(LEVELS):
            raise ConfigError(f"pretension table needs {len(LEVELS)} ratios, got {len(ratios)}")
        if any(not math.isfinite(r) or r < 1.0 for r in ratios):
            raise ConfigError("pretension ratios must be finite and >= 1")
        if any(b < a for a, b in zip(ratios, ratios[1:])):
            raise ConfigError(f"pretension ratios must be non-decreasing in level: {ratios}")
        if self.actuator_gain <= 0:
            raise ConfigError("actuator gain must be positive")
        object.__setattr__(self, "ratios", ratios)


@dataclass(frozen=True)
class PretensionSetting:
    level: int
    ratio: float
    actuator_deg: float


def level_to_pretension(level: int, table: PretensionTable | None = None) -> PretensionSetting:
    table = table or PretensionTable()
    rho = table.ratios[check_level(level)]
    return PretensionSetting(level, rho, table.actuator_gain * (rho - 1.0))


def level_stiffness(level: int, spring: float, tendon, material, table: PretensionTable | None = None):
    """Series stiffness with the spring scaled by the level's pretension ratio."""
    rho = level_to_pretension(level, table).ratio
    return total_stiffness(StiffnessChain(rho * spring, tendon, material))


@dataclass(frozen=True)
class GripPlan:
    level: int
    ratio: float
    actuator_deg: float
    grasp_box: tuple[int, int, int, int]  # x, y, w, h in pixels
    mode: GripMode

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "ratio": self.ratio,
            "actuator_deg": self.actuator_deg,
            "grasp_box": list(self.grasp_box),
            "mode": self.mode.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GripPlan":
        return cls(int(d["level"]), float(d["ratio"]), float(d["actuator_deg"]),
                   tuple(int(v) for v in d["grasp_box"]), GripMode(d["mode"]))


def choose_mode(level: int, box: Sequence[int], image_size: tuple[int, int]) -> GripMode:
    """Pick a grip style from the grasp box shape and the stiffness level."""
    x, y, w, h = box
    width, height = image_size
    if max(w, h) >= 2.5 * max(1, min(w, h)):
        return GripMode.HOOK
    if level == MAX_LEVEL:
        return GripMode.LIFT
    if w * h < 0.04 * width * height:
        return GripMode.PINCH
    return GripMode.ENVELOPE


def make_plan(level: int, box: Sequence[int], image_size: tuple[int, int],
              table: PretensionTable | None = None) -> GripPlan:
    width, height = image_size
    x, y, w, h = (int(v) for v in box)
    if w <= 0 or h <= 0 or x < 0 or y < 0 or x + w > width or y + h > height:
        raise ValueError(f"grasp box {box} outside image {width}x{height}")
    setting = level_to_pretension(level, table)
    return GripPlan(level, setting.ratio, setting.actuator_deg, (x, y, w, h),
                    choose_mode(level, (x, y, w, h), image_size))


# -- outcomes and adaptation -------------------------------------------------

OUTCOMES = ("correct", "abnormal")
FAILURES = ("slip", "crush", "none")
CUES = ("hard", "soft")


@dataclass(frozen=True)
class OutcomeRecord:
    label: str
    level: int
    outcome: str
    failure: str = "none"
    timestamp: float = 0.0
    episode_id: str = ""
    rigidity_cue: str | None = None

    def __post_init__(self):
        check_level(self.level)
        if self.outcome not in OUTCOMES:
            raise ValueError(f"outcome must be one of {OUTCOMES}")
        if self.failure not in FAILURES:
            raise ValueError(f"failure must be one of {FAILURES}")
        if (self.failure == "none") != (self.outcome == "correct"):
            raise ValueError("failure mode must be 'none' exactly when the outcome is correct")
        if self.rigidity_cue is not None and self.rigidity_cue not in CUES:
            raise ValueError(f"rigidity cue must be one of {CUES} or None")

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "level": self.level,
            "outcome": self.outcome,
            "failure": self.failure,
            "timestamp": self.timestamp,
            "episode_id": self.episode_id,
            "rigidity_cue": self.rigidity_cue,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "OutcomeRecord":
        return cls(d["label"], int(d["level"]), d["outcome"], d["failure"],
                   float(d["timestamp"]), d["episode_id"], d.get("rigidity_cue"))


OUTCOME_SCHEMA = "softgrip.outcome"
OUTCOME_SCHEMA_VERSION = 1


def outcome_ledger(path) -> JsonlLedger[OutcomeRecord]:
    return JsonlLedger(path, OUTCOME_SCHEMA, OUTCOME_SCHEMA_VERSION,
                       OutcomeRecord.to_dict, OutcomeRecord.from_dict)


def _contradicts(record: OutcomeRecord) -> bool:
    # a hard surface felt while the class said soft, or the reverse
    if record.rigidity_cue == "hard":
        return record.level < MaterialClass.HARD.level
    if record.rigidity_cue == "soft":
        return record.level > MaterialClass.DEFORMABLE.level
    return False


def adapt(history: Sequence[OutcomeRecord], last: OutcomeRecord) -> int:
    """Revised stiffness level after an abnormal grasp.

    A slip raises the level (by 2 when the felt rigidity contradicts the
    assigned class), a crush lowers it by 1.  Earlier attempts on the same
    object narrow the result: a prior success in the correction direction
    is reused, and levels that already slipped or crushed are avoided.
    """
    if last.outcome != "abnormal":
        raise ValueError("adapt() needs an abnormal outcome")
    key = normalize(last.label)
    same = [r for r in history if normalize(r.label) == key] + [last]
    up = last.failure == "slip"

    for rec in reversed(same):
        if rec.outcome == "correct" and (rec.level > last.level if up else rec.level < last.level):
            return rec.level

    step = (2 if _contradicts(last) else 1) if up else -1
    level = clamp_level(last.level + step)
    slipped = [r.level for r in same if r.failure == "slip"]
    crushed = [r.level for r in same if r.failure == "crush"]
    lo = max(slipped) + 1 if slipped else MIN_LEVEL
    hi = min(crushed) - 1 if crushed else MAX_LEVEL
    if lo <= hi:
        level = min(max(level, lo), hi)
    return clamp_level(level)
