"""Prompt assembly for the vision-language model."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

ROLE = (
    "You are the perception core of a three-finger soft gripper with adjustable "
    "stiffness. You look at one camera image and decide what to grasp and how."
)

GUIDANCE = (
    "Reason step by step before answering: first locate every object, then "
    "separate the target object from the gripper itself, then judge its size, "
    "position and material, then choose the grasp area from its center of "
    "mass, surface geometry and approach angle.",
    "Label the gripper as \"gripper\" and never return it as a target.",
    "Material classes: fragile (0), deformable (1), tough-deformable (2), hard (3), heavy-metal (4).",
    "Answer with JSON only: {\"detections\": [{\"label\", \"class\", \"box\": [x, y, w, h], "
    "\"confidence\"}], \"grasp_box\": [x, y, w, h] or null, \"level\": 0-4 or null}.",
)


@dataclass(frozen=True)
class Tool:
    name: str
    description: str


DEFAULT_TOOLS = (
    Tool("brightness_augmentation", "re-expose an image that is too dark or too bright"),
    Tool("set_stiffness", "set the gripper stiffness level 0-4 via spring pretension"),
    Tool("grasp", "close the gripper on a pixel rectangle in a given grip mode"),
)


@dataclass(frozen=True)
class MemoryNote:
    """Digest of one earlier episode."""

    label: str
    levels: tuple[int, ...]
    failures: tuple[str, ...]
    status: str

    def render(self) -> str:
        parts = []
        for level, failure in zip(self.levels, self.failures):
            parts.append(f"level {level} {'ok' if failure == 'none' else failure}")
        text = f"{self.label}: " + " -> ".join(parts)
        if len(self.levels) > 1:
            text += f"; revised to level {self.levels[-1]}"
        return text + f" ({self.status})"


def build_prompt(task: str, tools: Sequence[Tool] = DEFAULT_TOOLS,
                 memory: Sequence[MemoryNote] = (), k: int = 5) -> str:
    if not task or not task.strip():
        raise ValueError("task must be nonempty")
    blocks = [
        "## Role\n" + ROLE,
        "## Task\n" + task.strip(),
        "## Tools\n" + "\n".join(f"- {t.name}: {t.description}" for t in tools),
        "## Guidance\n" + "\n".join(f"- {g}" for g in GUIDANCE),
    ]
    recent = list(memory)[-k:] if k > 0 else []
    if recent:
        blocks.append("## Memory\n" + "\n".join(f"- {m.render()}" for m in recent))
    return "\n\n".join(blocks) + "\n"
