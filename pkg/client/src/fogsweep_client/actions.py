"""Action vocabulary and the flat discrete head.

The primary surface is the raw verb set: Action carries any name plus
optional cell coordinates, and the server is the validation authority, so
a malformed action comes back as an error notice rather than failing
client-side. For learners that want a single categorical output, the
flat_* helpers map the published action-space count (lx*ly + 4) onto the
role's minimap-coordinate verb plus four scalar slots.
"""

from __future__ import annotations

from dataclasses import dataclass

PURSUER_VERBS = ("no_op", "select_army", "move_camera", "attack_screen")
EVADER_VERBS = ("no_op", "select_army", "move_minimap")

# the published head keeps four scalar slots; only two verbs are scalar, so
# slots 2 and 3 alias no_op to preserve the count
SCALAR_SLOTS = 4

_MINIMAP_VERB = {"pursuer": "move_camera", "evader": "move_minimap"}


@dataclass(frozen=True)
class Action:
    name: str
    x: int | None = None
    y: int | None = None

    @classmethod
    def no_op(cls) -> "Action":
        return cls("no_op")

    @classmethod
    def select_army(cls) -> "Action":
        return cls("select_army")

    @classmethod
    def move_camera(cls, x: int, y: int) -> "Action":
        return cls("move_camera", x, y)

    @classmethod
    def attack_screen(cls, x: int, y: int) -> "Action":
        return cls("attack_screen", x, y)

    @classmethod
    def move_minimap(cls, x: int, y: int) -> "Action":
        return cls("move_minimap", x, y)


def verbs_for(role: str) -> tuple[str, ...]:
    if role == "pursuer":
        return PURSUER_VERBS
    if role == "evader":
        return EVADER_VERBS
    raise ValueError(f"unknown role {role!r}")


def flat_action_count(lx: int, ly: int) -> int:
    """Size of the flat head: one slot per minimap cell plus the scalars."""
    if lx < 1 or ly < 1:
        raise ValueError("grid sides must be positive")
    return lx * ly + SCALAR_SLOTS


def index_to_action(index: int, lx: int, ly: int, role: str) -> Action:
    """Total decode of the flat head: every index yields a sendable action.

    Slot 0 is no_op, slot 1 select_army, slots 2 and 3 alias no_op; the
    remaining block is the role's minimap verb over cells in row-major
    order. The pursuer's attack_screen is deliberately not in the head:
    screen combat runs on standing orders after a spatial move.
    """
    verb = _MINIMAP_VERB.get(role)
    if verb is None:
        raise ValueError(f"unknown role {role!r}")
    count = flat_action_count(lx, ly)
    if not 0 <= index < count:
        raise ValueError(f"index {index} outside flat head of size {count}")
    if index == 1:
        return Action.select_army()
    if index < SCALAR_SLOTS:
        return Action.no_op()
    cell = index - SCALAR_SLOTS
    return Action(verb, cell % lx, cell // lx)


def action_to_index(action: Action, lx: int, ly: int, role: str) -> int:
    """Inverse of index_to_action on the canonical slots."""
    verb = _MINIMAP_VERB.get(role)
    if verb is None:
        raise ValueError(f"unknown role {role!r}")
    if action.name == "no_op":
        return 0
    if action.name == "select_army":
        return 1
    if action.name == verb:
        if action.x is None or action.y is None:
            raise ValueError(f"{action.name} needs coordinates")
        if not (0 <= action.x < lx and 0 <= action.y < ly):
            raise ValueError(f"cell ({action.x}, {action.y}) outside {lx}x{ly} grid")
        return SCALAR_SLOTS + action.y * lx + action.x
    raise ValueError(f"{action.name!r} has no flat slot for role {role!r}")


__all__ = [
    "Action",
    "EVADER_VERBS",
    "PURSUER_VERBS",
    "SCALAR_SLOTS",
    "action_to_index",
    "flat_action_count",
    "index_to_action",
    "verbs_for",
]
