"""NDJSON wire frames for the two-slot lockstep agent interface.

One JSON object per UTF-8 line, LF-terminated, compact separators, keys in
the fixed order given by each frame's `to_payload`. Frames round-trip through
encode/decode exactly; decode rejects lines over 1 MiB and carries the byte
offset of the first problem it saw.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .episode import (
    EVADER_VERBS,
    PURSUER_VERBS,
    EpisodeConfig,
    EvaderAction,
    Observation,
    PursuerAction,
)

PROTOCOL_VERSION = 1
MAX_LINE_BYTES = 1 << 20
ROLES = ("pursuer", "evader")


class ProtocolError(Exception):
    """A frame that cannot be decoded or fails validation.

    `code` is the wire error code ("bad_json", "bad_frame", "line_too_long");
    `offset` is the byte offset of the problem within the line, when known.
    """

    def __init__(self, code: str, detail: str, offset: int | None = None) -> None:
        super().__init__(detail)
        self.code = code
        self.detail = detail
        self.offset = offset


@dataclass(frozen=True)
class Hello:
    role: str
    protocol_version: int = PROTOCOL_VERSION

    type = "hello"

    def to_payload(self) -> dict[str, Any]:
        return {"type": self.type, "role": self.role, "protocol_version": self.protocol_version}

    @classmethod
    def from_payload(cls, d: dict[str, Any]) -> "Hello":
        role = _require(d, "role", str)
        if role not in ROLES:
            raise ProtocolError("bad_frame", f"unknown role {role!r}")
        version = _require(d, "protocol_version", int)
        return cls(role=role, protocol_version=version)


@dataclass(frozen=True)
class Config:
    """Session opener: the engine's EpisodeConfig echoed to a bound slot."""

    role: str
    episodes: int
    config: dict[str, Any]
    protocol_version: int = PROTOCOL_VERSION

    type = "config"

    def to_payload(self) -> dict[str, Any]:
        return {
            "type": self.type,
            "role": self.role,
            "episodes": self.episodes,
            "protocol_version": self.protocol_version,
            "config": self.config,
        }

    @classmethod
    def from_payload(cls, d: dict[str, Any]) -> "Config":
        return cls(
            role=_require(d, "role", str),
            episodes=_require(d, "episodes", int),
            config=_require(d, "config", dict),
            protocol_version=_require(d, "protocol_version", int),
        )

    def episode_config(self) -> EpisodeConfig:
        return EpisodeConfig.from_dict(self.config)


@dataclass(frozen=True)
class Obs:
    episode: int
    step: int
    minimap: dict[str, list[list[int]]]
    screen: dict[str, list[list[int]]]
    scalars: dict[str, Any]
    available_actions: list[str] = field(default_factory=list)

    type = "obs"

    def to_payload(self) -> dict[str, Any]:
        return {
            "type": self.type,
            "episode": self.episode,
            "step": self.step,
            "minimap": self.minimap,
            "screen": self.screen,
            "scalars": self.scalars,
            "available_actions": self.available_actions,
        }

    @classmethod
    def from_payload(cls, d: dict[str, Any]) -> "Obs":
        return cls(
            episode=_require(d, "episode", int),
            step=_require(d, "step", int),
            minimap=_require(d, "minimap", dict),
            screen=_require(d, "screen", dict),
            scalars=_require(d, "scalars", dict),
            available_actions=list(_require(d, "available_actions", list)),
        )


@dataclass(frozen=True)
class Act:
    name: str
    x: int | None = None
    y: int | None = None

    type = "act"

    def to_payload(self) -> dict[str, Any]:
        out: dict[str, Any] = {"type": self.type, "name": self.name}
        if self.x is not None:
            out["x"] = self.x
        if self.y is not None:
            out["y"] = self.y
        return out

    @classmethod
    def from_payload(cls, d: dict[str, Any]) -> "Act":
        name = _require(d, "name", str)
        x = d.get("x")
        y = d.get("y")
        for label, v in (("x", x), ("y", y)):
            if v is not None and not isinstance(v, int):
                raise ProtocolError("bad_frame", f"act field {label!r} must be an integer")
        return cls(name=name, x=x, y=y)


@dataclass(frozen=True)
class Result:
    reward: int
    done: bool
    score: int
    flags: list[str] = field(default_factory=list)

    type = "result"

    def to_payload(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "type": self.type,
            "reward": self.reward,
            "done": self.done,
            "score": self.score,
        }
        if self.flags:
            out["flags"] = self.flags
        return out

    @classmethod
    def from_payload(cls, d: dict[str, Any]) -> "Result":
        flags = d.get("flags", [])
        if not isinstance(flags, list):
            raise ProtocolError("bad_frame", "result flags must be a list")
        return cls(
            reward=_require(d, "reward", int),
            done=_require(d, "done", bool),
            score=_require(d, "score", int),
            flags=list(flags),
        )


@dataclass(frozen=True)
class EpisodeEnd:
    score: int
    kills: int
    duration: float

    type = "episode_end"

    def to_payload(self) -> dict[str, Any]:
        return {
            "type": self.type,
            "score": self.score,
            "kills": self.kills,
            "duration": self.duration,
        }

    @classmethod
    def from_payload(cls, d: dict[str, Any]) -> "EpisodeEnd":
        duration = d.get("duration")
        if not isinstance(duration, (int, float)) or isinstance(duration, bool):
            raise ProtocolError("bad_frame", "episode_end duration must be a number")
        return cls(
            score=_require(d, "score", int),
            kills=_require(d, "kills", int),
            duration=float(duration),
        )


@dataclass(frozen=True)
class Error:
    code: str
    detail: str = ""

    type = "error"

    def to_payload(self) -> dict[str, Any]:
        return {"type": self.type, "code": self.code, "detail": self.detail}

    @classmethod
    def from_payload(cls, d: dict[str, Any]) -> "Error":
        return cls(code=_require(d, "code", str), detail=_require(d, "detail", str))


Frame = Hello | Config | Obs | Act | Result | EpisodeEnd | Error

FRAME_TYPES: dict[str, type] = {
    cls.type: cls for cls in (Hello, Config, Obs, Act, Result, EpisodeEnd, Error)
}


def _require(d: dict[str, Any], key: str, kind: type) -> Any:
    if key not in d:
        raise ProtocolError("bad_frame", f"missing field {key!r}")
    v = d[key]
    # bool is an int subclass; keep the two apart on the wire
    if kind is int and isinstance(v, bool):
        raise ProtocolError("bad_frame", f"field {key!r} must be an integer")
    if not isinstance(v, kind):
        raise ProtocolError("bad_frame", f"field {key!r} must be {kind.__name__}")
    return v


def encode(frame: Frame) -> bytes:
    """One canonical wire line for the frame, LF-terminated."""
    payload = frame.to_payload()
    return json.dumps(payload, separators=(",", ":")).encode("utf-8") + b"\n"


def decode(line: bytes) -> Frame:
    """Parse one wire line (with or without the trailing newline)."""
    if len(line) > MAX_LINE_BYTES:
        raise ProtocolError(
            "line_too_long", f"line is {len(line)} bytes (cap {MAX_LINE_BYTES})",
            offset=MAX_LINE_BYTES,
        )
    raw = line.rstrip(b"\n")
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise ProtocolError("bad_json", f"invalid UTF-8: {e.reason}", offset=e.start) from e
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        offset = len(text[: e.pos].encode("utf-8"))
        raise ProtocolError("bad_json", e.msg, offset=offset) from e
    if not isinstance(payload, dict):
        raise ProtocolError("bad_frame", "frame must be a JSON object")
    tag = payload.get("type")
    cls = FRAME_TYPES.get(tag)
    if cls is None:
        raise ProtocolError("bad_frame", f"unknown frame type {tag!r}")
    return cls.from_payload(payload)


# -- engine <-> wire adapters -------------------------------------------------


def obs_frame(obs: Observation, episode: int, step: int) -> Obs:
    """Project an engine Observation into its wire frame."""
    return Obs(
        episode=episode,
        step=step,
        minimap={
            "fog": obs.minimap_fog.tolist(),
            "own": obs.minimap_own.tolist(),
            "enemy": obs.minimap_enemy.tolist(),
        },
        screen={
            "fog": obs.screen_fog.tolist(),
            "own": obs.screen_own.tolist(),
            "enemy": obs.screen_enemy.tolist(),
        },
        scalars={
            "clock": obs.clock,
            "score": obs.score,
            "own_alive": obs.own_alive,
            "enemy_visible": obs.enemy_visible,
            "camera": [obs.camera[0], obs.camera[1]],
            "selected": obs.selected,
        },
        available_actions=list(obs.available_actions),
    )


def act_to_pursuer(act: Act) -> PursuerAction:
    if act.name not in PURSUER_VERBS:
        raise ProtocolError("bad_action", f"unknown pursuer verb {act.name!r}")
    try:
        return PursuerAction(act.name, act.x, act.y)
    except (TypeError, ValueError) as e:
        raise ProtocolError("bad_action", str(e)) from e


def act_to_evader(act: Act) -> EvaderAction:
    if act.name not in EVADER_VERBS:
        raise ProtocolError("bad_action", f"unknown evader verb {act.name!r}")
    try:
        return EvaderAction(act.name, act.x, act.y)
    except (TypeError, ValueError) as e:
        raise ProtocolError("bad_action", str(e)) from e


def action_to_act(action: PursuerAction | EvaderAction) -> Act:
    return Act(name=action.name, x=action.x, y=action.y)


__all__ = [
    "Act",
    "Config",
    "EpisodeEnd",
    "Error",
    "FRAME_TYPES",
    "Frame",
    "Hello",
    "MAX_LINE_BYTES",
    "Obs",
    "PROTOCOL_VERSION",
    "ProtocolError",
    "Result",
    "ROLES",
    "act_to_evader",
    "act_to_pursuer",
    "action_to_act",
    "decode",
    "encode",
    "obs_frame",
]
