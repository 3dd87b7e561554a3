"""Wire codec for the lockstep NDJSON protocol.

One JSON object per LF-terminated UTF-8 line, compact separators, at most
1 MiB per line, keys in the fixed order each frame's `to_payload` gives.
The server is the protocol authority; this module implements the same
grammar from the client side, so every frame it emits is the server's
canonical byte sequence and every line the server emits decodes into a
typed frame and re-encodes to the identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Callable

PROTOCOL_VERSION = 1
MAX_LINE_BYTES = 1 << 20
ROLES = ("pursuer", "evader")


class WireError(Exception):
    """A line that cannot be decoded or a frame that fails validation.

    `code` mirrors the server's error vocabulary ("bad_json", "bad_frame",
    "line_too_long"); `offset` is the byte offset of the problem within the
    line when it can be located.
    """

    def __init__(self, code: str, detail: str, offset: int | None = None) -> None:
        super().__init__(detail)
        self.code = code
        self.detail = detail
        self.offset = offset


@dataclass(frozen=True)
class Hello:
    """Client opener claiming one slot."""

    role: str
    protocol_version: int = PROTOCOL_VERSION

    type = "hello"

    def to_payload(self) -> dict[str, Any]:
        return {"type": self.type, "role": self.role, "protocol_version": self.protocol_version}


@dataclass(frozen=True)
class Config:
    """Session opener: episode parameters echoed to a bound slot.

    `config` is the engine's episode configuration as a plain dict; the
    typed accessors below pull out the fields a client needs for shapes
    and seeding.
    """

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

    @property
    def map_id(self) -> str:
        return str(self.config["map_id"])

    @property
    def seed(self) -> int:
        """Base seed; episode i of the session runs on seed + i."""
        return int(self.config["seed"])

    @property
    def lx(self) -> int:
        return int(self.config["domain"]["lx"])

    @property
    def ly(self) -> int:
        return int(self.config["domain"]["ly"])

    @property
    def camera_size(self) -> int:
        return int(self.config["camera_size"])

    @property
    def time_limit(self) -> float:
        return float(self.config["time_limit"])


@dataclass(frozen=True)
class ObsFrame:
    """One decision step's observation, still in wire form.

    `minimap` and `screen` hold the named grid layers as nested lists;
    env.Observation is the decoded array view.
    """

    episode: int
    step: int
    minimap: dict[str, Any]
    screen: dict[str, Any]
    scalars: dict[str, Any]
    available_actions: tuple[str, ...] = ()

    type = "obs"

    def to_payload(self) -> dict[str, Any]:
        return {
            "type": self.type,
            "episode": self.episode,
            "step": self.step,
            "minimap": self.minimap,
            "screen": self.screen,
            "scalars": self.scalars,
            "available_actions": list(self.available_actions),
        }


@dataclass(frozen=True)
class Act:
    """One action; coordinate verbs carry integer cell fields."""

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


@dataclass(frozen=True)
class Result:
    reward: int
    done: bool
    score: int
    flags: tuple[str, ...] = ()

    type = "result"

    def to_payload(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "type": self.type,
            "reward": self.reward,
            "done": self.done,
            "score": self.score,
        }
        if self.flags:
            out["flags"] = list(self.flags)
        return out


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


@dataclass(frozen=True)
class Error:
    """Server notice: a rejected handshake or a substituted act."""

    code: str
    detail: str = ""

    type = "error"

    def to_payload(self) -> dict[str, Any]:
        return {"type": self.type, "code": self.code, "detail": self.detail}


Frame = Hello | Config | ObsFrame | Act | Result | EpisodeEnd | Error


def _field(d: dict[str, Any], key: str, kind: type) -> Any:
    if key not in d:
        raise WireError("bad_frame", f"missing field {key!r}")
    v = d[key]
    # bool subclasses int in Python; the wire keeps the two distinct
    if kind is int and isinstance(v, bool):
        raise WireError("bad_frame", f"field {key!r} must be an integer")
    if not isinstance(v, kind):
        raise WireError("bad_frame", f"field {key!r} must be {kind.__name__}")
    return v


def _parse_hello(d: dict[str, Any]) -> Hello:
    role = _field(d, "role", str)
    if role not in ROLES:
        raise WireError("bad_frame", f"unknown role {role!r}")
    return Hello(role=role, protocol_version=_field(d, "protocol_version", int))


def _parse_config(d: dict[str, Any]) -> Config:
    return Config(
        role=_field(d, "role", str),
        episodes=_field(d, "episodes", int),
        config=_field(d, "config", dict),
        protocol_version=_field(d, "protocol_version", int),
    )


def _parse_obs(d: dict[str, Any]) -> ObsFrame:
    return ObsFrame(
        episode=_field(d, "episode", int),
        step=_field(d, "step", int),
        minimap=_field(d, "minimap", dict),
        screen=_field(d, "screen", dict),
        scalars=_field(d, "scalars", dict),
        available_actions=tuple(_field(d, "available_actions", list)),
    )


def _parse_act(d: dict[str, Any]) -> Act:
    name = _field(d, "name", str)
    coords = {}
    for key in ("x", "y"):
        v = d.get(key)
        if v is not None and (isinstance(v, bool) or not isinstance(v, int)):
            raise WireError("bad_frame", f"act field {key!r} must be an integer")
        coords[key] = v
    return Act(name=name, x=coords["x"], y=coords["y"])


def _parse_result(d: dict[str, Any]) -> Result:
    flags = d.get("flags", [])
    if not isinstance(flags, list):
        raise WireError("bad_frame", "result flags must be a list")
    return Result(
        reward=_field(d, "reward", int),
        done=_field(d, "done", bool),
        score=_field(d, "score", int),
        flags=tuple(flags),
    )


def _parse_episode_end(d: dict[str, Any]) -> EpisodeEnd:
    duration = d.get("duration")
    if isinstance(duration, bool) or not isinstance(duration, (int, float)):
        raise WireError("bad_frame", "episode_end duration must be a number")
    return EpisodeEnd(
        score=_field(d, "score", int),
        kills=_field(d, "kills", int),
        duration=float(duration),
    )


def _parse_error(d: dict[str, Any]) -> Error:
    return Error(code=_field(d, "code", str), detail=_field(d, "detail", str))


_PARSERS: dict[str, Callable[[dict[str, Any]], Frame]] = {
    "hello": _parse_hello,
    "config": _parse_config,
    "obs": _parse_obs,
    "act": _parse_act,
    "result": _parse_result,
    "episode_end": _parse_episode_end,
    "error": _parse_error,
}

FRAME_TYPES = tuple(_PARSERS)


def encode(frame: Frame) -> bytes:
    """One canonical wire line for the frame, LF-terminated."""
    return json.dumps(frame.to_payload(), separators=(",", ":")).encode("utf-8") + b"\n"


def decode(line: bytes) -> Frame:
    """Parse one wire line (with or without the trailing newline)."""
    if len(line) > MAX_LINE_BYTES:
        raise WireError(
            "line_too_long", f"line is {len(line)} bytes (cap {MAX_LINE_BYTES})",
            offset=MAX_LINE_BYTES,
        )
    raw = line.rstrip(b"\n")
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise WireError("bad_json", f"invalid UTF-8: {e.reason}", offset=e.start) from e
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        offset = len(text[: e.pos].encode("utf-8"))
        raise WireError("bad_json", e.msg, offset=offset) from e
    if not isinstance(payload, dict):
        raise WireError("bad_frame", "frame must be a JSON object")
    parser = _PARSERS.get(payload.get("type"))
    if parser is None:
        raise WireError("bad_frame", f"unknown frame type {payload.get('type')!r}")
    return parser(payload)


__all__ = [
    "Act",
    "Config",
    "EpisodeEnd",
    "Error",
    "FRAME_TYPES",
    "Frame",
    "Hello",
    "MAX_LINE_BYTES",
    "ObsFrame",
    "PROTOCOL_VERSION",
    "ROLES",
    "Result",
    "WireError",
    "decode",
    "encode",
]
