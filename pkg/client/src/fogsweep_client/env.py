"""Remote environment adapter over the lockstep protocol.

connect() claims one slot of a serving session (hello/config handshake) and
returns a RemoteEnv with a blocking reset/step/close surface. The server
pushes one observation per decision step and expects exactly one act back,
so step() is only legal while an observation is pending and reset() only
between episodes. One connection drives one env; run parallel envs as
parallel connections.
"""

from __future__ import annotations

import socket
from dataclasses import dataclass
from typing import Any, BinaryIO

import numpy as np

from . import frames
from .actions import Action


class ClientError(Exception):
    """Base for everything this module raises on purpose."""


class HandshakeError(ClientError):
    """The server rejected the hello (slot_taken, bad_version, ...)."""

    def __init__(self, code: str, detail: str) -> None:
        super().__init__(f"{code}: {detail}")
        self.code = code
        self.detail = detail


class StateError(ClientError):
    """reset/step called outside the lockstep cadence."""


class ProtocolViolation(ClientError):
    """The server sent something the session state cannot accept."""


class ConnectionLost(ClientError):
    """Transport gone mid-session.

    When the server managed to report the aborted episode before closing,
    `partial` holds that episode_end frame (score, kills, duration so far).
    """

    def __init__(self, detail: str, partial: frames.EpisodeEnd | None = None) -> None:
        super().__init__(detail)
        self.partial = partial


class SessionEnded(ClientError):
    """reset() after the server played every episode and closed cleanly."""

    def __init__(self, scores: tuple[int, ...]) -> None:
        super().__init__(f"session over after {len(scores)} episodes")
        self.scores = scores


@dataclass(frozen=True, eq=False)
class Observation:
    """One decision step's decoded view.

    Grids are uint8 arrays indexed [y, x]; minimap layers cover the whole
    domain, screen layers the camera window. `camera` is the (x, y) origin
    of that window, `clock` is seconds, `score` the cumulative kill count.
    """

    episode: int
    step: int
    minimap_fog: np.ndarray
    minimap_own: np.ndarray
    minimap_enemy: np.ndarray
    screen_fog: np.ndarray
    screen_own: np.ndarray
    screen_enemy: np.ndarray
    clock: float
    score: int
    own_alive: int
    enemy_visible: int
    camera: tuple[int, int]
    selected: bool
    available_actions: tuple[str, ...]

    def minimap_tensor(self) -> np.ndarray:
        """(3, ly, lx) float32 stack of fog/own/enemy, learner-ready."""
        return np.stack(
            [self.minimap_fog, self.minimap_own, self.minimap_enemy]
        ).astype(np.float32)

    def screen_tensor(self) -> np.ndarray:
        """(3, camera_size, camera_size) float32 stack of fog/own/enemy."""
        return np.stack(
            [self.screen_fog, self.screen_own, self.screen_enemy]
        ).astype(np.float32)


def connect(
    address: tuple[str, int] | str,
    role: str,
    *,
    timeout: float | None = None,
    connect_timeout: float = 10.0,
) -> "RemoteEnv":
    """Claim `role` on the server at `address` ("host:port" or a pair).

    Blocks until the session's config arrives, which for a two-socket
    session means until the other slot is bound too; `timeout` bounds every
    read on the connection (None blocks forever). Raises HandshakeError on
    rejection frames and ConnectionLost if the server hangs up first.
    """
    if isinstance(address, str):
        host, _, port = address.rpartition(":")
        if not host or not port.isdigit():
            raise ValueError(f"address must be host:port, got {address!r}")
        address = (host, int(port))
    if role not in frames.ROLES:
        raise ValueError(f"unknown role {role!r}")
    sock = socket.create_connection(address, timeout=connect_timeout)
    try:
        # one small act per round trip; never let Nagle sit on it
        sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        sock.settimeout(timeout)
        sock.sendall(frames.encode(frames.Hello(role)))
        rfile = sock.makefile("rb")
        frame = _read_frame(rfile)
        if frame is None:
            raise ConnectionLost("server closed during the handshake")
        if isinstance(frame, frames.Error):
            raise HandshakeError(frame.code, frame.detail)
        if not isinstance(frame, frames.Config):
            raise ProtocolViolation(f"expected config, got {frame.type!r}")
        if frame.protocol_version != frames.PROTOCOL_VERSION:
            raise HandshakeError(
                "bad_version", f"server speaks version {frame.protocol_version}"
            )
        if frame.role != role:
            raise ProtocolViolation(f"config for role {frame.role!r}, asked for {role!r}")
        return RemoteEnv(sock, rfile, role, frame)
    except BaseException:
        try:
            sock.close()
        except OSError:
            pass
        raise


def _read_frame(rfile: BinaryIO) -> frames.Frame | None:
    """Next frame off the stream; None on EOF. WireError means the peer is
    not speaking the protocol, which is fatal for a client."""
    try:
        line = rfile.readline(frames.MAX_LINE_BYTES + 2)
    except TimeoutError:
        raise
    except OSError as e:
        raise ConnectionLost(f"transport error: {e}") from e
    if not line:
        return None
    return frames.decode(line)


class RemoteEnv:
    """One bound slot of a lockstep session.

    Cadence: reset() blocks for an episode's first observation, each step()
    answers the pending observation and blocks for the outcome, and after a
    done step the next reset() starts the following episode. `scores`
    collects each finished episode's final score.
    """

    def __init__(
        self,
        sock: socket.socket,
        rfile: BinaryIO,
        role: str,
        config: frames.Config,
    ) -> None:
        self._sock = sock
        self._rfile = rfile
        self.role = role
        self.config = config
        try:
            self._grid_shape = (config.ly, config.lx)
            self._screen_shape = (config.camera_size, config.camera_size)
        except (KeyError, TypeError, ValueError) as e:
            raise ProtocolViolation(f"config is missing grid geometry: {e}") from e
        self._scores: list[int] = []
        self._obs: Observation | None = None
        self._closed = False

    # -- context / lifecycle --------------------------------------------------

    def __enter__(self) -> "RemoteEnv":
        return self

    def __exit__(self, *exc_info: Any) -> None:
        self.close()

    def close(self) -> None:
        if self._closed:
            return
        self._closed = True
        # shutdown sends the FIN even while rfile still references the
        # socket; a plain close() would only drop a refcount
        try:
            self._sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        for f in (self._rfile, self._sock):
            try:
                f.close()
            except OSError:
                pass

    @property
    def scores(self) -> tuple[int, ...]:
        return tuple(self._scores)

    @property
    def last_obs(self) -> Observation | None:
        return self._obs

    # -- lockstep surface -------------------------------------------------------

    def reset(self) -> Observation:
        """Block for the next episode's first observation."""
        self._require_open()
        if self._obs is not None:
            raise StateError("episode in progress; act on the pending observation")
        frame = self._next()
        if frame is None:
            if len(self._scores) >= self.config.episodes:
                raise SessionEnded(self.scores)
            raise ConnectionLost("server closed before the session finished")
        if isinstance(frame, frames.EpisodeEnd):
            raise ConnectionLost("session aborted by the server", partial=frame)
        if not isinstance(frame, frames.ObsFrame):
            raise ProtocolViolation(f"expected obs, got {frame.type!r}")
        self._obs = self._decode_obs(frame)
        return self._obs

    def step(self, action: Action) -> tuple[Observation | None, int, bool, dict[str, Any]]:
        """Answer the pending observation and block for the outcome.

        Returns (next_obs, reward, done, info); next_obs is None on a done
        step, after which reset() starts the next episode. info carries the
        running score, the step's flags, any error notices the server sent
        for this act (which it replaced with no_op), and on done the
        episode_end payload.
        """
        self._require_open()
        if self._obs is None:
            raise StateError("no pending observation; call reset()")
        self._send(frames.Act(action.name, action.x, action.y))
        notices: list[frames.Error] = []
        frame = self._next()
        while isinstance(frame, frames.Error):
            notices.append(frame)
            frame = self._next()
        if frame is None:
            raise ConnectionLost("server closed mid-step")
        if isinstance(frame, frames.EpisodeEnd):
            raise ConnectionLost("session aborted by the server", partial=frame)
        if not isinstance(frame, frames.Result):
            raise ProtocolViolation(f"expected result, got {frame.type!r}")
        info: dict[str, Any] = {
            "score": frame.score,
            "flags": frame.flags,
            "notices": tuple(notices),
        }
        if frame.done:
            end = self._next()
            if end is None:
                raise ConnectionLost("server closed before episode_end")
            if not isinstance(end, frames.EpisodeEnd):
                raise ProtocolViolation(f"expected episode_end, got {end.type!r}")
            self._scores.append(end.score)
            info["episode_end"] = {
                "score": end.score,
                "kills": end.kills,
                "duration": end.duration,
            }
            self._obs = None
            return None, frame.reward, True, info
        nxt = self._next()
        if nxt is None:
            raise ConnectionLost("server closed mid-step")
        if isinstance(nxt, frames.EpisodeEnd):
            raise ConnectionLost("session aborted by the server", partial=nxt)
        if not isinstance(nxt, frames.ObsFrame):
            raise ProtocolViolation(f"expected obs, got {nxt.type!r}")
        self._obs = self._decode_obs(nxt)
        return self._obs, frame.reward, False, info

    # -- plumbing ---------------------------------------------------------------

    def _require_open(self) -> None:
        if self._closed:
            raise StateError("env is closed")

    def _next(self) -> frames.Frame | None:
        return _read_frame(self._rfile)

    def _send(self, frame: frames.Frame) -> None:
        try:
            self._sock.sendall(frames.encode(frame))
        except TimeoutError:
            raise
        except OSError as e:
            # the server may have reported an abort before hanging up
            partial = None
            try:
                pending = self._next()
            except ClientError:
                pending = None
            if isinstance(pending, frames.EpisodeEnd):
                partial = pending
            raise ConnectionLost(f"send failed: {e}", partial=partial) from e

    def _decode_obs(self, frame: frames.ObsFrame) -> Observation:
        minimap = self._layers(frame.minimap, self._grid_shape, "minimap")
        screen = self._layers(frame.screen, self._screen_shape, "screen")
        s = frame.scalars
        try:
            camera = s["camera"]
            obs = Observation(
                episode=frame.episode,
                step=frame.step,
                minimap_fog=minimap["fog"],
                minimap_own=minimap["own"],
                minimap_enemy=minimap["enemy"],
                screen_fog=screen["fog"],
                screen_own=screen["own"],
                screen_enemy=screen["enemy"],
                clock=float(s["clock"]),
                score=int(s["score"]),
                own_alive=int(s["own_alive"]),
                enemy_visible=int(s["enemy_visible"]),
                camera=(int(camera[0]), int(camera[1])),
                selected=bool(s["selected"]),
                available_actions=frame.available_actions,
            )
        except (KeyError, IndexError, TypeError, ValueError) as e:
            raise ProtocolViolation(f"malformed obs scalars: {e}") from e
        return obs

    @staticmethod
    def _layers(
        grids: dict[str, Any], shape: tuple[int, int], label: str
    ) -> dict[str, np.ndarray]:
        out = {}
        for name in ("fog", "own", "enemy"):
            if name not in grids:
                raise ProtocolViolation(f"{label} is missing the {name!r} layer")
            try:
                arr = np.asarray(grids[name], dtype=np.uint8)
            except (TypeError, ValueError) as e:
                raise ProtocolViolation(f"{label} {name!r} layer is not a grid: {e}") from e
            if arr.shape != shape:
                raise ProtocolViolation(
                    f"{label} {name!r} layer has shape {arr.shape}, declared {shape}"
                )
            out[name] = arr
        return out


__all__ = [
    "Action",
    "ClientError",
    "ConnectionLost",
    "HandshakeError",
    "Observation",
    "ProtocolViolation",
    "RemoteEnv",
    "SessionEnded",
    "StateError",
    "connect",
]
