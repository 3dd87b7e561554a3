"""Lockstep two-slot session server.

One session drives one episode engine. Each agent slot is either a connected
byte stream speaking the NDJSON protocol or a scripted fallback agent running
in-process. Every decision step the session sends obs to both slots, collects
one act from each (substituting no_op on timeout or malformed input), steps
the engine once, and sends result frames. Strict lockstep: a late act is
consumed against the next step, never the one it missed.
"""

from __future__ import annotations

import queue
import socket
import sys
import threading
import time
from dataclasses import dataclass, field
from typing import Any, BinaryIO, Callable

from . import agents as agents_mod
from . import protocol
from .episode import Episode, EpisodeConfig, EvaderAction, Observation, PursuerAction

_EOF = object()

HANDSHAKE_TIMEOUT = 30.0
ACT_TIMEOUT_MS = 1000


@dataclass
class ServeOptions:
    """Session parameters; `pursuer`/`evader` name a scripted agent or are
    "socket" for an externally driven slot."""

    config: EpisodeConfig = field(default_factory=EpisodeConfig)
    episodes: int = 1
    pursuer: str = "socket"
    evader: str = "socket"
    host: str = "127.0.0.1"
    port: int = 0
    act_timeout_ms: int = ACT_TIMEOUT_MS
    handshake_timeout: float = HANDSHAKE_TIMEOUT
    log: Any = None  # runner.EpisodeLogWriter or None
    on_listen: Callable[[int], None] | None = None

    def __post_init__(self) -> None:
        if self.episodes < 1:
            raise ValueError("episodes must be >= 1")
        if self.act_timeout_ms < 1:
            raise ValueError("act_timeout_ms must be >= 1")
        for name, registry in (
            (self.pursuer, agents_mod.PURSUER_AGENTS),
            (self.evader, agents_mod.EVADER_AGENTS),
        ):
            if name != "socket" and name not in registry:
                raise ValueError(f"unknown agent {name!r}")

    @property
    def socket_roles(self) -> tuple[str, ...]:
        roles = []
        if self.pursuer == "socket":
            roles.append("pursuer")
        if self.evader == "socket":
            roles.append("evader")
        return tuple(roles)


@dataclass
class SessionOutcome:
    scores: list[int]
    aborted: bool = False
    detail: str = ""


class Transport:
    """Line framing plus frame encode/decode over a binary stream pair."""

    def __init__(self, rfile: BinaryIO, wfile: BinaryIO, sock: socket.socket | None = None) -> None:
        self.rfile = rfile
        self.wfile = wfile
        self.sock = sock

    def send(self, frame: protocol.Frame) -> None:
        self.wfile.write(protocol.encode(frame))
        self.wfile.flush()

    def read_frame(self) -> protocol.Frame | None:
        """None on EOF; raises ProtocolError on malformed lines."""
        line = self.rfile.readline(protocol.MAX_LINE_BYTES + 2)
        if not line:
            return None
        if len(line) > protocol.MAX_LINE_BYTES:
            raise protocol.ProtocolError(
                "line_too_long",
                f"line exceeds {protocol.MAX_LINE_BYTES} bytes",
                offset=protocol.MAX_LINE_BYTES,
            )
        return protocol.decode(line)

    def close(self) -> None:
        # Shut the socket down first: closing a makefile object would block
        # on the lock a concurrently reading thread holds. Without a socket
        # (stdio mode) the read side is left open for the same reason.
        if self.sock is not None:
            try:
                self.sock.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
        closable = (self.rfile, self.wfile, self.sock) if self.sock is not None else (self.wfile,)
        for f in closable:
            try:
                f.close()
            except OSError:
                pass


class SocketSlot:
    """An externally driven slot: a reader thread feeds one queue, the
    session loop takes exactly one item per round."""

    scripted = False

    def __init__(self, role: str, transport: Transport) -> None:
        self.role = role
        self.transport = transport
        self.inbox: queue.Queue = queue.Queue()
        self.alive = True
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()

    def _read_loop(self) -> None:
        while True:
            try:
                frame = self.transport.read_frame()
            except protocol.ProtocolError as e:
                self.inbox.put(e)
                continue
            except (OSError, ValueError):  # ValueError: file closed under us
                frame = None
            if frame is None:
                self.inbox.put(_EOF)
                return
            self.inbox.put(frame)

    def send(self, frame: protocol.Frame) -> bool:
        if not self.alive:
            return False
        try:
            self.transport.send(frame)
            return True
        except OSError:
            self.alive = False
            return False

    def next_act(self, timeout_s: float) -> tuple[Any, protocol.Error | None]:
        """One decision's action: (engine action or None, error frame or None).

        None action means the slot is gone (EOF/transport loss).
        """
        try:
            item = self.inbox.get(timeout=timeout_s)
        except queue.Empty:
            return protocol.Act("no_op"), protocol.Error("timeout", "no act within deadline")
        if item is _EOF:
            self.alive = False
            return None, None
        if isinstance(item, protocol.ProtocolError):
            return protocol.Act("no_op"), protocol.Error(item.code, item.detail)
        if not isinstance(item, protocol.Act):
            return (
                protocol.Act("no_op"),
                protocol.Error("bad_action", f"expected act frame, got {item.type!r}"),
            )
        return item, None

    def close(self) -> None:
        self.alive = False
        self.transport.close()


class ScriptedSlot:
    """A slot bound to an in-process scripted agent."""

    scripted = True
    alive = True

    def __init__(self, role: str, name: str) -> None:
        self.role = role
        self.name = name
        self.agent: Any = None

    def bind_episode(self, config: EpisodeConfig, seed: int) -> None:
        if self.role == "pursuer":
            self.agent = agents_mod.make_pursuer(self.name, config, seed)
        else:
            self.agent = agents_mod.make_evader(self.name, config, seed)

    def act(self, obs: Observation) -> PursuerAction | EvaderAction:
        return self.agent.step(obs)


class Session:
    """One lockstep session over a bound pursuer slot and evader slot."""

    def __init__(self, options: ServeOptions, pursuer_slot, evader_slot) -> None:
        self.options = options
        self.slots = {"pursuer": pursuer_slot, "evader": evader_slot}

    def run(self) -> SessionOutcome:
        opts = self.options
        scores: list[int] = []
        for index in range(opts.episodes):
            cfg_dict = opts.config.to_dict()
            cfg_dict["seed"] = opts.config.seed + index
            config = EpisodeConfig.from_dict(cfg_dict)
            evader_ai = None
            if self.slots["evader"].scripted:
                evader_ai = agents_mod.evader_unit_ai(self.slots["evader"].name, config)
            engine = Episode(config, evader_unit_ai=evader_ai)
            for slot in self.slots.values():
                if slot.scripted:
                    slot.bind_episode(config, config.seed)
            score, aborted, detail = self._play(engine, index)
            if aborted:
                return SessionOutcome(scores=scores, aborted=True, detail=detail)
            scores.append(score)
        return SessionOutcome(scores=scores)

    def _play(self, engine: Episode, index: int) -> tuple[int, bool, str]:
        opts = self.options
        log = opts.log
        obs = {}
        obs["pursuer"], obs["evader"] = engine.reset()
        if log is not None:
            log.start(index, engine.config.seed, engine.config.map_id)
        step = 0
        while True:
            for role in ("pursuer", "evader"):
                slot = self.slots[role]
                if not slot.scripted:
                    if not slot.send(protocol.obs_frame(obs[role], index, step)):
                        return self._abort(engine, f"{role} transport lost")
            acts: dict[str, Any] = {}
            wire: dict[str, protocol.Act] = {}
            for role in ("pursuer", "evader"):
                slot = self.slots[role]
                convert = protocol.act_to_pursuer if role == "pursuer" else protocol.act_to_evader
                if slot.scripted:
                    action = slot.act(obs[role])
                    acts[role] = action
                    wire[role] = protocol.action_to_act(action)
                    continue
                frame, err = slot.next_act(opts.act_timeout_ms / 1000.0)
                if frame is None:
                    return self._abort(engine, f"{role} disconnected")
                if err is None:
                    try:
                        action = convert(frame)
                    except protocol.ProtocolError as e:
                        err = protocol.Error(e.code, e.detail)
                        action = None
                if err is not None:
                    slot.send(err)
                    action = (
                        PursuerAction.no_op() if role == "pursuer" else EvaderAction.no_op()
                    )
                    frame = protocol.Act("no_op")
                acts[role] = action
                wire[role] = frame
            result = engine.step(acts["pursuer"], acts["evader"])
            obs["pursuer"] = result.obs_pursuer
            obs["evader"] = result.obs_evader
            if log is not None:
                log.step(step, wire["pursuer"], wire["evader"], result)
            rewards = {"pursuer": result.reward_pursuer, "evader": result.reward_evader}
            for role in ("pursuer", "evader"):
                slot = self.slots[role]
                if slot.scripted:
                    continue
                ok = slot.send(
                    protocol.Result(
                        reward=rewards[role],
                        done=result.done,
                        score=result.episode_score,
                        flags=list(result.flags),
                    )
                )
                if not ok:
                    return self._abort(engine, f"{role} transport lost")
            step += 1
            if result.done:
                break
        end = protocol.EpisodeEnd(
            score=engine.score, kills=engine.score, duration=engine.world.clock
        )
        if log is not None:
            log.end(end, step)
        for slot in self.slots.values():
            if not slot.scripted:
                slot.send(end)
        return engine.score, False, ""

    def _abort(self, engine: Episode, detail: str) -> tuple[int, bool, str]:
        """Transport loss: tell the surviving peer the partial score."""
        end = protocol.EpisodeEnd(
            score=engine.score, kills=engine.score, duration=engine.world.clock
        )
        for slot in self.slots.values():
            if not slot.scripted and slot.alive:
                slot.send(end)
        return engine.score, True, detail

    def close(self) -> None:
        for slot in self.slots.values():
            if not slot.scripted:
                slot.close()


def _reject(transport: Transport, code: str, detail: str) -> None:
    try:
        transport.send(protocol.Error(code, detail))
    except OSError:
        pass
    transport.close()


def _handshake(conn: socket.socket, taken: dict[str, Any], wanted: tuple[str, ...]):
    """Claim a slot for one fresh connection, or reject it."""
    transport = Transport(conn.makefile("rb"), conn.makefile("wb"), sock=conn)
    try:
        frame = transport.read_frame()
    except protocol.ProtocolError as e:
        _reject(transport, e.code, e.detail)
        return None
    except OSError:
        transport.close()
        return None
    if frame is None:
        transport.close()
        return None
    if not isinstance(frame, protocol.Hello):
        _reject(transport, "bad_hello", f"expected hello, got {frame.type!r}")
        return None
    if frame.protocol_version != protocol.PROTOCOL_VERSION:
        _reject(transport, "bad_version", f"server speaks version {protocol.PROTOCOL_VERSION}")
        return None
    role = frame.role
    if role not in wanted:
        _reject(transport, "slot_scripted", f"{role} slot is scripted here")
        return None
    if taken.get(role) is not None:
        _reject(transport, "slot_taken", f"{role} slot already bound")
        return None
    return SocketSlot(role, transport)


def serve(options: ServeOptions) -> SessionOutcome:
    """Run one session to completion: bind, fill socket slots, play, close.

    Scripted-only configurations skip networking entirely. Returns the
    session outcome; binding and handshake problems raise OSError or
    TimeoutError for the caller (CLI) to report.
    """
    slots: dict[str, Any] = {
        "pursuer": None if options.pursuer == "socket" else ScriptedSlot("pursuer", options.pursuer),
        "evader": None if options.evader == "socket" else ScriptedSlot("evader", options.evader),
    }
    wanted = options.socket_roles
    if not wanted:
        session = Session(options, slots["pursuer"], slots["evader"])
        return session.run()

    listener = socket.create_server((options.host, options.port))
    try:
        listener.settimeout(1.0)
        if options.on_listen is not None:
            options.on_listen(listener.getsockname()[1])
        deadline = time.monotonic() + options.handshake_timeout
        while any(slots[r] is None for r in wanted):
            if time.monotonic() >= deadline:
                raise TimeoutError(
                    f"no complete handshake within {options.handshake_timeout:.0f}s"
                )
            try:
                conn, _addr = listener.accept()
            except socket.timeout:
                continue
            # lockstep sends result and obs as two small writes; Nagle would
            # hold the second until the peer's delayed ACK (~40 ms per step)
            conn.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            slot = _handshake(conn, slots, wanted)
            if slot is not None:
                slots[slot.role] = slot
    finally:
        listener.close()

    session = Session(options, slots["pursuer"], slots["evader"])
    for role in wanted:
        slot = slots[role]
        slot.send(
            protocol.Config(
                role=role, episodes=options.episodes, config=options.config.to_dict()
            )
        )
    try:
        return session.run()
    finally:
        session.close()


def serve_stdio(
    options: ServeOptions,
    rfile: BinaryIO | None = None,
    wfile: BinaryIO | None = None,
) -> SessionOutcome:
    """Single-agent standard-stream mode: exactly one socket slot, bound to
    stdin/stdout (or injected streams)."""
    wanted = options.socket_roles
    if len(wanted) != 1:
        raise ValueError("stdio mode needs exactly one socket slot")
    role = wanted[0]
    if rfile is None:
        # the raw file: a daemon reader blocked on the buffered wrapper would
        # hold its lock through interpreter shutdown and abort the process
        rfile = getattr(sys.stdin.buffer, "raw", sys.stdin.buffer)
    transport = Transport(rfile, wfile if wfile is not None else sys.stdout.buffer)
    frame = transport.read_frame()
    if not isinstance(frame, protocol.Hello) or frame.role != role:
        transport.send(protocol.Error("bad_hello", f"expected hello for role {role!r}"))
        raise ValueError("stdio handshake failed")
    slot = SocketSlot(role, transport)
    other = "evader" if role == "pursuer" else "pursuer"
    scripted_name = getattr(options, other)
    slots = {role: slot, other: ScriptedSlot(other, scripted_name)}
    slot.send(
        protocol.Config(role=role, episodes=options.episodes, config=options.config.to_dict())
    )
    session = Session(options, slots["pursuer"], slots["evader"])
    try:
        return session.run()
    finally:
        session.close()


__all__ = [
    "ACT_TIMEOUT_MS",
    "HANDSHAKE_TIMEOUT",
    "ScriptedSlot",
    "Session",
    "SessionOutcome",
    "ServeOptions",
    "SocketSlot",
    "Transport",
    "serve",
    "serve_stdio",
]
