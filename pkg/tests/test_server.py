import io
import socket as socketlib
import threading

import pytest

from fogsweep import protocol
from fogsweep.episode import EpisodeConfig
from fogsweep.runner import EpisodeLogWriter, run_episode
from fogsweep.server import ServeOptions, serve, serve_stdio


def tiny(**overrides) -> EpisodeConfig:
    kw: dict = {"map_id": "find_and_defeat_zerglings", "time_limit": 1.0, "seed": 11}
    kw.update(overrides)
    return EpisodeConfig(**kw)


def start_server(options: ServeOptions):
    box: dict = {}
    ready = threading.Event()

    def on_listen(port: int) -> None:
        box["port"] = port
        ready.set()

    options.on_listen = on_listen

    def target() -> None:
        try:
            box["outcome"] = serve(options)
        except Exception as e:  # surfaced by the test thread
            box["error"] = e

    thread = threading.Thread(target=target, daemon=True)
    thread.start()
    assert ready.wait(10.0), "server never started listening"
    return thread, box


class Client:
    def __init__(self, port: int) -> None:
        self.sock = socketlib.create_connection(("127.0.0.1", port), timeout=10.0)
        self.sock.settimeout(10.0)
        self.rfile = self.sock.makefile("rb")

    def hello(self, role: str, version: int = protocol.PROTOCOL_VERSION) -> None:
        self.send(protocol.Hello(role, protocol_version=version))

    def send(self, frame: protocol.Frame) -> None:
        self.sock.sendall(protocol.encode(frame))

    def send_raw(self, data: bytes) -> None:
        self.sock.sendall(data)

    def read(self) -> protocol.Frame | None:
        line = self.rfile.readline()
        return protocol.decode(line) if line else None

    def read_until_eof(self) -> list[protocol.Frame]:
        frames = []
        while (frame := self.read()) is not None:
            frames.append(frame)
        return frames

    def close(self) -> None:
        # shutdown sends the FIN even while the makefile reader still holds
        # a reference to the socket; plain close() would only defer it
        try:
            self.sock.shutdown(socketlib.SHUT_RDWR)
        except OSError:
            pass
        for f in (self.rfile, self.sock):
            try:
                f.close()
            except OSError:
                pass


def drive_no_op(client: Client) -> list[protocol.Frame]:
    """Answer every obs with no_op until the server hangs up."""
    frames = []
    while (frame := client.read()) is not None:
        frames.append(frame)
        if isinstance(frame, protocol.Obs):
            client.send(protocol.Act("no_op"))
    return frames


def types(frames) -> list[str]:
    return [f.type for f in frames]


def test_two_socket_session():
    options = ServeOptions(config=tiny(), episodes=2, act_timeout_ms=5000)
    thread, box = start_server(options)
    c1 = Client(box["port"])
    c2 = Client(box["port"])
    c1.hello("pursuer")
    c2.hello("evader")
    results = {}

    def drive(name, client):
        results[name] = drive_no_op(client)

    t2 = threading.Thread(target=drive, args=("evader", c2), daemon=True)
    t2.start()
    drive("pursuer", c1)
    t2.join(timeout=10.0)
    thread.join(timeout=10.0)
    assert not thread.is_alive()

    outcome = box["outcome"]
    assert outcome.aborted is False
    assert outcome.scores == [0, 0]  # nobody fights under pure no_ops

    for role, frames in results.items():
        seq = types(frames)
        assert seq[0] == "config"
        assert seq.count("obs") == 8
        assert seq.count("result") == 8
        assert seq.count("episode_end") == 2
        config = frames[0]
        assert config.role == role
        assert config.episodes == 2
        assert config.episode_config() == options.config

        obs = [f for f in frames if isinstance(f, protocol.Obs)]
        assert [o.episode for o in obs] == [0] * 4 + [1] * 4
        assert [o.step for o in obs] == [0, 1, 2, 3] * 2
        assert obs[0].scalars["clock"] == 0.0
        assert obs[1].scalars["clock"] == 0.25
        ends = [f for f in frames if isinstance(f, protocol.EpisodeEnd)]
        assert all(e.duration == 1.0 for e in ends)
    c1.close()
    c2.close()


def test_second_claim_on_a_slot_is_rejected():
    options = ServeOptions(config=tiny(), episodes=1, act_timeout_ms=5000)
    thread, box = start_server(options)
    c1 = Client(box["port"])
    c1.hello("pursuer")
    dup = Client(box["port"])
    dup.hello("pursuer")
    frames = dup.read_until_eof()
    assert types(frames) == ["error"]
    assert frames[0].code == "slot_taken"
    dup.close()

    c3 = Client(box["port"])
    c3.hello("evader")
    t = threading.Thread(target=drive_no_op, args=(c3,), daemon=True)
    t.start()
    drive_no_op(c1)
    t.join(timeout=10.0)
    thread.join(timeout=10.0)
    assert box["outcome"].scores == [0]
    c1.close()
    c3.close()


def test_handshake_rejections_then_timeout():
    options = ServeOptions(
        config=tiny(), episodes=1, evader="still", handshake_timeout=1.5
    )
    thread, box = start_server(options)

    garbled = Client(box["port"])
    garbled.send_raw(b"hello there\n")
    frames = garbled.read_until_eof()
    assert [f.code for f in frames] == ["bad_json"]
    garbled.close()

    futuristic = Client(box["port"])
    futuristic.hello("pursuer", version=99)
    frames = futuristic.read_until_eof()
    assert [f.code for f in frames] == ["bad_version"]
    futuristic.close()

    misrole = Client(box["port"])
    misrole.hello("evader")  # scripted in this session
    frames = misrole.read_until_eof()
    assert [f.code for f in frames] == ["slot_scripted"]
    misrole.close()

    premature = Client(box["port"])
    premature.send(protocol.Act("no_op"))
    frames = premature.read_until_eof()
    assert [f.code for f in frames] == ["bad_hello"]
    premature.close()

    thread.join(timeout=10.0)
    assert isinstance(box["error"], TimeoutError)


def test_silent_agent_gets_timeout_substitution():
    options = ServeOptions(
        config=tiny(), episodes=1, pursuer="traversal", act_timeout_ms=50
    )
    thread, box = start_server(options)
    client = Client(box["port"])
    client.hello("evader")
    frames = client.read_until_eof()
    thread.join(timeout=10.0)

    assert types(frames) == ["config"] + ["obs", "error", "result"] * 4 + ["episode_end"]
    errors = [f for f in frames if isinstance(f, protocol.Error)]
    assert all(e.code == "timeout" for e in errors)
    assert box["outcome"].aborted is False
    client.close()


def test_bad_acts_are_substituted_with_errors():
    options = ServeOptions(config=tiny(), episodes=1, evader="still", act_timeout_ms=5000)
    thread, box = start_server(options)
    client = Client(box["port"])
    client.hello("pursuer")

    frames = [client.read()]  # config
    replies = [
        protocol.encode(protocol.Act("fly")),  # unknown verb
        b'{"type": act}\n',  # malformed JSON
        protocol.encode(protocol.Hello("pursuer")),  # wrong frame type
        protocol.encode(protocol.Act("no_op")),  # clean round
    ]
    for reply in replies:
        frame = client.read()
        assert isinstance(frame, protocol.Obs)
        frames.append(frame)
        client.send_raw(reply)
        frames.extend(client.read() for _ in range(2 if reply != replies[-1] else 1))
    frames.append(client.read())  # episode_end
    assert client.read() is None
    thread.join(timeout=10.0)

    assert types(frames) == (
        ["config"] + ["obs", "error", "result"] * 3 + ["obs", "result", "episode_end"]
    )
    codes = [f.code for f in frames if isinstance(f, protocol.Error)]
    assert codes == ["bad_action", "bad_json", "bad_action"]
    assert box["outcome"].aborted is False
    client.close()


def test_disconnect_aborts_with_partial_episode_end():
    options = ServeOptions(config=tiny(), episodes=3, act_timeout_ms=5000)
    thread, box = start_server(options)
    c1 = Client(box["port"])
    c2 = Client(box["port"])
    c1.hello("pursuer")
    c2.hello("evader")

    assert isinstance(c1.read(), protocol.Config)
    assert isinstance(c2.read(), protocol.Config)
    assert isinstance(c1.read(), protocol.Obs)
    assert isinstance(c2.read(), protocol.Obs)
    c1.send(protocol.Act("no_op"))
    c2.close()  # evader walks away mid-round

    tail = c1.read_until_eof()
    thread.join(timeout=10.0)
    assert types(tail) == ["episode_end"]
    assert tail[0].score == 0
    assert tail[0].duration == 0.0

    outcome = box["outcome"]
    assert outcome.aborted is True
    assert "evader" in outcome.detail
    assert outcome.scores == []
    c1.close()


class KeepOpenBytesIO(io.BytesIO):
    def close(self) -> None:  # keep the buffer readable after the session
        pass


def test_stdio_session():
    lines = protocol.encode(protocol.Hello("pursuer"))
    lines += protocol.encode(protocol.Act("no_op")) * 4
    rfile = io.BytesIO(lines)
    wfile = KeepOpenBytesIO()
    options = ServeOptions(config=tiny(), episodes=1, evader="still", act_timeout_ms=5000)
    outcome = serve_stdio(options, rfile=rfile, wfile=wfile)
    assert outcome.scores == [0]

    frames = [protocol.decode(line) for line in wfile.getvalue().splitlines()]
    seq = types(frames)
    assert seq[0] == "config"
    assert seq.count("obs") == 4
    assert seq.count("result") == 4
    assert seq.count("episode_end") == 1


def test_stdio_rejects_wrong_hello():
    rfile = io.BytesIO(protocol.encode(protocol.Hello("evader")))
    wfile = KeepOpenBytesIO()
    options = ServeOptions(config=tiny(), episodes=1, evader="still")
    with pytest.raises(ValueError):
        serve_stdio(options, rfile=rfile, wfile=wfile)
    frames = [protocol.decode(line) for line in wfile.getvalue().splitlines()]
    assert [f.code for f in frames] == ["bad_hello"]


def test_options_validation():
    with pytest.raises(ValueError):
        ServeOptions(episodes=0)
    with pytest.raises(ValueError):
        ServeOptions(pursuer="patrol")
    with pytest.raises(ValueError):
        ServeOptions(evader="juker")
    with pytest.raises(ValueError):
        ServeOptions(act_timeout_ms=0)
    assert ServeOptions(evader="still").socket_roles == ("pursuer",)
    assert ServeOptions().socket_roles == ("pursuer", "evader")


def test_scripted_session_matches_runner_log():
    # a server session with both slots scripted is byte-identical to the
    # in-process harness on the same seed
    cfg = EpisodeConfig(map_id="find_and_defeat_zerglings", time_limit=12.0, seed=3)
    server_buf = io.StringIO()
    outcome = serve(
        ServeOptions(
            config=cfg,
            episodes=1,
            pursuer="traversal",
            evader="builtin",
            log=EpisodeLogWriter(server_buf),
        )
    )
    runner_buf = io.StringIO()
    record = run_episode(cfg, "traversal", "builtin", log=EpisodeLogWriter(runner_buf), index=0)
    assert server_buf.getvalue() == runner_buf.getvalue()
    assert outcome.scores == [record.score]
