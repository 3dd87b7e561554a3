"""Wire codec: canonical bytes, validation, and round-trip fidelity."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fogsweep_client import frames


def test_hello_canonical_bytes():
    line = frames.encode(frames.Hello("pursuer"))
    assert line == b'{"type":"hello","role":"pursuer","protocol_version":1}\n'


def test_act_canonical_bytes():
    assert frames.encode(frames.Act("no_op")) == b'{"type":"act","name":"no_op"}\n'
    line = frames.encode(frames.Act("move_minimap", 7, 31))
    assert line == b'{"type":"act","name":"move_minimap","x":7,"y":31}\n'


def test_result_flags_omitted_when_empty():
    bare = frames.encode(frames.Result(reward=0, done=False, score=2))
    assert bare == b'{"type":"result","reward":0,"done":false,"score":2}\n'
    flagged = frames.encode(frames.Result(reward=1, done=True, score=3, flags=("respawn",)))
    assert flagged.endswith(b',"flags":["respawn"]}\n')


def test_episode_end_float_duration_bytes():
    line = frames.encode(frames.EpisodeEnd(score=17, kills=17, duration=180.0))
    assert line == b'{"type":"episode_end","score":17,"kills":17,"duration":180.0}\n'


def test_decode_accepts_missing_trailing_newline():
    frame = frames.decode(b'{"type":"error","code":"timeout","detail":""}')
    assert frame == frames.Error("timeout", "")


def test_decode_episode_end_int_duration_becomes_float():
    frame = frames.decode(b'{"type":"episode_end","score":1,"kills":1,"duration":24}')
    assert frame.duration == 24.0
    assert isinstance(frame.duration, float)


@pytest.mark.parametrize(
    "line, code",
    [
        (b"[1,2]", "bad_frame"),
        (b'{"type":"warp"}', "bad_frame"),
        (b'{"type":"hello","role":"referee","protocol_version":1}', "bad_frame"),
        (b'{"type":"hello","role":"pursuer"}', "bad_frame"),
        (b'{"type":"hello","role":"pursuer","protocol_version":true}', "bad_frame"),
        (b'{"type":"result","reward":0,"done":1,"score":0}', "bad_frame"),
        (b'{"type":"act","name":"move_minimap","x":1.5,"y":2}', "bad_frame"),
        (b'{"type":"act","name":"move_minimap","x":true,"y":2}', "bad_frame"),
        (b'{"type":"episode_end","score":1,"kills":1,"duration":true}', "bad_frame"),
        (b'{"type":"result","reward":0,"done":false,"score":0,"flags":"x"}', "bad_frame"),
    ],
)
def test_decode_rejections(line, code):
    with pytest.raises(frames.WireError) as e:
        frames.decode(line)
    assert e.value.code == code


def test_decode_line_too_long_reports_cap_offset():
    line = b'{"type":"act","name":"' + b"a" * frames.MAX_LINE_BYTES + b'"}\n'
    with pytest.raises(frames.WireError) as e:
        frames.decode(line)
    assert e.value.code == "line_too_long"
    assert e.value.offset == frames.MAX_LINE_BYTES


def test_decode_bad_utf8_carries_byte_offset():
    with pytest.raises(frames.WireError) as e:
        frames.decode(b'{"type":"e\xffrror"}')
    assert e.value.code == "bad_json"
    assert e.value.offset == 10


def test_decode_bad_json_carries_byte_offset():
    with pytest.raises(frames.WireError) as e:
        frames.decode(b'{"type":!}')
    assert e.value.code == "bad_json"
    assert e.value.offset == 8


wire_text = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",)), max_size=16
)
wire_int = st.integers(-(2**31), 2**31 - 1)
index_int = st.integers(0, 10**6)
finite_float = st.floats(allow_nan=False, allow_infinity=False, width=32)
grid = st.lists(
    st.lists(st.integers(0, 1), min_size=2, max_size=3),
    min_size=2,
    max_size=3,
)
layers = st.fixed_dictionaries({"fog": grid, "own": grid, "enemy": grid})
json_value = st.one_of(wire_text, wire_int, finite_float, st.booleans())

frame_strategy = st.one_of(
    st.builds(
        frames.Hello,
        role=st.sampled_from(frames.ROLES),
        protocol_version=wire_int,
    ),
    st.builds(
        frames.Config,
        role=wire_text,
        episodes=wire_int,
        config=st.dictionaries(wire_text, json_value, max_size=4),
        protocol_version=wire_int,
    ),
    st.builds(
        frames.ObsFrame,
        episode=index_int,
        step=index_int,
        minimap=layers,
        screen=layers,
        scalars=st.fixed_dictionaries(
            {
                "clock": finite_float,
                "score": wire_int,
                "camera": st.lists(wire_int, min_size=2, max_size=2),
                "selected": st.booleans(),
            }
        ),
        available_actions=st.lists(wire_text, max_size=3).map(tuple),
    ),
    st.builds(
        frames.Act,
        name=wire_text,
        x=st.none() | wire_int,
        y=st.none() | wire_int,
    ),
    st.builds(
        frames.Result,
        reward=wire_int,
        done=st.booleans(),
        score=wire_int,
        flags=st.lists(wire_text, max_size=3).map(tuple),
    ),
    st.builds(
        frames.EpisodeEnd, score=wire_int, kills=wire_int, duration=finite_float
    ),
    st.builds(frames.Error, code=wire_text, detail=wire_text),
)


@settings(max_examples=300, deadline=None)
@given(frame=frame_strategy)
def test_round_trip_payload_and_bytes(frame):
    line = frames.encode(frame)
    back = frames.decode(line)
    assert back.to_payload() == frame.to_payload()
    # canonical lines re-encode to the identical bytes
    assert frames.encode(back) == line


def test_config_accessors():
    frame = frames.decode(
        b'{"type":"config","role":"evader","episodes":3,"protocol_version":1,'
        b'"config":{"map_id":"find_and_defeat_drones","domain":{"lx":32.0,"ly":32.0},'
        b'"camera_size":16,"time_limit":180.0,"seed":5}}'
    )
    assert frame.map_id == "find_and_defeat_drones"
    assert (frame.lx, frame.ly) == (32, 32)
    assert frame.camera_size == 16
    assert frame.time_limit == 180.0
    assert frame.seed == 5
    assert frame.episodes == 3
