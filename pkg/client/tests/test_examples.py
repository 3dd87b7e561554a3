"""The shipped example programs against live sessions."""

import numpy as np

from conftest import TINY_CONFIG, reference_scores, run_cli

from fogsweep_client import connect, flat_action_count
from fogsweep_client.examples import learner_skeleton, random_evader


def test_random_evader_script_reproduces_reference(serve, tmp_path, capsys):
    ref_csv = tmp_path / "ref.csv"
    res = run_cli(
        "run", "--map", "find-and-defeat-drones", "--pursuer", "traversal",
        "--evader", "random", "--episodes", "3", "--seed", "7",
        "--config", '{"time_limit": 16.0}', "--csv", str(ref_csv),
    )
    assert res.returncode == 0
    ref = reference_scores(ref_csv)

    srv = serve(
        "--map", "find-and-defeat-drones", "--pursuer", "traversal",
        "--evader", "socket", "--episodes", "3", "--seed", "7",
        "--timeout-ms", "10000", "--config", '{"time_limit": 16.0}',
    )
    out_csv = tmp_path / "scores.csv"
    assert random_evader.main(["--port", str(srv.port), "--csv", str(out_csv)]) == 0
    assert "mean score" in capsys.readouterr().err

    lines = out_csv.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "episode,score"
    rows = [line.split(",") for line in lines[1:]]
    assert [int(ep) for ep, _ in rows] == [0, 1, 2]
    assert [int(score) for _, score in rows] == ref
    rc, _err = srv.finish()
    assert rc == 0


def test_learner_skeleton_reward_accounting(serve):
    srv = serve(
        "--map", "find-and-defeat-drones", "--pursuer", "traversal",
        "--evader", "socket", "--episodes", "2", "--seed", "3",
        "--timeout-ms", "10000", "--config", '{"time_limit": 2.0}',
    )
    with connect(("127.0.0.1", srv.port), "evader", timeout=30) as env:
        head = learner_skeleton.RandomHead(
            flat_action_count(env.config.lx, env.config.ly), np.random.default_rng(1)
        )
        for episode in range(2):
            out = learner_skeleton.run_episode(env, head)
            assert out["episode"] == episode
            assert out["minimap_shape"] == (3, 32, 32)
            assert out["screen_shape"] == (3, 16, 16)
            # zero-sum: the evader's reward stream sums to -score
            assert out["reward_sum"] == -out["score"]
            assert out["kills"] == out["score"]
            assert out["duration"] == 2.0
        assert len(env.scores) == 2
    rc, _err = srv.finish()
    assert rc == 0


def test_learner_skeleton_main_smoke(serve, capsys):
    srv = serve(
        "--map", "find-and-defeat-zerglings", "--pursuer", "traversal",
        "--evader", "socket", "--episodes", "1", "--seed", "0",
        "--timeout-ms", "10000", "--config", TINY_CONFIG,
    )
    assert learner_skeleton.main(["--port", str(srv.port), "--head-seed", "5"]) == 0
    assert "episode 0: reward sum" in capsys.readouterr().out
    rc, _err = srv.finish()
    assert rc == 0
