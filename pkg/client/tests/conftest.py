"""Shared helpers: the serving CLI as a subprocess, plus tiny configs.

The SDK talks to the simulator only over its external surface, so every
test session here is a real `fogsweep serve` process and every reference
number comes from `fogsweep run` CSV output.
"""

import csv
import re
import shutil
import subprocess
import sys
import threading

import pytest

from fogsweep_client import Action


def fogsweep_cmd() -> list[str]:
    exe = shutil.which("fogsweep")
    if exe:
        return [exe]
    return [sys.executable, "-m", "fogsweep.cli"]


TINY_CONFIG = '{"time_limit": 1.0}'  # 4 decisions per episode


class ServerProc:
    """One `fogsweep serve` subprocess bound to an OS-picked port."""

    def __init__(self, args: list[str]) -> None:
        self.proc = subprocess.Popen(
            fogsweep_cmd() + ["serve", "--port", "0", *args],
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            text=True,
        )
        line = self.proc.stdout.readline()
        m = re.search(r"listening on .*:(\d+)", line)
        if m is None:
            out, err = self.proc.communicate(timeout=5)
            raise RuntimeError(f"server reported no port: {line!r} stderr={err!r}")
        self.port = int(m.group(1))

    def finish(self, timeout: float = 60.0) -> tuple[int, str]:
        """Wait for a clean exit; returns (returncode, stderr)."""
        _out, err = self.proc.communicate(timeout=timeout)
        return self.proc.returncode, err

    def kill(self) -> None:
        if self.proc.poll() is None:
            self.proc.kill()
        self.proc.communicate()


@pytest.fixture
def serve():
    """Factory launching serve subprocesses, all killed at teardown."""
    procs: list[ServerProc] = []

    def launch(*args: str) -> ServerProc:
        p = ServerProc(list(args))
        procs.append(p)
        return p

    yield launch
    for p in procs:
        p.kill()


def run_cli(*args: str, timeout: float = 300.0) -> subprocess.CompletedProcess:
    return subprocess.run(
        fogsweep_cmd() + list(args), capture_output=True, text=True, timeout=timeout
    )


def reference_scores(csv_path) -> list[int]:
    """Score column of a `fogsweep run --csv` table, in episode order."""
    with open(csv_path, newline="") as f:
        rows = list(csv.DictReader(f))
    return [int(row["score"]) for row in rows]


def drive_no_op(env, episodes: int) -> None:
    for _ in range(episodes):
        env.reset()
        done = False
        while not done:
            _, _, done, _ = env.step(Action.no_op())


class Driver(threading.Thread):
    """Runs a client callable against the server in the background."""

    def __init__(self, fn) -> None:
        super().__init__(daemon=True)
        self.fn = fn
        self.error: BaseException | None = None
        self.start()

    def run(self) -> None:
        try:
            self.fn()
        except BaseException as e:  # surfaced by join_checked
            self.error = e

    def join_checked(self, timeout: float = 30.0) -> None:
        self.join(timeout)
        assert not self.is_alive(), "driver thread did not finish"
        if self.error is not None:
            raise self.error
