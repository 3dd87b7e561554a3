"""Closed-form capture-time predictions and their Monte Carlo oracles.

Model: the pursuer line sweeps one grid block per round while an evader
relocates uniformly among the M blocks between rounds, so capture is a
geometric trial with p = N/M per round and expected capture time
v = round_time / p. The round time is the lane length (a + c, plus the
worst-case internal transit R when enabled) at sweep speed U. The reward
estimate converts v into expected kills inside the match clock, net of the
time spent actually shooting.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np

from .units import UNIT_TYPES
from .world import GameDomain, longest_internal_distance

# two-sided 99% normal quantile, used for oracle confidence half-widths
Z99 = 2.5758293035489


@dataclass(frozen=True)
class SearchGridSpec:
    """Sweep discretization: blocks of a x c cells, final lane height cbar."""

    a: float
    c: float
    cbar: float

    def __post_init__(self) -> None:
        if self.a <= 0 or self.c <= 0:
            raise ValueError("block sides must be positive")
        if not (0 < self.cbar <= self.c):
            raise ValueError("residual lane must satisfy 0 < cbar <= c")

    @classmethod
    def for_domain(
        cls, domain: GameDomain, attack_range: float, a: float | None = None
    ) -> "SearchGridSpec":
        """Default discretization: full-width blocks, lanes two attack ranges
        tall (the widest spacing that keeps every cell attackable)."""
        c = 2.0 * attack_range
        if a is None:
            a = domain.lx
        lanes = math.ceil(domain.ly / c)
        cbar = domain.ly - (lanes - 1) * c
        return cls(a=a, c=c, cbar=cbar)


@dataclass(frozen=True)
class TheoryInputs:
    """Everything the closed forms need about one matchup."""

    domain: GameDomain
    attack_range: float   # r
    speed: float          # U, pursuer sweep speed
    n_evaders: int
    n_pursuers: int
    evader_health: float
    dps: float            # per pursuer
    time_limit: float     # T_f
    use_R: bool = False   # include the worst-case transit term
    R_override: float | None = None  # replace the exact diagonal, e.g. a rounded one

    def __post_init__(self) -> None:
        if min(self.attack_range, self.speed, self.evader_health, self.dps, self.time_limit) <= 0:
            raise ValueError("inputs must be positive")
        if self.n_evaders < 1 or self.n_pursuers < 1:
            raise ValueError("need at least one unit per side")
        if self.attack_range > min(self.domain.lx, self.domain.ly):
            raise ValueError("attack range exceeds the domain")

    @property
    def R(self) -> float:
        if self.R_override is not None:
            return self.R_override
        return longest_internal_distance(self.domain)


def rounded_diagonal(domain: GameDomain) -> float:
    """Domain diagonal with sqrt(2) taken as 1.4; pass as R_override to
    reproduce transit rewards quoted at that precision."""
    return 1.4 * domain.lx


@dataclass(frozen=True)
class TheoryReport:
    M: int
    p: float
    round_time: float
    v: float
    t_k: float
    reward: float

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def block_count(spec: SearchGridSpec, domain: GameDomain) -> int:
    """Number of search blocks M = (lx/a) * ceil(ly/c)."""
    if spec.a > domain.lx:
        raise ValueError("block width exceeds the domain")
    ratio = domain.lx / spec.a
    if abs(ratio - round(ratio)) > 1e-9:
        raise ValueError("lx/a must be an integer")
    return int(round(ratio)) * math.ceil(domain.ly / spec.c)


def capture_probability(M: int, N: int = 1) -> float:
    """Per-round capture probability with N independent evaders on M blocks."""
    if M < 1:
        raise ValueError("M must be >= 1")
    if not 1 <= N <= M:
        raise ValueError("need 1 <= N <= M (p would exceed 1)")
    return min(N / M, 1.0)


def survival_probability(p: float, K: int) -> float:
    """Probability an evader is still uncaught after K rounds."""
    if not 0 < p <= 1:
        raise ValueError("p must be in (0, 1]")
    if K < 0:
        raise ValueError("K must be >= 0")
    return (1.0 - p) ** K


def round_time(inputs: TheoryInputs, spec: SearchGridSpec) -> float:
    """Seconds per search round: one block sweep plus optional transit."""
    r = inputs.R if inputs.use_R else 0.0
    return (r + spec.a + spec.c) / inputs.speed


def expected_capture_time(inputs: TheoryInputs, spec: SearchGridSpec) -> float:
    """Expected single-evader capture time v = M * round_time."""
    M = block_count(spec, inputs.domain)
    return M * round_time(inputs, spec)


def expected_capture_time_multi(inputs: TheoryInputs, spec: SearchGridSpec, N: int) -> float:
    """Expected time to clear N independent evaders: N rounds of mean 1/p_N
    each, which collapses to the single-evader value for every valid N."""
    M = block_count(spec, inputs.domain)
    p_n = capture_probability(M, N)
    return N * round_time(inputs, spec) / p_n


def kill_time(inputs: TheoryInputs) -> float:
    """T_k: seconds of pure shooting needed for all kills."""
    return inputs.n_evaders * inputs.evader_health / (inputs.n_pursuers * inputs.dps)


def reward_estimate(inputs: TheoryInputs, v: float) -> float:
    """Expected kills in one match: search time budget divided by v."""
    if v <= 0:
        raise ValueError("v must be positive")
    t_k = kill_time(inputs)
    if t_k >= inputs.time_limit:
        raise ValueError(
            f"kill time {t_k:.1f}s exceeds the match clock {inputs.time_limit:.1f}s"
        )
    return (inputs.time_limit - t_k) / v * inputs.n_evaders


def report(inputs: TheoryInputs, spec: SearchGridSpec, N: int = 1) -> TheoryReport:
    M = block_count(spec, inputs.domain)
    p = capture_probability(M, N)
    rt = round_time(inputs, spec)
    v = expected_capture_time(inputs, spec)
    return TheoryReport(
        M=M, p=p, round_time=rt, v=v, t_k=kill_time(inputs),
        reward=reward_estimate(inputs, v),
    )


def inputs_for(
    map_id: str,
    domain: GameDomain | None = None,
    n_evaders: int = 25,
    n_pursuers: int = 3,
    time_limit: float = 180.0,
    use_R: bool = False,
    R_override: float | None = None,
) -> TheoryInputs:
    """TheoryInputs for a shipped map's default matchup."""
    types = {
        "find_and_defeat_zerglings": ("marine", "zergling"),
        "find_and_defeat_drones": ("void_ray", "drone"),
    }
    if map_id not in types:
        raise ValueError(f"unknown map_id {map_id!r}")
    p_stats = UNIT_TYPES[types[map_id][0]]
    e_stats = UNIT_TYPES[types[map_id][1]]
    if domain is None:
        domain = GameDomain(32.0, 32.0)
    return TheoryInputs(
        domain=domain,
        attack_range=p_stats.attack_range,
        speed=p_stats.speed,
        n_evaders=n_evaders,
        n_pursuers=n_pursuers,
        evader_health=e_stats.health_max,
        dps=p_stats.dps,
        time_limit=time_limit,
        use_R=use_R,
        R_override=R_override,
    )


# -- Monte Carlo oracles ----------------------------------------------------


@dataclass(frozen=True)
class OracleResult:
    mean: float
    half_width: float  # 99% normal-approximation confidence half-width
    trials: int


def random_block_search_oracle(
    p: float, round_time: float, trials: int, rng: np.random.Generator
) -> OracleResult:
    """Simulate the geometric search: each round costs `round_time` and
    captures with probability p; the successful round counts in full."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 < p <= 1:
        raise ValueError("p must be in (0, 1]")
    rounds = rng.geometric(p, size=trials)
    times = rounds.astype(np.float64) * round_time
    mean = float(times.mean())
    sd = float(times.std(ddof=1)) if trials > 1 else 0.0
    return OracleResult(mean=mean, half_width=Z99 * sd / math.sqrt(trials), trials=trials)


def multi_evader_search_oracle(
    M: int, N: int, round_time: float, trials: int, rng: np.random.Generator
) -> OracleResult:
    """N sequential captures at per-round probability N/M each."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p_n = capture_probability(M, N)
    rounds = rng.geometric(p_n, size=(trials, N)).sum(axis=1)
    times = rounds.astype(np.float64) * round_time
    mean = float(times.mean())
    sd = float(times.std(ddof=1)) if trials > 1 else 0.0
    return OracleResult(mean=mean, half_width=Z99 * sd / math.sqrt(trials), trials=trials)


# -- validation suite ---------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    expected: float
    observed: float
    rel_dev: float
    tolerance: float
    passed: bool


def check(name: str, expected: float, observed: float, tolerance: float) -> CheckResult:
    rel = abs(observed - expected) / abs(expected)
    return CheckResult(name, expected, observed, rel, tolerance, rel <= tolerance)


def run_validation(trials: int = 100_000, seed: int = 2024, tolerance: float = 0.02) -> list[CheckResult]:
    """Oracle-vs-closed-form agreement on the shipped matchups plus an
    N-independence sweep on a finer grid (M=50 so N=25 stays valid)."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    results: list[CheckResult] = []
    cases = [
        ("marine_lane_sweep", "find_and_defeat_zerglings", False),
        ("marine_with_transit", "find_and_defeat_zerglings", True),
        ("void_ray_lane_sweep", "find_and_defeat_drones", False),
        ("void_ray_with_transit", "find_and_defeat_drones", True),
    ]
    for name, map_id, use_R in cases:
        inputs = inputs_for(map_id, use_R=use_R)
        spec = SearchGridSpec.for_domain(inputs.domain, inputs.attack_range)
        M = block_count(spec, inputs.domain)
        v = expected_capture_time(inputs, spec)
        got = random_block_search_oracle(capture_probability(M), round_time(inputs, spec), trials, rng)
        results.append(check(name, v, got.mean, tolerance))

    fine = SearchGridSpec(a=32.0, c=0.64, cbar=0.64)
    inputs = inputs_for("find_and_defeat_drones")
    M = block_count(fine, inputs.domain)
    for n in (1, 5, 25):
        v = expected_capture_time_multi(inputs, fine, n)
        got = multi_evader_search_oracle(M, n, round_time(inputs, fine), trials, rng)
        results.append(check(f"n_independence_N{n}", v, got.mean, tolerance))
    return results
