"""Unit stat sheets.

Numbers follow the SC2 balance sheet values for the four types the shipped
mini-games use. Distances are in grid cells, times in seconds, damage in
health points per second (sustained, post-cooldown average).
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class UnitStats:
    """Immutable per-type combat parameters."""

    name: str
    health_max: float
    sight: float          # fog-of-war reveal radius, cells
    attack_range: float   # max firing distance, cells
    speed: float          # cells per second
    dps: float            # sustained damage per second

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("unit type needs a name")
        if self.health_max <= 0 or self.speed <= 0 or self.dps < 0:
            raise ValueError(f"non-positive stat in {self.name}")
        if self.sight <= 0 or self.attack_range < 0:
            raise ValueError(f"bad radius in {self.name}")

    def time_to_kill(self, target: "UnitStats", attackers: int = 1) -> float:
        """Seconds for `attackers` of this type to burn a full-health target."""
        if attackers < 1:
            raise ValueError("attackers must be >= 1")
        if self.dps == 0:
            raise ValueError(f"{self.name} cannot attack")
        return target.health_max / (self.dps * attackers)


MARINE = UnitStats("marine", health_max=45.0, sight=9.0, attack_range=5.0, speed=3.15, dps=9.8)
ZERGLING = UnitStats("zergling", health_max=35.0, sight=8.0, attack_range=0.1, speed=4.13, dps=10.0)
DRONE = UnitStats("drone", health_max=40.0, sight=8.0, attack_range=0.1, speed=3.94, dps=4.67)
VOID_RAY = UnitStats("void_ray", health_max=150.0, sight=10.0, attack_range=6.0, speed=3.85, dps=16.8)

UNIT_TYPES: dict[str, UnitStats] = {
    s.name: s for s in (MARINE, ZERGLING, DRONE, VOID_RAY)
}
