"""Client SDK for the fogsweep lockstep protocol.

Speaks the NDJSON wire protocol and exposes a reset/step environment
adapter, so external agents can drive either slot of a served session
without importing the simulator.
"""

from .actions import (
    Action,
    EVADER_VERBS,
    PURSUER_VERBS,
    action_to_index,
    flat_action_count,
    index_to_action,
    verbs_for,
)
from .env import (
    ClientError,
    ConnectionLost,
    HandshakeError,
    Observation,
    ProtocolViolation,
    RemoteEnv,
    SessionEnded,
    StateError,
    connect,
)
from .frames import PROTOCOL_VERSION, WireError

__version__ = "0.1.0"

__all__ = [
    "Action",
    "ClientError",
    "ConnectionLost",
    "EVADER_VERBS",
    "HandshakeError",
    "Observation",
    "PROTOCOL_VERSION",
    "ProtocolViolation",
    "PURSUER_VERBS",
    "RemoteEnv",
    "SessionEnded",
    "StateError",
    "WireError",
    "action_to_index",
    "connect",
    "flat_action_count",
    "index_to_action",
    "verbs_for",
]
