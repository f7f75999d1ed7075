"""Motion-to-input pipeline: body-worn sensors driving a first-person avatar.

Wire-format sensor frames (compass heading, planar acceleration) are
decoded, turned into emulated mouse moves and key holds, and applied to
an avatar in a simulated room.  Each stage is importable on its own; the
pipeline module chains them deterministically, and the service module
puts the result behind a WebSocket.
"""

from .avatar import (
    Avatar,
    AvatarState,
    FidelityReport,
    GameSensitivity,
    Room,
    apply_event,
    run_round_trip,
)
from .geometry import FRAME_BODY, FRAME_WORLD
from .heading import (
    HeadingDelta,
    MouseFactor,
    MouseMapper,
    displacement_exact,
    heading_delta,
)
from .hid import (
    DURATION_QUANTUM_S,
    HidEvent,
    KeyBindings,
    KeyboardFactor,
    KeyHold,
    KeyScheduler,
    MouseMove,
    hold_seconds_exact,
    merge_streams,
    read_event_log,
    write_event_log,
)
from .pipeline import (
    BenchReport,
    Metrics,
    Pipeline,
    PipelineResult,
    Snapshot,
    bench,
    encode_interleaved,
    replay,
)
from .reckon import (
    DT_MCU_CLOCK,
    DT_TIMESTAMPED,
    IntegrationConfig,
    MotionEstimate,
    WindowedReckoner,
    estimate_bias,
    integrate_window,
)
from .sensors import (
    AccelSample,
    CompassSample,
    FrameCorruption,
    FrameKind,
    FrameLoss,
    SensorFrame,
    StreamParser,
    encode_frame,
    parse_frame,
)
from .synth import (
    TrajectoryPoint,
    read_trajectory,
    step_move,
    straight_walk,
    synthesize_accel,
    synthesize_compass,
    turn_in_place,
    write_trajectory,
)

__version__ = "0.1.0"

__all__ = [
    "Avatar",
    "AvatarState",
    "FidelityReport",
    "GameSensitivity",
    "Room",
    "apply_event",
    "run_round_trip",
    "FRAME_BODY",
    "FRAME_WORLD",
    "HeadingDelta",
    "MouseFactor",
    "MouseMapper",
    "displacement_exact",
    "heading_delta",
    "DURATION_QUANTUM_S",
    "HidEvent",
    "KeyBindings",
    "KeyboardFactor",
    "KeyHold",
    "KeyScheduler",
    "MouseMove",
    "hold_seconds_exact",
    "merge_streams",
    "read_event_log",
    "write_event_log",
    "BenchReport",
    "Metrics",
    "Pipeline",
    "PipelineResult",
    "Snapshot",
    "bench",
    "encode_interleaved",
    "replay",
    "DT_MCU_CLOCK",
    "DT_TIMESTAMPED",
    "IntegrationConfig",
    "MotionEstimate",
    "WindowedReckoner",
    "estimate_bias",
    "integrate_window",
    "AccelSample",
    "CompassSample",
    "FrameCorruption",
    "FrameKind",
    "FrameLoss",
    "SensorFrame",
    "StreamParser",
    "encode_frame",
    "parse_frame",
    "TrajectoryPoint",
    "read_trajectory",
    "step_move",
    "straight_walk",
    "synthesize_accel",
    "synthesize_compass",
    "turn_in_place",
    "write_trajectory",
    "__version__",
]
