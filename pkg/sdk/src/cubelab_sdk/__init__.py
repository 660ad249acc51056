from .client import (ClientSession, ConnectionRefused, ProtocolVersionMismatch,
                     SdkError, ServerError, ToolCall, ToolResult, TOOL_NAMES)
from .react import StepTrace, Transcript, react_loop, replay_transcript

__all__ = [
    "ClientSession", "ConnectionRefused", "ProtocolVersionMismatch", "SdkError",
    "ServerError", "StepTrace", "ToolCall", "ToolResult", "TOOL_NAMES",
    "Transcript", "react_loop", "replay_transcript",
]

__version__ = "0.1.0"
