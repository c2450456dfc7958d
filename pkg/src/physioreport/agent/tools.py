"""Function-calling tool registry."""

from __future__ import annotations

import copy
import json
import os
from typing import Callable

from ..errors import PhysioReportError, ProtocolError
from ..signal_core import process_eeg
from .messages import ChatMessage, ToolCall

PROCESS_EEG_SCHEMA = {
    "name": "process_eeg",
    "description": "Process EEG signal to obtain trend and dominant frequency of each wave",
    "parameters": {
        "type": "object",
        "properties": {
            "path": {
                "type": "string",
                "description": "File path of the EEG signal",
            }
        },
        "required": ["path"],
    },
}

_HANDLERS: dict[str, Callable[..., str]] = {
    "process_eeg": lambda path: process_eeg(path).to_json(),
}


def register_tools() -> list[dict]:
    """Schemas of every tool the model may call."""
    return [copy.deepcopy(PROCESS_EEG_SCHEMA)]


def tool_names() -> frozenset[str]:
    return frozenset(_HANDLERS)


def _same_file(a: str, b: str) -> bool:
    try:
        return os.path.samefile(a, b)
    except OSError:
        return os.path.abspath(a) == os.path.abspath(b)


def execute_tool_call(call: ToolCall, allowed_path: str) -> ChatMessage:
    """Run a requested tool and wrap its JSON result in a tool message.

    Only the session's own EEG file may be read; any other path, or a failure
    inside the tool, is reported back to the model as an ``{"error": ...}``
    result instead of raising.
    """
    if call.function_name not in _HANDLERS:
        raise ProtocolError(f"model requested unregistered tool {call.function_name!r}")
    args = call.arguments()
    path = args.get("path")
    if not isinstance(path, str) or set(args) != {"path"}:
        content = '{"error": "process_eeg takes exactly one string argument: path"}'
    elif not _same_file(path, allowed_path):
        content = '{"error": "path does not refer to this session\'s EEG recording"}'
    else:
        try:
            content = _HANDLERS[call.function_name](path)
        except PhysioReportError as exc:
            content = json.dumps({"error": str(exc)})
    return ChatMessage("tool", content, tool_call_id=call.id)
