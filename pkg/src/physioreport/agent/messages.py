"""Chat messages in the OpenAI chat-completions shape."""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..errors import ProtocolError

ROLES = ("system", "user", "assistant", "tool")


@dataclass(frozen=True)
class ToolCall:
    id: str
    function_name: str
    arguments_json: str

    def arguments(self) -> dict:
        try:
            args = json.loads(self.arguments_json or "{}")
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"tool call {self.id}: arguments are not valid JSON ({exc.msg})") from None
        if not isinstance(args, dict):
            raise ProtocolError(f"tool call {self.id}: arguments must be a JSON object")
        return args

    def to_wire(self) -> dict:
        return {
            "id": self.id,
            "type": "function",
            "function": {"name": self.function_name, "arguments": self.arguments_json},
        }

    @classmethod
    def from_wire(cls, data: dict) -> "ToolCall":
        try:
            fn = data["function"]
            args = fn.get("arguments", "{}")
            if not isinstance(args, str):
                args = json.dumps(args)
            return cls(id=str(data["id"]), function_name=fn["name"], arguments_json=args)
        except (KeyError, TypeError, AttributeError) as exc:
            raise ProtocolError(f"malformed tool call: {data!r}") from exc


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str = ""
    tool_calls: tuple[ToolCall, ...] | None = None
    tool_call_id: str | None = None

    def __post_init__(self):
        if self.role not in ROLES:
            raise ProtocolError(f"unknown message role {self.role!r}")
        if self.role == "tool" and not self.tool_call_id:
            raise ProtocolError("tool messages require tool_call_id")
        if self.tool_calls is not None:
            object.__setattr__(self, "tool_calls", tuple(self.tool_calls))
        if self.content is None:
            object.__setattr__(self, "content", "")

    def to_wire(self) -> dict:
        out: dict = {"role": self.role, "content": self.content}
        if self.tool_calls:
            out["tool_calls"] = [tc.to_wire() for tc in self.tool_calls]
        if self.tool_call_id is not None:
            out["tool_call_id"] = self.tool_call_id
        return out

    @classmethod
    def from_wire(cls, data: dict) -> "ChatMessage":
        if not isinstance(data, dict) or "role" not in data:
            raise ProtocolError(f"malformed message: {data!r}")
        calls = data.get("tool_calls")
        return cls(
            role=data["role"],
            content=data.get("content") or "",
            tool_calls=tuple(ToolCall.from_wire(c) for c in calls) if calls else None,
            tool_call_id=data.get("tool_call_id"),
        )
