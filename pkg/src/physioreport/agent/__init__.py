"""Tool-augmented LLM agent and its deterministic offline fallback."""

from .backends import ChatBackend, HttpChatBackend, ScriptedBackend, load_script
from .config import AgentConfig
from .fallback import deterministic_report
from .messages import ChatMessage, ToolCall
from .prompts import SECTION_HEADERS, build_system_prompt, build_user_prompt, parse_report_sections
from .report import Provenance, TherapyReport
from .session import run_session
from .tools import PROCESS_EEG_SCHEMA, execute_tool_call, register_tools

__all__ = [
    "AgentConfig",
    "ChatBackend",
    "ChatMessage",
    "HttpChatBackend",
    "PROCESS_EEG_SCHEMA",
    "Provenance",
    "SECTION_HEADERS",
    "ScriptedBackend",
    "TherapyReport",
    "ToolCall",
    "build_system_prompt",
    "build_user_prompt",
    "deterministic_report",
    "execute_tool_call",
    "load_script",
    "parse_report_sections",
    "register_tools",
    "run_session",
]
