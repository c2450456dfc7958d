"""Chat-completion backends: an OpenAI-compatible HTTP client and a scripted mock."""

from __future__ import annotations

import abc
import json
import logging
import threading
import time
from pathlib import Path
from typing import Callable, Iterable, Union

import httpx

from ..errors import BackendError, InputError, ProtocolError
from .config import AgentConfig
from .messages import ChatMessage, ToolCall

log = logging.getLogger(__name__)

RETRYABLE_STATUS = {408, 409, 425, 429, 500, 502, 503, 504}


class ChatBackend(abc.ABC):
    """One chat-completion request per :meth:`complete` call."""

    @abc.abstractmethod
    def complete(
        self, messages: list[ChatMessage], tools: list[dict] | None, config: AgentConfig
    ) -> ChatMessage:
        """Return the assistant message produced for ``messages``."""

    def close(self) -> None:
        pass


def completions_url(endpoint_url: str) -> str:
    url = endpoint_url.rstrip("/")
    if url.endswith("/chat/completions"):
        return url
    return url + "/chat/completions"


def build_request_body(
    messages: list[ChatMessage], tools: list[dict] | None, config: AgentConfig
) -> dict:
    body = {
        "model": config.model_name,
        "messages": [m.to_wire() for m in messages],
        "temperature": config.temperature,
        "top_p": config.top_p,
    }
    if tools:
        body["tools"] = [{"type": "function", "function": t} for t in tools]
    if config.send_repetition_penalty:
        # vLLM / llama.cpp style extension field; not part of the OpenAI surface
        body["repetition_penalty"] = config.repetition_penalty
    return body


class HttpChatBackend(ChatBackend):
    """Client for an OpenAI-compatible ``/chat/completions`` endpoint.

    Transient failures are retried ``config.retries`` times with exponential
    backoff before :class:`BackendError` is raised. The underlying
    ``httpx.Client`` is thread-safe, so one instance can serve concurrent
    sessions.
    """

    def __init__(self, endpoint_url: str | None = None, api_key: str | None = None,
                 transport: httpx.BaseTransport | None = None, sleep=time.sleep):
        self.endpoint_url = endpoint_url
        self.api_key = api_key
        self._client = httpx.Client(transport=transport)
        self._sleep = sleep

    def __repr__(self):
        return f"HttpChatBackend(endpoint_url={self.endpoint_url!r})"

    def close(self) -> None:
        self._client.close()

    def _headers(self, config: AgentConfig) -> dict:
        headers = {"Content-Type": "application/json"}
        key = self.api_key or config.api_key
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def complete(self, messages, tools, config):
        url = completions_url(self.endpoint_url or config.endpoint_url)
        body = build_request_body(messages, tools, config)
        attempts = config.retries + 1
        last_error = "no attempt made"
        for attempt in range(attempts):
            if attempt:
                self._sleep(config.backoff_s * 2 ** (attempt - 1))
            try:
                resp = self._client.post(
                    url, json=body, headers=self._headers(config), timeout=config.request_timeout
                )
            except httpx.HTTPError as exc:
                last_error = f"{type(exc).__name__}: {exc}"
                log.warning("chat request attempt %d/%d failed: %s", attempt + 1, attempts, last_error)
                continue
            if resp.status_code in RETRYABLE_STATUS:
                last_error = f"HTTP {resp.status_code}"
                log.warning("chat request attempt %d/%d got %s", attempt + 1, attempts, last_error)
                continue
            if resp.status_code >= 400:
                raise BackendError(f"chat endpoint returned HTTP {resp.status_code}: {resp.text[:200]}")
            return parse_completion(resp)
        raise BackendError(f"chat endpoint {url} unavailable after {attempts} attempts ({last_error})")


def parse_completion(resp: httpx.Response) -> ChatMessage:
    try:
        data = resp.json()
        message = data["choices"][0]["message"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise BackendError(f"malformed chat-completion response: {resp.text[:200]}") from exc
    message = dict(message)
    message.setdefault("role", "assistant")
    try:
        return ChatMessage.from_wire(message)
    except ProtocolError as exc:
        raise BackendError(str(exc)) from exc


ScriptStep = Union[ChatMessage, Exception, Callable[[list, list], ChatMessage]]


class ScriptedBackend(ChatBackend):
    """Replays a fixed list of replies; used by tests and ``--mock-backend``.

    Each step is a :class:`ChatMessage`, an exception to raise, or a callable
    ``(messages, tools) -> ChatMessage``. Every request is recorded in
    :attr:`requests`. Running past the end of the script raises
    :class:`BackendError`.
    """

    def __init__(self, steps: Iterable[ScriptStep], repeat_last: bool = False):
        self.steps = list(steps)
        self.repeat_last = repeat_last
        self.requests: list[tuple[list[ChatMessage], list[dict] | None]] = []
        self._lock = threading.Lock()

    def complete(self, messages, tools, config):
        with self._lock:
            index = len(self.requests)
            self.requests.append((list(messages), tools))
            if index < len(self.steps):
                step = self.steps[index]
            elif self.repeat_last and self.steps:
                step = self.steps[-1]
            else:
                raise BackendError(f"scripted backend exhausted after {len(self.steps)} replies")
        if isinstance(step, Exception):
            raise step
        if callable(step):
            return step(messages, tools)
        return step

    @property
    def call_count(self) -> int:
        return len(self.requests)


EEG_PATH_PLACEHOLDER = "${EEG_PATH}"


def load_script(path, eeg_path: str | None = None) -> ScriptedBackend:
    """Build a :class:`ScriptedBackend` from a JSON list of wire-format messages.

    Tool-call argument values equal to ``${EEG_PATH}`` are replaced by
    ``eeg_path``.
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"{path}: cannot read mock script ({exc.strerror or exc})") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}: mock script is not valid JSON ({exc.msg})") from None
    if not isinstance(data, list):
        raise InputError(f"{path}: mock script must be a JSON array of messages")
    steps = []
    for item in data:
        item = dict(item)
        item.setdefault("role", "assistant")
        msg = ChatMessage.from_wire(item)
        if msg.tool_calls and eeg_path is not None:
            calls = []
            for call in msg.tool_calls:
                args = call.arguments()
                args = {k: (eeg_path if v == EEG_PATH_PLACEHOLDER else v) for k, v in args.items()}
                calls.append(ToolCall(call.id, call.function_name, json.dumps(args)))
            msg = ChatMessage(msg.role, msg.content, tuple(calls), msg.tool_call_id)
        steps.append(msg)
    return ScriptedBackend(steps)
