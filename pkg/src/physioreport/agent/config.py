from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import InputError


@dataclass(frozen=True)
class AgentConfig:
    model_name: str = "qwen3-32b"
    endpoint_url: str = "http://localhost:8000/v1"
    api_key: str | None = field(default=None, repr=False)
    temperature: float = 0.7
    top_p: float = 0.8
    repetition_penalty: float = 1.05
    send_repetition_penalty: bool = True
    max_turns: int = 4
    request_timeout: float = 60.0
    retries: int = 2
    backoff_s: float = 0.5
    exercise_offset_bpm: float = 30.0

    def __post_init__(self):
        if not self.temperature >= 0:
            raise InputError(f"temperature must be >= 0, got {self.temperature}")
        if not 0 < self.top_p <= 1:
            raise InputError(f"top_p must be in (0, 1], got {self.top_p}")
        if self.max_turns < 2:
            raise InputError(f"max_turns must be >= 2, got {self.max_turns}")
        if self.retries < 0:
            raise InputError("retries must be >= 0")
        if not self.request_timeout > 0:
            raise InputError("request_timeout must be positive")
