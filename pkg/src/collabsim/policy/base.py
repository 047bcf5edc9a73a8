"""Shared policy value types."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Protocol

from collabsim.world.actions import Action


@dataclass(frozen=True)
class ChatBackendConfig:
    endpoint: str = "https://api.openai.com/v1"
    model_name: str = "gpt-4o"
    temperature: float = 0.5
    timeout: float = 60.0
    max_retries: int = 2
    api_key_env: str = "COLLABSIM_API_KEY"

    def __post_init__(self) -> None:
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must lie in [0, 2]")
        if self.max_retries < 0:
            raise ValueError("max_retries must be non-negative")


@dataclass(frozen=True)
class PolicyConfig:
    backend: str = "oracle"  # oracle | chat
    chat: Optional[ChatBackendConfig] = None
    no_feedback: bool = False
    no_history: bool = False

    def __post_init__(self) -> None:
        if self.backend not in ("oracle", "chat"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.backend == "chat" and self.chat is None:
            object.__setattr__(self, "chat", ChatBackendConfig())


@dataclass(frozen=True)
class PromptBundle:
    system_text: str
    user_text: str


@dataclass
class PolicyDecision:
    thought: str
    action: Action
    raw_output: str = ""
    retries: int = 0
    parse_failure: bool = False
    error: Optional[str] = None
    transcript: list[dict[str, Any]] = field(default_factory=list)


@dataclass
class Observation:
    """Everything one robot may condition on at its turn."""

    robot_id: str
    step: int
    robot: Any  # world.state.Robot snapshot
    scene_graph: Any
    new_messages: list
    memory: Any
    task: Any
    grid: Any
    roster: tuple[str, ...]
    last_feedback: Any = None


class Policy(Protocol):
    def decide(self, bundle: PromptBundle, observation: Observation) -> PolicyDecision: ...
