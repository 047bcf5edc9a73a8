"""Chat-completions backend: one fresh two-message request per decision."""

from __future__ import annotations

import logging
import os
from typing import Optional

import httpx

from collabsim.policy.base import ChatBackendConfig, Observation, PolicyDecision, PromptBundle
from collabsim.policy.parsing import ParseFailure, parse_action, split_thought
from collabsim.world.actions import Wait

log = logging.getLogger(__name__)

CORRECTIVE_TEXT = (
    "Your previous reply could not be executed ({reason}). Reply again with your reasoning and "
    "exactly one legal action inside a fenced ```action block."
)


class BackendUnavailable(RuntimeError):
    pass


class ChatClient:
    """Minimal client for the widely used ``/chat/completions`` wire format."""

    def __init__(self, config: ChatBackendConfig, transport: Optional[httpx.BaseTransport] = None) -> None:
        self.config = config
        headers = {}
        api_key = os.environ.get(config.api_key_env)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        self._http = httpx.Client(
            base_url=config.endpoint.rstrip("/"),
            timeout=config.timeout,
            headers=headers,
            transport=transport,
        )

    def complete(self, messages: list[dict[str, str]], seed: Optional[int] = None) -> str:
        body = {
            "model": self.config.model_name,
            "messages": messages,
            "temperature": self.config.temperature,
        }
        if seed is not None:
            body["seed"] = seed
        try:
            resp = self._http.post("/chat/completions", json=body)
            resp.raise_for_status()
            data = resp.json()
            return data["choices"][0]["message"]["content"] or ""
        except (httpx.HTTPError, KeyError, IndexError, TypeError, ValueError) as exc:
            raise BackendUnavailable(f"{type(exc).__name__}: {exc}") from exc

    def close(self) -> None:
        self._http.close()


class ChatPolicy:
    def __init__(
        self,
        robot_id: str,
        role: str,
        config: ChatBackendConfig,
        client: Optional[ChatClient] = None,
        seed: Optional[int] = None,
    ) -> None:
        self.robot_id = robot_id
        self.role = role
        self.config = config
        self.seed = seed
        self.client = client or ChatClient(config)

    def decide(self, bundle: PromptBundle, observation: Optional[Observation] = None) -> PolicyDecision:
        messages = [
            {"role": "system", "content": bundle.system_text},
            {"role": "user", "content": bundle.user_text},
        ]
        transcript: list[dict] = []
        raw = ""
        reason = ""
        for attempt in range(self.config.max_retries + 1):
            try:
                raw = self.client.complete(messages, seed=self.seed)
            except BackendUnavailable as exc:
                log.warning("%s: backend unavailable: %s", self.robot_id, exc)
                transcript.append({"request": list(messages), "error": str(exc)})
                return PolicyDecision("", Wait(), raw, attempt, False, str(exc), transcript)
            transcript.append({"request": list(messages), "response": raw})
            try:
                action = parse_action(raw, self.role)
            except ParseFailure as exc:
                reason = str(exc)
                messages = messages + [
                    {"role": "assistant", "content": raw},
                    {"role": "user", "content": CORRECTIVE_TEXT.format(reason=reason)},
                ]
                continue
            thought, _ = split_thought(raw)
            return PolicyDecision(thought, action, raw, attempt, False, None, transcript)
        log.warning("%s: no parseable action after %d attempts (%s)", self.robot_id, self.config.max_retries + 1, reason)
        thought, _ = split_thought(raw)
        return PolicyDecision(thought, Wait(), raw, self.config.max_retries, True, reason, transcript)
