"""Per-robot decision functions: chat-model backend and scripted oracle."""

from collabsim.policy.base import ChatBackendConfig, Observation, PolicyConfig, PolicyDecision, PromptBundle
from collabsim.policy.chat import BackendUnavailable, ChatClient, ChatPolicy
from collabsim.policy.oracle import OraclePolicy, OracleState, oracle_policy_step
from collabsim.policy.parsing import ParseFailure, parse_action
from collabsim.policy.prompts import serialize_observation, system_prompt

__all__ = [
    "BackendUnavailable",
    "ChatBackendConfig",
    "ChatClient",
    "ChatPolicy",
    "Observation",
    "OraclePolicy",
    "OracleState",
    "ParseFailure",
    "PolicyConfig",
    "PolicyDecision",
    "PromptBundle",
    "oracle_policy_step",
    "parse_action",
    "serialize_observation",
    "system_prompt",
]
