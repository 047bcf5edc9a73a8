"""Tagged JSON encoding for the frozen value types (actions, feedback, messages).

Every registered dataclass encodes to a dict carrying a ``"type"`` tag.  Sequences
decode back to tuples, which is what all registered types use for their fields.
"""

from __future__ import annotations

import dataclasses
from typing import Any, Callable, TypeVar

T = TypeVar("T")

_REGISTRY: dict[str, type] = {}


def register(tag: str) -> Callable[[type[T]], type[T]]:
    def wrap(cls: type[T]) -> type[T]:
        if tag in _REGISTRY and _REGISTRY[tag] is not cls:
            raise ValueError(f"duplicate codec tag {tag!r}")
        _REGISTRY[tag] = cls
        cls.type_tag = tag  # type: ignore[attr-defined]
        return cls

    return wrap


def encode(value: Any) -> Any:
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        tag = getattr(type(value), "type_tag", None)
        if tag is None:
            raise TypeError(f"{type(value).__name__} is not registered with the codec")
        out: dict[str, Any] = {"type": tag}
        for f in dataclasses.fields(value):
            out[f.name] = encode(getattr(value, f.name))
        return out
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    if isinstance(value, dict):
        return {k: encode(v) for k, v in value.items()}
    return value


def decode(data: Any) -> Any:
    if isinstance(data, dict):
        if "type" in data:
            cls = _REGISTRY.get(data["type"])
            if cls is None:
                raise ValueError(f"unknown type tag {data['type']!r}")
            kwargs = {k: decode(v) for k, v in data.items() if k != "type"}
            return cls(**kwargs)
        return {k: decode(v) for k, v in data.items()}
    if isinstance(data, list):
        return tuple(decode(v) for v in data)
    return data


def registered_tags() -> dict[str, type]:
    return dict(_REGISTRY)
