from __future__ import annotations
from typing import Callable, Dict


class Registry(dict):
    """Name -> object table filled by a decorator; lookups list valid names on a miss."""

    def __init__(self, kind: str):
        super().__init__()
        self.kind = kind

    def register(self, name: str) -> Callable:
        def deco(obj):
            self[name] = obj
            return obj
        return deco

    def get_or_raise(self, name: str, error: type[Exception] = KeyError):
        try:
            return self[name]
        except KeyError:
            raise error(f"unknown {self.kind} '{name}'; valid: {', '.join(sorted(self))}") from None


REGISTRIES: Dict[str, Registry] = {}


def registry(kind: str) -> Registry:
    return REGISTRIES.setdefault(kind, Registry(kind))
