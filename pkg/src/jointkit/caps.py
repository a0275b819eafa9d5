"""Central size caps.

Defaults: 5000 lines, 10^7 tuple enumerations, degree 32.  Override with the
``JOINTKIT_CAPS`` environment variable, e.g.
``JOINTKIT_CAPS="max_lines=20000,max_tuples=100000000"``.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass, fields, replace

ENV_VAR = "JOINTKIT_CAPS"


class CapExceeded(RuntimeError):
    """A configured size cap was exceeded ("cap exceeded")."""

    def __init__(self, msg: str):
        super().__init__(f"cap exceeded: {msg}")


@dataclass(frozen=True)
class Caps:
    max_lines: int = 5000
    max_tuples: int = 10**7
    max_degree: int = 32


def parse_caps(text: str, base: Caps | None = None) -> Caps:
    base = base or Caps()
    names = {f.name for f in fields(Caps)}
    updates = {}
    for part in text.replace(";", ",").split(","):
        part = part.strip()
        if not part:
            continue
        key, sep, val = part.partition("=")
        key = key.strip()
        if not sep or key not in names:
            raise ValueError(f"bad {ENV_VAR} entry {part!r}; known caps: {sorted(names)}")
        v = int(val)
        if v < 1:
            raise ValueError(f"cap {key} must be positive")
        updates[key] = v
    return replace(base, **updates)


_override: Caps | None = None


def get_caps() -> Caps:
    if _override is not None:
        return _override
    return parse_caps(os.environ.get(ENV_VAR, ""))


@contextmanager
def caps_override(**kw):
    """Temporarily replace caps (tests and the CLI use this)."""
    global _override
    prev = _override
    _override = replace(get_caps(), **kw)
    try:
        yield _override
    finally:
        _override = prev
