"""Bundled surface fixtures.

The directory can be overridden with the ``DCK_FIXTURES`` environment
variable; anything matching ``*.json`` there is treated as a fixture.
"""

import os
from pathlib import Path

_ENV_VAR = "DCK_FIXTURES"


def fixture_dir() -> Path:
    override = os.environ.get(_ENV_VAR)
    if override:
        return Path(override)
    return Path(__file__).resolve().parent


def fixture_names():
    return sorted(p.stem for p in fixture_dir().glob("*.json"))


def fixture_path(name: str) -> Path:
    path = fixture_dir() / f"{name}.json"
    if not path.exists():
        raise FileNotFoundError(
            f"fixture {name!r} not found in {fixture_dir()} "
            f"(override with {_ENV_VAR})"
        )
    return path
