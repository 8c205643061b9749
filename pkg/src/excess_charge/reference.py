"""Published reference values shipped as package data.

The JSON file is transcribed by hand from published tables and in-text
numbers. It is used to compare against, never as a computed result.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

REFERENCE_VERSION = 1


@lru_cache(maxsize=1)
def load_reference() -> dict:
    text = resources.files(__package__).joinpath("data/reference_values.json").read_text(encoding="utf-8")
    data = json.loads(text)
    if data.get("version") != REFERENCE_VERSION:
        raise ValueError(f"reference data version {data.get('version')} != {REFERENCE_VERSION}")
    return data
