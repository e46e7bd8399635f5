"""Unit systems and orbit presets shipped in ``data/presets.json``."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from sivkit.errors import DomainError

PRESETS_VERSION = 1


@dataclass(frozen=True)
class UnitSystem:
    name: str
    G: float
    c: float
    length: str
    time: str
    mass: str
    cm_per_length: float | None = None
    yr_per_time: float | None = None


@dataclass(frozen=True)
class OrbitPreset:
    name: str
    description: str
    units: UnitSystem
    M0: float
    a: float
    e: float
    tau0: float
    periods: int


@lru_cache(maxsize=1)
def _load() -> dict:
    text = resources.files("sivkit").joinpath("data/presets.json").read_text()
    data = json.loads(text)
    if data.get("version") != PRESETS_VERSION:
        raise DomainError(f"unsupported presets version {data.get('version')!r}")
    return data


def unit_system(name: str) -> UnitSystem:
    systems = _load()["unit_systems"]
    if name not in systems:
        raise DomainError(f"unknown unit system {name!r}; choose from {sorted(systems)}")
    d = dict(systems[name])
    d["c"] = math.inf if d["c"] is None else d["c"]
    return UnitSystem(name=name, **d)


def orbit_preset(name: str) -> OrbitPreset:
    orbits = _load()["orbits"]
    if name not in orbits:
        raise DomainError(f"unknown preset {name!r}; choose from {sorted(orbits)}")
    d = dict(orbits[name])
    d["units"] = unit_system(d["units"])
    return OrbitPreset(name=name, **d)


def preset_names() -> list[str]:
    return sorted(_load()["orbits"])
