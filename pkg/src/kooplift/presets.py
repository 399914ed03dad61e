"""Named inertias and shipped scenario presets.

The preset families: unforced attitude sweeps over initial rate (fig1-fig5)
and over rigid-body symmetry (fig6-fig9, bodies J1..J4), forced attitude
sweeps over torque amplitude (fig10-fig14), combined-model runs (fig16-fig21,
table2), and the quadrotor closed-loop tracking run (quad_square). Every
horizon, step, and signal parameter is pinned in the preset file and echoed
into the run summary.
"""

from __future__ import annotations

import sys
from importlib import resources

from .errors import ConfigError
from .harness import NAMED_INERTIAS, ScenarioConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

_DATA_PACKAGE = "kooplift.presets_data"


def _preset_files():
    out = {}
    for entry in resources.files(_DATA_PACKAGE).iterdir():
        if entry.name.endswith(".toml"):
            out[entry.name[: -len(".toml")]] = entry
    return out


def list_presets() -> list:
    """All shipped preset names, sorted with figure numbers in numeric order."""

    def key(name):
        if name.startswith("fig") and name[3:].isdigit():
            return (0, int(name[3:]))
        return (1, name)

    return sorted(_preset_files(), key=key)


def preset_dict(name: str) -> dict:
    files = _preset_files()
    if name not in files:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(list_presets())}")
    with files[name].open("rb") as fh:
        return tomllib.load(fh)


def load_preset(name: str) -> ScenarioConfig:
    d = preset_dict(name)
    if d.get("kind") == "quad":
        raise ConfigError(f"preset {name!r} is a quadrotor run; use load_quad_preset")
    return ScenarioConfig.from_dict(d)


def load_quad_preset(name: str):
    from .quadrotor import QuadRunConfig

    d = preset_dict(name)
    if d.get("kind") != "quad":
        raise ConfigError(f"preset {name!r} is not a quadrotor run")
    d.pop("kind")
    return QuadRunConfig.from_dict(d)


__all__ = ["NAMED_INERTIAS", "list_presets", "load_preset", "load_quad_preset",
           "preset_dict"]
