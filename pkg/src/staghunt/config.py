"""Experiment configuration: JSON files merged over package defaults.

A config file may carry any subset of the sections below; omitted fields
fall back to the SweepSpec / TournamentSpec / GridworldSpec defaults.

    {
      "payoff":     {"h": 40, "c": 30, "m": 20, "g": 0},
      "agent":      {"theta": 200, "alpha": 0.1, "first_order": 0.5, ...},
      "sweep":      {"probabilities": [...], "iterations": 500, ...},
      "tournament": {"group_sizes": [2, 4, 8], "rounds": 5000, ...},
      "gridworld":  {"scenarios": [...], "variants": [...], "theta": 2.0, ...}
    }
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import fields
from pathlib import Path

from .experiments import AgentParams, GridworldSpec, SweepSpec, TournamentSpec
from .game import PayoffMatrix


def load_config(path: str | Path | None) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        return json.load(fh)


def config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, default=str)
    return hashlib.sha256(canonical.encode()).hexdigest()


def _only_known(cls, raw: dict) -> dict:
    known = {f.name for f in fields(cls)}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown {cls.__name__} config keys: {sorted(unknown)}")
    return raw


def build_payoff(config: dict, default: PayoffMatrix) -> PayoffMatrix:
    raw = config.get("payoff")
    if not raw:
        return default
    return PayoffMatrix(h=raw["h"], c=raw["c"], m=raw["m"], g=raw["g"])


def build_agent_params(config: dict, **overrides) -> AgentParams:
    raw = dict(config.get("agent", {}))
    raw.update({k: v for k, v in overrides.items() if v is not None})
    return AgentParams(**_only_known(AgentParams, raw))


def build_sweep_spec(config: dict, **overrides) -> SweepSpec:
    raw = dict(config.get("sweep", {}))
    raw.update({k: v for k, v in overrides.items() if v is not None})
    raw.setdefault("matrix", None)
    matrix = raw.pop("matrix")
    if isinstance(matrix, dict):
        matrix = PayoffMatrix(**matrix)
    if "probabilities" in raw:
        raw["probabilities"] = tuple(raw["probabilities"])
    if "variants" in raw:
        raw["variants"] = tuple(raw["variants"])
    raw["agent_params"] = build_agent_params(config, **raw.pop("agent_overrides", {}))
    if matrix is None:
        matrix = build_payoff(config, SweepSpec().matrix)
    return SweepSpec(matrix=matrix, **_only_known(SweepSpec, raw))


def build_tournament_spec(config: dict, **overrides) -> TournamentSpec:
    raw = dict(config.get("tournament", {}))
    raw.update({k: v for k, v in overrides.items() if v is not None})
    raw.setdefault("matrix", None)
    matrix = raw.pop("matrix")
    if isinstance(matrix, dict):
        matrix = PayoffMatrix(**matrix)
    if "group_sizes" in raw:
        raw["group_sizes"] = tuple(raw["group_sizes"])
    if "compositions" in raw:
        raw["compositions"] = tuple(raw["compositions"])
    raw["agent_params"] = build_agent_params(config, **raw.pop("agent_overrides", {}))
    if matrix is None:
        matrix = build_payoff(config, TournamentSpec().matrix)
    return TournamentSpec(matrix=matrix, **_only_known(TournamentSpec, raw))


def build_gridworld_spec(config: dict, **overrides) -> GridworldSpec:
    raw = dict(config.get("gridworld", {}))
    raw.update({k: v for k, v in overrides.items() if v is not None})
    if "scenarios" in raw:
        raw["scenarios"] = tuple(raw["scenarios"])
    if "variants" in raw:
        raw["variants"] = tuple(raw["variants"])
    return GridworldSpec(**_only_known(GridworldSpec, raw))
