"""
Config Manager

Run configuration loading, strict schema validation, preset defaults and
persistence of the effective configuration.
"""

import copy
import json
from pathlib import Path
from typing import Any, Dict, Optional, Union

import jsonschema

from ..core.envs import preset_payoff
from ..models.config import EnvParams, RunConfig
from ..utils.constants import (
    CONSENSUS_SOLVERS, CRITIC_FAMILIES, DEFAULT_MATRIX_EPISODE_LENGTH, EFFECTIVE_CONFIG_FILE,
    ENV_GRID_SPREAD, ENV_MATRIX_CUSTOM, ENV_PRESETS, ENV_TEAM_QUADRATIC, GRID_SPREAD_AGENTS,
    GRID_SPREAD_EPISODE_LENGTH, METRICS_FORMATS, OPTIMIZER_PLAIN, OPTIMIZERS, POLICY_FAMILIES,
    POLICY_MLP, POLICY_TABULAR, TEAM_QUADRATIC_AGENTS, TEAM_QUADRATIC_ITERATIONS,
    TEAM_QUADRATIC_LEARNING_RATE, TRAIN_MODES
)
from ..utils.exceptions import ConfigError
from ..utils.logger import get_logger

logger = get_logger(__name__)


def _prop(schema: Dict[str, Any], constraint: str) -> Dict[str, Any]:
    schema = dict(schema)
    schema["x-constraint"] = constraint
    return schema


_POSITIVE_INT = {"type": "integer", "minimum": 1}

ENV_PARAMS_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "episode_length": _prop(_POSITIVE_INT, "must be an integer >= 1"),
        "payoff": _prop({"type": ["array", "null"]}, "must be a nested array with one axis per agent"),
        "grid_width": _prop(_POSITIVE_INT, "must be an integer >= 1"),
        "n_agents": _prop(_POSITIVE_INT, "must be an integer >= 1"),
        "collision_penalty": _prop({"type": "number", "minimum": 0}, "must be a number >= 0"),
        "dim_per_agent": _prop(_POSITIVE_INT, "must be an integer >= 1"),
    },
}

CONFIG_SCHEMA: Dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "env": _prop({"type": "string", "enum": ENV_PRESETS}, f"must be one of {', '.join(ENV_PRESETS)}"),
        "mode": _prop({"type": "string", "enum": TRAIN_MODES}, f"must be one of {', '.join(TRAIN_MODES)}"),
        "seed": _prop({"type": "integer", "minimum": 0, "maximum": 2**63 - 1}, "must be an integer in [0, 2^63)"),
        "policy": _prop({"type": "string", "enum": POLICY_FAMILIES}, "must be \"tabular\" or \"mlp\""),
        "critic": _prop({"type": "string", "enum": CRITIC_FAMILIES}, "must be \"tabular\" or \"mlp\""),
        "learning_rate": _prop({"type": "number", "exclusiveMinimum": 0}, "must be > 0"),
        "critic_learning_rate": _prop({"type": "number", "exclusiveMinimum": 0}, "must be > 0"),
        "gamma": _prop({"type": "number", "minimum": 0, "exclusiveMaximum": 1}, "must lie in [0,1)"),
        "gae_lambda": _prop({"type": "number", "minimum": 0, "maximum": 1}, "must lie in [0,1]"),
        "clip_epsilon": _prop({"type": "number", "exclusiveMinimum": 0}, "must be > 0"),
        "critic_clip_epsilon": _prop({"type": "number", "exclusiveMinimum": 0}, "must be > 0"),
        "ppo_epochs": _prop(_POSITIVE_INT, "must be an integer >= 1"),
        "minibatches": _prop(_POSITIVE_INT, "must be an integer >= 1"),
        "episodes_per_iteration": _prop(_POSITIVE_INT, "must be an integer >= 1"),
        "iterations": _prop({"type": "integer", "minimum": 0}, "must be an integer >= 0"),
        "consensus_tol": _prop({"type": "number", "exclusiveMinimum": 0}, "must be > 0"),
        "consensus_max_iter": _prop(_POSITIVE_INT, "must be an integer >= 1"),
        "consensus_solver": _prop({"type": "string", "enum": CONSENSUS_SOLVERS},
                                  "must be \"pgd\" or \"frank_wolfe\""),
        "consensus_coefficient": _prop({"type": "number", "minimum": 0}, "must be a number >= 0"),
        "optimizer": _prop({"type": "string", "enum": OPTIMIZERS}, "must be \"plain\" or \"adam\""),
        "advantage_normalization": _prop({"type": "boolean"}, "must be true or false"),
        "rollout_workers": _prop({"type": "integer", "minimum": 0},
                                 "must be an integer >= 0 (0 picks the physical core count)"),
        "env_params": _prop(ENV_PARAMS_SCHEMA, "must be an object of environment parameters"),
        "hidden_width": _prop(_POSITIVE_INT, "must be an integer >= 1"),
        "critic_hidden_width": _prop(_POSITIVE_INT, "must be an integer >= 1"),
        "equilibrium_tol": _prop({"type": "number", "exclusiveMinimum": 0}, "must be > 0"),
        "output_dir": _prop({"type": "string", "minLength": 1}, "must be a non-empty path"),
        "metrics_format": _prop({"type": "string", "enum": METRICS_FORMATS}, "must be \"csv\" or \"jsonl\""),
        "checkpoint_interval": _prop({"type": "integer", "minimum": 0}, "must be an integer >= 0"),
        "verbosity": _prop({"type": "integer", "minimum": 0, "maximum": 2}, "must be 0, 1 or 2"),
        "record_wall_time": _prop({"type": "boolean"}, "must be true or false"),
    },
}

# JSON booleans are ints to Python; reject them where numbers are expected
_TYPE_CHECKER = jsonschema.Draft7Validator.TYPE_CHECKER.redefine(
    "number", lambda checker, value: isinstance(value, (int, float)) and not isinstance(value, bool)
).redefine(
    "integer", lambda checker, value: isinstance(value, int) and not isinstance(value, bool)
)
_Validator = jsonschema.validators.extend(jsonschema.Draft7Validator, type_checker=_TYPE_CHECKER)


class ConfigManager:
    """Loads, validates and persists run configurations."""

    def __init__(self, schema: Optional[Dict[str, Any]] = None):
        self.schema = schema or CONFIG_SCHEMA
        self._validator = _Validator(self.schema)

    def load_config(self, path: Union[str, Path]) -> RunConfig:
        """
        Parse a JSON configuration file into a validated RunConfig.

        Raises:
            ConfigError: missing file, malformed JSON or a violated constraint
        """
        path = Path(path)
        if not path.is_file():
            raise ConfigError(str(path), "does not exist or is not a file")
        try:
            with open(path, 'r', encoding='utf-8') as f:
                document = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(str(path), f"is not valid JSON ({e.msg} at line {e.lineno})") from e
        logger.debug(f"Loaded configuration {path}")
        return self.parse(document)

    def parse(self, document: Any) -> RunConfig:
        """Validate a configuration document and fill defaults."""
        if not isinstance(document, dict):
            raise ConfigError("config", "must be a JSON object")
        self.validate(document)
        return self._resolve(copy.deepcopy(document))

    def validate(self, document: Dict[str, Any]):
        """
        Strict schema check.

        Raises:
            ConfigError: naming the first offending key (in document order) and its constraint
        """
        known = self.schema["properties"]
        for key in document:
            if key not in known:
                raise ConfigError(key, "is not a recognised configuration key")
        env_params = document.get("env_params")
        if isinstance(env_params, dict):
            for key in env_params:
                if key not in ENV_PARAMS_SCHEMA["properties"]:
                    raise ConfigError(f"env_params.{key}", "is not a recognised environment parameter")

        errors = sorted(self._validator.iter_errors(document), key=lambda e: [str(p) for p in e.absolute_path])
        if errors:
            error = errors[0]
            path = [str(p) for p in error.absolute_path]
            key = ".".join(path) if path else "config"
            constraint = self._constraint_for(path) or error.message
            raise ConfigError(key, constraint)

    def _constraint_for(self, path) -> Optional[str]:
        node: Dict[str, Any] = self.schema
        constraint = None
        for part in path:
            properties = node.get("properties", {})
            if part not in properties:
                break
            node = properties[part]
            constraint = node.get("x-constraint", constraint)
        return constraint

    def _resolve(self, document: Dict[str, Any]) -> RunConfig:
        env = document.get("env", RunConfig.env)
        env_doc = dict(document.pop("env_params", None) or {})
        defaults: Dict[str, Any] = {}

        if env == ENV_TEAM_QUADRATIC:
            defaults.update(learning_rate=TEAM_QUADRATIC_LEARNING_RATE, optimizer=OPTIMIZER_PLAIN,
                            iterations=TEAM_QUADRATIC_ITERATIONS)
            env_doc.setdefault("n_agents", TEAM_QUADRATIC_AGENTS)
        elif env == ENV_GRID_SPREAD:
            defaults.update(policy=POLICY_MLP, critic=POLICY_MLP)
            env_doc.setdefault("n_agents", GRID_SPREAD_AGENTS)
            env_doc.setdefault("episode_length", GRID_SPREAD_EPISODE_LENGTH)
        else:
            defaults.update(policy=POLICY_TABULAR, critic=POLICY_TABULAR)
            env_doc.setdefault("episode_length", DEFAULT_MATRIX_EPISODE_LENGTH)
            self._resolve_matrix_agents(env, env_doc)

        for key, value in defaults.items():
            document.setdefault(key, value)
        document["env_params"] = EnvParams.from_dict(env_doc)
        config = RunConfig.from_dict(document)
        self._cross_check(config)
        return config

    def _resolve_matrix_agents(self, env: str, env_doc: Dict[str, Any]):
        if env == ENV_MATRIX_CUSTOM and env_doc.get("payoff") is None:
            raise ConfigError("env_params.payoff", "is required for matrix_custom")
        if env != ENV_MATRIX_CUSTOM and env_doc.get("payoff") is not None:
            raise ConfigError("env_params.payoff", "is only accepted with env matrix_custom")
        try:
            payoff = preset_payoff(env, env_doc.get("payoff"))
        except ValueError as e:
            raise ConfigError("env_params.payoff", f"must give every agent the same number of actions ({e})") from e
        if "n_agents" in env_doc and env_doc["n_agents"] != payoff.ndim:
            raise ConfigError("env_params.n_agents", f"must equal the payoff tensor's agent count {payoff.ndim}")
        env_doc["n_agents"] = payoff.ndim

    def _cross_check(self, config: RunConfig):
        if config.env == ENV_GRID_SPREAD:
            if config.policy == POLICY_TABULAR:
                raise ConfigError("policy", "must be \"mlp\" for grid_spread (observations are not enumerable)")
            if config.critic == POLICY_TABULAR:
                raise ConfigError("critic", "must be \"mlp\" for grid_spread (states are not enumerable)")
            if config.env_params.n_agents > config.env_params.grid_width ** 2:
                raise ConfigError("env_params.grid_width", "must leave room for one distinct landmark per agent")

    def apply_overrides(self, config: RunConfig, **overrides: Any) -> RunConfig:
        """Re-validate ``config`` with non-None overrides applied."""
        document = config.to_dict()
        document.update({k: v for k, v in overrides.items() if v is not None})
        return self.parse(document)

    def save_config(self, config: RunConfig, output_dir: Union[str, Path, None] = None) -> Path:
        """Write the effective configuration as ``config.json`` in the output directory."""
        directory = Path(output_dir or config.output_dir)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / EFFECTIVE_CONFIG_FILE
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(config.to_dict(), f, indent=2, ensure_ascii=False)
            f.write("\n")
        return path


def parse_config(path: Union[str, Path]) -> RunConfig:
    """Load and validate the configuration file at ``path``."""
    return ConfigManager().load_config(path)
