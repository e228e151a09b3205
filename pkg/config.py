from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, ConfigDict, Field, PositiveInt, ValidationError, field_validator

from backends import BackendConfig, GenerationParams, create_backend, resolve_backend
from codec import CleaningPromptTemplate, load_template
from evaluation import DEFAULT_REASONING_TEMPLATE, REASONING_INSTRUCTION, hash_snapshot
from orchestrator import KVGeometry, TriggerPolicy
from pruning import GuardPolicy, resolve_guard

# Fields that change throughput but not results; left out of the run-log hash
_UNHASHED_FIELDS = {"workers"}


class GuardSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    preset: str = "default"
    enabled: bool = True

    @field_validator("preset")
    @classmethod
    def _known_preset(cls, value):
        resolve_guard(value)
        return value


class EngineConfig(BaseModel):
    """
    Everything a command needs, loaded from defaults, a YAML file and CLI flags
    (later sources win).
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    backend: str = "openai"
    server: BackendConfig = BackendConfig()
    reasoning: GenerationParams = GenerationParams()
    cleaning: GenerationParams = GenerationParams(max_new_tokens=2048)
    policy: TriggerPolicy = TriggerPolicy()
    guard: GuardSettings = GuardSettings()
    kv: KVGeometry = KVGeometry()
    reasoning_template: str = DEFAULT_REASONING_TEMPLATE
    instruction: str = REASONING_INSTRUCTION
    sentinel: str = Field(default="<Del>", min_length=1)
    cleaning_template_dir: str | None = None
    rollouts: PositiveInt = 8
    workers: PositiveInt = 8
    seed: int = 0

    @field_validator("backend")
    @classmethod
    def _known_backend(cls, value):
        resolve_backend(value)
        return value

    def snapshot(self) -> dict:
        return self.model_dump(mode="json", exclude=_UNHASHED_FIELDS)

    def config_hash(self) -> str:
        return hash_snapshot(self.snapshot())

    def guard_policy(self) -> GuardPolicy | None:
        return resolve_guard(self.guard.preset) if self.guard.enabled else None

    def cleaning_template(self) -> CleaningPromptTemplate:
        return load_template(self.sentinel, self.cleaning_template_dir)

    def make_backend(self):
        return create_backend(self.backend, self.server, self.seed)


def _set_dotted(data: dict, dotted: str, value: Any) -> None:
    *parents, leaf = dotted.split(".")
    node = data
    for key in parents:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ValueError(f"Cannot override {dotted}: {key} is not a mapping")
    node[leaf] = value


def _describe(error: ValidationError) -> str:
    problems = [f"{'.'.join(str(p) for p in e['loc']) or '<root>'}: {e['msg']}" for e in error.errors()]
    return "Invalid configuration: " + "; ".join(problems)


def load_config(path: str | Path | None = None, overrides: dict[str, Any] | None = None) -> EngineConfig:
    """
    Build an EngineConfig from an optional YAML file plus dotted-key overrides.

    Args:
        path (str, optional):       YAML mapping; every key is optional, unknown keys are errors.
        overrides (dict, optional): e.g. {"policy.l_clean": 3000}; None values are ignored.

    Raises:
        ValueError: If the file cannot be read or parsed, or the result is invalid.
    """
    data: dict = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as f:
                loaded = yaml.safe_load(f)
        except (OSError, yaml.YAMLError) as e:
            raise ValueError(f"Cannot load config {path}: {e}") from e
        if loaded is not None and not isinstance(loaded, dict):
            raise ValueError(f"Config {path} must be a mapping, got {type(loaded).__name__}")
        data = loaded or {}

    for dotted, value in (overrides or {}).items():
        if value is not None:
            _set_dotted(data, dotted, value)

    try:
        return EngineConfig.model_validate(data)
    except ValidationError as e:
        raise ValueError(_describe(e)) from e
