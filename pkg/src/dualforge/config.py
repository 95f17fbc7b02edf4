"""Single TOML config file tying the pipeline together.

Any subset of keys may appear in the file; missing values fall back to
the built-in defaults, so the sweep generator can emit small mix-only
configs that still load as complete configurations.  Template strings
must carry their required placeholders; this is validated at load time.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .inference import CLOSEST_OPTION_PROMPT
from .masker import IR_WRAPPER, IRSP_WRAPPER, MASK_TAG, MaskPolicy
from .mixer import SERIALIZATION_TEMPLATE, MixSpec


class ConfigError(ValueError):
    """The config file is malformed or violates template invariants."""


# Stored as documentation metadata only; the training loop itself is the
# consumer's job (this toolkit hands over exact response spans instead).
DEFAULT_TRAINING_METADATA = {
    "learning_rate": 2e-5,
    "batch_size": 128,
    "weight_decay": 0.01,
    "gradient_clip": 1.0,
    "warmup_ratio": 0.03,
    "schedule": "cosine",
    "context_length": 2048,
    "epochs": 3,
    "max_decoding_length": 1500,
}


@dataclass(frozen=True)
class Templates:
    serialization: str = SERIALIZATION_TEMPLATE
    irsp_wrapper: str = IRSP_WRAPPER
    ir_wrapper: str = IR_WRAPPER
    closest_option_prompt: str = CLOSEST_OPTION_PROMPT


@dataclass(frozen=True)
class EndpointSettings:
    url: str | None = None
    adapter: str = "raw"
    model: str | None = None
    timeout_s: float = 120.0
    max_new: int = 1500
    temperature: float = 0.0


@dataclass(frozen=True)
class ExecutorSettings:
    kind: str = "mock"
    timeout_s: float = 10.0
    command: tuple[str, ...] | None = None


@dataclass(frozen=True)
class Config:
    templates: Templates = Templates()
    mix: MixSpec = MixSpec()
    endpoint: EndpointSettings = EndpointSettings()
    executor: ExecutorSettings = ExecutorSettings()
    concurrency: int = 4
    ir_include_plain_questions: bool = True
    ratio_semantics: str = "relative_to_base"
    gain_mode: str = "fixed_fraction"
    model_mediated_closest: bool = False
    training_metadata: dict = field(default_factory=lambda: dict(DEFAULT_TRAINING_METADATA))


_REQUIRED_PLACEHOLDERS = {
    "serialization": ("{instruction}", "{response}"),
    "irsp_wrapper": ("{instruction}", "{masked_thought}"),
    "ir_wrapper": ("{response}", "{masked_instruction}"),
    "closest_option_prompt": ("{answer}", "{options}"),
}


def validate_templates(templates: Templates) -> None:
    for name, placeholders in _REQUIRED_PLACEHOLDERS.items():
        value = getattr(templates, name)
        for placeholder in placeholders:
            if placeholder not in value:
                raise ConfigError(f"template {name!r} must contain {placeholder}")
    if not templates.serialization.endswith("{response}"):
        raise ConfigError("template 'serialization' must end with {response}")
    for name in ("irsp_wrapper", "ir_wrapper"):
        if MASK_TAG in getattr(templates, name):
            raise ConfigError(f"template {name!r} must not contain the literal {MASK_TAG}")


def _policy_from_table(table: dict, default: MaskPolicy) -> MaskPolicy:
    return MaskPolicy(
        r_mask=float(table.get("r_mask", default.r_mask)),
        min_masked=int(table.get("min_masked", default.min_masked)),
        min_revealed=int(table.get("min_revealed", default.min_revealed)),
        seed=int(table.get("seed", default.seed)),
    )


def _mix_from_table(table: dict, default: MixSpec) -> MixSpec:
    irsp_table = table.get("irsp", {})
    ir_table = table.get("ir", {})
    return MixSpec(
        r_task_irsp=float(irsp_table.get("r_task", default.r_task_irsp)),
        r_task_ir=float(ir_table.get("r_task", default.r_task_ir)),
        irsp_policy=_policy_from_table(irsp_table, default.irsp_policy),
        ir_policy=_policy_from_table(ir_table, default.ir_policy),
        shuffle_seed=int(table.get("shuffle_seed", default.shuffle_seed)),
    )


def load_config(path: str | Path | None = None) -> Config:
    """Load a config file over the defaults; None means pure defaults."""
    config = Config()
    if path is None:
        validate_templates(config.templates)
        return config
    try:
        with Path(path).open("rb") as handle:
            data = tomllib.load(handle)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot load config {path}: {exc}") from exc

    templates_table = data.get("templates", {})
    templates = Templates(
        serialization=str(templates_table.get("serialization", config.templates.serialization)),
        irsp_wrapper=str(templates_table.get("irsp_wrapper", config.templates.irsp_wrapper)),
        ir_wrapper=str(templates_table.get("ir_wrapper", config.templates.ir_wrapper)),
        closest_option_prompt=str(
            templates_table.get("closest_option_prompt", config.templates.closest_option_prompt)
        ),
    )
    validate_templates(templates)

    endpoint_table = data.get("endpoint", {})
    endpoint = EndpointSettings(
        url=endpoint_table.get("url", config.endpoint.url),
        adapter=str(endpoint_table.get("adapter", config.endpoint.adapter)),
        model=endpoint_table.get("model", config.endpoint.model),
        timeout_s=float(endpoint_table.get("timeout_s", config.endpoint.timeout_s)),
        max_new=int(endpoint_table.get("max_new", config.endpoint.max_new)),
        temperature=float(endpoint_table.get("temperature", config.endpoint.temperature)),
    )
    if endpoint.adapter not in ("raw", "chat"):
        raise ConfigError(f"endpoint.adapter must be 'raw' or 'chat', got {endpoint.adapter!r}")

    executor_table = data.get("executor", {})
    command = executor_table.get("command")
    executor = ExecutorSettings(
        kind=str(executor_table.get("kind", config.executor.kind)),
        timeout_s=float(executor_table.get("timeout_s", config.executor.timeout_s)),
        command=tuple(str(part) for part in command) if command else config.executor.command,
    )
    if executor.kind not in ("sandbox", "mock"):
        raise ConfigError(f"executor.kind must be 'sandbox' or 'mock', got {executor.kind!r}")

    ratio_semantics = str(data.get("ratio_semantics", config.ratio_semantics))
    if ratio_semantics not in ("relative_to_base", "share_of_mixture"):
        raise ConfigError(f"unknown ratio_semantics {ratio_semantics!r}")
    gain_mode = str(data.get("gain_mode", config.gain_mode))
    if gain_mode not in ("fixed_fraction", "net_reduction"):
        raise ConfigError(f"unknown gain_mode {gain_mode!r}")

    training = dict(DEFAULT_TRAINING_METADATA)
    training.update(data.get("training", {}))

    return Config(
        templates=templates,
        mix=_mix_from_table(data.get("mix", {}), config.mix),
        endpoint=endpoint,
        executor=executor,
        concurrency=int(data.get("concurrency", config.concurrency)),
        ir_include_plain_questions=bool(
            data.get("ir_include_plain_questions", config.ir_include_plain_questions)
        ),
        ratio_semantics=ratio_semantics,
        gain_mode=gain_mode,
        model_mediated_closest=bool(
            data.get("model_mediated_closest", config.model_mediated_closest)
        ),
        training_metadata=training,
    )


def _toml_escape(value: str) -> str:
    return value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")


def mix_spec_toml(spec: MixSpec) -> str:
    """Render a MixSpec as a partial config file (the sweep output format)."""
    lines = [
        "[mix]",
        f"shuffle_seed = {spec.shuffle_seed}",
        "",
        "[mix.irsp]",
        f"r_task = {spec.r_task_irsp}",
        f"r_mask = {spec.irsp_policy.r_mask}",
        f"min_masked = {spec.irsp_policy.min_masked}",
        f"min_revealed = {spec.irsp_policy.min_revealed}",
        f"seed = {spec.irsp_policy.seed}",
        "",
        "[mix.ir]",
        f"r_task = {spec.r_task_ir}",
        f"r_mask = {spec.ir_policy.r_mask}",
        f"min_masked = {spec.ir_policy.min_masked}",
        f"min_revealed = {spec.ir_policy.min_revealed}",
        f"seed = {spec.ir_policy.seed}",
        "",
    ]
    return "\n".join(lines)


def with_mix(config: Config, mix: MixSpec) -> Config:
    return replace(config, mix=mix)
