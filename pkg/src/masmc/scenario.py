"""Scenario files and random scenario generation.

A scenario file is flat ``key: value`` text; ``#`` starts a comment::

    parties: 3
    inputs: 10,20,30
    function: sum
    fragments_r: 3
    decision_makers_m: 3
    agents_p: 5
    agents_selected_k: 5
    threshold: third
    blind_result: false
    malicious: 1:perturb:1, 3:perturb:2
    modulus: default
    seed: 7

Unknown or repeated keys are rejected, and every diagnostic names the
offending line.
"""

from __future__ import annotations

import random
from pathlib import Path

from .actors import (
    CRASHED,
    ONE_THIRD,
    STRICT_MAJORITY,
    Behavior,
    FunctionKind,
    TaskSpec,
    ThresholdRule,
)
from .errors import ConfigError
from .ring_crypto import DEFAULT_MODULUS, check_modulus
from .voting import Scenario, validate_scenario

REQUIRED = ("parties", "inputs", "fragments_r", "decision_makers_m", "agents_p")
OPTIONAL = (
    "function", "weights", "agents_selected_k", "threshold",
    "blind_result", "malicious", "modulus", "seed",
)


class ScenarioError(ConfigError):
    def __init__(self, source: str, line: int | None, msg: str):
        self.source, self.line = source, line
        where = f"{source}:{line}" if line else source
        super().__init__(f"{where}: {msg}")


def _int(text: str) -> int:
    return int(text.strip(), 10)


def _int_list(text: str) -> list[int]:
    return [_int(t) for t in text.split(",") if t.strip()]


def _threshold(text: str) -> ThresholdRule:
    text = text.strip()
    if text == "third":
        return ONE_THIRD
    if text == "majority":
        return STRICT_MAJORITY
    if text.startswith("fixed:"):
        return ThresholdRule.fixed(_int(text[6:]))
    raise ValueError(f"threshold must be third|majority|fixed:<t>, got {text!r}")


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t not in ("true", "false"):
        raise ValueError(f"expected true|false, got {text!r}")
    return t == "true"


def _malicious(text: str) -> dict[int, Behavior]:
    out: dict[int, Behavior] = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        agent = _int(parts[0])
        if agent in out:
            raise ValueError(f"agent {agent} listed twice")
        if parts[1:] == ["crash"]:
            out[agent] = CRASHED
        elif len(parts) == 3 and parts[1] == "constant":
            out[agent] = Behavior.constant(_int(parts[2]))
        elif len(parts) == 3 and parts[1] == "perturb":
            out[agent] = Behavior.perturb(_int(parts[2]))
        else:
            raise ValueError(f"bad malicious entry {item!r}")
    return out


def parse_scenario(text: str, source: str = "<scenario>", seed: int | None = None) -> Scenario:
    """Parse scenario text; ``seed`` overrides the file's seed when given."""
    raw: dict[str, tuple[int, str]] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if ":" not in body:
            raise ScenarioError(source, lineno, f"expected 'key: value', got {body!r}")
        key, value = (s.strip() for s in body.split(":", 1))
        if key not in REQUIRED and key not in OPTIONAL:
            raise ScenarioError(source, lineno, f"unknown key {key!r}")
        if key in raw:
            raise ScenarioError(source, lineno, f"duplicate key {key!r}")
        raw[key] = (lineno, value)
    for key in REQUIRED:
        if key not in raw:
            raise ScenarioError(source, None, f"missing required key {key!r}")

    def get(key, conv, default=None):
        if key not in raw:
            return default
        lineno, value = raw[key]
        try:
            return conv(value)
        except (ValueError, ConfigError) as exc:
            raise ScenarioError(source, lineno, f"{key}: {exc}") from None

    def line_of(key):
        return raw.get(key, (None,))[0]

    parties = get("parties", _int)
    inputs = get("inputs", _int_list)
    if len(inputs) != parties:
        raise ScenarioError(source, line_of("inputs"), f"{len(inputs)} inputs for {parties} parties")
    function = get("function", lambda v: FunctionKind(v.strip()), FunctionKind.SUM)
    if function is FunctionKind.WEIGHTED_SUM:
        if "weights" not in raw:
            raise ScenarioError(source, line_of("function"), "wsum requires a weights line")
        weights = get("weights", _int_list)
        if len(weights) != parties:
            raise ScenarioError(source, line_of("weights"), f"{len(weights)} weights for {parties} parties")
    else:
        if "weights" in raw:
            raise ScenarioError(source, line_of("weights"), "weights only apply to function: wsum")
        weights = [1] * parties
    modulus = get(
        "modulus",
        lambda v: DEFAULT_MODULUS if v.strip() == "default" else check_modulus(_int(v)),
        DEFAULT_MODULUS,
    )
    agents_p = get("agents_p", _int)
    task = TaskSpec(
        task_id="task-0",
        weights=tuple(weights),
        fragments_r=get("fragments_r", _int),
        dm_count_m=get("decision_makers_m", _int),
        agent_count_p=agents_p,
        agents_selected_k=get("agents_selected_k", _int, agents_p),
        function_kind=function,
        threshold_rule=get("threshold", _threshold, ONE_THIRD),
        blind_result=get("blind_result", _bool, False),
        modulus=modulus,
        seed=seed if seed is not None else get("seed", _int, 0),
    )
    sc = Scenario(task, tuple(inputs), get("malicious", _malicious, {}))
    if any(not 0 <= x < modulus for x in inputs):
        raise ScenarioError(source, line_of("inputs"), f"inputs must lie in [0, {modulus})")
    if any(not 0 <= a < agents_p for a in sc.behaviors):
        raise ScenarioError(source, line_of("malicious"), f"malicious: agent ids must lie in [0, {agents_p})")
    if not 1 <= task.agents_selected_k <= agents_p:
        raise ScenarioError(
            source, line_of("agents_selected_k") or line_of("agents_p"),
            f"agents_selected_k must be in [1, {agents_p}]",
        )
    try:
        validate_scenario(sc)
    except ConfigError as exc:
        raise ScenarioError(source, None, str(exc)) from None
    return sc


def load_scenario(path: str | Path, seed: int | None = None) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(str(path), None, f"cannot read: {exc.strerror}") from None
    return parse_scenario(text, str(path), seed)


def format_scenario(sc: Scenario) -> str:
    t = sc.task
    lines = [
        f"parties: {t.party_count}",
        f"inputs: {','.join(map(str, sc.inputs))}",
        f"function: {t.function_kind.value}",
    ]
    if t.function_kind is FunctionKind.WEIGHTED_SUM:
        lines.append(f"weights: {','.join(map(str, t.weights))}")
    lines += [
        f"fragments_r: {t.fragments_r}",
        f"decision_makers_m: {t.dm_count_m}",
        f"agents_p: {t.agent_count_p}",
        f"agents_selected_k: {t.agents_selected_k}",
        f"threshold: {t.threshold_rule}",
        f"blind_result: {str(t.blind_result).lower()}",
    ]
    if sc.behaviors:
        lines.append("malicious: " + ", ".join(f"{a}:{b}" for a, b in sorted(sc.behaviors.items())))
    lines += [
        f"modulus: {'default' if t.modulus == DEFAULT_MODULUS else t.modulus}",
        f"seed: {t.seed}",
    ]
    return "\n".join(lines) + "\n"


def random_scenario(
    rng: random.Random,
    *,
    max_parties: int = 8,
    max_r: int = 6,
    max_m: int = 4,
    max_p: int = 9,
    blind: bool | None = None,
    modulus: int = DEFAULT_MODULUS,
    task_id: str = "task-0",
) -> Scenario:
    """An all-honest weighted-sum scenario with ``k = p``."""
    parties = rng.randint(1, max_parties)
    p = rng.randint(1, max_p)
    task = TaskSpec(
        task_id=task_id,
        weights=tuple(rng.randrange(modulus) for _ in range(parties)),
        fragments_r=rng.randint(1, max_r),
        dm_count_m=rng.randint(1, max_m),
        agent_count_p=p,
        agents_selected_k=p,
        function_kind=FunctionKind.WEIGHTED_SUM,
        blind_result=rng.random() < 0.5 if blind is None else blind,
        modulus=modulus,
        seed=rng.randrange(2**32),
    )
    inputs = tuple(rng.randrange(modulus) for _ in range(parties))
    return Scenario(task, inputs)
