"""Seeded Monte Carlo adversary experiments.

Each experiment is the smallest adversary model under which the matching
closed form is exactly true. These models are interpretations; the
closed forms come with no adversary description of their own.

* FRAGMENT_CAPTURE: the adversary taps one of ``r`` fragment channels
  uniformly at random and wins if it hits the critical fragment (index 0).
  Success probability ``1/r``.
* CORRUPT_DM: a task's coordinating decision maker is drawn uniformly from
  ``m``; DM 0 is corrupt. Success probability ``1/m``.
* WRONG_AGENT: coordinator drawn from ``m`` (corrupt iff 0) and agent drawn
  independently from ``p`` (compromised iff 0); the adversary wins on
  either event. Success probability ``1/m + 1/p - 1/(m p)``.

Trial ``i`` consumes raw words ``i*lanes .. i*lanes + lanes - 1`` of a
Philox stream keyed by ``(seed, experiment, r, m, p)``. Outcomes depend only on
``(seed, trial index)``, so chunks can be evaluated in any order or in
parallel and the success count is the same.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigError
from .rng import counter_generator, philox_key


class Experiment(str, Enum):
    FRAGMENT_CAPTURE = "fragment_capture"
    CORRUPT_DM = "corrupt_dm"
    WRONG_AGENT = "wrong_agent"


LANES = {Experiment.FRAGMENT_CAPTURE: 1, Experiment.CORRUPT_DM: 1, Experiment.WRONG_AGENT: 2}


def _uniform_index(u, n: int):
    # floor(u * n) maps [0, 1) uniformly onto {0, .., n-1} up to 2**-53 bias
    return np.minimum(np.floor(np.asarray(u) * n).astype(np.int64), n - 1)


def experiment_fragment_capture(r: int, rng: np.random.Generator, size=None):
    """One (or ``size``) tap attempts; True where the critical fragment is hit."""
    hit = _uniform_index(rng.random(size), r) == 0
    return bool(hit) if size is None else hit


def experiment_corrupt_dm(m: int, rng: np.random.Generator, size=None):
    hit = _uniform_index(rng.random(size), m) == 0
    return bool(hit) if size is None else hit


def experiment_wrong_agent(m: int, p: int, rng: np.random.Generator, size=None):
    n = 1 if size is None else size
    u = rng.random(2 * n).reshape(n, 2)
    hit = (_uniform_index(u[:, 0], m) == 0) | (_uniform_index(u[:, 1], p) == 0)
    return bool(hit[0]) if size is None else hit


@dataclass(frozen=True)
class AdversaryConfig:
    kind: Experiment
    trials: int
    seed: int = 0
    r: int = 1
    m: int = 1
    p: int = 1

    def validate(self) -> AdversaryConfig:
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if min(self.r, self.m, self.p) < 1:
            raise ConfigError("r, m and p must be >= 1")
        return self

    def exact(self) -> float:
        if self.kind is Experiment.FRAGMENT_CAPTURE:
            return 1 / self.r
        if self.kind is Experiment.CORRUPT_DM:
            return 1 / self.m
        return float(Fraction(1, self.m) + Fraction(1, self.p) - Fraction(1, self.m * self.p))


@dataclass(frozen=True)
class McEstimate:
    p_hat: float
    stderr: float
    trials: int
    seed: int
    successes: int

    def within(self, target: float, z: float = 3.0) -> bool:
        return abs(self.p_hat - target) <= z * self.stderr


def trial_outcomes(config: AdversaryConfig, start: int, stop: int) -> np.ndarray:
    """Success flags for trials ``start .. stop-1``."""
    key = philox_key(config.seed, "threat_lab", config.kind.value, config.r, config.m, config.p)
    rng = counter_generator(key, start * LANES[config.kind])
    n = stop - start
    if config.kind is Experiment.FRAGMENT_CAPTURE:
        return experiment_fragment_capture(config.r, rng, size=n)
    if config.kind is Experiment.CORRUPT_DM:
        return experiment_corrupt_dm(config.m, rng, size=n)
    return experiment_wrong_agent(config.m, config.p, rng, size=n)


def mc_estimate(config: AdversaryConfig, chunk: int = 1 << 16) -> McEstimate:
    config.validate()
    n = config.trials
    successes = 0
    for start in range(0, n, chunk):
        successes += int(trial_outcomes(config, start, min(n, start + chunk)).sum())
    p_hat = successes / n
    stderr = math.sqrt(p_hat * (1 - p_hat) / n)
    return McEstimate(p_hat, stderr, n, config.seed, successes)
