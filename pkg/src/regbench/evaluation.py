"""DICE/PRP scoring of algorithm output against human descriptions.

DICE compares the set of attribute NAMES a human expressed (D_H) with the
names an algorithm selected (D_A): 2|D_H∩D_A| / (|D_H|+|D_A|).  Scores are
kept as exact rationals internally so that "perfect recall" (score exactly
1) never falls to floating-point noise.  A strict mode comparing
(name, value) pairs is available for sensitivity analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import AbstractSet, Iterable, Mapping, Sequence

from .algorithms import (
    AlgorithmSpec,
    GeneratedDescription,
    NEVER,
    RandomStream,
    RunResult,
    TypePolicy,
    apply_type_policy,
    parse_algorithm_spec,
    run_algorithm,
)
from .analysis import AnalysisConfig
from .corpus import Corpus
from .domain import Description
from .errors import ConfigurationError, UndefinedStatisticError

GROUP_KEYS = ("domain", "position")


def dice(d_h: AbstractSet, d_a: AbstractSet) -> Fraction:
    """Set-overlap score in [0, 1]; two empty sets count as identical."""
    if not d_h and not d_a:
        return Fraction(1)
    return Fraction(2 * len(d_h & d_a), len(d_h) + len(d_a))


def attribute_set(
    description: Description,
    *,
    include_other: bool = True,
    on_values: bool = False,
) -> frozenset:
    """The comparison set DICE consumes for one description.

    By default the set of attribute names, with OTHER contributing one
    element (set ``include_other=False`` to drop it); with ``on_values``
    the elements are (name, value) pairs instead.
    """
    props = [p for p in description if include_other or p.attribute != "OTHER"]
    if on_values:
        return frozenset((p.attribute, p.value) for p in props)
    return frozenset(p.attribute for p in props)


def prp(scores: Sequence) -> float:
    """Perfect recall percentage: share of scores that are exactly 1."""
    if len(scores) == 0:
        raise UndefinedStatisticError("PRP is undefined for an empty score list")
    perfect = sum(1 for s in scores if abs(Fraction(s) - 1) <= Fraction(1, 10**12))
    return 100.0 * perfect / len(scores)


@dataclass(frozen=True)
class EvaluationSummary:
    """Mean DICE, spread, and PRP for one (corpus, domain, position, algorithm) cell."""

    corpus: str
    domain: str
    position: str
    algorithm: str
    n: int
    mean_dice: float
    sd: float | None
    prp: float


@dataclass(frozen=True)
class EvaluationResult:
    summaries: tuple[EvaluationSummary, ...]
    missing: tuple[tuple[str, str], ...]  # (algorithm, trial with REs but no output)
    dangling: tuple[str, ...]  # RE trial ids with no scene


def _summarize(scores: list[Fraction]) -> tuple[float, float | None, float]:
    n = len(scores)
    mean = sum(scores, Fraction(0)) / n
    sd = None
    if n >= 2:
        var = sum((s - mean) ** 2 for s in scores) / (n - 1)
        sd = math.sqrt(var)
    return float(mean), sd, prp(scores)


def _as_outputs(value: RunResult | Mapping[str, GeneratedDescription]):
    return value.outputs if isinstance(value, RunResult) else value


def evaluate(
    corpus: Corpus,
    outputs: Mapping[str, RunResult | Mapping[str, GeneratedDescription]],
    group_by: Iterable[str] = ("domain",),
    *,
    include_other: bool = True,
    on_values: bool = False,
) -> EvaluationResult:
    """Score every human RE against its trial's algorithm output.

    ``outputs`` maps algorithm labels to per-trial descriptions.  One DICE
    score is produced per (RE, output) pair, then aggregated per group:
    the algorithm and corpus name always key the cell, and ``group_by``
    chooses whether domain and/or syntactic position split it further
    (absent keys aggregate as "all").  The sample standard deviation uses
    the n-1 denominator and is omitted for singleton cells; empty groups
    are omitted entirely.  Trials whose REs have no output are excluded
    and reported.
    """
    group_by = tuple(group_by)
    for key in group_by:
        if key not in GROUP_KEYS:
            raise ConfigurationError(f"unknown grouping key {key!r} (use {GROUP_KEYS})")

    missing: list[tuple[str, str]] = []
    dangling: set[str] = set()
    cells: dict[tuple[str, str, str], list[Fraction]] = {}
    for label in sorted(outputs):
        per_trial = _as_outputs(outputs[label])
        missed: set[str] = set()
        for re in corpus.res:
            scene = corpus.scenes_by_trial.get(re.trial_id)
            if scene is None:
                dangling.add(re.trial_id)
                continue
            generated = per_trial.get(re.trial_id)
            if generated is None:
                missed.add(re.trial_id)
                continue
            score = dice(
                attribute_set(re.description, include_other=include_other, on_values=on_values),
                attribute_set(generated.description, include_other=include_other, on_values=on_values),
            )
            domain = scene.domain if "domain" in group_by else "all"
            position = re.position.value if "position" in group_by else "all"
            cells.setdefault((label, domain, position), []).append(score)
        missing.extend((label, trial) for trial in sorted(missed))

    summaries = []
    for (label, domain, position), scores in sorted(cells.items()):
        mean, sd, perfect = _summarize(scores)
        summaries.append(
            EvaluationSummary(
                corpus=corpus.name,
                domain=domain,
                position=position,
                algorithm=label,
                n=len(scores),
                mean_dice=mean,
                sd=sd,
                prp=perfect,
            )
        )
    return EvaluationResult(tuple(summaries), tuple(missing), tuple(sorted(dangling)))


@dataclass(frozen=True)
class SweepResult:
    """Mean DICE per TYPE-insertion probability, averaged over seeded runs."""

    algorithm: str
    probabilities: tuple[float, ...]
    mean_dice: tuple[float, ...]
    runs: int
    seed: int


def sweep_type_probability(
    corpus: Corpus,
    spec: str | AlgorithmSpec,
    grid: Iterable[float],
    runs: int,
    seed: int,
    *,
    cfg: AnalysisConfig | None = None,
    include_other: bool = True,
    on_values: bool = False,
) -> SweepResult:
    """Monte Carlo sweep over the probability of appending a superfluous TYPE.

    The base algorithm runs with TYPE policy "never" (deterministic, computed
    once); each grid point then performs ``runs`` independent seeded runs
    that flip the TYPE coin per trial, and reports the mean of the per-run
    mean DICE.  The coin never fires at p=0 and always fires at p=1, so the
    endpoints coincide exactly with the deterministic never/always variants.
    Identical (corpus, spec, grid, runs, seed) yield an identical result.
    """
    if isinstance(spec, str):
        spec = parse_algorithm_spec(spec)
    probabilities = tuple(sorted(set(float(p) for p in grid)))
    if not probabilities:
        raise ConfigurationError("sweep grid is empty")
    if any(not 0.0 <= p <= 1.0 for p in probabilities):
        raise ConfigurationError("sweep grid values must lie in [0, 1]")
    if runs < 1:
        raise ConfigurationError("sweep needs at least one run")

    base = run_algorithm(corpus, spec.with_policy(NEVER), seed=seed, cfg=cfg)
    trials = sorted(
        trial
        for trial in base.outputs
        if any(re.trial_id == trial for re in corpus.res)
    )
    human_sets = {
        trial: [
            attribute_set(re.description, include_other=include_other, on_values=on_values)
            for re in corpus.res
            if re.trial_id == trial
        ]
        for trial in trials
    }
    if not any(human_sets.values()):
        raise UndefinedStatisticError("sweep needs at least one (RE, output) pair")

    master = RandomStream(seed)
    means: list[float] = []
    for p_index, p in enumerate(probabilities):
        policy = TypePolicy.probabilistic(p)
        total = Fraction(0)
        for run in range(runs):
            scores: list[Fraction] = []
            for trial in trials:
                scene = corpus.scenes_by_trial[trial]
                stream = master.split(f"p{p_index}:run{run}:trial{trial}")
                final = apply_type_policy(
                    base.outputs[trial].description, scene, policy, stream
                )
                algo_set = attribute_set(final, include_other=include_other, on_values=on_values)
                scores.extend(dice(h, algo_set) for h in human_sets[trial])
            total += sum(scores, Fraction(0)) / len(scores)
        means.append(float(total / runs))
    return SweepResult(spec.label, probabilities, tuple(means), runs, seed)
