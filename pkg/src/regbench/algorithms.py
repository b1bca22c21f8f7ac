"""The classic content-selection algorithms and their TYPE policies.

Three selectors are implemented over the candidate universe of a scene:

* full_brevity: exhaustive search for a shortest distinguishing description;
* greedy: repeatedly add the property ruling out the most remaining
  distractors;
* incremental: scan attributes in a fixed preference order, adding any
  value that removes at least one remaining distractor.

All ties are broken by schema declaration order, then by the value's
position in the attribute universe, so outputs are fully deterministic.
A TypePolicy (never / always / probabilistic) decides whether the target's
TYPE is appended afterwards; the probabilistic coin draws from an explicit
RandomStream so runs are reproducible and parallelizable.
"""

from __future__ import annotations

import hashlib
import random
import re as _re
from dataclasses import dataclass, replace
from itertools import combinations
from typing import Iterable, Mapping

from .analysis import AnalysisConfig, DEFAULT_CONFIG, candidate_universe, usable_attributes
from .corpus import Corpus
from .domain import Description, Property, Scene, distinguishes, true_of
from .errors import ConfigurationError, RegbenchError, SchemaMismatchError

FULL_BREVITY = "FB"
GREEDY = "GR"
INCREMENTAL = "IA"


@dataclass(frozen=True)
class TypePolicy:
    """Whether to append the target's TYPE to a selected description."""

    kind: str  # "never" | "always" | "probabilistic"
    p: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("never", "always", "probabilistic"):
            raise ConfigurationError(f"unknown TYPE policy {self.kind!r}")
        if self.kind == "probabilistic" and not 0.0 <= self.p <= 1.0:
            raise ConfigurationError(f"TYPE probability must be in [0,1], got {self.p}")

    @classmethod
    def never(cls) -> "TypePolicy":
        return cls("never")

    @classmethod
    def always(cls) -> "TypePolicy":
        return cls("always")

    @classmethod
    def probabilistic(cls, p: float) -> "TypePolicy":
        return cls("probabilistic", float(p))


NEVER = TypePolicy.never()
ALWAYS = TypePolicy.always()


class RandomStream:
    """Seeded random source with documented identity.

    Draws come from Python's Mersenne Twister (``random.Random(seed)``,
    ``random()`` method), whose sequence is guaranteed stable across
    platforms for a given seed.  ``split`` derives an independent stream
    from a string key via SHA-256, which is how batch runs give every
    trial (and every Monte Carlo run) its own stream regardless of
    execution order.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._rng = random.Random(self.seed)

    def next_unit(self) -> float:
        """One draw, uniform on [0, 1)."""
        return self._rng.random()

    def split(self, key: str) -> "RandomStream":
        digest = hashlib.sha256(f"{self.seed}:{key}".encode("utf-8")).digest()
        return RandomStream(int.from_bytes(digest[:8], "big"))


@dataclass(frozen=True)
class GeneratedDescription:
    """One algorithm output for one trial; the flag is recomputed at creation."""

    description: Description
    distinguishing: bool
    algorithm: str
    trial_id: str


@dataclass(frozen=True)
class PreferenceOrder:
    """The fixed attribute ranking the incremental algorithm scans.

    Attribute names must be usable and duplicate-free; TYPE is normally
    left out because the TYPE policy handles it.
    """

    attributes: tuple[str, ...]

    def validate_for(self, scene: Scene, cfg: AnalysisConfig) -> None:
        seen = set()
        usable = set(usable_attributes(scene.schema, cfg))
        for name in self.attributes:
            if name in seen:
                raise ConfigurationError(f"preference order repeats {name!r}")
            seen.add(name)
            if name not in usable:
                raise ConfigurationError(
                    f"preference order attribute {name!r} is not usable in the "
                    f"{scene.domain} schema"
                )


FURNITURE_LETTERS = {"C": "COLOUR", "O": "ORIENTATION", "S": "SIZE"}
PEOPLE_LETTERS = {
    "B": "Beard",
    "G": "hasGlasses",
    "H": "Hair",
    "O": "ORIENTATION",
    "A": "AGE",
    "T": "hasTie",
}
# In people code strings the first S means hasShirt and the second hasSuit.
PEOPLE_S_SEQUENCE = ("hasShirt", "hasSuit")

FURNITURE_PRESET_ORDERS = ("COS", "CSO", "OCS", "SCO", "OSC", "SOC")
PEOPLE_PRESET_ORDERS = (
    "GBHOATSS",
    "BGHOATSS",
    "GHBOATSS",
    "BHGOATSS",
    "HGBOATSS",
    "HBGOATSS",
    "SSTAOHBG",
)


def preference_order_from_code(code: str, domain: str) -> PreferenceOrder:
    """Expand a letter code like COS or GBHOATSS for the given domain."""
    code = code.strip().upper()
    if not code:
        raise ConfigurationError("empty preference-order code")
    names: list[str] = []
    s_seen = 0
    for letter in code:
        if domain == "furniture":
            name = FURNITURE_LETTERS.get(letter)
        elif letter == "S":
            name = PEOPLE_S_SEQUENCE[s_seen] if s_seen < len(PEOPLE_S_SEQUENCE) else None
            s_seen += 1
        else:
            name = PEOPLE_LETTERS.get(letter)
        if name is None:
            raise ConfigurationError(
                f"letter {letter!r} in order {code!r} has no {domain} attribute"
            )
        names.append(name)
    return PreferenceOrder(tuple(names))


def preset_orders(domain: str) -> dict[str, PreferenceOrder]:
    codes = FURNITURE_PRESET_ORDERS if domain == "furniture" else PEOPLE_PRESET_ORDERS
    return {code: preference_order_from_code(code, domain) for code in codes}


def apply_type_policy(
    description: Description,
    scene: Scene,
    policy: TypePolicy,
    stream: RandomStream | None = None,
) -> Description:
    """Apply a TYPE policy to a selected description.

    The probabilistic variant consumes exactly one draw per call, even when
    TYPE is already present, so runs stay aligned across policy variants.
    """
    if policy.kind == "never":
        return description
    if policy.kind == "probabilistic":
        if stream is None:
            raise ConfigurationError("probabilistic TYPE policy needs a RandomStream")
        append = stream.next_unit() < policy.p
        if not append:
            return description
    type_value = scene.target.value_of("TYPE")
    if type_value is None:
        raise SchemaMismatchError(f"scene {scene.trial_id!r}: target has no TYPE value")
    if "TYPE" in description:
        return description
    return description.with_property(Property("TYPE", type_value))


def _finish(
    selected: Iterable[Property],
    scene: Scene,
    policy: TypePolicy,
    stream: RandomStream | None,
    label: str,
) -> GeneratedDescription:
    description = apply_type_policy(Description(tuple(selected)), scene, policy, stream)
    return GeneratedDescription(
        description=description,
        distinguishing=distinguishes(description, scene),
        algorithm=label,
        trial_id=scene.trial_id,
    )


def _ruled_masks(scene: Scene, candidates: tuple[Property, ...]) -> tuple[list[int], int]:
    schema = scene.schema
    masks = []
    for prop in candidates:
        mask = 0
        for i, obj in enumerate(scene.distractors):
            if not true_of(prop, obj, schema):
                mask |= 1 << i
        masks.append(mask)
    return masks, (1 << len(scene.distractors)) - 1


def full_brevity(
    scene: Scene,
    *,
    policy: TypePolicy = NEVER,
    stream: RandomStream | None = None,
    cfg: AnalysisConfig | None = None,
    label: str = FULL_BREVITY,
) -> GeneratedDescription:
    """Shortest distinguishing description, by exhaustive size-ordered search.

    Among equal-size candidates the first in lexicographic subset order over
    the schema-ordered candidate list wins.  When no distinguishing subset
    exists the empty description is returned with distinguishing=False
    (the policy still applies).
    """
    cfg = cfg or DEFAULT_CONFIG
    candidates = candidate_universe(scene, cfg)
    masks, full = _ruled_masks(scene, candidates)
    indices = range(len(candidates))
    for size in range(1, len(candidates) + 1):
        for combo in combinations(indices, size):
            attrs = [candidates[i].attribute for i in combo]
            if len(attrs) != len(set(attrs)):
                continue
            union = 0
            for i in combo:
                union |= masks[i]
            if union == full:
                return _finish([candidates[i] for i in combo], scene, policy, stream, label)
    return _finish((), scene, policy, stream, label)


def greedy(
    scene: Scene,
    *,
    policy: TypePolicy = NEVER,
    stream: RandomStream | None = None,
    cfg: AnalysisConfig | None = None,
    label: str = GREEDY,
) -> GeneratedDescription:
    """Iteratively add the candidate ruling out the most remaining distractors.

    Stops as soon as the target is distinguished, or when no candidate rules
    out any remaining distractor.  Each iteration strictly shrinks the
    remaining-distractor set.
    """
    cfg = cfg or DEFAULT_CONFIG
    candidates = candidate_universe(scene, cfg)
    masks, full = _ruled_masks(scene, candidates)
    remaining = full
    used_attrs: set[str] = set()
    selected: list[Property] = []
    while remaining:
        best = None
        best_gain = 0
        for i, prop in enumerate(candidates):
            if prop.attribute in used_attrs:
                continue
            gain = bin(masks[i] & remaining).count("1")
            if gain > best_gain:
                best, best_gain = i, gain
        if best is None:
            break
        selected.append(candidates[best])
        used_attrs.add(candidates[best].attribute)
        remaining &= ~masks[best]
    return _finish(selected, scene, policy, stream, label)


def incremental(
    scene: Scene,
    order: PreferenceOrder,
    *,
    policy: TypePolicy = ALWAYS,
    stream: RandomStream | None = None,
    cfg: AnalysisConfig | None = None,
    label: str = INCREMENTAL,
) -> GeneratedDescription:
    """Scan attributes in preference order, adding any value that helps.

    Uses the target's most specific value per attribute.  An attribute is
    included iff it rules out at least one remaining distractor; the scan
    stops once no distractor remains.  The TYPE policy (by default: always
    append) runs afterwards, and the distinguishing flag reflects the final
    description either way.
    """
    cfg = cfg or DEFAULT_CONFIG
    order.validate_for(scene, cfg)
    schema = scene.schema
    target = scene.target
    remaining = list(scene.distractors)
    selected: list[Property] = []
    for attribute in order.attributes:
        if not remaining:
            break
        value = target.value_of(attribute)
        if value is None:
            raise SchemaMismatchError(
                f"scene {scene.trial_id!r}: target lacks attribute {attribute!r}"
            )
        prop = Property(attribute, value)
        ruled = [o for o in remaining if not true_of(prop, o, schema)]
        if ruled:
            selected.append(prop)
            remaining = [o for o in remaining if true_of(prop, o, schema)]
    return _finish(selected, scene, policy, stream, label)


_SPEC_RE = _re.compile(r"^(FB\+TYPE|FB|GR|IA-([A-Za-z]+))((?:@[a-z]+=[^@]+)*)$")


@dataclass(frozen=True)
class AlgorithmSpec:
    """Parsed form of a spec string like ``FB+TYPE``, ``GR@p=0.3`` or ``IA-COS``."""

    family: str
    order_code: str | None
    policy: TypePolicy
    seed: int | None
    label: str

    def with_policy(self, policy: TypePolicy) -> "AlgorithmSpec":
        return replace(self, policy=policy)


_DEFAULT_POLICIES = {
    "FB": NEVER,
    "FB+TYPE": ALWAYS,
    "GR": ALWAYS,  # mirrors the published greedy scores, which include TYPE
    "IA": ALWAYS,
}


def parse_algorithm_spec(spec: str) -> AlgorithmSpec:
    """Parse an algorithm spec string: ``FB | FB+TYPE | GR | IA-<ORDER>``
    plus optional ``@p=<float>`` (probabilistic TYPE) and ``@seed=<u64>``."""
    text = spec.strip()
    match = _SPEC_RE.match(text)
    if not match:
        raise ConfigurationError(f"cannot parse algorithm spec {spec!r}")
    head, order_code, suffix = match.group(1), match.group(2), match.group(3)
    family = "IA" if head.startswith("IA-") else ("FB" if head.startswith("FB") else "GR")
    policy = _DEFAULT_POLICIES[head if head in _DEFAULT_POLICIES else family]
    seed = None
    for part in filter(None, suffix.split("@")):
        key, _, value = part.partition("=")
        if key == "p":
            try:
                policy = TypePolicy.probabilistic(float(value))
            except ValueError:
                raise ConfigurationError(f"bad probability in spec {spec!r}") from None
        elif key == "seed":
            try:
                seed = int(value)
            except ValueError:
                raise ConfigurationError(f"bad seed in spec {spec!r}") from None
            if not 0 <= seed < 2**64:
                raise ConfigurationError(f"seed out of 64-bit range in spec {spec!r}")
        else:
            raise ConfigurationError(f"unknown option {key!r} in spec {spec!r}")
    return AlgorithmSpec(family, order_code, policy, seed, label=text)


def run_spec_on_scene(
    spec: AlgorithmSpec,
    scene: Scene,
    *,
    stream: RandomStream | None = None,
    cfg: AnalysisConfig | None = None,
) -> GeneratedDescription:
    common = dict(policy=spec.policy, stream=stream, cfg=cfg, label=spec.label)
    if spec.family == "FB":
        return full_brevity(scene, **common)
    if spec.family == "GR":
        return greedy(scene, **common)
    order = preference_order_from_code(spec.order_code or "", scene.domain)
    return incremental(scene, order, **common)


@dataclass(frozen=True)
class RunResult:
    """Per-trial outputs of one batch run; failed scenes land in errors."""

    outputs: Mapping[str, GeneratedDescription]
    errors: Mapping[str, str]


def run_algorithm(
    corpus: Corpus | Iterable[Scene],
    spec: str | AlgorithmSpec,
    *,
    seed: int = 0,
    cfg: AnalysisConfig | None = None,
    jobs: int = 1,
) -> RunResult:
    """Run one algorithm over every scene of a corpus.

    Deterministic for a given (corpus, spec, seed): each trial draws from
    its own stream, split off the master seed by trial id, so results do
    not depend on scene order or parallel scheduling (``jobs`` > 1 maps
    scenes over a thread pool and merges by trial id).  Scenes the spec
    cannot handle (wrong domain for the preference order, incomplete
    target) are reported per trial; the rest still run.
    """
    if isinstance(spec, str):
        spec = parse_algorithm_spec(spec)
    scenes = corpus.scenes if isinstance(corpus, Corpus) else tuple(corpus)
    master = RandomStream(spec.seed if spec.seed is not None else seed)

    def one(scene: Scene):
        try:
            return scene.trial_id, run_spec_on_scene(
                spec, scene, stream=master.split(scene.trial_id), cfg=cfg
            )
        except RegbenchError as exc:
            return scene.trial_id, str(exc)

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, scenes))
    else:
        results = [one(scene) for scene in scenes]

    outputs: dict[str, GeneratedDescription] = {}
    errors: dict[str, str] = {}
    for trial_id, value in results:
        if isinstance(value, GeneratedDescription):
            outputs[trial_id] = value
        else:
            errors[trial_id] = value
    return RunResult(outputs, errors)
