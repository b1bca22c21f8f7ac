"""Brute-force reference analysis of scenes and classification of human REs.

``scene_profile`` exhaustively enumerates subsets of the candidate property
universe to find every minimal distinguishing description and every
numerical over-specification a scene permits.  ``classify`` then places a
human description into exactly one of seven categories: minimal, numerical/
nominal/real over-specification, under-specification, wrong, or other.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Mapping

from .corpus import AnnotatedRE, Corpus
from .domain import (
    Description,
    DomainSchema,
    Property,
    Scene,
    true_of,
    distinguishes,
)
from .errors import CapacityError, ConfigurationError, SchemaMismatchError


@dataclass(frozen=True)
class AnalysisConfig:
    """Knobs shared by profiling and the selection algorithms.

    ``usable_overrides`` re-flags attributes as usable or not (for example
    to let algorithms see X-DIMENSION); OTHER can never be made usable.
    ``enumeration_bound`` caps the candidate-universe size the exhaustive
    profiler will accept (2^bound subsets).
    """

    usable_overrides: tuple[tuple[str, bool], ...] = ()
    enumeration_bound: int = 20

    def usable(self, schema: DomainSchema, attribute: str) -> bool:
        overrides = dict(self.usable_overrides)
        if attribute in overrides:
            if attribute == "OTHER" and overrides[attribute]:
                raise ConfigurationError("OTHER has no value universe and cannot be usable")
            return overrides[attribute]
        return schema.decl(attribute).usable


DEFAULT_CONFIG = AnalysisConfig()


def usable_attributes(schema: DomainSchema, cfg: AnalysisConfig | None = None) -> tuple[str, ...]:
    cfg = cfg or DEFAULT_CONFIG
    return tuple(a for a in schema.names() if cfg.usable(schema, a))


def candidate_universe(scene: Scene, cfg: AnalysisConfig | None = None) -> tuple[Property, ...]:
    """All properties of the target over usable attributes.

    Contains the target's most specific value per attribute plus any
    generalization of it (a light-bearded target contributes Beard=light
    and Beard=present).  Ordered by schema declaration, then by the value's
    position in the attribute universe, which is the tie-break order the
    algorithms rely on.
    """
    cfg = cfg or DEFAULT_CONFIG
    schema = scene.schema
    target = scene.target
    out: list[Property] = []
    for name in usable_attributes(schema, cfg):
        ground = target.value_of(name)
        if ground is None:
            raise SchemaMismatchError(
                f"scene {scene.trial_id!r}: target lacks usable attribute {name!r}"
            )
        values = [ground, *schema.generalization_chain(name, ground)]
        universe = schema.decl(name).values or ()
        values.sort(key=lambda v: universe.index(v) if v in universe else len(universe))
        out.extend(Property(name, v) for v in values)
    return tuple(out)


@dataclass(frozen=True)
class SceneProfile:
    """Exhaustive facts about one scene's distinguishing descriptions."""

    trial_id: str
    minimal_size: int | None
    minimal_sets: tuple[Description, ...]
    numerical_count: int
    universe_size: int


def _rule_masks(scene: Scene, universe: tuple[Property, ...]) -> list[int]:
    schema = scene.schema
    masks = []
    for prop in universe:
        mask = 0
        for i, obj in enumerate(scene.distractors):
            if not true_of(prop, obj, schema):
                mask |= 1 << i
        masks.append(mask)
    return masks


def _conflict_masks(universe: tuple[Property, ...]) -> list[int]:
    by_attr: dict[str, list[int]] = {}
    for i, prop in enumerate(universe):
        by_attr.setdefault(prop.attribute, []).append(i)
    pairs = []
    for indices in by_attr.values():
        for a, b in combinations(indices, 2):
            pairs.append((1 << a) | (1 << b))
    return pairs


def scene_profile(scene: Scene, cfg: AnalysisConfig | None = None) -> SceneProfile:
    """Enumerate all distinguishing subsets of the candidate universe.

    Reports the minimal size m, every distinguishing set of size m, and the
    count of numerical over-specifications: distinguishing sets larger than
    m from which no single property can be removed without losing the
    distinguishing status.
    """
    cfg = cfg or DEFAULT_CONFIG
    universe = candidate_universe(scene, cfg)
    n = len(universe)
    if n > cfg.enumeration_bound:
        raise CapacityError(
            f"scene {scene.trial_id!r}: candidate universe has {n} properties, "
            f"enumeration bound is {cfg.enumeration_bound}"
        )
    full = (1 << len(scene.distractors)) - 1
    masks = _rule_masks(scene, universe)
    conflicts = _conflict_masks(universe)

    # cover[s] = union of ruled-out distractors over the bits of s.
    cover = [0] * (1 << n)
    for s in range(1, 1 << n):
        low = s & -s
        cover[s] = cover[s ^ low] | masks[low.bit_length() - 1]

    distinguishing: list[int] = []
    for s in range(1, 1 << n):
        if cover[s] != full:
            continue
        if any(s & c == c for c in conflicts):
            continue
        distinguishing.append(s)

    if not distinguishing:
        return SceneProfile(scene.trial_id, None, (), 0, n)

    m = min(bin(s).count("1") for s in distinguishing)
    minimal = []
    numerical = 0
    for s in distinguishing:
        size = bin(s).count("1")
        if size == m:
            minimal.append(s)
        else:
            removable = False
            rest = s
            while rest:
                low = rest & -rest
                if cover[s ^ low] == full:
                    removable = True
                    break
                rest ^= low
            if not removable:
                numerical += 1

    def to_description(s: int) -> Description:
        return Description(tuple(universe[i] for i in range(n) if s >> i & 1))

    minimal_sets = tuple(
        sorted(
            (to_description(s) for s in minimal),
            key=lambda d: tuple((p.attribute, p.value) for p in d),
        )
    )
    return SceneProfile(scene.trial_id, m, minimal_sets, numerical, n)


def profiles_for_corpus(
    corpus: Corpus, cfg: AnalysisConfig | None = None
) -> dict[str, SceneProfile]:
    """Profile every scene once; classify reuses the cached results."""
    return {s.trial_id: scene_profile(s, cfg) for s in corpus.scenes}


class SpecificationCategory(str, Enum):
    MINIMAL = "minimal"
    NUMERICAL_OVER = "numerical"
    NOMINAL_OVER = "nominal"
    REAL_OVER = "real"
    UNDER = "under"
    WRONG = "wrong"
    OTHER = "other"


@dataclass(frozen=True)
class SpecificationReport:
    """Category plus the superfluity/deficit bookkeeping for one RE.

    ``superfluity`` is |D| - m for distinguishing descriptions; ``deficit``
    is the size of the smallest completion for under-specifications (absent
    when no completion exists); ``removable`` lists the properties whose
    individual removal keeps the description distinguishing.
    """

    category: SpecificationCategory
    superfluity: int | None = None
    deficit: int | None = None
    removable: tuple[Property, ...] = ()


def _completion_deficit(
    description: Description, scene: Scene, cfg: AnalysisConfig
) -> int | None:
    pool = [
        p
        for p in candidate_universe(scene, cfg)
        if p.attribute not in description.attribute_names
    ]
    for k in range(1, len(pool) + 1):
        for extra in combinations(pool, k):
            attrs = [p.attribute for p in extra]
            if len(attrs) != len(set(attrs)):
                continue
            if distinguishes(Description(description.properties + extra), scene):
                return k
    return None


def classify(
    re: AnnotatedRE,
    scene: Scene,
    profile: SceneProfile,
    cfg: AnalysisConfig | None = None,
) -> SpecificationReport:
    """Place one human RE into the specification taxonomy.

    Decision order: descriptions touching OTHER or another non-usable
    attribute are Other; a property false of the target makes it Wrong; a
    non-distinguishing description is Under; size m is Minimal; then the
    single-property removability test separates numerical, nominal (only
    TYPE removable) and real over-specification.
    """
    cfg = cfg or DEFAULT_CONFIG
    schema = scene.schema
    description = re.description

    if any(
        not schema.has_attribute(p.attribute) or not cfg.usable(schema, p.attribute)
        for p in description
    ):
        return SpecificationReport(SpecificationCategory.OTHER)

    if any(not true_of(p, scene.target, schema) for p in description):
        return SpecificationReport(SpecificationCategory.WRONG)

    if not distinguishes(description, scene):
        return SpecificationReport(
            SpecificationCategory.UNDER,
            deficit=_completion_deficit(description, scene, cfg),
        )

    assert profile.minimal_size is not None
    superfluity = len(description) - profile.minimal_size
    if superfluity == 0:
        return SpecificationReport(SpecificationCategory.MINIMAL, superfluity=0)

    removable = tuple(
        p for p in description if distinguishes(description.without(p.attribute), scene)
    )
    if not removable:
        return SpecificationReport(
            SpecificationCategory.NUMERICAL_OVER, superfluity=superfluity
        )
    if len(removable) == 1 and removable[0].attribute == "TYPE":
        return SpecificationReport(
            SpecificationCategory.NOMINAL_OVER,
            superfluity=superfluity,
            removable=removable,
        )
    return SpecificationReport(
        SpecificationCategory.REAL_OVER, superfluity=superfluity, removable=removable
    )


@dataclass(frozen=True)
class SpecificationCounts:
    """One per-domain row of category frequencies."""

    total: int = 0
    mini: int = 0
    real: int = 0
    nom: int = 0
    num: int = 0
    wrong: int = 0
    other: int = 0
    under: int = 0

    def as_dict(self) -> dict[str, int]:
        return {
            "total": self.total,
            "mini": self.mini,
            "real": self.real,
            "nom": self.nom,
            "num": self.num,
            "wrong": self.wrong,
            "other": self.other,
            "under": self.under,
        }


_COUNT_FIELD = {
    SpecificationCategory.MINIMAL: "mini",
    SpecificationCategory.REAL_OVER: "real",
    SpecificationCategory.NOMINAL_OVER: "nom",
    SpecificationCategory.NUMERICAL_OVER: "num",
    SpecificationCategory.WRONG: "wrong",
    SpecificationCategory.OTHER: "other",
    SpecificationCategory.UNDER: "under",
}


def spec_count_table(
    corpus: Corpus,
    profiles: Mapping[str, SceneProfile],
    cfg: AnalysisConfig | None = None,
) -> dict[str, SpecificationCounts]:
    """Tally classification categories per domain over a whole corpus.

    Domains that occur among the scenes but have no REs come back as
    all-zero rows.
    """
    tallies: dict[str, dict[str, int]] = {
        scene.domain: {f: 0 for f in SpecificationCounts().as_dict()}
        for scene in corpus.scenes
    }
    for re in corpus.res:
        scene = corpus.scenes_by_trial.get(re.trial_id)
        if scene is None:
            raise SchemaMismatchError(
                f"RE references trial {re.trial_id!r} with no scene in the corpus"
            )
        report = classify(re, scene, profiles[scene.trial_id], cfg)
        row = tallies[scene.domain]
        row["total"] += 1
        row[_COUNT_FIELD[report.category]] += 1
    return {domain: SpecificationCounts(**row) for domain, row in sorted(tallies.items())}


def profile_rows(profiles: Mapping[str, SceneProfile]) -> list[dict[str, object]]:
    """Flatten profiles into the per-trial export layout."""
    rows = []
    for trial_id in sorted(profiles):
        p = profiles[trial_id]
        rows.append(
            {
                "trial_id": p.trial_id,
                "m": p.minimal_size,
                "n_minimal": len(p.minimal_sets),
                "n_numerical": p.numerical_count,
            }
        )
    return rows
