"""Core vocabulary: attributes, values, objects, scenes, and descriptions.

Everything downstream (corpus parsing, the selection algorithms, scene
profiling, evaluation) is defined in terms of the truth relation between a
property and an object implemented here.

Value handling: values are normalized to lowercase strings at construction
time (booleans become ``"1"``/``"0"``, integers their decimal digits), so
value comparison is exact string equality plus the one non-trivial
hierarchy in the people domain: the merged ``Beard`` and ``Hair``
attributes, whose specific colours ``dark`` and ``light`` both generalize
to ``present``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Union

from .errors import (
    DuplicateAttributeError,
    InconsistentPropertiesError,
    InvalidSceneError,
    SchemaMismatchError,
)

FURNITURE = "furniture"
PEOPLE = "people"

# Raw annotation attributes that fold into a single merged attribute:
# merged name -> (presence flag, colour attribute).
RAW_COMPONENTS = {
    "Beard": ("hasBeard", "beardColour"),
    "Hair": ("hasHair", "hairColour"),
}
_RAW_TO_MERGED = {
    raw: merged for merged, pair in RAW_COMPONENTS.items() for raw in pair
}


def normalize_value(value: object) -> str:
    """Lowercase/strip normalization turning any scalar into a value string."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value).strip().lower()


@dataclass(frozen=True)
class AttributeDecl:
    """One attribute of a domain schema.

    ``values`` is the universe usable in descriptions (``None`` means open,
    as for OTHER); ``ground_values`` is the subset a scene object may be
    assigned (defaults to ``values``).  ``usable`` marks attributes the
    selection algorithms consider by default.
    """

    name: str
    values: tuple[str, ...] | None
    usable: bool = True
    ground_values: tuple[str, ...] | None = None

    def ground_universe(self) -> tuple[str, ...] | None:
        return self.values if self.ground_values is None else self.ground_values


@dataclass(frozen=True)
class DomainSchema:
    """Attribute declarations for one stimulus domain, in declaration order."""

    tag: str
    attributes: tuple[AttributeDecl, ...]
    raw_input_names: tuple[str, ...] = ()
    generalizations: Mapping[str, Mapping[str, str]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        names = [a.name for a in self.attributes]
        if len(names) != len(set(names)):
            raise SchemaMismatchError(f"duplicate attribute names in schema {self.tag!r}")

    @cached_property
    def _by_name(self) -> dict[str, AttributeDecl]:
        return {a.name: a for a in self.attributes}

    @cached_property
    def _canonical(self) -> dict[str, str]:
        lookup = {a.name.lower(): a.name for a in self.attributes}
        lookup.update({r.lower(): r for r in self.raw_input_names})
        return lookup

    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)

    def has_attribute(self, name: str) -> bool:
        return name in self._by_name

    def is_raw_name(self, name: str) -> bool:
        return name in self.raw_input_names

    def decl(self, name: str) -> AttributeDecl:
        try:
            return self._by_name[name]
        except KeyError:
            raise SchemaMismatchError(
                f"attribute {name!r} is not declared in the {self.tag} schema"
            ) from None

    def declaration_index(self, name: str) -> int:
        self.decl(name)
        return self.names().index(name)

    def canonical_name(self, name: str) -> str | None:
        """Case-insensitive lookup of a declared or raw attribute name."""
        return self._canonical.get(str(name).strip().lower())

    def generalization_chain(self, attribute: str, value: str) -> tuple[str, ...]:
        """Strictly more general values of ``value``, nearest first."""
        parents = self.generalizations.get(attribute, {})
        chain: list[str] = []
        current = value
        while current in parents:
            current = parents[current]
            chain.append(current)
        return tuple(chain)

    def subsumes(self, attribute: str, specific: str, general: str) -> bool:
        """True iff ``specific`` equals or generalizes to ``general``."""
        if specific == general:
            return True
        return general in self.generalization_chain(attribute, specific)


_DIM_X = tuple(str(i) for i in range(1, 6))
_DIM_Y = tuple(str(i) for i in range(1, 4))
_BOOL = ("0", "1")
_MERGED = ("none", "dark", "light", "present")

FURNITURE_SCHEMA = DomainSchema(
    tag=FURNITURE,
    attributes=(
        AttributeDecl("TYPE", ("chair", "sofa", "desk", "fan")),
        AttributeDecl("COLOUR", ("blue", "red", "green", "grey")),
        AttributeDecl("ORIENTATION", ("front", "back", "left", "right")),
        AttributeDecl("SIZE", ("large", "small")),
        AttributeDecl("X-DIMENSION", _DIM_X, usable=False),
        AttributeDecl("Y-DIMENSION", _DIM_Y, usable=False),
        AttributeDecl("OTHER", None, usable=False),
    ),
)

PEOPLE_SCHEMA = DomainSchema(
    tag=PEOPLE,
    attributes=(
        AttributeDecl("TYPE", ("person",)),
        AttributeDecl("AGE", ("young", "old")),
        AttributeDecl("ORIENTATION", ("front", "left", "right")),
        AttributeDecl("Beard", _MERGED, ground_values=("none", "dark", "light")),
        AttributeDecl("Hair", _MERGED, ground_values=("none", "dark", "light")),
        AttributeDecl("hasGlasses", _BOOL),
        AttributeDecl("hasShirt", _BOOL),
        AttributeDecl("hasTie", _BOOL),
        AttributeDecl("hasSuit", _BOOL),
        AttributeDecl("X-DIMENSION", _DIM_X, usable=False),
        AttributeDecl("Y-DIMENSION", _DIM_Y, usable=False),
        AttributeDecl("OTHER", None, usable=False),
    ),
    raw_input_names=("hasBeard", "beardColour", "hasHair", "hairColour"),
    generalizations={
        "Beard": {"dark": "present", "light": "present"},
        "Hair": {"dark": "present", "light": "present"},
    },
)

_SCHEMAS = {FURNITURE: FURNITURE_SCHEMA, PEOPLE: PEOPLE_SCHEMA}


def schema_for(domain: str) -> DomainSchema:
    try:
        return _SCHEMAS[domain]
    except KeyError:
        raise SchemaMismatchError(
            f"unknown domain {domain!r} (expected one of {sorted(_SCHEMAS)})"
        ) from None


@dataclass(frozen=True)
class Property:
    """One attribute-value pair; the value is normalized on construction."""

    attribute: str
    value: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "attribute", str(self.attribute).strip())
        object.__setattr__(self, "value", normalize_value(self.value))

    def render(self) -> str:
        return f"{self.attribute}={self.value}"


PropertyLike = Union[Property, tuple]


def _as_property(item: PropertyLike) -> Property:
    if isinstance(item, Property):
        return item
    name, value = item
    return Property(name, value)


@dataclass(frozen=True)
class Description:
    """A set of properties with at most one property per attribute.

    Properties are stored sorted by attribute name, which makes equality,
    hashing, and rendering canonical.  A second, different value for an
    attribute is an error, never a silent overwrite.
    """

    properties: tuple[Property, ...] = ()

    def __post_init__(self) -> None:
        seen: dict[str, Property] = {}
        for item in self.properties:
            prop = _as_property(item)
            prior = seen.get(prop.attribute)
            if prior is not None and prior.value != prop.value:
                raise DuplicateAttributeError(
                    f"attribute {prop.attribute!r} given twice "
                    f"({prior.value!r} vs {prop.value!r})"
                )
            seen[prop.attribute] = prop
        canon = tuple(seen[a] for a in sorted(seen))
        object.__setattr__(self, "properties", canon)

    @cached_property
    def attribute_names(self) -> frozenset[str]:
        return frozenset(p.attribute for p in self.properties)

    def value_of(self, attribute: str) -> str | None:
        for p in self.properties:
            if p.attribute == attribute:
                return p.value
        return None

    def with_property(self, prop: Property) -> "Description":
        return Description(self.properties + (prop,))

    def without(self, attribute: str) -> "Description":
        return Description(tuple(p for p in self.properties if p.attribute != attribute))

    def render(self) -> str:
        return ";".join(p.render() for p in self.properties)

    def __len__(self) -> int:
        return len(self.properties)

    def __iter__(self):
        return iter(self.properties)

    def __contains__(self, attribute: str) -> bool:
        return attribute in self.attribute_names


def _as_pairs(values: Mapping[str, object] | Iterable) -> list[tuple[str, str]]:
    if isinstance(values, Mapping):
        items: Iterable = values.items()
    elif isinstance(values, Description):
        items = ((p.attribute, p.value) for p in values)
    else:
        items = values
    pairs = []
    for item in items:
        if isinstance(item, Property):
            pairs.append((item.attribute, item.value))
        else:
            name, value = item
            pairs.append((str(name).strip(), normalize_value(value)))
    return pairs


@dataclass(frozen=True)
class DomainObject:
    """One scene object: an id plus its ground value for each attribute.

    Ground values are the most specific ones; the merged Beard/Hair
    attributes take none|dark|light, never "present".
    """

    object_id: str
    assignment: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        pairs = _as_pairs(self.assignment)
        seen: dict[str, str] = {}
        for name, value in pairs:
            if name in seen and seen[name] != value:
                raise DuplicateAttributeError(
                    f"object {self.object_id!r}: attribute {name!r} assigned twice"
                )
            seen[name] = value
        object.__setattr__(self, "object_id", str(self.object_id))
        object.__setattr__(
            self, "assignment", tuple(sorted(seen.items()))
        )

    @cached_property
    def values(self) -> dict[str, str]:
        return dict(self.assignment)

    def value_of(self, attribute: str) -> str | None:
        return self.values.get(attribute)


@dataclass(frozen=True)
class Scene:
    """One trial: the objects on screen and the single target referent."""

    trial_id: str
    domain: str
    objects: tuple[DomainObject, ...]
    target_id: str

    def __post_init__(self) -> None:
        schema_for(self.domain)
        objects = tuple(sorted(self.objects, key=lambda o: o.object_id))
        ids = [o.object_id for o in objects]
        if len(objects) < 2:
            raise InvalidSceneError(
                f"scene {self.trial_id!r} needs at least 2 objects, got {len(objects)}"
            )
        if len(ids) != len(set(ids)):
            raise InvalidSceneError(f"scene {self.trial_id!r} has duplicate object ids")
        if self.target_id not in ids:
            raise InvalidSceneError(
                f"scene {self.trial_id!r}: target {self.target_id!r} is not an object"
            )
        object.__setattr__(self, "trial_id", str(self.trial_id))
        object.__setattr__(self, "objects", objects)

    @cached_property
    def schema(self) -> DomainSchema:
        return schema_for(self.domain)

    @cached_property
    def target(self) -> DomainObject:
        return next(o for o in self.objects if o.object_id == self.target_id)

    @cached_property
    def distractors(self) -> tuple[DomainObject, ...]:
        return tuple(o for o in self.objects if o.object_id != self.target_id)


def true_of(prop: Property, obj: DomainObject, schema: DomainSchema) -> bool:
    """Whether ``obj`` satisfies ``prop``.

    Holds when the object's ground value equals the property value or
    generalizes to it (dark beard satisfies Beard=present).  The negation is
    what the algorithms call "ruling out" the object.
    """
    schema.decl(prop.attribute)
    ground = obj.value_of(prop.attribute)
    if ground is None:
        raise SchemaMismatchError(
            f"object {obj.object_id!r} has no value for {prop.attribute!r}"
        )
    return schema.subsumes(prop.attribute, ground, prop.value)


def rules_out(prop: Property, obj: DomainObject, schema: DomainSchema) -> bool:
    return not true_of(prop, obj, schema)


def distinguishes(description: Description, scene: Scene) -> bool:
    """Whether the description singles out the scene's target referent.

    True iff every property holds of the target and every distractor fails
    at least one property.  The empty description never distinguishes (a
    scene has at least one distractor).
    """
    schema = scene.schema
    if any(not true_of(p, scene.target, schema) for p in description):
        return False
    for obj in scene.distractors:
        if all(true_of(p, obj, schema) for p in description):
            return False
    return True


def _merge_component(
    merged: str, has: str | None, colour: str | None
) -> str:
    if has is not None and has not in ("0", "1"):
        raise InconsistentPropertiesError(
            f"{RAW_COMPONENTS[merged][0]} must be 0 or 1, got {has!r}"
        )
    if colour is not None:
        if has == "0":
            raise InconsistentPropertiesError(
                f"{merged}: presence flag is 0 but a colour is given"
            )
        return colour
    return "present" if has == "1" else "none"


def fold_raw_pairs(pairs: Iterable[tuple[str, str]]) -> list[tuple[str, str]]:
    """Name-driven folding of hasX/xColour pairs into merged attributes."""
    stash: dict[str, str] = {}
    passed: list[tuple[str, str]] = []
    for name, value in pairs:
        if name in _RAW_TO_MERGED:
            if name in stash and stash[name] != value:
                raise DuplicateAttributeError(f"raw attribute {name!r} given twice")
            stash[name] = value
        else:
            passed.append((name, value))
    for merged, (has_name, colour_name) in RAW_COMPONENTS.items():
        has = stash.pop(has_name, None)
        colour = stash.pop(colour_name, None)
        if has is None and colour is None:
            continue
        passed.append((merged, _merge_component(merged, has, colour)))
    return passed


def merge_raw_properties(
    raw: Mapping[str, object] | Iterable[PropertyLike], domain: str
) -> Description:
    """Fold raw hasX/xColour annotation attributes into merged ones.

    ``hasHair=1`` alone becomes ``Hair=present``; a colour (with or without
    the presence flag) becomes the colour; ``hasHair=0`` becomes
    ``Hair=none``; ``hasHair=0`` together with a colour is an inconsistency.
    Beard behaves the same way.  All other properties pass through, so the
    operation is idempotent.
    """
    schema = schema_for(domain)
    pairs: list[tuple[str, str]] = []
    for name, value in _as_pairs(raw):
        canonical = schema.canonical_name(name)
        if canonical is None:
            raise SchemaMismatchError(
                f"attribute {name!r} is neither declared nor a raw input "
                f"name in the {domain} schema"
            )
        pairs.append((canonical, value))
    return Description(tuple(Property(n, v) for n, v in fold_raw_pairs(pairs)))
