"""Parsing, validation, and serialization of the corpus interchange formats.

Two file formats exist.  RE-record files are UTF-8 JSON arrays matching the
published annotation layout (keys ``sno``, ``subject_id``, ``object``,
``trial_id``, ``utt``).  Scene files are JSON arrays of
``{trial_id, domain, target, objects}``; their canonical serialization
sorts object ids and attribute names lexicographically.  Record parsing is
lenient (unknown attributes are preserved under OTHER, per-record problems
are collected, never silently dropped); scene parsing is strict.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .domain import (
    Description,
    DomainObject,
    FURNITURE_SCHEMA,
    PEOPLE_SCHEMA,
    Property,
    Scene,
    fold_raw_pairs,
    normalize_value,
    schema_for,
)
from .errors import (
    CorpusFormatError,
    DuplicateAttributeError,
    InconsistentPropertiesError,
    RegbenchError,
    UnsupportedPluralError,
)

RE_RECORD_KEYS = ("sno", "subject_id", "object", "trial_id", "utt")


class Position(str, Enum):
    SUBJECT = "subject"
    OBJECT = "object"

    @classmethod
    def from_sno(cls, sno: object) -> "Position":
        label = str(sno).strip().lower()
        if label == "subject":
            return cls.SUBJECT
        if label == "object":
            return cls.OBJECT
        raise CorpusFormatError(f"sno must be Subject or Object, got {sno!r}")

    @property
    def sno(self) -> str:
        return "Subject" if self is Position.SUBJECT else "Object"


@dataclass(frozen=True)
class AnnotatedRE:
    """One human referring expression joined to its trial."""

    trial_id: str
    participant: str
    position: Position
    surface: str
    description: Description


@dataclass(frozen=True)
class Corpus:
    name: str
    scenes: tuple[Scene, ...]
    res: tuple[AnnotatedRE, ...]

    @cached_property
    def scenes_by_trial(self) -> dict[str, Scene]:
        mapping: dict[str, Scene] = {}
        for scene in self.scenes:
            mapping.setdefault(scene.trial_id, scene)
        return mapping

    def trial_ids(self) -> tuple[str, ...]:
        return tuple(s.trial_id for s in self.scenes)


@dataclass(frozen=True)
class ParseIssue:
    """One problem found while parsing; errors drop the record, warnings do not."""

    severity: str  # "error" | "warning"
    location: str
    message: str


@dataclass(frozen=True)
class RecordParseResult:
    records: tuple[AnnotatedRE, ...]
    issues: tuple[ParseIssue, ...]

    def errors(self) -> tuple[ParseIssue, ...]:
        return tuple(i for i in self.issues if i.severity == "error")


def _resolve_attribute(name: str, domain: str | None) -> str | None:
    if domain is not None:
        return schema_for(domain).canonical_name(name)
    return FURNITURE_SCHEMA.canonical_name(name) or PEOPLE_SCHEMA.canonical_name(name)


def _description_from_attributes(
    attributes: object, domain: str | None, where: str
) -> Description:
    if not isinstance(attributes, list):
        raise CorpusFormatError(f"{where}: attributes must be an array")
    pairs: list[tuple[str, str]] = []
    other_entries: list[str] = []
    for entry in attributes:
        if not isinstance(entry, Mapping) or "name" not in entry or "value" not in entry:
            raise CorpusFormatError(f"{where}: attribute entries need name and value")
        raw_name = str(entry["name"]).strip()
        value = normalize_value(entry["value"])
        canonical = _resolve_attribute(raw_name, domain)
        if canonical is None:
            other_entries.append(f"{raw_name.lower()}={value}")
        elif canonical == "OTHER":
            other_entries.append(value)
        else:
            pairs.append((canonical, value))
    pairs = fold_raw_pairs(pairs)
    if other_entries:
        pairs.append(("OTHER", ";".join(other_entries)))
    return Description(tuple(Property(n, v) for n, v in pairs))


def _parse_record(record: object, index: int, domain: str | None):
    where = f"record {index}"
    if not isinstance(record, Mapping):
        raise CorpusFormatError(f"{where}: not a JSON object")
    issues = [
        ParseIssue("warning", where, f"unknown key {key!r} ignored")
        for key in record
        if key not in RE_RECORD_KEYS
    ]
    missing = [key for key in RE_RECORD_KEYS if key not in record]
    if missing:
        raise CorpusFormatError(f"{where}: missing keys {missing}")
    position = Position.from_sno(record["sno"])
    objects = record["object"]
    if not isinstance(objects, list) or not objects:
        raise CorpusFormatError(f"{where}: object must be a non-empty array")
    if len(objects) > 1:
        raise CorpusFormatError(f"{where}: plural targets are not supported")
    entry = objects[0]
    if not isinstance(entry, Mapping):
        raise CorpusFormatError(f"{where}: object entry must be a JSON object")
    description = _description_from_attributes(entry.get("attributes", []), domain, where)
    re = AnnotatedRE(
        trial_id=str(record["trial_id"]),
        participant=str(record["subject_id"]),
        position=position,
        surface=str(record["utt"]),
        description=description,
    )
    return re, issues


def parse_re_records(text: str, *, domain: str | None = None) -> RecordParseResult:
    """Parse an RE-record document.

    Every input record either yields an AnnotatedRE or contributes an
    error issue carrying its index; nothing is dropped silently.  Unknown
    attribute names are preserved under OTHER with the raw name recorded.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"RE-record document is not valid JSON: {exc}") from exc
    if not isinstance(doc, list):
        raise CorpusFormatError("RE-record document must be a JSON array of records")
    records: list[AnnotatedRE] = []
    issues: list[ParseIssue] = []
    for index, raw in enumerate(doc):
        try:
            re, record_issues = _parse_record(raw, index, domain)
        except (CorpusFormatError, DuplicateAttributeError, InconsistentPropertiesError) as exc:
            issues.append(ParseIssue("error", f"record {index}", str(exc)))
            continue
        records.append(re)
        issues.extend(record_issues)
    return RecordParseResult(tuple(records), tuple(issues))


def serialize_re_records(records: Iterable[AnnotatedRE]) -> str:
    """Canonical RE-record serialization (attribute entries sorted by name)."""
    doc = []
    for re in records:
        doc.append(
            {
                "sno": re.position.sno,
                "subject_id": re.participant,
                "object": [
                    {
                        "attributes": [
                            {"name": p.attribute, "value": p.value}
                            for p in re.description
                        ]
                    }
                ],
                "trial_id": re.trial_id,
                "utt": re.surface,
            }
        )
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _parse_target(entry: Mapping, trial_id: str) -> str:
    target = entry["target"]
    if isinstance(target, list):
        if len(target) > 1:
            raise UnsupportedPluralError(
                f"scene {trial_id!r} names {len(target)} targets; only one is supported"
            )
        if not target:
            raise CorpusFormatError(f"scene {trial_id!r}: empty target list")
        target = target[0]
    return str(target)


def _parse_scene_entry(entry: object, index: int) -> Scene:
    where = f"scene {index}"
    if not isinstance(entry, Mapping):
        raise CorpusFormatError(f"{where}: not a JSON object")
    for key in ("trial_id", "domain", "target", "objects"):
        if key not in entry:
            raise CorpusFormatError(f"{where}: missing key {key!r}")
    trial_id = str(entry["trial_id"])
    domain = str(entry["domain"]).strip().lower()
    schema = schema_for(domain)
    target_id = _parse_target(entry, trial_id)
    raw_objects = entry["objects"]
    if not isinstance(raw_objects, list):
        raise CorpusFormatError(f"scene {trial_id!r}: objects must be an array")
    objects = []
    for obj in raw_objects:
        if not isinstance(obj, Mapping) or "id" not in obj or "attributes" not in obj:
            raise CorpusFormatError(f"scene {trial_id!r}: objects need id and attributes")
        object_id = str(obj["id"])
        attributes = obj["attributes"]
        if not isinstance(attributes, Mapping):
            raise CorpusFormatError(
                f"scene {trial_id!r}, object {object_id!r}: attributes must be a map"
            )
        pairs = []
        for name, value in attributes.items():
            canonical = schema.canonical_name(str(name))
            if canonical is None:
                raise CorpusFormatError(
                    f"scene {trial_id!r}, object {object_id!r}: "
                    f"unknown attribute {name!r} for domain {domain}"
                )
            pairs.append((canonical, normalize_value(value)))
        pairs = fold_raw_pairs(pairs)
        for name, value in pairs:
            universe = schema.decl(name).ground_universe()
            if universe is not None and value not in universe:
                raise CorpusFormatError(
                    f"scene {trial_id!r}, object {object_id!r}: value {value!r} "
                    f"outside the {name} universe {list(universe)}"
                )
        objects.append(DomainObject(object_id, tuple(pairs)))
    return Scene(trial_id, domain, tuple(objects), target_id)


def parse_scene_file(text: str) -> tuple[Scene, ...]:
    """Parse a scene document; any invalid scene raises."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"scene document is not valid JSON: {exc}") from exc
    if not isinstance(doc, list):
        raise CorpusFormatError("scene document must be a JSON array of scenes")
    return tuple(_parse_scene_entry(entry, i) for i, entry in enumerate(doc))


def parse_scene_file_collecting(text: str) -> tuple[tuple[Scene, ...], tuple[ParseIssue, ...]]:
    """Like parse_scene_file but collects per-scene problems instead of raising."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"scene document is not valid JSON: {exc}") from exc
    if not isinstance(doc, list):
        raise CorpusFormatError("scene document must be a JSON array of scenes")
    scenes: list[Scene] = []
    issues: list[ParseIssue] = []
    for index, entry in enumerate(doc):
        try:
            scenes.append(_parse_scene_entry(entry, index))
        except RegbenchError as exc:
            issues.append(ParseIssue("error", f"scene {index}", str(exc)))
    return tuple(scenes), tuple(issues)


def serialize_scenes(scenes: Iterable[Scene]) -> str:
    doc = []
    for scene in scenes:
        doc.append(
            {
                "trial_id": scene.trial_id,
                "domain": scene.domain,
                "target": scene.target_id,
                "objects": [
                    {"id": o.object_id, "attributes": dict(o.assignment)}
                    for o in scene.objects
                ],
            }
        )
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


@dataclass(frozen=True)
class FilterResult:
    corpus: Corpus
    missing: tuple[str, ...]


def filter_trials(corpus: Corpus, keep: Iterable[str]) -> FilterResult:
    """Restrict a corpus to the given trial ids.

    Ids absent from the corpus are not an error; they come back in
    ``missing`` so callers can warn about them.
    """
    wanted = {str(t) for t in keep}
    scenes = tuple(s for s in corpus.scenes if s.trial_id in wanted)
    res = tuple(r for r in corpus.res if r.trial_id in wanted)
    present = {s.trial_id for s in corpus.scenes}
    missing = tuple(sorted(wanted - present))
    return FilterResult(Corpus(corpus.name, scenes, res), missing)


@dataclass(frozen=True)
class ValidationFinding:
    kind: str
    location: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[ValidationFinding, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.findings

    def __iter__(self):
        return iter(self.findings)

    def __len__(self) -> int:
        return len(self.findings)


def validate_corpus(corpus: Corpus) -> ValidationReport:
    """Check every corpus invariant and report all violations found."""
    findings: list[ValidationFinding] = []
    seen_trials: set[str] = set()
    for scene in corpus.scenes:
        if scene.trial_id in seen_trials:
            findings.append(
                ValidationFinding(
                    "duplicate-trial", scene.trial_id, "trial id declared by two scenes"
                )
            )
            continue
        seen_trials.add(scene.trial_id)
        schema = scene.schema
        for obj in scene.objects:
            where = f"{scene.trial_id}/{obj.object_id}"
            for name, value in obj.assignment:
                if not schema.has_attribute(name):
                    findings.append(
                        ValidationFinding(
                            "unknown-attribute", where, f"attribute {name!r} not in schema"
                        )
                    )
                    continue
                universe = schema.decl(name).ground_universe()
                if universe is not None and value not in universe:
                    findings.append(
                        ValidationFinding(
                            "value-outside-universe",
                            where,
                            f"{name}={value!r} not in {list(universe)}",
                        )
                    )
            for name in schema.names():
                if schema.decl(name).usable and obj.value_of(name) is None:
                    findings.append(
                        ValidationFinding(
                            "incomplete-object", where, f"missing usable attribute {name!r}"
                        )
                    )
    for index, re in enumerate(corpus.res):
        where = f"re {index} (trial {re.trial_id})"
        scene = corpus.scenes_by_trial.get(re.trial_id)
        if scene is None:
            findings.append(
                ValidationFinding(
                    "dangling-reference", where, "no scene declares this trial id"
                )
            )
            continue
        for prop in re.description:
            if not scene.schema.has_attribute(prop.attribute):
                findings.append(
                    ValidationFinding(
                        "unknown-attribute",
                        where,
                        f"description attribute {prop.attribute!r} not in schema",
                    )
                )
    return ValidationReport(tuple(findings))


def parse_overlap_table(text: str) -> tuple[tuple[str, str], ...]:
    """Parse the shared-trial table: one ``<left-id>\\t<right-id>`` per line."""
    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split("\t")
        if len(parts) != 2:
            raise CorpusFormatError(
                f"overlap table line {lineno}: expected two tab-separated ids"
            )
        pairs.append((parts[0].strip(), parts[1].strip()))
    return tuple(pairs)


def builtin_overlap_pairs() -> tuple[tuple[str, str], ...]:
    """The shipped MTUNA/ETUNA shared-trial id table."""
    text = resources.files("regbench").joinpath("data/mtuna_etuna_overlap.tsv").read_text("utf-8")
    return parse_overlap_table(text)


def load_scenes(path: str | Path) -> tuple[Scene, ...]:
    return parse_scene_file(Path(path).read_text("utf-8"))


def load_re_records(path: str | Path, *, domain: str | None = None) -> RecordParseResult:
    return parse_re_records(Path(path).read_text("utf-8"), domain=domain)


def load_corpus(
    name: str,
    scenes_path: str | Path,
    res_path: str | Path | None = None,
    *,
    domain: str | None = None,
) -> tuple[Corpus, tuple[ParseIssue, ...]]:
    scenes = load_scenes(scenes_path)
    if res_path is None:
        return Corpus(name, scenes, ()), ()
    result = load_re_records(res_path, domain=domain)
    return Corpus(name, scenes, result.records), result.issues
