"""Bridges between the dict-based oracle scenes and regbench objects."""

from __future__ import annotations

import random

from regbench import Description, DomainObject, Property, Scene

import oracles


def scene_from_dicts(trial_id: str, domain: str, objects: list[dict]) -> Scene:
    objs = tuple(
        DomainObject(f"o{i + 1}", tuple(sorted(obj.items())))
        for i, obj in enumerate(objects)
    )
    return Scene(trial_id, domain, objs, "o1")


def random_scene(rng: random.Random, domain: str, n_objects: int, trial_id: str = "t"):
    """A random scene plus its oracle-view (target dict, distractor dicts)."""
    target, distractors, objects = oracles.random_scene_dicts(rng, domain, n_objects)
    return scene_from_dicts(trial_id, domain, objects), target, distractors


def random_description_pairs(rng: random.Random, domain: str, target: dict) -> list[tuple[str, str]]:
    """A random human-style description spanning all taxonomy categories."""
    pool = oracles.target_true_properties(domain, target)
    size = rng.randint(0, min(4, len(pool)))
    chosen: dict[str, str] = {}
    for attribute, value in rng.sample(pool, len(pool)):
        if len(chosen) >= size:
            break
        if attribute not in chosen:
            chosen[attribute] = value
    if size == 0 and not chosen:
        first = rng.choice(pool)
        chosen[first[0]] = first[1]
    roll = rng.random()
    if roll < 0.2:
        # make one value wrong
        attribute = rng.choice(list(chosen))
        universe = [v for v in oracles.DOMAIN_VALUES[domain][attribute] if v != target[attribute]]
        if universe:
            chosen[attribute] = rng.choice(universe)
    elif roll < 0.3:
        chosen["OTHER"] = "something"
    return sorted(chosen.items())


def description_from_pairs(pairs) -> Description:
    return Description(tuple(Property(a, v) for a, v in pairs))
