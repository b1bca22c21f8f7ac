import random
from pathlib import Path

import pytest

from regbench import (
    AnnotatedRE,
    Corpus,
    Description,
    DomainObject,
    Position,
    Property,
    Scene,
)

DATA_DIR = Path(__file__).parent / "data"


def make_fx1() -> Scene:
    return Scene(
        "FX1",
        "furniture",
        (
            DomainObject("o1", (("TYPE", "chair"), ("COLOUR", "green"), ("SIZE", "large"), ("ORIENTATION", "front"))),
            DomainObject("o2", (("TYPE", "chair"), ("COLOUR", "red"), ("SIZE", "small"), ("ORIENTATION", "front"))),
            DomainObject("o3", (("TYPE", "sofa"), ("COLOUR", "blue"), ("SIZE", "small"), ("ORIENTATION", "left"))),
            DomainObject("o4", (("TYPE", "desk"), ("COLOUR", "grey"), ("SIZE", "small"), ("ORIENTATION", "back"))),
        ),
        "o1",
    )


def make_fx2() -> Scene:
    rows = [
        ("p1", "old", "light", "dark", "1"),
        ("p2", "old", "none", "light", "1"),
        ("p3", "young", "dark", "none", "0"),
    ]
    objects = tuple(
        DomainObject(
            oid,
            (
                ("TYPE", "person"),
                ("AGE", age),
                ("ORIENTATION", "front"),
                ("Beard", beard),
                ("Hair", hair),
                ("hasGlasses", glasses),
                ("hasShirt", "0"),
                ("hasTie", "0"),
                ("hasSuit", "0"),
            ),
        )
        for oid, age, beard, hair, glasses in rows
    )
    return Scene("FX2", "people", objects, "p1")


def fx1_res() -> tuple[AnnotatedRE, ...]:
    def d(*pairs):
        return Description(tuple(Property(a, v) for a, v in pairs))

    return (
        AnnotatedRE("FX1", "1", Position.SUBJECT, "the green one", d(("COLOUR", "green"))),
        AnnotatedRE("FX1", "2", Position.SUBJECT, "the green chair", d(("COLOUR", "green"), ("TYPE", "chair"))),
        AnnotatedRE("FX1", "3", Position.OBJECT, "the large green chair", d(("COLOUR", "green"), ("SIZE", "large"), ("TYPE", "chair"))),
        AnnotatedRE("FX1", "4", Position.OBJECT, "the chair", d(("TYPE", "chair"))),
        AnnotatedRE("FX1", "5", Position.SUBJECT, "the red one", d(("COLOUR", "red"))),
    )


@pytest.fixture
def fx1() -> Scene:
    return make_fx1()


@pytest.fixture
def fx2() -> Scene:
    return make_fx2()


@pytest.fixture
def fixture_corpus(fx1, fx2) -> Corpus:
    return Corpus("fixture", (fx1, fx2), fx1_res())


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20260809)


@pytest.fixture
def scenes_path() -> Path:
    return DATA_DIR / "fixtures.scenes.json"


@pytest.fixture
def res_path() -> Path:
    return DATA_DIR / "fixtures.res.json"
