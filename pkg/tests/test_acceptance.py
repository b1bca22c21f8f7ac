"""Acceptance suite: one test per release criterion, at its stated tolerance.

Each test prints one PASS/FAIL line (visible with ``pytest -s`` or in the
captured output).  The final criterion needs the externally published
corpus converted to the scene/record formats and is skipped, with the
pointing environment variables named, when that data is absent.
"""

import os
import random
import time
from fractions import Fraction
from itertools import combinations

import pytest

from regbench import (
    ALWAYS,
    AnnotatedRE,
    Corpus,
    Description,
    Position,
    Property,
    classify,
    dice,
    distinguishes,
    evaluate,
    full_brevity,
    greedy,
    incremental,
    load_corpus,
    parse_re_records,
    preset_orders,
    profiles_for_corpus,
    run_algorithm,
    scene_profile,
    serialize_re_records,
    spec_count_table,
    sweep_type_probability,
)
from regbench import ContingencyTable2x2, chi_squared_independence, chi_squared_sf, f_sf, one_way_anova
from regbench.cli import main

import oracles
from helpers import description_from_pairs, random_description_pairs, random_scene
from conftest import fx1_res, make_fx1, make_fx2


def check(criterion: int, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {criterion}: {detail}"


def test_criterion_1_fb_minimality():
    rng = random.Random(101)
    start = time.perf_counter()
    agreements = 0
    for i in range(200):
        scene, target, distractors = random_scene(rng, "furniture", rng.randint(4, 8), f"s{i}")
        best = oracles.minimal_size("furniture", target, distractors)
        out = full_brevity(scene)
        if best is None:
            assert not out.distinguishing and len(out.description) == 0
        else:
            assert out.distinguishing and len(out.description) == best
        agreements += 1
    elapsed = time.perf_counter() - start
    check(1, agreements == 200 and elapsed < 10.0,
          f"FB matches exhaustive minimum on {agreements}/200 scenes in {elapsed:.2f}s")


def test_criterion_2_soundness_and_no_misses():
    rng = random.Random(101)  # same scene stream as criterion 1
    presets = list(preset_orders("furniture").values())
    checked = 0
    for i in range(200):
        scene, target, distractors = random_scene(rng, "furniture", rng.randint(4, 8), f"s{i}")
        solvable = oracles.minimal_size("furniture", target, distractors) is not None
        outputs = [
            full_brevity(scene),
            full_brevity(scene, policy=ALWAYS, label="FB+TYPE"),
            greedy(scene, policy=ALWAYS),
        ] + [incremental(scene, order) for order in presets]
        assert len(outputs) == 9
        for out in outputs:
            assert out.distinguishing == distinguishes(out.description, scene)
            if out.distinguishing:
                assert all(
                    oracles.truth(p.attribute, p.value, target) for p in out.description
                )
            if solvable:
                assert out.distinguishing, (out.algorithm, scene.trial_id)
            checked += 1
    check(2, checked == 1800, f"soundness and completeness over {checked} runs (9 algorithms x 200 scenes)")


def test_criterion_3_dice_anchors():
    anchors = (
        dice({"COLOUR"}, {"COLOUR", "TYPE"}) == Fraction(2, 3)
        and dice({"COLOUR"}, {"SIZE", "TYPE"}) == 0
    )
    asymmetry = all(
        Fraction(2 * n, 2 * n + 1) > Fraction(2 * n - 2, 2 * n - 1) for n in range(1, 51)
    )
    strict = all(
        Fraction(2 * n, 2 * n + 1) != Fraction(2 * n - 2, 2 * n - 1) for n in range(1, 51)
    )
    check(3, anchors and asymmetry and strict,
          "dice 2/3 and 0 anchors exact; over- vs under-specification asymmetry strict for n=1..50")


def _numerical_description(domain, target, distractors):
    universe = oracles.target_true_properties(domain, target)
    best = None
    for size in range(2, min(4, len(universe)) + 1):
        for combo in combinations(universe, size):
            attrs = [a for a, _ in combo]
            if len(attrs) != len(set(attrs)):
                continue
            if not oracles.distinguishes(combo, target, distractors):
                continue
            if any(
                oracles.distinguishes([q for q in combo if q != p], target, distractors)
                for p in combo
            ):
                continue
            m = oracles.minimal_size(domain, target, distractors)
            if len(combo) > m:
                return sorted(combo)
        if best:
            break
    return None


def test_criterion_4_classifier_oracle_equivalence():
    rng = random.Random(404)
    seen = set()
    agreements = 0
    total = 0
    while total < 500:
        domain = "furniture" if total % 2 == 0 else "people"
        scene, target, distractors = random_scene(rng, domain, rng.randint(3, 6), f"c{total}")
        if total % 25 == 0:
            pairs = _numerical_description(domain, target, distractors)
            if pairs is None:
                pairs = random_description_pairs(rng, domain, target)
        else:
            pairs = random_description_pairs(rng, domain, target)
        re = AnnotatedRE(scene.trial_id, "1", Position.SUBJECT, "", description_from_pairs(pairs))
        got = classify(re, scene, scene_profile(scene)).category.value
        expected = oracles.classify(pairs, domain, target, distractors)
        total += 1
        if got == expected:
            agreements += 1
        seen.add(expected)

    fx1 = make_fx1()
    profile = scene_profile(fx1)
    worked = [
        classify(re, fx1, profile).category.value for re in fx1_res()
    ] == ["minimal", "nominal", "real", "under", "wrong"]
    all_seven = seen == {"minimal", "numerical", "nominal", "real", "under", "wrong", "other"}
    check(4, agreements == total and worked and all_seven,
          f"classifier agrees with definition-literal oracle on {agreements}/{total} pairs "
          f"spanning {sorted(seen)}; FX1 worked examples exact")


def test_criterion_5_scene_profiles():
    fx1, fx2 = make_fx1(), make_fx2()
    t0 = time.perf_counter()
    p1 = scene_profile(fx1)
    t1 = time.perf_counter()
    p2 = scene_profile(fx2)
    t2 = time.perf_counter()
    ok1 = (
        p1.minimal_size == 1
        and {d.render() for d in p1.minimal_sets} == {"COLOUR=green", "SIZE=large"}
        and p1.numerical_count == 0
    )
    ok2 = p2.minimal_size == 1 and {d.render() for d in p2.minimal_sets} == {"Beard=light", "Hair=dark"}

    def oracle_profile(domain, scene):
        target = dict(scene.target.assignment)
        distractors = [dict(o.assignment) for o in scene.distractors]
        subsets = oracles.all_distinguishing_subsets(domain, target, distractors)
        m = min(len(s) for s in subsets)
        minimal = {s for s in subsets if len(s) == m}
        return m, minimal

    m1, minimal1 = oracle_profile("furniture", fx1)
    m2, minimal2 = oracle_profile("people", fx2)
    indep = (
        m1 == p1.minimal_size
        and minimal1 == {frozenset((p.attribute, p.value) for p in d) for d in p1.minimal_sets}
        and m2 == p2.minimal_size
        and minimal2 == {frozenset((p.attribute, p.value) for p in d) for d in p2.minimal_sets}
    )
    timing = (t1 - t0) < 0.1 and (t2 - t1) < 0.1
    check(5, ok1 and ok2 and indep and timing,
          f"FX1 m=1 #mini=2 #num=0, FX2 m=1 #mini=2, independent enumeration agrees, "
          f"{(t1 - t0) * 1000:.1f}ms/{(t2 - t1) * 1000:.1f}ms per scene")


def test_criterion_6_policy_endpoints_and_determinism(capsys, scenes_path, res_path):
    fx1 = make_fx1()
    corpus = Corpus(
        "c", (fx1,),
        (AnnotatedRE("FX1", "1", Position.SUBJECT, "the green chair",
                     description_from_pairs([("COLOUR", "green"), ("TYPE", "chair")])),),
    )
    sweep = sweep_type_probability(corpus, "FB", [0.0, 1.0], runs=100, seed=42)
    never = evaluate(corpus, {"FB": run_algorithm(corpus, "FB")}, ()).summaries[0].mean_dice
    always = evaluate(corpus, {"FB+TYPE": run_algorithm(corpus, "FB+TYPE")}, ()).summaries[0].mean_dice
    endpoints = abs(sweep.mean_dice[0] - never) < 1e-12 and abs(sweep.mean_dice[1] - always) < 1e-12

    args = ["sweep", "--scenes", str(scenes_path), "--res", str(res_path),
            "--algo", "FB", "--grid", "0,0.25,0.5,1", "--runs", "50", "--seed", "7"]
    main(args)
    first = capsys.readouterr().out.encode()
    main(args)
    second = capsys.readouterr().out.encode()
    byte_identical = first == second and len(first) > 0

    analytic = sweep_type_probability(corpus, "FB", [0.5], runs=10_000, seed=13)
    expected = 0.5 * (2 / 3) + 0.5 * 1.0
    within = abs(analytic.mean_dice[0] - expected) <= 0.02
    check(6, endpoints and byte_identical and within,
          f"sweep endpoints match deterministic variants (<1e-12), reruns byte-identical, "
          f"10000-run mean {analytic.mean_dice[0]:.4f} within 0.02 of 5/6")


def test_criterion_7_statistics():
    chi = chi_squared_independence(ContingencyTable2x2(30, 70, 50, 50))
    chi_ok = abs(chi.statistic - 8.3333) <= 1e-3 and abs(chi.p_value - 0.003892) <= 1e-5
    anova = one_way_anova([[1, 2, 3], [2, 3, 4]])
    anova_ok = anova.statistic == 1.5 and abs(anova.p_value - 0.2879) <= 1e-3
    grid_ok = True
    for statistic, df in [(0.5, 1), (3.841, 1), (8.3333, 1), (2.0, 3), (12.0, 10)]:
        if abs(chi_squared_sf(statistic, df) - oracles.chi_squared_p_quadrature(statistic, df)) > 1e-6:
            grid_ok = False
    for statistic, df1, df2 in [(1.5, 1, 4), (2.5, 2, 10), (5.0, 2, 100), (0.3, 4, 8)]:
        if abs(f_sf(statistic, df1, df2) - oracles.f_p_quadrature(statistic, df1, df2)) > 1e-6:
            grid_ok = False
    check(7, chi_ok and anova_ok and grid_ok,
          f"chi2={chi.statistic:.4f} p={chi.p_value:.6f}; F={anova.statistic} p={anova.p_value:.4f}; "
          f"tails match quadrature to 1e-6")


FIGURE_RECORD_TEXT = """
[{ "sno": "Object",
  "subject_id": "2",
  "object": [
    { "attributes": [
        {"name": "COLOUR", "value": "dark"},
        {"name": "TYPE", "value": "table"}]
    }],
  "trial_id": "1",
  "utt": "灰桌子"
}]
"""


def test_criterion_8_format_fidelity(rng):
    result = parse_re_records(FIGURE_RECORD_TEXT)
    (re,) = result.records
    record_ok = (
        re.description == description_from_pairs([("COLOUR", "dark"), ("TYPE", "table")])
        and re.position is Position.OBJECT
        and re.trial_id == "1"
        and re.participant == "2"
    )

    attributes = {
        "COLOUR": ("blue", "red", "green", "grey", "dark"),
        "TYPE": ("chair", "sofa", "desk", "fan", "table"),
        "SIZE": ("large", "small"),
        "Hair": ("none", "dark", "light", "present"),
        "hasGlasses": ("0", "1"),
        "OTHER": ("on the left", "靠近窗户", "holding=cup"),
    }
    records = []
    for i in range(50):
        names = rng.sample(sorted(attributes), rng.randint(1, 4))
        records.append(
            AnnotatedRE(
                str(rng.randint(1, 30)),
                str(rng.randint(1, 60)),
                rng.choice(list(Position)),
                rng.choice(("the chair", "灰桌子", "")),
                Description(tuple(Property(n, rng.choice(attributes[n])) for n in names)),
            )
        )
    text = serialize_re_records(records)
    reparsed = parse_re_records(text)
    round_trip = (
        not reparsed.errors()
        and list(reparsed.records) == records
        and serialize_re_records(reparsed.records) == text
    )
    check(8, record_ok and round_trip,
          "published record sample parses exactly; serialize-parse identity on 50 fuzzed records")


TABLE7_ROWS = {
    "1": (1, 0), "2": (1, 0), "3": (1, 0), "4": (1, 0), "5": (1, 0),
    "6": (1, 0), "7": (1, 0), "8": (1, 1), "9": (2, 0), "10": (3, 0),
    "21": (1, 1), "22": (1, 0), "23": (1, 0), "24": (1, 0), "25": (2, 1),
    "26": (1, 2), "27": (1, 2), "28": (1, 2), "29": (2, 1), "30": (1, 3),
}
TABLE1_MTUNA_FURNITURE = {
    "total": 377, "mini": 46, "real": 117, "nom": 132, "num": 2,
    "wrong": 11, "other": 5, "under": 64,
}
TABLE2_MTUNA = {
    "furniture": {
        "IA-COS": (0.875, 55.7), "IA-CSO": (0.847, 55.1), "IA-OCS": (0.797, 20.5),
        "IA-SCO": (0.754, 15.0), "IA-OSC": (0.740, 18.3), "IA-SOC": (0.690, 14.7),
        "FB+TYPE": (0.830, 39.9), "FB": (0.574, 3.0), "GR": (0.802, 39.3),
    },
    "people": {
        "IA-GBHOATSS": (0.637, 16.3), "IA-BGHOATSS": (0.629, 15.5),
        "IA-GHBOATSS": (0.617, 13.0), "IA-BHGOATSS": (0.577, 7.5),
        "IA-HGBOATSS": (0.589, 6.1), "IA-HBGOATSS": (0.559, 6.1),
        "IA-SSTAOHBG": (0.347, 1.9),
        "FB+TYPE": (0.669, 23.2), "FB": (0.446, 9.9), "GR": (0.613, 19.9),
    },
}


def test_criterion_9_published_corpus_reproduction():
    scenes_env = os.environ.get("REGBENCH_MTUNA_SCENES")
    res_env = os.environ.get("REGBENCH_MTUNA_RES")
    if not scenes_env or not res_env:
        pytest.skip(
            "published MTUNA data not available: set REGBENCH_MTUNA_SCENES and "
            "REGBENCH_MTUNA_RES to the converted scene/RE-record files to run "
            "the corpus-reproduction tier"
        )
    corpus, issues = load_corpus("mtuna", scenes_env, res_env)
    assert not issues, issues

    profiles = profiles_for_corpus(corpus)
    profile_ok = all(
        trial in profiles
        and (profiles[trial].minimal_size is not None)
        and ((len(profiles[trial].minimal_sets), profiles[trial].numerical_count) == expected)
        for trial, expected in TABLE7_ROWS.items()
    )

    counts = spec_count_table(corpus, profiles)
    table1_ok = counts["furniture"].as_dict() == TABLE1_MTUNA_FURNITURE

    outputs = {}
    for domain_rows in TABLE2_MTUNA.values():
        for label in domain_rows:
            outputs[label] = run_algorithm(corpus, label)
    table2_ok = False
    for include_other in (True, False):
        mode_ok = True
        result = evaluate(corpus, outputs, ("domain",), include_other=include_other)
        cells = {(s.algorithm, s.domain): s for s in result.summaries}
        for domain, rows in TABLE2_MTUNA.items():
            for label, (mean, perfect) in rows.items():
                cell = cells.get((label, domain))
                if cell is None or abs(cell.mean_dice - mean) > 0.01 or abs(cell.prp - perfect) > 1.0:
                    mode_ok = False
        if mode_ok:
            table2_ok = True
            break
    check(9, profile_ok and table1_ok and table2_ok,
          "Table 7 profiles, Table 1 furniture counts, and Table 2 scores reproduced")
