"""regbench: a workbench for referring-expression content selection.

Builds the classic selection algorithms (Full Brevity, Greedy,
Incremental), exhaustive per-scene profiles of minimal distinguishing
descriptions, the over-/under-specification taxonomy for human REs, and
DICE/PRP evaluation with a Monte Carlo sweep over TYPE-insertion
probabilities, all over TUNA-style annotated corpora.
"""

__version__ = "0.1.0"

from .algorithms import (
    ALWAYS,
    AlgorithmSpec,
    GeneratedDescription,
    NEVER,
    PreferenceOrder,
    RandomStream,
    RunResult,
    TypePolicy,
    apply_type_policy,
    full_brevity,
    greedy,
    incremental,
    parse_algorithm_spec,
    preference_order_from_code,
    preset_orders,
    run_algorithm,
)
from .analysis import (
    AnalysisConfig,
    SceneProfile,
    SpecificationCategory,
    SpecificationCounts,
    SpecificationReport,
    candidate_universe,
    classify,
    profiles_for_corpus,
    scene_profile,
    spec_count_table,
)
from .corpus import (
    AnnotatedRE,
    Corpus,
    FilterResult,
    ParseIssue,
    Position,
    RecordParseResult,
    ValidationFinding,
    ValidationReport,
    builtin_overlap_pairs,
    filter_trials,
    load_corpus,
    load_re_records,
    load_scenes,
    parse_overlap_table,
    parse_re_records,
    parse_scene_file,
    serialize_re_records,
    serialize_scenes,
    validate_corpus,
)
from .domain import (
    AttributeDecl,
    Description,
    DomainObject,
    DomainSchema,
    FURNITURE_SCHEMA,
    PEOPLE_SCHEMA,
    Property,
    Scene,
    distinguishes,
    merge_raw_properties,
    rules_out,
    schema_for,
    true_of,
)
from .evaluation import (
    EvaluationResult,
    EvaluationSummary,
    SweepResult,
    attribute_set,
    dice,
    evaluate,
    prp,
    sweep_type_probability,
)
from .stats import (
    ContingencyTable2x2,
    TestResult,
    chi_squared_independence,
    chi_squared_sf,
    f_sf,
    one_way_anova,
    regularized_incomplete_beta,
    regularized_upper_gamma,
)
