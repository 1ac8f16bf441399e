"""Verification toolkit for fine-grained lexical constraints on model responses."""

from .dsl import ParseError, PatternError, ValidityError, format_rule, parse_rule
from .engine import (
    LOOSE_VARIANT_IDS,
    Scope,
    Target,
    Verdict,
    adjudicate,
    identify_target,
    loose_variants,
    refine_scope,
    verify_instruction,
    verify_rule,
)
from .generate import (
    BucketError,
    GenConfig,
    LexiconError,
    Lexicon,
    generate_dataset,
    sample_rule,
)
from .grading import DifficultyScore, grade_difficulty, score_rule
from .records import (
    DataError,
    read_instructions,
    read_responses,
    write_instructions,
    write_responses,
)
from .report import (
    EvalReport,
    aggregate,
    heatmap,
    load_report,
    merge,
    render_report,
    score,
)
from .rules import (
    Instruction,
    Level,
    Predicate,
    PredicateKind,
    ProcedureStep,
    Relation,
    Rule,
    Violation,
    check_validity,
    is_valid,
)
from .segment import Element, gaps, segment
from .templates import MissingTemplateError, load_templates, render_prompt, render_rule_sentence

__version__ = "0.1.0"

__all__ = [
    "BucketError",
    "DataError",
    "DifficultyScore",
    "Element",
    "EvalReport",
    "GenConfig",
    "Instruction",
    "Level",
    "Lexicon",
    "LexiconError",
    "LOOSE_VARIANT_IDS",
    "MissingTemplateError",
    "ParseError",
    "PatternError",
    "Predicate",
    "PredicateKind",
    "ProcedureStep",
    "Relation",
    "Rule",
    "Scope",
    "Target",
    "ValidityError",
    "Verdict",
    "Violation",
    "adjudicate",
    "aggregate",
    "check_validity",
    "format_rule",
    "gaps",
    "generate_dataset",
    "grade_difficulty",
    "heatmap",
    "identify_target",
    "is_valid",
    "load_report",
    "load_templates",
    "loose_variants",
    "merge",
    "parse_rule",
    "read_instructions",
    "read_responses",
    "refine_scope",
    "render_prompt",
    "render_report",
    "render_rule_sentence",
    "sample_rule",
    "score",
    "score_rule",
    "segment",
    "verify_instruction",
    "verify_rule",
    "write_instructions",
    "write_responses",
]
