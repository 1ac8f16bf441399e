"""Rule model: text levels, selection predicates, relations, and validity checks.

A rule pairs a *procedure* (a chain of level-addressing steps that narrows the
answer down to some elements) with a *relation* and a *value* to compare the
selected elements against.  Rules are plain immutable data; semantic conflicts
between the terminal predicate and the relation are reported by
``check_validity`` as a stable list of violation codes.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

LANGUAGES = ("en", "zh")
DIFFICULTIES = ("easy", "medium", "hard")


class Level(str, enum.Enum):
    """Granularity tiers a procedure step can address, coarsest first."""

    ANSWER = "answer"
    PARAGRAPH = "paragraph"
    LINE = "line"
    BULLET = "bullet"
    SENTENCE = "sentence"
    WORD = "word"
    CHARACTER = "character"
    LETTER = "letter"
    PUNC = "punc"
    PATTERN = "pattern"


# Granularity ranks.  line/bullet and character/letter/punc share a rank and are
# mutually incomparable, so neither may follow the other in a procedure.
_RANK = {
    Level.ANSWER: 0,
    Level.PARAGRAPH: 1,
    Level.LINE: 2,
    Level.BULLET: 2,
    Level.SENTENCE: 3,
    Level.WORD: 4,
    Level.CHARACTER: 5,
    Level.LETTER: 5,
    Level.PUNC: 5,
}


def descends(outer: Level, inner: Level) -> bool:
    """True when a step at `inner` may directly follow a step at `outer`."""
    if outer is Level.PATTERN:
        return False  # nothing is finer than a regex match
    if inner is Level.PATTERN:
        return True  # a regex step may follow any other level
    return _RANK[inner] > _RANK[outer]


class PredicateKind(str, enum.Enum):
    INDEX = "index"
    ALL = "all"
    BEFORE = "before"
    AFTER = "after"
    BETWEEN = "between"
    COUNT = "count"


@dataclass(frozen=True)
class Predicate:
    """Element selector attached to a procedure step.

    ``index`` takes n >= 1 or n == -1 (last element); ``before``/``after`` take
    a positive ordinal; the remaining kinds carry no argument.
    """

    kind: PredicateKind
    n: int | None = None

    def __post_init__(self) -> None:
        if self.kind is PredicateKind.INDEX:
            if not isinstance(self.n, int) or isinstance(self.n, bool):
                raise ValueError("index predicate requires an integer ordinal")
            if self.n == 0 or self.n < -1:
                raise ValueError("index ordinal must be >= 1, or -1 for the last element")
        elif self.kind in (PredicateKind.BEFORE, PredicateKind.AFTER):
            if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
                raise ValueError(f"{self.kind.value} predicate requires a positive ordinal")
        elif self.n is not None:
            raise ValueError(f"{self.kind.value} predicate takes no ordinal")

    @classmethod
    def index(cls, n: int) -> Predicate:
        return cls(PredicateKind.INDEX, n)

    @classmethod
    def all(cls) -> Predicate:
        return cls(PredicateKind.ALL)

    @classmethod
    def before(cls, n: int) -> Predicate:
        return cls(PredicateKind.BEFORE, n)

    @classmethod
    def after(cls, n: int) -> Predicate:
        return cls(PredicateKind.AFTER, n)

    @classmethod
    def between(cls) -> Predicate:
        return cls(PredicateKind.BETWEEN)

    @classmethod
    def count(cls) -> Predicate:
        return cls(PredicateKind.COUNT)


class Relation(str, enum.Enum):
    # numerical: compare an element count against an integer
    EQ = "eq"
    NEQ = "neq"
    GT = "gt"
    GTE = "gte"
    LT = "lt"
    LTE = "lte"
    # textual: compare selected element texts against a string
    STARTSWITH = "startswith"
    ENDSWITH = "endswith"
    EQUAL = "equal"
    CONTAIN = "contain"
    NOTSTARTSWITH = "notstartswith"
    NOTENDSWITH = "notendswith"
    NOTCONTAIN = "notcontain"

    @property
    def is_numerical(self) -> bool:
        return self in _NUMERICAL_RELATIONS


_NUMERICAL_RELATIONS = frozenset(
    {Relation.EQ, Relation.NEQ, Relation.GT, Relation.GTE, Relation.LT, Relation.LTE}
)
_TEXTUAL_RELATIONS = frozenset(
    {
        Relation.STARTSWITH,
        Relation.ENDSWITH,
        Relation.EQUAL,
        Relation.CONTAIN,
        Relation.NOTSTARTSWITH,
        Relation.NOTENDSWITH,
        Relation.NOTCONTAIN,
    }
)
_BEFORE_RELATIONS = frozenset({Relation.CONTAIN, Relation.NOTCONTAIN})
_AFTER_RELATIONS = frozenset({Relation.CONTAIN, Relation.NOTCONTAIN, Relation.EQUAL})
_BETWEEN_RELATIONS = frozenset({Relation.EQUAL})

#: Relations admitted for each terminal predicate kind, in a fixed order so
#: samplers and docs enumerate them deterministically.
ALLOWED_RELATIONS: dict[PredicateKind, tuple[Relation, ...]] = {
    PredicateKind.COUNT: (
        Relation.EQ,
        Relation.NEQ,
        Relation.GT,
        Relation.GTE,
        Relation.LT,
        Relation.LTE,
    ),
    PredicateKind.INDEX: (
        Relation.STARTSWITH,
        Relation.ENDSWITH,
        Relation.EQUAL,
        Relation.CONTAIN,
        Relation.NOTSTARTSWITH,
        Relation.NOTENDSWITH,
        Relation.NOTCONTAIN,
    ),
    PredicateKind.ALL: (
        Relation.STARTSWITH,
        Relation.ENDSWITH,
        Relation.EQUAL,
        Relation.CONTAIN,
        Relation.NOTSTARTSWITH,
        Relation.NOTENDSWITH,
        Relation.NOTCONTAIN,
    ),
    PredicateKind.BEFORE: (Relation.CONTAIN, Relation.NOTCONTAIN),
    PredicateKind.AFTER: (Relation.CONTAIN, Relation.NOTCONTAIN, Relation.EQUAL),
    PredicateKind.BETWEEN: (Relation.EQUAL,),
}


def _canonical_regex(source: str) -> str:
    """Rewrite escaped slashes to bare slashes; the two spell the same regex."""
    out: list[str] = []
    i = 0
    while i < len(source):
        ch = source[i]
        if ch == "\\" and i + 1 < len(source):
            nxt = source[i + 1]
            if nxt == "/":
                out.append("/")
            else:
                out.append(ch)
                out.append(nxt)
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


@dataclass(frozen=True)
class ProcedureStep:
    """One link in a procedure: a level plus a selection predicate.

    `pattern` holds the regex source and must be present exactly when the level
    is `pattern`; it is canonicalized and compiled at construction time.
    """

    level: Level
    predicate: Predicate
    pattern: str | None = None

    def __post_init__(self) -> None:
        if self.level is Level.PATTERN:
            if self.pattern is None:
                raise ValueError("pattern step requires a regex source")
            canonical = _canonical_regex(self.pattern)
            try:
                re.compile(canonical)
            except re.error as exc:
                raise ValueError(f"pattern step regex does not compile: {exc}") from exc
            object.__setattr__(self, "pattern", canonical)
        elif self.pattern is not None:
            raise ValueError(f"{self.level.value} step takes no regex")


@dataclass(frozen=True)
class Rule:
    """A single lexical constraint: procedure, relation, comparison value."""

    procedure: tuple[ProcedureStep, ...]
    relation: Relation
    value: int | str

    def __post_init__(self) -> None:
        if not isinstance(self.procedure, tuple):
            object.__setattr__(self, "procedure", tuple(self.procedure))
        if isinstance(self.value, bool):
            raise ValueError("rule value must be an integer or string, not a boolean")
        if isinstance(self.value, int):
            if self.value < 0:
                raise ValueError("integer rule value must be >= 0")
        elif isinstance(self.value, str):
            if not self.value:
                raise ValueError("text rule value must be a nonempty string")
        else:
            raise ValueError("rule value must be an integer or string")


class Violation(str, enum.Enum):
    """Stable codes for semantic conflicts reported by ``check_validity``."""

    EMPTY_PROCEDURE = "empty-procedure"
    NUMERIC_WITHOUT_COUNT = "numeric-relation-without-count"
    TEXT_WITH_COUNT = "text-relation-with-count"
    BEFORE_RELATION = "relation-not-allowed-for-before"
    AFTER_RELATION = "relation-not-allowed-for-after"
    BETWEEN_RELATION = "relation-not-allowed-for-between"
    VALUE_TYPE_MISMATCH = "value-type-mismatch"
    LEVEL_ORDER = "levels-not-descending"
    ANSWER_NOT_FIRST = "answer-not-first"
    ANSWER_PREDICATE = "answer-with-predicate"
    COUNT_NOT_TERMINAL = "count-not-terminal"


def check_validity(rule: Rule) -> list[Violation]:
    """Return every violation code that applies to `rule` (empty list = valid).

    Pure: structurally well-formed rules never raise here, and repeated calls
    return the same codes in the same order.
    """
    steps = rule.procedure
    if not steps:
        return [Violation.EMPTY_PROCEDURE]
    found: list[Violation] = []
    terminal = steps[-1]
    counting = terminal.predicate.kind is PredicateKind.COUNT

    if rule.relation.is_numerical:
        if not counting:
            found.append(Violation.NUMERIC_WITHOUT_COUNT)
    else:
        if counting:
            found.append(Violation.TEXT_WITH_COUNT)
        elif terminal.predicate.kind is PredicateKind.BEFORE and rule.relation not in _BEFORE_RELATIONS:
            found.append(Violation.BEFORE_RELATION)
        elif terminal.predicate.kind is PredicateKind.AFTER and rule.relation not in _AFTER_RELATIONS:
            found.append(Violation.AFTER_RELATION)
        elif terminal.predicate.kind is PredicateKind.BETWEEN and rule.relation not in _BETWEEN_RELATIONS:
            found.append(Violation.BETWEEN_RELATION)

    if rule.relation.is_numerical != isinstance(rule.value, int):
        found.append(Violation.VALUE_TYPE_MISMATCH)

    if any(s.predicate.kind is PredicateKind.COUNT for s in steps[:-1]):
        found.append(Violation.COUNT_NOT_TERMINAL)

    for i, step in enumerate(steps):
        if step.level is Level.ANSWER:
            if i > 0:
                found.append(Violation.ANSWER_NOT_FIRST)
                break
            if step.predicate.kind is not PredicateKind.ALL:
                found.append(Violation.ANSWER_PREDICATE)

    if any(not descends(a.level, b.level) for a, b in zip(steps, steps[1:])):
        found.append(Violation.LEVEL_ORDER)

    return found


def is_valid(rule: Rule) -> bool:
    return not check_validity(rule)


@dataclass(frozen=True)
class Instruction:
    """A prompt bundled with the rules a response to it must satisfy."""

    id: str
    language: str
    prompt: str
    rules: tuple[Rule, ...]
    difficulty: str
    depth: int
    count: int

    def __post_init__(self) -> None:
        if not isinstance(self.rules, tuple):
            object.__setattr__(self, "rules", tuple(self.rules))
        if self.language not in LANGUAGES:
            raise ValueError(f"unknown language {self.language!r}")
        if self.difficulty not in DIFFICULTIES:
            raise ValueError(f"unknown difficulty {self.difficulty!r}")
        if not self.rules:
            raise ValueError("instruction requires at least one rule")
        # depth and count are derivable; stored copies must agree
        derived_depth = max(len(r.procedure) for r in self.rules)
        if self.depth != derived_depth:
            raise ValueError(f"depth {self.depth} does not match procedures (expected {derived_depth})")
        if self.count != len(self.rules):
            raise ValueError(f"count {self.count} does not match number of rules ({len(self.rules)})")
