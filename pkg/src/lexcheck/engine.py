"""Rule verification: scope refinement, target extraction, adjudication.

Verification starts from the whole answer as a single scope segment, applies
each selection step in order, and finally compares what survives against the
rule's value.  Comparisons quantify universally: every surviving segment (or
per-segment count) must satisfy the relation, and an empty selection fails.
"""

from __future__ import annotations

from dataclasses import dataclass

from .rules import (
    Instruction,
    PredicateKind,
    ProcedureStep,
    Relation,
    Rule,
    check_validity,
)
from .segment import Element, gaps, segment


@dataclass(frozen=True)
class ScopeSegment:
    """A surviving piece of text plus the selection path that produced it."""

    text: str
    path: str


@dataclass(frozen=True)
class Scope:
    segments: tuple[ScopeSegment, ...]
    language: str

    @classmethod
    def initial(cls, full_text: str, language: str) -> Scope:
        return cls((ScopeSegment(full_text, "answer"),), language)


@dataclass(frozen=True)
class Target:
    """What adjudication compares: per-segment counts or segment texts."""

    counts: tuple[int, ...] | None = None
    texts: tuple[str, ...] | None = None

    @classmethod
    def of_counts(cls, counts: tuple[int, ...]) -> Target:
        return cls(counts=counts)

    @classmethod
    def of_texts(cls, texts: tuple[str, ...]) -> Target:
        return cls(texts=texts)

    @property
    def is_empty(self) -> bool:
        return not (self.counts or self.texts)


def _select(elements: list[Element], n: int) -> Element | None:
    if n == -1:
        return elements[-1] if elements else None
    return elements[n - 1] if 1 <= n <= len(elements) else None


def refine_scope(scope: Scope, step: ProcedureStep) -> Scope:
    """Apply one non-count step to every segment, preserving order.

    Out-of-range ordinals simply contribute no sub-segments; they are not
    errors.  `before`/`after` keep the raw text on the named side of the
    element's span; `between` keeps the raw text separating consecutive
    elements.
    """
    if step.predicate.kind is PredicateKind.COUNT:
        raise ValueError("count is a terminal predicate; it does not refine a scope")
    out: list[ScopeSegment] = []
    tag = step.level.value
    for seg in scope.segments:
        elements = segment(seg.text, step.level, scope.language, step.pattern)
        kind = step.predicate.kind
        if kind is PredicateKind.INDEX:
            el = _select(elements, step.predicate.n or 0)
            if el is not None:
                out.append(ScopeSegment(el.text, f"{seg.path}/{tag}[{step.predicate.n}]"))
        elif kind is PredicateKind.ALL:
            out.extend(
                ScopeSegment(el.text, f"{seg.path}/{tag}[{i}]")
                for i, el in enumerate(elements, 1)
            )
        elif kind is PredicateKind.BEFORE:
            el = _select(elements, step.predicate.n or 0)
            if el is not None:
                out.append(ScopeSegment(seg.text[: el.start], f"{seg.path}/{tag}!{step.predicate.n}"))
        elif kind is PredicateKind.AFTER:
            el = _select(elements, step.predicate.n or 0)
            if el is not None:
                out.append(ScopeSegment(seg.text[el.end :], f"{seg.path}/{tag}${step.predicate.n}"))
        else:  # BETWEEN
            out.extend(
                ScopeSegment(gap.text, f"{seg.path}/{tag}%[{j}]")
                for j, gap in enumerate(gaps(elements, seg.text), 1)
            )
    return Scope(tuple(out), scope.language)


def identify_target(scope: Scope, rule: Rule) -> Target:
    """Build the comparison target after all refinement steps have run."""
    terminal = rule.procedure[-1]
    if terminal.predicate.kind is PredicateKind.COUNT:
        if not scope.segments:
            # counting over nothing: a bare one-step count still counts the
            # (empty) answer and yields 0; deeper procedures yield no counts
            if len(rule.procedure) == 1:
                return Target.of_counts((0,))
            return Target.of_counts(())
        counts = tuple(
            len(segment(seg.text, terminal.level, scope.language, terminal.pattern))
            for seg in scope.segments
        )
        return Target.of_counts(counts)
    return Target.of_texts(tuple(seg.text for seg in scope.segments))


def _compare_count(count: int, relation: Relation, value: int) -> bool:
    ops = {
        Relation.EQ: count == value,
        Relation.NEQ: count != value,
        Relation.GT: count > value,
        Relation.GTE: count >= value,
        Relation.LT: count < value,
        Relation.LTE: count <= value,
    }
    return ops[relation]


def _compare_text(text: str, relation: Relation, value: str) -> bool:
    if relation is Relation.STARTSWITH:
        return text.startswith(value)
    if relation is Relation.ENDSWITH:
        return text.endswith(value)
    if relation is Relation.EQUAL:
        return text == value
    if relation is Relation.CONTAIN:
        return value in text
    if relation is Relation.NOTSTARTSWITH:
        return not text.startswith(value)
    if relation is Relation.NOTENDSWITH:
        return not text.endswith(value)
    return value not in text  # NOTCONTAIN


def adjudicate(target: Target, relation: Relation, value: int | str) -> bool:
    """True iff every target entry satisfies the relation; empty targets fail."""
    if target.counts is not None:
        if not target.counts:
            return False
        return all(_compare_count(c, relation, value) for c in target.counts)  # type: ignore[arg-type]
    texts = target.texts or ()
    if not texts:
        return False
    return all(_compare_text(t, relation, value) for t in texts)  # type: ignore[arg-type]


def verify_rule(rule: Rule, full_text: str, language: str = "en") -> bool:
    """Run the full pipeline for one rule against one answer text."""
    violations = check_validity(rule)
    if violations:
        codes = ", ".join(v.value for v in violations)
        raise ValueError(f"cannot verify an invalid rule: {codes}")
    scope = Scope.initial(full_text, language)
    steps = rule.procedure
    counting = steps[-1].predicate.kind is PredicateKind.COUNT
    for step in steps[:-1] if counting else steps:
        scope = refine_scope(scope, step)
    target = identify_target(scope, rule)
    return adjudicate(target, rule.relation, rule.value)


def _strip_asterisks(text: str) -> str:
    return text.replace("*", "")


#: Identifiers of the relaxed rewrites, in the order they are tried.
LOOSE_VARIANT_IDS = (
    "identity",
    "strip-asterisks",
    "drop-first-line",
    "drop-last-line",
    "drop-first-last-lines",
    "strip-asterisks+drop-first-line",
    "strip-asterisks+drop-last-line",
    "strip-asterisks+drop-first-last-lines",
)


def loose_variants(full_text: str) -> list[tuple[str, str]]:
    """The eight relaxed rewrites of an answer, in fixed evaluation order.

    Line removal works on newline-delimited lines of the raw text; removing a
    line from a text with at most one line leaves the empty string.
    """
    lines = full_text.split("\n")
    drop_first = "\n".join(lines[1:])
    drop_last = "\n".join(lines[:-1])
    drop_both = "\n".join(lines[1:-1])
    return [
        ("identity", full_text),
        ("strip-asterisks", _strip_asterisks(full_text)),
        ("drop-first-line", drop_first),
        ("drop-last-line", drop_last),
        ("drop-first-last-lines", drop_both),
        ("strip-asterisks+drop-first-line", _strip_asterisks(drop_first)),
        ("strip-asterisks+drop-last-line", _strip_asterisks(drop_last)),
        ("strip-asterisks+drop-first-last-lines", _strip_asterisks(drop_both)),
    ]


@dataclass(frozen=True)
class Verdict:
    """Outcome of checking one response against one instruction.

    `loose_pass` is None when the relaxed pass was skipped (strict-only runs).
    When computed, strict success implies loose success via the identity
    variant.
    """

    rule_results: tuple[tuple[Rule, bool], ...]
    strict_pass: bool
    loose_pass: bool | None
    loose_variant: str | None


def verify_instruction(instruction: Instruction, response: str, loose: bool = True) -> Verdict:
    """Check every rule on the raw response, then search the relaxed rewrites.

    A relaxed rewrite counts only if it satisfies *all* rules jointly; the
    first passing variant in the fixed order is recorded.
    """
    results = tuple(
        (rule, verify_rule(rule, response, instruction.language)) for rule in instruction.rules
    )
    strict = all(ok for _, ok in results)
    if not loose:
        return Verdict(results, strict, None, None)
    variant_id: str | None = None
    for vid, text in loose_variants(response):
        if vid == "identity":
            ok = strict
        else:
            ok = all(verify_rule(rule, text, instruction.language) for rule in instruction.rules)
        if ok:
            variant_id = vid
            break
    return Verdict(results, strict, variant_id is not None, variant_id)
