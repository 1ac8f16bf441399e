"""Natural-language rendering of rules into numbered prompt requirements.

Templates are keyed by (terminal predicate kind, relation, language) and use
the placeholders ``{n}``, ``{value}``, ``{level}`` and ``{position}``.  The
registry below ships a complete default set; a JSON file with the same nested
shape can overlay individual entries.  Rendering is deterministic and
self-contained: every sentence names the level, position, relation and value
it constrains.
"""

from __future__ import annotations

import json
from pathlib import Path

from .dsl import _escape_value
from .rules import (
    ALLOWED_RELATIONS,
    LANGUAGES,
    Level,
    PredicateKind,
    ProcedureStep,
    Relation,
    Rule,
    check_validity,
)

TemplateKey = tuple[str, str, str]  # (predicate kind, relation, language)


class MissingTemplateError(LookupError):
    def __init__(self, kind: str, relation: str, language: str):
        self.key = (kind, relation, language)
        super().__init__(f"no template for predicate={kind} relation={relation} language={language}")


_COUNT_EN = {
    "eq": "{position} must contain exactly {n} {level}.",
    "neq": "{position} must contain a number of {level} other than {n}.",
    "gt": "{position} must contain more than {n} {level}.",
    "gte": "{position} must contain at least {n} {level}.",
    "lt": "{position} must contain fewer than {n} {level}.",
    "lte": "{position} must contain at most {n} {level}.",
}
_SELECT_EN = {
    "startswith": "{position} must start with {value}.",
    "endswith": "{position} must end with {value}.",
    "equal": "{position} must be exactly {value}.",
    "contain": "{position} must contain {value}.",
    "notstartswith": "{position} must not start with {value}.",
    "notendswith": "{position} must not end with {value}.",
    "notcontain": "{position} must not contain {value}.",
}
_COUNT_ZH = {
    "eq": "{position}必须恰好包含{n}{level}。",
    "neq": "{position}包含的{level}数量不能恰好为{n}。",
    "gt": "{position}必须包含多于{n}{level}。",
    "gte": "{position}必须至少包含{n}{level}。",
    "lt": "{position}必须包含少于{n}{level}。",
    "lte": "{position}必须至多包含{n}{level}。",
}
_SELECT_ZH = {
    "startswith": "{position}必须以{value}开头。",
    "endswith": "{position}必须以{value}结尾。",
    "equal": "{position}必须恰好是{value}。",
    "contain": "{position}必须包含{value}。",
    "notstartswith": "{position}不能以{value}开头。",
    "notendswith": "{position}不能以{value}结尾。",
    "notcontain": "{position}不能包含{value}。",
}


def _build_defaults() -> dict[TemplateKey, str]:
    reg: dict[TemplateKey, str] = {}
    for rel, tpl in _COUNT_EN.items():
        reg[("count", rel, "en")] = tpl
    for rel, tpl in _COUNT_ZH.items():
        reg[("count", rel, "zh")] = tpl
    for kind in ("index", "all"):
        for rel, tpl in _SELECT_EN.items():
            reg[(kind, rel, "en")] = tpl
        for rel, tpl in _SELECT_ZH.items():
            reg[(kind, rel, "zh")] = tpl
    reg[("before", "contain", "en")] = "The content before {position} must contain {value}."
    reg[("before", "notcontain", "en")] = "The content before {position} must not contain {value}."
    reg[("after", "contain", "en")] = "The content after {position} must contain {value}."
    reg[("after", "notcontain", "en")] = "The content after {position} must not contain {value}."
    reg[("after", "equal", "en")] = "The content after {position} must be exactly {value}."
    reg[("between", "equal", "en")] = "The content between consecutive {level} must be exactly {value}."
    reg[("before", "contain", "zh")] = "{position}之前的内容必须包含{value}。"
    reg[("before", "notcontain", "zh")] = "{position}之前的内容不能包含{value}。"
    reg[("after", "contain", "zh")] = "{position}之后的内容必须包含{value}。"
    reg[("after", "notcontain", "zh")] = "{position}之后的内容不能包含{value}。"
    reg[("after", "equal", "zh")] = "{position}之后的内容必须恰好是{value}。"
    reg[("between", "equal", "zh")] = "相邻{level}之间的内容必须恰好是{value}。"
    return reg


DEFAULT_TEMPLATES: dict[TemplateKey, str] = _build_defaults()

_NOUNS_EN: dict[Level, tuple[str, str]] = {
    Level.ANSWER: ("response", "responses"),
    Level.PARAGRAPH: ("paragraph", "paragraphs"),
    Level.LINE: ("line", "lines"),
    Level.BULLET: ("bullet item", "bullet items"),
    Level.SENTENCE: ("sentence", "sentences"),
    Level.WORD: ("word", "words"),
    Level.CHARACTER: ("Chinese character", "Chinese characters"),
    Level.LETTER: ("letter", "letters"),
    Level.PUNC: ("punctuation mark", "punctuation marks"),
}
_GLOSS_EN: dict[Level, str] = {
    Level.PARAGRAPH: " (paragraphs are separated by a blank line)",
    Level.BULLET: ' (lines starting with a list marker like "-" or "1.")',
}

# (noun, measure word); the measure word sits between a numeral and the noun
_NOUNS_ZH: dict[Level, tuple[str, str]] = {
    Level.ANSWER: ("回答", "个"),
    Level.PARAGRAPH: ("段落", "个"),
    Level.LINE: ("行", ""),
    Level.BULLET: ("列表项", "个"),
    Level.SENTENCE: ("句子", "个"),
    Level.WORD: ("词", "个"),
    Level.CHARACTER: ("汉字", "个"),
    Level.LETTER: ("字母", "个"),
    Level.PUNC: ("标点符号", "个"),
}
_GLOSS_ZH: dict[Level, str] = {
    Level.PARAGRAPH: "（段落之间以空行分隔）",
    Level.BULLET: "（以“-”或“1.”等列表符号开头的行）",
}


def _ordinal(n: int) -> str:
    if 10 <= n % 100 <= 20:
        suffix = "th"
    else:
        suffix = {1: "st", 2: "nd", 3: "rd"}.get(n % 10, "th")
    return f"{n}{suffix}"


def _noun_en(step: ProcedureStep, plural: bool) -> str:
    if step.level is Level.PATTERN:
        head = "matches" if plural else "match"
        return f"{head} of the pattern /{step.pattern}/"
    singular, plural_form = _NOUNS_EN[step.level]
    return plural_form if plural else singular


def _noun_zh(step: ProcedureStep) -> tuple[str, str]:
    if step.level is Level.PATTERN:
        return (f"与正则表达式 /{step.pattern}/ 匹配的片段", "个")
    return _NOUNS_ZH[step.level]


def _ref_phrase(step: ProcedureStep, n: int, language: str) -> str:
    """Phrase for "element number n" of a step's level."""
    if language == "zh":
        noun, measure = _noun_zh(step)
        if n == -1:
            return f"最后一{measure}{noun}"
        return f"第{n}{measure}{noun}"
    noun = _noun_en(step, plural=False)
    if n == -1:
        return f"the last {noun}"
    return f"the {_ordinal(n)} {noun}"


def _step_phrase(step: ProcedureStep, language: str) -> str:
    """Phrase describing the region a refinement step selects."""
    kind = step.predicate.kind
    zh = language == "zh"
    if step.level is Level.ANSWER:
        return "回答" if zh else "the response"
    if kind is PredicateKind.INDEX:
        return _ref_phrase(step, step.predicate.n or 1, language)
    if kind is PredicateKind.ALL:
        if zh:
            noun, measure = _noun_zh(step)
            return f"每{measure}{noun}"
        return f"every {_noun_en(step, plural=False)}"
    if kind is PredicateKind.BEFORE:
        ref = _ref_phrase(step, step.predicate.n or 1, language)
        return f"{ref}之前的内容" if zh else f"the content before {ref}"
    if kind is PredicateKind.AFTER:
        ref = _ref_phrase(step, step.predicate.n or 1, language)
        return f"{ref}之后的内容" if zh else f"the content after {ref}"
    # BETWEEN
    if zh:
        noun, _ = _noun_zh(step)
        return f"相邻{noun}之间的每段内容"
    return f"each gap between consecutive {_noun_en(step, plural=True)}"


def _counted_noun(step: ProcedureStep, n: int, relation: Relation, language: str) -> str:
    """The {level} field of a count template, measure word and gloss included."""
    if language == "zh":
        noun, measure = _noun_zh(step)
        return f"{measure}{noun}{_GLOSS_ZH.get(step.level, '')}"
    plural = not (n == 1 and relation is not Relation.NEQ)
    return f"{_noun_en(step, plural)}{_GLOSS_EN.get(step.level, '')}"


def _between_noun(step: ProcedureStep, language: str) -> str:
    if language == "zh":
        noun, _ = _noun_zh(step)
        return f"{noun}{_GLOSS_ZH.get(step.level, '')}"
    return f"{_noun_en(step, plural=True)}{_GLOSS_EN.get(step.level, '')}"


def _assemble(prefixes: list[str], core: str, language: str) -> str:
    if language == "zh":
        if prefixes:
            return "，".join(f"在{p}中" for p in prefixes) + "，" + core
        return core
    if prefixes:
        if core and core[0].isupper():
            core = core[0].lower() + core[1:]
        sentence = ", ".join(f"in {p}" for p in prefixes) + ", " + core
    else:
        sentence = core
    return sentence[0].upper() + sentence[1:] if sentence else sentence


def render_rule_sentence(rule: Rule, language: str, registry: dict[TemplateKey, str] | None = None) -> str:
    """One self-contained requirement sentence for a single rule."""
    if language not in LANGUAGES:
        raise ValueError(f"unknown language {language!r}")
    violations = check_validity(rule)
    if violations:
        raise ValueError(f"cannot render an invalid rule: {[v.value for v in violations]}")
    reg = DEFAULT_TEMPLATES if registry is None else registry
    steps = rule.procedure
    terminal = steps[-1]
    kind = terminal.predicate.kind
    key = (kind.value, rule.relation.value, language)
    template = reg.get(key)
    if template is None:
        raise MissingTemplateError(*key)

    fields: dict[str, str] = {}
    if isinstance(rule.value, str):
        fields["value"] = _escape_value(rule.value)
    else:
        fields["n"] = str(rule.value)
        fields["value"] = str(rule.value)

    if kind is PredicateKind.COUNT:
        containers = steps[:-1]
        if containers:
            prefixes = [_step_phrase(s, language) for s in containers[:-1]]
            fields["position"] = _step_phrase(containers[-1], language)
        else:
            prefixes = []
            fields["position"] = "回答" if language == "zh" else "the response"
        fields["level"] = _counted_noun(terminal, int(rule.value), rule.relation, language)
    elif kind in (PredicateKind.INDEX, PredicateKind.ALL):
        prefixes = [_step_phrase(s, language) for s in steps[:-1]]
        fields["position"] = _step_phrase(terminal, language)
    elif kind in (PredicateKind.BEFORE, PredicateKind.AFTER):
        prefixes = [_step_phrase(s, language) for s in steps[:-1]]
        fields["position"] = _ref_phrase(terminal, terminal.predicate.n or 1, language)
    else:  # BETWEEN
        prefixes = [_step_phrase(s, language) for s in steps[:-1]]
        fields["level"] = _between_noun(terminal, language)

    core = template.format(**fields)
    return _assemble(prefixes, core, language)


def render_prompt(
    rules: list[Rule] | tuple[Rule, ...],
    language: str,
    seed_task: str,
    registry: dict[TemplateKey, str] | None = None,
) -> str:
    """Seed task followed by an explicitly numbered requirement list."""
    if not rules:
        raise ValueError("render_prompt needs at least one rule")
    sentences = [render_rule_sentence(r, language, registry) for r in rules]
    header = "要求：" if language == "zh" else "Requirements:"
    body = "\n".join(f"{i}. {s}" for i, s in enumerate(sentences, 1))
    return f"{seed_task}\n\n{header}\n{body}"


def missing_templates(registry: dict[TemplateKey, str] | None = None) -> list[TemplateKey]:
    """Valid (predicate, relation, language) combinations absent from a registry."""
    reg = DEFAULT_TEMPLATES if registry is None else registry
    missing = []
    for kind, relations in ALLOWED_RELATIONS.items():
        for rel in relations:
            for lang in LANGUAGES:
                key = (kind.value, rel.value, lang)
                if key not in reg:
                    missing.append(key)
    return sorted(missing)


def load_templates(path: str | Path) -> dict[TemplateKey, str]:
    """Overlay a JSON template file ({language: {predicate: {relation: text}}})
    over the defaults."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    registry = dict(DEFAULT_TEMPLATES)
    for language, by_kind in data.items():
        for kind, by_relation in by_kind.items():
            for relation, template in by_relation.items():
                registry[(kind, relation, language)] = str(template)
    return registry
