#!/usr/bin/env python3
"""Offline walkthrough: generate a small dataset, fake responses, score them.

No network involved; the "model" is a canned writer that sometimes follows the
constraints and sometimes does not, so the report shows a mix of strict
passes, loose-only passes and failures.
"""

from __future__ import annotations

import random

from lexcheck.generate import GenConfig, generate_dataset
from lexcheck.report import render_report, score
from lexcheck.templates import render_rule_sentence

EN_FILLER = "The quick brown fox jumps over the lazy dog near the river bank."
ZH_FILLER = "今天天气很好。我们一起去公园散步。时间过得很快。"


def fake_response(rng: random.Random, language: str) -> str:
    filler = ZH_FILLER if language == "zh" else EN_FILLER
    lines = []
    for _ in range(rng.randint(1, 4)):
        line = filler
        if rng.random() < 0.3:
            line = "* " + line
        lines.append(line)
    body = "\n".join(lines)
    if rng.random() < 0.3:
        body = "**Summary**\n" + body
    return body


def main() -> int:
    rng = random.Random(7)
    instructions = []
    for language, seed in (("en", 21), ("zh", 22)):
        config = GenConfig(seed=seed, language=language, easy=4, medium=4, hard=2)
        instructions.extend(generate_dataset(config))

    sample = instructions[0]
    print("Example instruction:")
    print(f"  id: {sample.id}  difficulty: {sample.difficulty}")
    for rule in sample.rules:
        print(f"  rule: {render_rule_sentence(rule, sample.language)}")
    print()

    responses = {ins.id: fake_response(rng, ins.language) for ins in instructions}
    report = score(instructions, responses, jobs=1, loose=True)
    print(render_report(report, "table"))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
