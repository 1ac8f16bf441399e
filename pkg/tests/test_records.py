"""JSONL record files: structured encodings, loaders, line-anchored errors."""

from __future__ import annotations

import json

import pytest

from lexcheck.dsl import parse_rule
from lexcheck.generate import GenConfig, generate_dataset
from lexcheck.records import (
    DataError,
    instruction_from_dict,
    instruction_to_dict,
    predicate_from_dict,
    predicate_to_dict,
    read_instructions,
    read_responses,
    rule_from_dict,
    rule_to_dict,
    write_instructions,
    write_responses,
)
from lexcheck.rules import Predicate


@pytest.fixture(scope="module")
def dataset():
    return generate_dataset(GenConfig(seed=21, language="zh", easy=3, medium=3, hard=3))


class TestPredicateCodec:
    def test_round_trip(self):
        for pred in (Predicate.index(3), Predicate.index(-1), Predicate.all(),
                     Predicate.before(2), Predicate.after(1), Predicate.between(),
                     Predicate.count()):
            assert predicate_from_dict(predicate_to_dict(pred)) == pred

    def test_no_null_n_key(self):
        assert "n" not in predicate_to_dict(Predicate.all())


class TestRuleCodec:
    def test_round_trip(self):
        rule = parse_rule('paragraph@2.pattern(/[0-9]+/)# >= 1')
        assert rule_from_dict(rule_to_dict(rule)) == rule

    def test_dsl_string_accepted(self):
        assert rule_from_dict("sentence# = 3") == parse_rule("sentence# = 3")

    def test_invalid_structured_rule_rejected(self):
        data = rule_to_dict(parse_rule("sentence# = 3"))
        data["relation"] = "contain"
        data["value"] = "x"
        with pytest.raises(ValueError, match="text-relation-with-count"):
            rule_from_dict(data)


class TestInstructionCodec:
    def test_round_trip(self, dataset):
        for ins in dataset:
            assert instruction_from_dict(instruction_to_dict(ins)) == ins

    def test_difficulty_regraded_on_load(self, dataset):
        data = instruction_to_dict(dataset[0])
        assert data["difficulty"] == "easy"
        data["difficulty"] = "hard"
        data["id"] = "zh-tampered"
        with pytest.raises(ValueError, match="does not match the rules"):
            instruction_from_dict(data)


class TestInstructionFiles:
    def test_file_round_trip(self, dataset, tmp_path):
        path = tmp_path / "ins.jsonl"
        write_instructions(path, dataset)
        assert read_instructions(path) == list(dataset)

    def test_cjk_written_verbatim(self, dataset, tmp_path):
        path = tmp_path / "ins.jsonl"
        write_instructions(path, dataset)
        text = path.read_text(encoding="utf-8")
        assert "要求：" in text
        assert "\\u8981" not in text

    def test_blank_lines_skipped(self, dataset, tmp_path):
        path = tmp_path / "ins.jsonl"
        lines = [json.dumps(instruction_to_dict(i), ensure_ascii=False) for i in dataset[:2]]
        path.write_text(lines[0] + "\n\n  \n" + lines[1] + "\n", encoding="utf-8")
        assert len(read_instructions(path)) == 2

    def test_malformed_json_points_at_line(self, dataset, tmp_path):
        path = tmp_path / "ins.jsonl"
        good = json.dumps(instruction_to_dict(dataset[0]), ensure_ascii=False)
        path.write_text(good + "\n{broken\n", encoding="utf-8")
        with pytest.raises(DataError) as info:
            read_instructions(path)
        assert info.value.line == 2
        assert f"{path}:2" in str(info.value)

    def test_non_object_record(self, tmp_path):
        path = tmp_path / "ins.jsonl"
        path.write_text("[1, 2]\n", encoding="utf-8")
        with pytest.raises(DataError, match="not a JSON object"):
            read_instructions(path)

    def test_missing_field_reported(self, dataset, tmp_path):
        path = tmp_path / "ins.jsonl"
        data = instruction_to_dict(dataset[0])
        del data["rules"]
        path.write_text(json.dumps(data, ensure_ascii=False) + "\n", encoding="utf-8")
        with pytest.raises(DataError, match="bad instruction record"):
            read_instructions(path)

    def test_duplicate_ids_rejected(self, dataset, tmp_path):
        path = tmp_path / "ins.jsonl"
        write_instructions(path, [dataset[0], dataset[0]])
        with pytest.raises(DataError, match="duplicate instruction id") as info:
            read_instructions(path)
        assert info.value.line == 2

    def test_rules_supplied_as_dsl_strings(self, tmp_path):
        data = {
            "id": "en-manual",
            "language": "en",
            "prompt": "p",
            "rules": ["sentence# = 2"],
            "difficulty": "easy",
            "depth": 1,
            "count": 1,
        }
        path = tmp_path / "ins.jsonl"
        path.write_text(json.dumps(data) + "\n", encoding="utf-8")
        loaded = read_instructions(path)
        assert loaded[0].rules == (parse_rule("sentence# = 2"),)


class TestResponseFiles:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "res.jsonl"
        write_responses(path, [
            {"id": "a", "response": "one", "latency_s": 0.5},
            {"id": "b", "response": "二"},
        ])
        assert read_responses(path) == {"a": "one", "b": "二"}

    def test_missing_fields(self, tmp_path):
        path = tmp_path / "res.jsonl"
        path.write_text('{"id": "a"}\n', encoding="utf-8")
        with pytest.raises(DataError, match="id and response"):
            read_responses(path)

    def test_non_string_response(self, tmp_path):
        path = tmp_path / "res.jsonl"
        path.write_text('{"id": "a", "response": 5}\n', encoding="utf-8")
        with pytest.raises(DataError, match="must be a string"):
            read_responses(path)

    def test_duplicate_ids(self, tmp_path):
        path = tmp_path / "res.jsonl"
        path.write_text(
            '{"id": "a", "response": "x"}\n{"id": "a", "response": "y"}\n',
            encoding="utf-8",
        )
        with pytest.raises(DataError, match="duplicate response id") as info:
            read_responses(path)
        assert info.value.line == 2

    def test_extra_fields_tolerated(self, tmp_path):
        path = tmp_path / "res.jsonl"
        path.write_text('{"id": "a", "response": "x", "model": "m"}\n', encoding="utf-8")
        assert read_responses(path) == {"a": "x"}


class TestDataError:
    def test_message_shapes(self):
        assert str(DataError("broken")) == "broken"
        assert str(DataError("broken", "f.jsonl")) == "f.jsonl: broken"
        assert str(DataError("broken", "f.jsonl", 3)) == "f.jsonl:3: broken"
