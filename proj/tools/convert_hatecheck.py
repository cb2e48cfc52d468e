#!/usr/bin/env python3
# Copyright 2026 The DefVerify Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Converts HateCheck test cases into the diagnostic set record format.

Input is the public HateCheck CSV (columns case_id, functionality, test_case,
label_gold, target_ident). Aspect labels come from an optional annotation
file with one JSON object per line keyed by case_id; any record field except
case_id, text and functionality may be given there and overrides the value
derived from the CSV. Extra cases (the dominant-group and offensive
extensions) can be appended from files already in the record format.

Cases of profanity_nh and target_indiv_nh are relabelled offensive unless
--keep-gold is given. Whether the nine added non-offensive context cases are
non-hateful is not stated by the source release; they are kept as annotated
and a warning is printed when an ext_* case is non-hateful.
"""

import argparse
import csv
import json
import sys

GROUPS = {
    "women": ("women", "gender"),
    "trans people": ("trans people", "gender"),
    "gay people": ("gay people", "sexual_orientation"),
    "black people": ("black people", "race"),
    "disabled people": ("disabled people", "disability"),
    "muslims": ("muslims", "religion"),
    "immigrants": ("immigrants", "nationality"),
    "men": ("men", "gender"),
    "white people": ("white people", "race"),
}
DOMINANT = {"men", "white people"}
OFFENSIVE_FUNCTIONALITIES = {"profanity_nh", "target_indiv_nh"}
SPELLING_FUNCTIONALITIES = {
    "spell_char_swap_h", "spell_char_del_h", "spell_space_del_h",
    "spell_space_add_h", "spell_leet_h",
}
FIELDS = ["case_id", "text", "functionality", "gold", "target_group",
          "category", "dominant", "refs", "incites", "group_insult",
          "in_group", "spelling"]
ANNOTATION_FIELDS = set(FIELDS) - {"case_id", "text", "functionality"}


def read_jsonl(path):
    with open(path, encoding="utf-8") as f:
        for number, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                yield number, json.loads(line)
            except json.JSONDecodeError as e:
                raise SystemExit(f"{path}:{number}: invalid JSON: {e}")


def load_annotations(path):
    annotations = {}
    for number, record in read_jsonl(path):
        case_id = str(record.get("case_id", ""))
        if not case_id:
            raise SystemExit(f"{path}:{number}: missing case_id")
        unknown = set(record) - ANNOTATION_FIELDS - {"case_id"}
        if unknown:
            raise SystemExit(f"{path}:{number}: unknown fields {sorted(unknown)}")
        annotations[case_id] = record
    return annotations


def convert_row(row, keep_gold):
    gold = row["label_gold"].strip()
    if gold not in ("hateful", "non-hateful"):
        raise ValueError(f"label_gold {gold!r}")
    functionality = row["functionality"].strip()
    if not keep_gold and functionality in OFFENSIVE_FUNCTIONALITIES:
        gold = "offensive"
    ident = (row.get("target_ident") or "").strip().lower()
    group, category = GROUPS.get(ident, (ident or None, None))
    return {
        "case_id": str(row["case_id"]).strip(),
        "text": row["test_case"],
        "functionality": functionality,
        "gold": gold,
        "target_group": group,
        "category": category,
        "dominant": group in DOMINANT,
        "refs": [],
        "incites": [],
        "group_insult": False,
        "in_group": False,
        "spelling": functionality in SPELLING_FUNCTIONALITIES,
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("csv", help="HateCheck test case CSV")
    parser.add_argument("--annotations", help="aspect annotations (JSON lines)")
    parser.add_argument("--extra", action="append", default=[],
                        help="extension cases already in record format")
    parser.add_argument("--keep-gold", action="store_true",
                        help="do not relabel profanity_nh and target_indiv_nh")
    parser.add_argument("-o", "--output", help="output file (default stdout)")
    args = parser.parse_args(argv)

    annotations = load_annotations(args.annotations) if args.annotations else {}
    records = []
    with open(args.csv, newline="", encoding="utf-8") as f:
        for number, row in enumerate(csv.DictReader(f), 2):
            try:
                record = convert_row(row, args.keep_gold)
            except (KeyError, ValueError) as e:
                raise SystemExit(f"{args.csv}:{number}: bad row: {e}")
            record.update({k: v for k, v in annotations.pop(record["case_id"], {}).items()
                           if k != "case_id"})
            if record["target_group"] is None:
                record["category"] = None
            records.append(record)
    for path in args.extra:
        for number, record in read_jsonl(path):
            missing = [k for k in ("case_id", "text", "functionality", "gold") if k not in record]
            if missing:
                raise SystemExit(f"{path}:{number}: missing {missing}")
            if record["functionality"].startswith("ext_") and record["gold"] == "non-hateful":
                print(f"warning: {path}:{number}: extension case {record['case_id']} "
                      "is non-hateful; check against the release", file=sys.stderr)
            records.append({k: record.get(k) for k in FIELDS if k in record})
    if annotations:
        print(f"warning: {len(annotations)} annotations match no case, e.g. "
              f"{sorted(annotations)[0]}", file=sys.stderr)

    seen = set()
    for record in records:
        if record["case_id"] in seen:
            raise SystemExit(f"duplicate case_id {record['case_id']!r}")
        seen.add(record["case_id"])

    lines = [json.dumps(r, ensure_ascii=False, separators=(",", ":")) + "\n" for r in records]
    if args.output:
        with open(args.output, "w", encoding="utf-8") as sink:
            sink.writelines(lines)
    else:
        sys.stdout.writelines(lines)
    return 0


if __name__ == "__main__":
    sys.exit(main())
