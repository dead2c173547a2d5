#!/usr/bin/env python3
# Copyright 2026 The vetdeid Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates fixtures/: entity pools, 200 templates, a small real corpus.

Every pool surface starts with a word that occurs nowhere else (no other
surface, no template text), so gazetteer matches can only begin where a
filled surface begins. Output is deterministic.

    python3 tools/make_fixtures.py fixtures
"""

import json
import os
import random
import sys

RNG = random.Random(20260101)

ONSETS = ["b", "br", "c", "d", "dr", "f", "g", "gr", "h", "j", "k", "l", "m",
          "n", "p", "qu", "r", "s", "st", "t", "th", "tr", "v", "w", "z"]
VOWELS = ["a", "e", "i", "o", "u", "ai", "ea", "ou", "y"]
CODAS = ["", "n", "r", "l", "s", "th", "m", "x", "nd", "ck", "rt", "ve"]

used_words = set()


def fresh_word():
    while True:
        w = "".join(RNG.choice(ONSETS) + RNG.choice(VOWELS)
                    for _ in range(RNG.choice([2, 2, 3])))
        w = (w + RNG.choice(CODAS)).capitalize()
        if w.lower() not in used_words and len(w) >= 4:
            used_words.add(w.lower())
            return w


def names(n, fmt):
    return [fmt.format(a=fresh_word(), b=fresh_word()) for _ in range(n)]


POOLS = {
    "VET": names(30, "Dr {a} {b}") + names(10, "{a} {b} MRCVS"),
    "OWNER": names(40, "{a} {b}"),
    "PATIENT": names(45, "{a}"),
    "PERSON": names(20, "{a} {b}"),
    "CLINIC": names(24, "{a} Vets") + names(8, "{a} Veterinary Centre"),
    "LAB": names(10, "{a} Laboratories"),
    "ORGANISATION": names(10, "{a} Animal Trust"),
    "ORG": names(10, "{a} Insurance"),
    "CITY": names(20, "{a}") + names(6, "{a} Cross"),
    "ADDRESS": names(15, "{a} Lane") + names(5, "{a} Farm"),
    "LOC": names(10, "{a} Park"),
    "DEVICE": names(10, "{a} scanner"),
    "MISC_GENERIC": names(10, "{a} reference"),
}
# A few non-ASCII surfaces to exercise code-point offsets.
POOLS["CITY"].append("Ébrevaux")
POOLS["PATIENT"].append("Zoë")
used_words.update({"ébrevaux", "zoë"})

PER_ROLES = ["VET", "OWNER", "PERSON"]
OTHER_ROLES = ["PATIENT", "CLINIC", "LAB", "ORGANISATION", "ORG", "CITY",
               "ADDRESS", "LOC", "DEVICE", "MISC_GENERIC", "DATE", "TIME",
               "DATE_GENERIC", "ID"]

# Plain clinical clauses without identifiers, digits runs, dates or times.
CLAUSES = [
    "presented with a two day history of vomiting",
    "owner reports reduced appetite since the weekend",
    "mild pyrexia noted on examination",
    "heart and lungs auscultate normally",
    "abdomen soft and non painful on palpation",
    "mucous membranes pink and moist",
    "capillary refill time under two seconds",
    "body condition score five out of nine",
    "weight stable compared with last visit",
    "lameness grade two on the left forelimb",
    "ear canals erythematous with brown discharge",
    "dental tartar grade three noted",
    "skin shows patchy alopecia over the flanks",
    "flea dirt found along the dorsum",
    "booster vaccination given today",
    "advised to repeat bloods in four weeks",
    "started on a course of meloxicam",
    "prescribed amoxicillin clavulanate for ten days",
    "discussed weight management and diet change",
    "recheck in one week or sooner if worse",
    "bright alert and responsive in the consult room",
    "temperature 38.5°C and pulse strong",
    "urine sample submitted for analysis",
    "radiographs show no obvious foreign body",
    "bloods within normal limits apart from mildly raised ALT",
    "owner happy to monitor at home",
    "diarrhoea resolved after bland diet",
    "coughing worse at night according to the owner",
    "eyes clear with no discharge",
    "nails clipped and anal glands expressed",
    "no evidence of parasites on coat brushing",
    "suture line healing well with no swelling",
    "sutures removed and wound closed",
    "advised strict rest and lead walks only",
    "pain score low after analgesia",
    "gained weight since the last check",
    "drinking more than usual for a fortnight",
    "mild gingivitis present on the upper arcade",
    "palpable mass on the right flank measuring about two centimetres",
    "fine needle aspirate taken for cytology",
    "appetite good and passing normal faeces",
    "owner declined further diagnostics for now",
    "itching reduced since starting the new shampoo",
    "heart murmur grade two detected on the left side",
    "respiratory rate normal at rest",
    "reviewed diet and advised a senior formula",
    "microchip checked and reads correctly",
    "worming and flea treatment dispensed",
    "no vomiting since the injection",
    "limping improved with rest",
    "reluctant to jump onto furniture",
    "hair loss around the eyes improving",
    "vaccination card updated",
    "anaesthetic recovery smooth and uneventful",
    "discharged with buster collar",
    "check ears again at the next visit",
    "tolerated examination well",
    "hydration appears adequate",
    "coat in good condition",
    "owner asked about neutering options",
]

ROLE_FRAMES = {
    "VET": ["seen by __{p}__", "reviewed by __{p}__", "case discussed with __{p}__"],
    "OWNER": ["owner __{p}__ called for an update", "spoke with __{p}__ by phone",
              "__{p}__ collected the patient"],
    "PERSON": ["history given by __{p}__", "__{p}__ helped restrain the patient"],
    "PATIENT": ["__{p}__ was bright on arrival", "weighed __{p}__ on the scales"],
    "CLINIC": ["referred from __{p}__", "transferred to __{p}__ for imaging"],
    "LAB": ["samples sent to __{p}__", "results back from __{p}__"],
    "ORGANISATION": ["rehomed via __{p}__", "costs covered by __{p}__"],
    "ORG": ["claim form sent to __{p}__", "policy held with __{p}__"],
    "CITY": ["recently moved from __{p}__", "travelled back from __{p}__"],
    "ADDRESS": ["home visit at __{p}__", "lives at __{p}__"],
    "LOC": ["walked daily in __{p}__", "found injured near __{p}__"],
    "DEVICE": ["read with the __{p}__", "checked using the __{p}__"],
    "MISC_GENERIC": ["quote the __{p}__ on the invoice"],
    "DATE": ["last seen on __{p}__", "booster due __{p}__"],
    "TIME": ["collected at __{p}__", "fed at __{p}__"],
    "DATE_GENERIC": ["symptoms began on __{p}__"],
    "ID": ["case number __{p}__", "insurance ref __{p}__"],
}


def word_count(text):
    return len(text.split())


def build_template(pii):
    clauses = RNG.sample(CLAUSES, RNG.randint(2, 4))
    frames = []
    if pii:
        counters = {}
        roles = [RNG.choice(PER_ROLES)]
        roles += RNG.sample(OTHER_ROLES + PER_ROLES, RNG.randint(0, 3))
        for role in roles:
            counters[role] = counters.get(role, 0) + 1
            ph = f"{role}{counters[role]}"
            frames.append(RNG.choice(ROLE_FRAMES[role]).format(p=ph))
    parts = clauses + frames
    RNG.shuffle(parts)
    text = ". ".join(p[0].upper() + p[1:] for p in parts) + "."
    return text


def write_lines(path, lines):
    with open(path, "w", encoding="utf-8") as f:
        for line in lines:
            f.write(line + "\n")


def generated_surface(role):
    months = ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep",
              "Oct", "Nov", "Dec"]
    d = RNG.randint(1, 28)
    m = RNG.randint(1, 12)
    y = RNG.randint(2010, 2024)
    if role in ("DATE", "DATE_GENERIC"):
        return RNG.choice([f"{d:02d} {months[m - 1]} {y}", f"{d:02d}/{m:02d}/{y}"])
    if role == "TIME":
        return f"{RNG.randint(8, 19):02d}:{RNG.randint(0, 59):02d}"
    return "".join(RNG.choice("0123456789") for _ in range(RNG.choice([7, 9])))


LABEL = {"VET": "PER", "OWNER": "PER", "PATIENT": "PER", "PERSON": "PER",
         "CLINIC": "ORG", "LAB": "ORG", "ORGANISATION": "ORG", "ORG": "ORG",
         "CITY": "LOC", "ADDRESS": "LOC", "LOC": "LOC",
         "DATE": "TIME", "TIME": "TIME", "DATE_GENERIC": "TIME",
         "ID": "MISC", "DEVICE": "MISC", "MISC_GENERIC": "MISC"}


def real_note(idx, pii):
    """A real-style note; may repeat an entity, unlike synthetic fills."""
    clauses = RNG.sample(CLAUSES, RNG.randint(3, 6))
    text = ". ".join(c[0].upper() + c[1:] for c in clauses)
    spans = []
    if pii:
        roles = RNG.sample(list(LABEL), RNG.randint(1, 3))
        for role in roles:
            if role in POOLS:
                surface = RNG.choice(POOLS[role])
            else:
                surface = generated_surface(role)
            frame = RNG.choice(ROLE_FRAMES[role])
            before, after = frame.split("__{p}__")
            repeat = RNG.random() < 0.15
            sentence = (before + "{S}" + after)
            if repeat:
                sentence += " and again {S} later"
            sentence = sentence[0].upper() + sentence[1:] if sentence[0] != "{" else sentence
            text += ". "
            pos = 0
            while True:
                k = sentence.find("{S}", pos)
                if k < 0:
                    text += sentence[pos:]
                    break
                text += sentence[pos:k]
                start = len(text)
                text += surface
                spans.append({"start": start, "end": start + len(surface),
                              "label": LABEL[role], "entity": surface})
                pos = k + 3
    text += "."
    return {"id": f"real-{idx:04d}", "sentence": text, "spans": spans,
            "provenance": "real", "seed_id": None}


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "fixtures"
    os.makedirs(os.path.join(out, "pools"), exist_ok=True)

    template_words = {w.strip(".,").lower() for c in CLAUSES for w in c.split()}
    for frames in ROLE_FRAMES.values():
        for fr in frames:
            template_words.update(w.lower() for w in fr.split())
    for role, surfaces in POOLS.items():
        for s in surfaces:
            assert s.split()[0].lower() not in template_words, s
        write_lines(os.path.join(out, "pools", f"{role}.txt"), surfaces)

    templates = []
    seen = set()
    n_pii = 0
    while len(templates) < 200:
        pii = len(templates) % 5 < 2
        text = build_template(pii)
        if text in seen:
            continue
        seen.add(text)
        n_pii += pii
        templates.append(json.dumps({
            "seed_id": f"seed-{len(templates):04d}",
            "text": text,
            "constraints": {"length_tolerance": 0.3,
                            "seed_length": word_count(text)},
            "repeat_bearing": False,
        }, ensure_ascii=False))
    write_lines(os.path.join(out, "templates.jsonl"), templates)

    notes = [real_note(i, RNG.random() < 0.29) for i in range(60)]
    write_lines(os.path.join(out, "real.jsonl"),
                [json.dumps(n, ensure_ascii=False) for n in notes])
    print(f"{len(templates)} templates ({n_pii} with placeholders), "
          f"{len(notes)} real notes, {len(POOLS)} pools")


if __name__ == "__main__":
    main()
