#!/usr/bin/env python3
# Copyright 2026 The rttqe Authors.
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
"""Regenerates tests/data/fixture_run/, a small synthetic evaluation.

Five systems "translate" twelve German sentences by perturbing them; the
echo backward translator hands the output straight back, so each round
trip differs from its input by the system's edits. Human judgments follow
the edit counts. Embeddings are deterministic hashed word vectors.

expected.tsv holds the system-level Pearson r and daRR tau each metric
should reach, computed here with sacrebleu 1.3.6, the sentence-BLEU
transcription in gen_lexical_fixtures.py, and plain-Python cosine,
idf and greedy matching.

Run from the repository root with sacrebleu==1.3.6 installed:
    python3 tests/oracles/gen_fixture_run.py
"""

import hashlib
import json
import math
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))
from gen_lexical_fixtures import (corpus_bleu, corpus_chrf, moses_sentence_bleu,  # noqa: E402
                                  sentence_chrf, tok)

OUT = Path(__file__).resolve().parent.parent / "data" / "fixture_run"
DIM = 8

SOURCES = [
    "Wir wissen, dass es das Verhalten der Schüler nicht sofort ändern wird.",
    "Der Zug nach Berlin hatte heute Morgen eine Stunde Verspätung.",
    "Die Regierung kündigte neue Maßnahmen gegen die Inflation an.",
    "Im Sommer fahren viele Familien an die Ostsee.",
    "Das Museum bleibt wegen Renovierung bis März geschlossen.",
    "Sie hat das Buch in nur zwei Tagen gelesen.",
    "Der Stadtrat stimmte dem Bau eines neuen Radwegs zu.",
    "Nach dem Spiel feierten die Fans bis spät in die Nacht.",
    "Die Preise für Strom und Gas steigen weiter.",
    "Ein kleiner Hund wartete geduldig vor dem Bäcker.",
    "Die Forscher veröffentlichten ihre Ergebnisse in einer Fachzeitschrift.",
    "Morgen soll es im ganzen Land regnen.",
]

FILLERS = ["sehr", "auch", "noch", "schon", "dort", "nun", "etwa", "fast", "kaum", "oft"]

# Mean number of edits per segment for each system.
SYSTEM_NOISE = {"sysA": 0.3, "sysB": 1.0, "sysC": 1.8, "sysD": 2.6, "sysE": 3.5}
# A fixed human-judgment offset per system, so DA is not a pure function
# of the edit counts.
DA_OFFSET = {"sysA": 0.05, "sysB": -0.10, "sysC": 0.12, "sysD": -0.04, "sysE": 0.02}


# Toy paraphrase pairs: positives reorder words of sentence1, negatives
# are unrelated, so every metric separates the classes perfectly.
PAWS = [
    ("1", "the cat sat on the mat", "on the mat the cat sat", 1),
    ("2", "prices rose sharply in march", "in march prices rose sharply", 1),
    ("3", "she reads a book every night", "every night she reads a book", 1),
    ("4", "the museum opens at nine", "rain is expected over the weekend", 0),
    ("5", "he drove to the coast", "our team lost the final game", 0),
    ("6", "a small dog waited outside", "the council approved a bike lane", 0),
]


def perturb(rng, sentence, edits):
    words = sentence.split()
    for _ in range(edits):
        op = rng.random()
        if op < 0.35 and len(words) > 3:
            del words[rng.randrange(len(words))]
        elif op < 0.7:
            words.insert(rng.randrange(len(words) + 1), rng.choice(FILLERS))
        else:
            i = rng.randrange(len(words) - 1)
            words[i], words[i + 1] = words[i + 1], words[i]
    return " ".join(words)


def word_vector(word):
    digest = hashlib.sha256(word.encode("utf-8")).digest()
    return [round(b / 127.5 - 1.0, 6) for b in digest[:DIM]]


def wordpieces(text):
    return text.lower().split()


def embed(text):
    pieces = wordpieces(text)
    rows = [word_vector(p) for p in pieces]
    sentence = [round(sum(r[k] for r in rows) / len(rows), 6) for k in range(DIM)]
    return {"text": text, "sentence_vector": sentence, "wordpieces": pieces,
            "token_vectors": rows}


def cosine(a, b):
    dot = sum(x * y for x, y in zip(a, b))
    return dot / math.sqrt(sum(x * x for x in a) * sum(y * y for y in b))


def idf_table(corpus):
    n = len(corpus)
    df = {}
    for sentence in corpus:
        for piece in set(sentence):
            df[piece] = df.get(piece, 0) + 1
    return {p: math.log(n / c) for p, c in df.items()}, math.log(n)


def greedy_f(x, xhat, idf, default):
    def side(a, b):
        num = den = 0.0
        for piece, row in zip(a["wordpieces"], a["token_vectors"]):
            w = idf.get(piece, default)
            num += w * max(cosine(row, other) for other in b["token_vectors"])
            den += w
        return num / den
    r = side(x, xhat)
    p = side(xhat, x)
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def pearson(xs, ys):
    n = len(xs)
    mx, my = sum(xs) / n, sum(ys) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(xs, ys))
    sxx = sum((a - mx) ** 2 for a in xs)
    syy = sum((b - my) ** 2 for b in ys)
    return sxy / math.sqrt(sxx * syy)


def tau(seg_scores, pairs):
    c = d = 0
    for seg, better, worse in pairs:
        if seg_scores[(better, seg)] > seg_scores[(worse, seg)]:
            c += 1
        else:
            d += 1
    return (c - d) / (c + d)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = random.Random(2019)
    (OUT / "newstest.de").write_text("\n".join(SOURCES) + "\n", encoding="utf-8")

    outputs, edits = {}, {}
    for system, noise in SYSTEM_NOISE.items():
        outputs[system], edits[system] = [], []
        for s in SOURCES:
            k = max(0, int(round(rng.gauss(noise, 0.8))))
            outputs[system].append(perturb(rng, s, k))
            edits[system].append(k)
        (OUT / f"{system}.out").write_text("\n".join(outputs[system]) + "\n",
                                           encoding="utf-8")

    (OUT / "paws_toy.tsv").write_text(
        "id\tsentence1\tsentence2\tlabel\n" +
        "".join(f"{i}\t{a}\t{b}\t{y}\n" for i, a, b, y in PAWS), encoding="utf-8")

    texts = sorted(set(SOURCES) | {o for outs in outputs.values() for o in outs} |
                   {t for _, a, b, _ in PAWS for t in (a, b)})
    emb = {t: embed(t) for t in texts}
    (OUT / "embeddings.jsonl").write_text(
        "".join(json.dumps(emb[t], ensure_ascii=False) + "\n" for t in texts),
        encoding="utf-8")

    da = {s: round(-sum(edits[s]) / len(SOURCES) / 3 + DA_OFFSET[s], 6) for s in outputs}
    (OUT / "da.csv").write_text(
        "system,score\n" + "".join(f"{s},{da[s]:.6f}\n" for s in sorted(da)),
        encoding="utf-8")

    pairs = []
    systems = sorted(outputs)
    for i in range(len(SOURCES)):
        seg = str(i + 1)
        for a in range(len(systems)):
            for b in range(a + 1, len(systems)):
                ea, eb = edits[systems[a]][i], edits[systems[b]][i]
                if abs(ea - eb) >= 2:
                    better, worse = (systems[a], systems[b]) if ea < eb else (systems[b], systems[a])
                    pairs.append((seg, better, worse))
    (OUT / "darr.tsv").write_text(
        "seg\tbetter\tworse\n" + "".join(f"{s}\t{b}\t{w}\n" for s, b, w in pairs),
        encoding="utf-8")

    (OUT / "config.toml").write_text("""\
# Synthetic de-en evaluation with an echo backward translator.
[testset]
pair = "de-en"
source = "newstest.de"

[submissions]
""" + "".join(f'{s} = "{s}.out"\n' for s in systems) + """
[bt]
id = "echo"
type = "echo"

[embedding.default]
id = "hashed-words"
type = "fixture"
path = "embeddings.jsonl"

[human]
da = "da.csv"
darr = "darr.tsv"

[run]
workers = 2
""", encoding="utf-8")

    input_pieces = [wordpieces(s) for s in SOURCES]
    idf, default = idf_table(input_pieces)
    system_scores = {m: {} for m in ("rtt-bleu", "rtt-sentbleu", "rtt-chrf", "rtt-sbert",
                                     "rtt-bertscore")}
    seg_scores = {m: {} for m in system_scores}
    for s in systems:
        hyps, refs = outputs[s], SOURCES
        per = {
            "rtt-bleu": [corpus_bleu([h], [r]) for h, r in zip(hyps, refs)],
            "rtt-sentbleu": [moses_sentence_bleu(tok(h, "intl", True), tok(r, "intl", True))
                             for h, r in zip(hyps, refs)],
            "rtt-chrf": [sentence_chrf(h, r) for h, r in zip(hyps, refs)],
            "rtt-sbert": [100 * cosine(emb[r]["sentence_vector"], emb[h]["sentence_vector"])
                          for h, r in zip(hyps, refs)],
            "rtt-bertscore": [100 * greedy_f(emb[r], emb[h], idf, default)
                              for h, r in zip(hyps, refs)],
        }
        for m, values in per.items():
            for i, v in enumerate(values):
                seg_scores[m][(s, str(i + 1))] = v
        system_scores["rtt-bleu"][s] = corpus_bleu(hyps, refs)
        system_scores["rtt-chrf"][s] = corpus_chrf(hyps, refs)
        for m in ("rtt-sentbleu", "rtt-sbert", "rtt-bertscore"):
            system_scores[m][s] = sum(per[m]) / len(per[m])

    rows = ["# metric\tquantity\tvalue"]
    for m in system_scores:
        for s in systems:
            rows.append(f"{m}\tsystem:{s}\t{system_scores[m][s]:.10f}")
        rows.append(f"{m}\tpearson\t{pearson([system_scores[m][s] for s in systems], [da[s] for s in systems]):.10f}")
        rows.append(f"{m}\ttau\t{tau(seg_scores[m], pairs):.10f}")
    (OUT / "expected.tsv").write_text("\n".join(rows) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
