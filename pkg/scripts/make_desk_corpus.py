"""Generate the small checked-in corpus under corpus/.

Every article is synthetic: token rows are authored through small clause
builders so each dependency tree is valid by construction. The corpus is
deterministic; re-running the script rewrites identical files.

Usage: python3 scripts/make_desk_corpus.py [--out corpus]
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path
from random import Random
from typing import List, Optional, Sequence, Tuple

Row = List[object]  # [form, lemma, upos, xpos, head, deprel, ner]

_MOD_RELS = {"DET": "det", "ADJ": "amod", "NUM": "nummod", "PRON": "nmod:poss"}


def _word(spec: str) -> Tuple[str, str, str, str]:
    """Split a "form/UPOS/lemma/NER" spec; lemma and NER may be omitted."""
    parts = spec.split("/")
    form = parts[0]
    upos = parts[1] if len(parts) > 1 and parts[1] else "NOUN"
    lemma = parts[2] if len(parts) > 2 and parts[2] else form.lower()
    ner = parts[3] if len(parts) > 3 and parts[3] else "O"
    return form, lemma, upos, ner


def np_rows(specs: Sequence[str], rel: str, head: int, start: int
            ) -> Tuple[List[Row], int]:
    """Rows for a flat nominal phrase; the last word is the phrase head."""
    k = len(specs)
    head_index = start + k
    rows: List[Row] = []
    for i, spec in enumerate(specs):
        form, lemma, upos, ner = _word(spec)
        if i == k - 1:
            rows.append([form, lemma, upos, "_", head, rel, ner])
        else:
            mod_rel = _MOD_RELS.get(upos, "compound")
            rows.append([form, lemma, upos, "_", head_index, mod_rel, ner])
    return rows, head_index


def clause(
    start: int,
    subj: Sequence[str],
    verb: str,
    obj: Optional[Sequence[str]] = None,
    pps: Sequence[Tuple[str, Sequence[str]]] = (),
    adv: Optional[str] = None,
    aux: Optional[str] = None,
    neg: bool = False,
    root_rel: Tuple[str, int] = ("root", 0),
    subj_rel: str = "nsubj",
    punct: bool = True,
) -> Tuple[List[Row], int]:
    """Rows for one finite clause with a verbal root.

    Word order is subject, adverb, auxiliary, negation, verb, object,
    prepositional phrases, final period. Returns (rows, root index).
    """
    root_index = (
        start + len(subj) + (1 if adv else 0) + (1 if aux else 0)
        + (1 if neg else 0) + 1
    )
    rows, _ = np_rows(subj, subj_rel, root_index, start)
    if adv:
        form, lemma, upos, ner = _word(adv)
        rows.append([form, lemma, upos, "_", root_index, "advmod", ner])
    if aux:
        form, lemma, upos, ner = _word(aux)
        rel = "auxpass" if subj_rel == "nsubjpass" else "aux"
        rows.append([form, lemma, upos, "_", root_index, rel, ner])
    if neg:
        rows.append(["not", "not", "PART", "_", root_index, "neg", "O"])
    form, lemma, upos, ner = _word(verb)
    deprel, head = root_rel
    rows.append([form, lemma, upos, "_", head, deprel, ner])
    cursor = start + len(rows)
    if obj:
        obj_rows, _ = np_rows(obj, "dobj", root_index, cursor)
        rows.extend(obj_rows)
        cursor += len(obj_rows)
    for prep, np in pps:
        p_form, p_lemma, p_upos, p_ner = _word(prep if "/" in prep
                                               else prep + "/ADP")
        np_head = cursor + 1 + len(np)
        rows.append([p_form, p_lemma, p_upos, "_", np_head, "case", p_ner])
        cursor += 1
        pp_rows, _ = np_rows(np, "nmod", root_index, cursor)
        rows.extend(pp_rows)
        cursor += len(pp_rows)
    if punct:
        rows.append([".", ".", "PUNCT", "_", root_index, "punct", "O"])
    return rows, root_index


def said_that(
    subj: Sequence[str],
    verb: str,
    inner_subj: Sequence[str],
    inner_verb: str,
    inner_obj: Optional[Sequence[str]] = None,
    inner_pps: Sequence[Tuple[str, Sequence[str]]] = (),
    inner_aux: Optional[str] = None,
    pps: Sequence[Tuple[str, Sequence[str]]] = (),
) -> List[Row]:
    """Reporting clause with a that-complement: "X said that Y ...."."""
    rows, root = clause(0, subj, verb, pps=pps, punct=False)
    mark_index = len(rows) + 1
    inner_root = (
        mark_index + len(inner_subj) + (1 if inner_aux else 0) + 1
    )
    rows.append(["that", "that", "SCONJ", "_", inner_root, "mark", "O"])
    inner_rows, _ = clause(
        len(rows), inner_subj, inner_verb, obj=inner_obj, pps=inner_pps,
        aux=inner_aux, root_rel=("ccomp", root), punct=False,
    )
    rows.extend(inner_rows)
    rows.append([".", ".", "PUNCT", "_", root, "punct", "O"])
    return rows


def copula_np(subj: Sequence[str], cop: str, pred: Sequence[str],
              pps: Sequence[Tuple[str, Sequence[str]]] = ()) -> List[Row]:
    """Nominal-predicate clause: "X is a Y."; the predicate noun is root."""
    pred_root = len(subj) + 1 + len(pred)
    rows, _ = np_rows(subj, "nsubj", pred_root, 0)
    form, lemma, upos, ner = _word(cop)
    rows.append([form, lemma, upos, "_", pred_root, "cop", ner])
    pred_rows, _ = np_rows(pred, "root", 0, len(rows))
    rows.extend(pred_rows)
    cursor = len(rows)
    for prep, np in pps:
        p_form, p_lemma, p_upos, p_ner = _word(prep + "/ADP")
        np_head = cursor + 1 + len(np)
        rows.append([p_form, p_lemma, p_upos, "_", np_head, "case", p_ner])
        cursor += 1
        pp_rows, _ = np_rows(np, "nmod", pred_root, cursor)
        rows.extend(pp_rows)
        cursor += len(pp_rows)
    rows.append([".", ".", "PUNCT", "_", pred_root, "punct", "O"])
    return rows


def title_np(specs: Sequence[str],
             pps: Sequence[Tuple[str, Sequence[str]]] = ()) -> List[Row]:
    """Headline noun phrase with no verb (root is the phrase head)."""
    rows, head = np_rows(specs, "root", 0, 0)
    cursor = len(rows)
    for prep, np in pps:
        p_form, p_lemma, p_upos, p_ner = _word(prep + "/ADP")
        np_head = cursor + 1 + len(np)
        rows.append([p_form, p_lemma, p_upos, "_", np_head, "case", p_ner])
        cursor += 1
        pp_rows, _ = np_rows(np, "nmod", head, cursor)
        rows.extend(pp_rows)
        cursor += len(pp_rows)
    return rows


def simple(subj, verb, obj=None, **kw) -> List[Row]:
    rows, _ = clause(0, subj, verb, obj=obj, **kw)
    return rows


def _detokenize(forms: Sequence[str]) -> str:
    out = ""
    no_space_before = {".", ",", "!", "?", ";", ":", "''", ")", "%"}
    no_space_after = {"``", "("}
    prev = ""
    for form in forms:
        if out and form not in no_space_before and prev not in no_space_after:
            out += " "
        out += form
        prev = form
    return out


def render(sentences: Sequence[List[Row]]) -> str:
    blocks = []
    for rows in sentences:
        lines = ["# text = " + _detokenize([r[0] for r in rows])]
        for i, row in enumerate(rows, start=1):
            form, lemma, upos, xpos, head, deprel, ner = row
            misc = f"NER={ner}" if ner != "O" else "_"
            lines.append(
                f"{i}\t{form}\t{lemma}\t{upos}\t{xpos}\t_\t{head}\t{deprel}"
                f"\t_\t{misc}"
            )
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def article_a1() -> List[List[Row]]:
    """Texas politics: carries the statement sentence used by the CLI demo."""
    hinojosa = [
        ["Party", "Party", "PROPN", "_", 4, "compound", "O"],
        ["chairman", "chairman", "NOUN", "_", 4, "compound", "O"],
        ["Gilberto", "Gilberto", "PROPN", "_", 4, "compound", "PERSON"],
        ["Hinojosa", "Hinojosa", "PROPN", "_", 5, "nsubj", "PERSON"],
        ["said", "say", "VERB", "_", 0, "root", "O"],
        ["in", "in", "ADP", "_", 8, "case", "O"],
        ["a", "a", "DET", "_", 8, "det", "O"],
        ["statement", "statement", "NOUN", "_", 5, "nmod", "O"],
        ["that", "that", "SCONJ", "_", 13, "mark", "O"],
        ["Texas", "Texas", "PROPN", "_", 11, "compound", "LOCATION"],
        ["Democrats", "Democrats", "PROPN", "_", 13, "nsubj", "O"],
        ["overwhelmingly", "overwhelmingly", "ADV", "_", 13, "advmod", "O"],
        ["want", "want", "VERB", "_", 5, "ccomp", "O"],
        ["better", "better", "ADJ", "_", 15, "amod", "O"],
        ["schools", "school", "NOUN", "_", 13, "dobj", "O"],
        [".", ".", "PUNCT", "_", 5, "punct", "O"],
    ]
    return [
        simple(["Texas/PROPN//LOCATION", "Democrats/PROPN"], "unveil/VERB",
               ["a/DET", "new/ADJ", "education/NOUN", "plan/NOUN"],
               punct=False),
        simple(["The/DET", "state/NOUN", "party/NOUN"],
               "released/VERB/release",
               ["a/DET", "ten-point/ADJ", "education/NOUN", "plan/NOUN"],
               pps=[("on", ["Tuesday/PROPN//DATE"])]),
        hinojosa,
        simple(["The/DET", "plan/NOUN"], "proposes/VERB/propose",
               ["higher/ADJ", "teacher/NOUN", "salaries/NOUN/salary"],
               pps=[("across", ["the/DET", "state/NOUN"])]),
        said_that(["Republican/ADJ", "leaders/NOUN/leader"],
                  "argued/VERB/argue",
                  ["the/DET", "proposal/NOUN"], "lacks/VERB/lack",
                  ["a/DET", "funding/NOUN", "source/NOUN"]),
        # Clausal subject: skipped by question eligibility.
        [
            ["What", "what", "PRON", "_", 3, "dobj", "O"],
            ["voters", "voter", "NOUN", "_", 3, "nsubj", "O"],
            ["decide", "decide", "VERB", "_", 4, "csubj", "O"],
            ["depends", "depend", "VERB", "_", 0, "root", "O"],
            ["on", "on", "ADP", "_", 7, "case", "O"],
            ["school", "school", "NOUN", "_", 7, "compound", "O"],
            ["outcomes", "outcome", "NOUN", "_", 4, "nmod", "O"],
            [".", ".", "PUNCT", "_", 4, "punct", "O"],
        ],
        simple(["Polling/NOUN"], "starts/VERB/start", punct=True,
               pps=[("in", ["March/PROPN//DATE"])]),
        simple(["The/DET", "campaign/NOUN"], "begins/VERB/begin",
               ["a/DET", "statewide/ADJ", "bus/NOUN", "tour/NOUN"],
               pps=[("after", ["the/DET", "primary/NOUN"])]),
    ]


def article_a2() -> List[List[Row]]:
    """The clean-energy article; body mirrors the shared test fixture."""
    fixture = FIXTURES / "google_taiwan.conllu"
    sentences: List[List[Row]] = []
    for block in fixture.read_text().strip().split("\n\n"):
        rows = []
        for line in block.splitlines():
            if line.startswith("#"):
                continue
            cols = line.split("\t")
            ner = "O"
            if cols[9].startswith("NER="):
                ner = cols[9][4:]
            rows.append([cols[1], cols[2], cols[3], cols[4], int(cols[6]),
                         cols[7], ner])
        sentences.append(rows)
    # One boilerplate line the sentence filter should drop.
    boiler = [
        ["Read", "read", "VERB", "_", 0, "root", "O"],
        ["more", "more", "ADV", "_", 1, "advmod", "O"],
        [":", ":", "PUNCT", "_", 1, "punct", "O"],
        ["our", "our", "PRON", "_", 5, "nmod:poss", "O"],
        ["coverage", "coverage", "NOUN", "_", 1, "dobj", "O"],
        ["of", "of", "ADP", "_", 8, "case", "O"],
        ["solar", "solar", "ADJ", "_", 8, "amod", "O"],
        ["power", "power", "NOUN", "_", 5, "nmod", "O"],
        [".", ".", "PUNCT", "_", 1, "punct", "O"],
    ]
    sentences.append(boiler)
    return sentences


def article_a3() -> List[List[Row]]:
    """The private space-flight article used by the chat and serve demos."""
    return [
        title_np(["The/DET", "billionaire/ADJ", "space/NOUN", "race/NOUN"]),
        simple(["Wealthy/ADJ", "entrepreneurs/NOUN/entrepreneur"],
               "join/VERB",
               ["the/DET", "commercial/ADJ", "space/NOUN", "race/NOUN"],
               pps=[("with", ["private/ADJ", "fortunes/NOUN/fortune"])]),
        said_that(["Industry/NOUN", "observers/NOUN/observer"],
                  "note/VERB",
                  ["billionaires/NOUN/billionaire",
                   "Elon/PROPN//PERSON", "Musk/PROPN//PERSON"],
                  "lead/VERB",
                  ["the/DET", "new/ADJ", "wave/NOUN"]),
        simple(["South/ADJ", "African-born/ADJ", "businessman/NOUN",
                "Elon/PROPN//PERSON", "Musk/PROPN//PERSON"],
               "started/VERB/start",
               ["SpaceX/PROPN/SpaceX/ORGANIZATION"],
               pps=[("in", ["2002/NUM//DATE"]),
                    ("with", ["an/DET", "ambition/NOUN"])]),
        simple(["Amazon/PROPN//ORGANIZATION", "founder/NOUN",
                "Jeff/PROPN//PERSON", "Bezos/PROPN//PERSON"],
               "founded/VERB/found",
               ["Blue/PROPN//ORGANIZATION", "Origin/PROPN//ORGANIZATION"],
               pps=[("in", ["2000/NUM//DATE"])]),
        simple(["Blue/PROPN//ORGANIZATION", "Origin/PROPN//ORGANIZATION"],
               "secures/VERB/secure",
               ["lucrative/ADJ", "government/NOUN", "contracts/NOUN/contract"],
               adv="now/ADV"),
        simple(["Blue/PROPN//ORGANIZATION", "Origin/PROPN//ORGANIZATION"],
               "develops/VERB/develop",
               ["rocket/NOUN", "systems/NOUN/system"],
               pps=[("for", ["the/DET", "US/PROPN//ORGANIZATION",
                             "Air/PROPN//ORGANIZATION",
                             "Force/PROPN//ORGANIZATION"])]),
        simple(["Sir/PROPN//PERSON", "Richard/PROPN//PERSON",
                "Branson/PROPN//PERSON"],
               "backs/VERB/back",
               ["Virgin/PROPN//ORGANIZATION",
                "Galactic/PROPN//ORGANIZATION"],
               pps=[("with", ["his/PRON", "own/ADJ", "fortune/NOUN"])]),
        simple(["The/DET", "company/NOUN"],
               "plans/VERB/plan",
               ["commercial/ADJ", "flights/NOUN/flight"],
               pps=[("within", ["two/NUM", "years/NOUN/year"])]),
    ]


def article_a4() -> List[List[Row]]:
    """Electric vehicle batteries."""
    return [
        simple(["A/DET", "battery/NOUN", "breakthrough/NOUN"],
               "cuts/VERB/cut", ["charging/NOUN", "times/NOUN/time"],
               punct=False),
        simple(["Researchers/NOUN/researcher"],
               "demonstrated/VERB/demonstrate",
               ["a/DET", "solid-state/ADJ", "battery/NOUN", "cell/NOUN"],
               pps=[("at", ["a/DET", "lab/NOUN"]),
                    ("in", ["Munich/PROPN//LOCATION"])]),
        simple(["The/DET", "prototype/NOUN", "cell/NOUN"],
               "charges/VERB/charge", ["its/PRON", "full/ADJ", "capacity/NOUN"],
               pps=[("in", ["nine/NUM", "minutes/NOUN/minute"])]),
        # Preconjunct subject: skipped by question eligibility.
        [
            ["Both", "both", "CCONJ", "_", 3, "cc:preconj", "O"],
            ["the", "the", "DET", "_", 3, "det", "O"],
            ["industry", "industry", "NOUN", "_", 7, "nsubj", "O"],
            ["and", "and", "CCONJ", "_", 3, "cc", "O"],
            ["the", "the", "DET", "_", 6, "det", "O"],
            ["regulators", "regulator", "NOUN", "_", 3, "conj", "O"],
            ["welcomed", "welcome", "VERB", "_", 0, "root", "O"],
            ["the", "the", "DET", "_", 9, "det", "O"],
            ["results", "result", "NOUN", "_", 7, "dobj", "O"],
            [".", ".", "PUNCT", "_", 7, "punct", "O"],
        ],
        said_that(["The/DET", "lead/NOUN", "engineer/NOUN"],
                  "cautioned/VERB/caution",
                  ["mass/NOUN", "production/NOUN"],
                  "remains/VERB/remain",
                  ["a/DET", "major/ADJ", "hurdle/NOUN"]),
        # URL token: dropped by the sentence filter.
        [
            ["Details", "detail", "NOUN", "_", 2, "nsubj", "O"],
            ["appear", "appear", "VERB", "_", 0, "root", "O"],
            ["at", "at", "ADP", "_", 4, "case", "O"],
            ["https://example.org/battery", "https://example.org/battery",
             "X", "_", 2, "nmod", "O"],
            [".", ".", "PUNCT", "_", 2, "punct", "O"],
        ],
        simple(["Carmakers/NOUN/carmaker"], "plan/VERB",
               ["pilot/NOUN", "lines/NOUN/line"],
               pps=[("for", ["next/ADJ", "year/NOUN"])]),
        copula_np(["The/DET", "announcement/NOUN"], "was/AUX/be",
                  ["a/DET", "surprise/NOUN"],
                  pps=[("for", ["many/ADJ", "analysts/NOUN/analyst"])]),
    ]


def article_a5() -> List[List[Row]]:
    """City marathon."""
    return [
        title_np(["A/DET", "record/NOUN", "day/NOUN"],
                 pps=[("for", ["the/DET", "city/NOUN", "marathon/NOUN"])]),
        simple(["Fifty/NUM", "thousand/NUM", "runners/NOUN/runner"],
               "entered/VERB/enter",
               ["the/DET", "race/NOUN"],
               pps=[("on", ["Sunday/PROPN//DATE"])]),
        simple(["The/DET", "defending/ADJ", "champion/NOUN"],
               "finished/VERB/finish",
               pps=[("in", ["second/ADJ", "place/NOUN"])]),
        # Two bare subjects under one root: skipped by question eligibility.
        [
            ["Crowds", "crowd", "NOUN", "_", 2, "nsubj", "O"],
            ["cheered", "cheer", "VERB", "_", 0, "root", "O"],
            ["along", "along", "ADP", "_", 5, "case", "O"],
            ["the", "the", "DET", "_", 5, "det", "O"],
            ["route", "route", "NOUN", "_", 2, "nmod", "O"],
            [",", ",", "PUNCT", "_", 2, "punct", "O"],
            ["bands", "band", "NOUN", "_", 2, "nsubj", "O"],
            ["played", "play", "VERB", "_", 2, "conj", "O"],
            [".", ".", "PUNCT", "_", 2, "punct", "O"],
        ],
        simple(["The/DET", "winner/NOUN"], "set/VERB",
               ["a/DET", "course/NOUN", "record/NOUN"],
               pps=[("by", ["forty/NUM", "seconds/NOUN/second"])]),
        # Markup characters: dropped by the sentence filter.
        [
            ["Results", "result", "NOUN", "_", 2, "nsubj", "O"],
            ["use", "use", "VERB", "_", 0, "root", "O"],
            ["the", "the", "DET", "_", 5, "det", "O"],
            ["tag", "tag", "NOUN", "_", 5, "compound", "O"],
            ["#marathon", "#marathon", "X", "_", 2, "dobj", "O"],
            [".", ".", "PUNCT", "_", 2, "punct", "O"],
        ],
        simple(["Organizers/NOUN/organizer"], "promised/VERB/promise",
               ["wider/ADJ", "start/NOUN", "corrals/NOUN/corral"],
               pps=[("for", ["next/ADJ", "year/NOUN"])]),
        copula_np(["The/DET", "weather/NOUN"], "was/AUX/be",
                  ["a/DET", "gift/NOUN"],
                  pps=[("for", ["the/DET", "runners/NOUN/runner"])]),
    ]


def article_a6() -> List[List[Row]]:
    """Coral reefs."""
    return [
        simple(["Scientists/NOUN/scientist"], "map/VERB",
               ["a/DET", "recovering/ADJ", "reef/NOUN"], punct=False),
        simple(["A/DET", "survey/NOUN", "team/NOUN"],
               "mapped/VERB/map",
               ["three/NUM", "reef/NOUN", "systems/NOUN/system"],
               pps=[("near", ["the/DET", "northern/ADJ", "coast/NOUN"])]),
        simple(["Coral/NOUN", "cover/NOUN"], "grew/VERB/grow",
               pps=[("by", ["a/DET", "fifth/NOUN"]),
                    ("over", ["five/NUM", "years/NOUN/year"])]),
        # Numeric predicate: skipped by question eligibility.
        [
            ["The", "the", "DET", "_", 4, "det", "O"],
            ["official", "official", "ADJ", "_", 4, "amod", "O"],
            ["colony", "colony", "NOUN", "_", 4, "compound", "O"],
            ["count", "count", "NOUN", "_", 7, "nsubj", "O"],
            ["is", "be", "AUX", "_", 7, "cop", "O"],
            ["now", "now", "ADV", "_", 7, "advmod", "O"],
            ["forty-two", "forty-two", "NUM", "_", 0, "root", "NUMBER"],
            [".", ".", "PUNCT", "_", 7, "punct", "O"],
        ],
        said_that(["Marine/ADJ", "biologists/NOUN/biologist"],
                  "reported/VERB/report",
                  ["water/NOUN", "temperatures/NOUN/temperature"],
                  "stabilized/VERB/stabilize",
                  inner_pps=[("after", ["the/DET", "last/ADJ",
                                        "bleaching/NOUN", "event/NOUN"])]),
        # Imperative: no subject, skipped by question eligibility.
        [
            ["Consider", "consider", "VERB", "_", 0, "root", "O"],
            ["the", "the", "DET", "_", 4, "det", "O"],
            ["staghorn", "staghorn", "NOUN", "_", 4, "compound", "O"],
            ["colonies", "colony", "NOUN", "_", 1, "dobj", "O"],
            ["near", "near", "ADP", "_", 7, "case", "O"],
            ["the", "the", "DET", "_", 7, "det", "O"],
            ["channel", "channel", "NOUN", "_", 1, "nmod", "O"],
            [".", ".", "PUNCT", "_", 1, "punct", "O"],
        ],
        simple(["The/DET", "park/NOUN", "service/NOUN"],
               "limits/VERB/limit",
               ["visitor/NOUN", "numbers/NOUN/number"],
               pps=[("during", ["spawning/NOUN", "season/NOUN"])]),
        simple(["Divers/NOUN/diver"], "replanted/VERB/replant",
               ["nursery/NOUN", "fragments/NOUN/fragment"],
               pps=[("across", ["the/DET", "damaged/ADJ", "zones/NOUN/zone"])]),
    ]


def article_a7() -> List[List[Row]]:
    """Chess engine exhibition."""
    return [
        simple(["An/DET", "amateur/NOUN"], "beats/VERB/beat",
               ["a/DET", "chess/NOUN", "engine/NOUN"], punct=False),
        simple(["A/DET", "club/NOUN", "player/NOUN"],
               "defeated/VERB/defeat",
               ["a/DET", "famous/ADJ", "chess/NOUN", "engine/NOUN"],
               pps=[("in", ["an/DET", "exhibition/NOUN", "match/NOUN"])]),
        # Negated subject: skipped by question eligibility.
        [
            ["No", "no", "DET", "_", 2, "neg", "O"],
            ["grandmaster", "grandmaster", "NOUN", "_", 3, "nsubj", "O"],
            ["expected", "expect", "VERB", "_", 0, "root", "O"],
            ["the", "the", "DET", "_", 5, "det", "O"],
            ["result", "result", "NOUN", "_", 3, "dobj", "O"],
            ["at", "at", "ADP", "_", 8, "case", "O"],
            ["this", "this", "DET", "_", 8, "det", "O"],
            ["level", "level", "NOUN", "_", 3, "nmod", "O"],
            [".", ".", "PUNCT", "_", 3, "punct", "O"],
        ],
        simple(["The/DET", "engine/NOUN"], "sacrificed/VERB/sacrifice",
               ["its/PRON", "queen/NOUN"],
               pps=[("on", ["move/NOUN", "thirty/NUM"])]),
        said_that(["Commentators/NOUN/commentator"], "joked/VERB/joke",
                  ["the/DET", "machine/NOUN"], "chose/VERB/choose",
                  ["chaos/NOUN"]),
        simple(["The/DET", "player/NOUN"], "credited/VERB/credit",
               ["months/NOUN/month"],
               pps=[("of", ["endgame/NOUN", "practice/NOUN"])]),
        simple(["The/DET", "match/NOUN"], "drew/VERB/draw",
               ["a/DET", "large/ADJ", "online/ADJ", "audience/NOUN"],
               pps=[("over", ["two/NUM", "evenings/NOUN/evening"])]),
        copula_np(["The/DET", "rematch/NOUN"], "is/AUX/be",
                  ["an/DET", "open/ADJ", "question/NOUN"],
                  pps=[("for", ["both/DET", "camps/NOUN/camp"])]),
    ]


def article_a8() -> List[List[Row]]:
    """Offshore wind farm."""
    return [
        title_np(["Steady/ADJ", "winds/NOUN/wind"],
                 pps=[("for", ["an/DET", "island/NOUN", "grid/NOUN"])]),
        simple(["An/DET", "offshore/ADJ", "wind/NOUN", "farm/NOUN"],
               "began/VERB/begin", ["operations/NOUN/operation"],
               pps=[("off", ["the/DET", "island/NOUN", "coast/NOUN"])]),
        simple(["Forty/NUM", "turbines/NOUN/turbine"],
               "supply/VERB", ["most/ADJ", "households/NOUN/household"],
               pps=[("on", ["the/DET", "island/NOUN"])]),
        said_that(["The/DET", "utility/NOUN"], "says/VERB/say",
                  ["storage/NOUN", "batteries/NOUN/battery"],
                  "cover/VERB", ["calm/ADJ", "days/NOUN/day"]),
        simple(["Fishermen/NOUN/fisherman"], "negotiated/VERB/negotiate",
               ["new/ADJ", "routes/NOUN/route"],
               pps=[("around", ["the/DET", "towers/NOUN/tower"])]),
        simple(["The/DET", "project/NOUN"], "created/VERB/create",
               ["eighty/NUM", "maintenance/NOUN", "jobs/NOUN/job"],
               pps=[("in", ["the/DET", "harbor/NOUN", "town/NOUN"])]),
        copula_np(["The/DET", "expansion/NOUN"], "is/AUX/be",
                  ["a/DET", "bet/NOUN"],
                  pps=[("on", ["steady/ADJ", "winds/NOUN/wind"])]),
        simple(["Engineers/NOUN/engineer"], "monitor/VERB",
               ["the/DET", "cables/NOUN/cable"],
               pps=[("from", ["a/DET", "control/NOUN", "room/NOUN"])]),
    ]


def article_a9() -> List[List[Row]]:
    """Museum heist recovered."""
    quote_open = [
        ["``", "``", "PUNCT", "_", 4, "punct", "O"],
        ["We", "we", "PRON", "_", 4, "nsubj", "O"],
        ["never", "never", "ADV", "_", 4, "advmod", "O"],
        ["stopped", "stop", "VERB", "_", 0, "root", "O"],
        ["looking", "look", "VERB", "_", 4, "xcomp", "O"],
        [",", ",", "PUNCT", "_", 4, "punct", "O"],
    ]
    quote_close = [
        ["the", "the", "DET", "_", 2, "det", "O"],
        ["curator", "curator", "NOUN", "_", 3, "nsubj", "O"],
        ["said", "say", "VERB", "_", 0, "root", "O"],
        [".", ".", "PUNCT", "_", 3, "punct", "O"],
        ["''", "''", "PUNCT", "_", 3, "punct", "O"],
    ]
    return [
        simple(["A/DET", "stolen/ADJ", "painting/NOUN"],
               "returns/VERB/return", punct=False,
               pps=[("after", ["twenty/NUM", "years/NOUN/year"])]),
        simple(["Police/NOUN"], "recovered/VERB/recover",
               ["a/DET", "stolen/ADJ", "landscape/NOUN", "painting/NOUN"],
               pps=[("in", ["a/DET", "storage/NOUN", "unit/NOUN"])]),
        quote_open,
        quote_close,
        simple(["The/DET", "museum/NOUN"], "plans/VERB/plan",
               ["a/DET", "special/ADJ", "exhibition/NOUN"],
               pps=[("for", ["the/DET", "homecoming/NOUN"])]),
        said_that(["Investigators/NOUN/investigator"],
                  "believe/VERB",
                  ["the/DET", "canvas/NOUN"],
                  "changed/VERB/change", ["hands/NOUN/hand"],
                  inner_pps=[("between", ["private/ADJ",
                                          "collectors/NOUN/collector"])]),
        simple(["Conservators/NOUN/conservator"], "found/VERB/find",
               ["minor/ADJ", "frame/NOUN", "damage/NOUN"],
               pps=[("during", ["the/DET", "inspection/NOUN"])]),
        simple(["The/DET", "reward/NOUN", "fund/NOUN"],
               "pays/VERB/pay", ["an/DET", "anonymous/ADJ", "tipster/NOUN"],
               pps=[("during", ["the/DET", "week/NOUN"])]),
    ]


def article_a10() -> List[List[Row]]:
    """Quantum computing chip."""
    return [
        simple(["A/DET", "quantum/ADJ", "chip/NOUN"],
               "clears/VERB/clear", ["an/DET", "error/NOUN", "threshold/NOUN"],
               punct=False),
        simple(["A/DET", "university/NOUN", "lab/NOUN"],
               "unveiled/VERB/unveil",
               ["a/DET", "new/ADJ", "quantum/ADJ", "processor/NOUN"],
               pps=[("with", ["256/NUM", "qubits/NOUN/qubit"])]),
        simple(["The/DET", "chip/NOUN"], "corrects/VERB/correct",
               ["its/PRON", "own/ADJ", "errors/NOUN/error"],
               pps=[("during", ["long/ADJ", "calculations/NOUN/calculation"])]),
        # Clausal subject: skipped by question eligibility.
        [
            ["What", "what", "PRON", "_", 3, "dobj", "O"],
            ["the", "the", "DET", "_", 3, "det", "O"],
            ["demo", "demo", "NOUN", "_", 4, "nsubj", "O"],
            ["showed", "show", "VERB", "_", 5, "csubj", "O"],
            ["surprised", "surprise", "VERB", "_", 0, "root", "O"],
            ["the", "the", "DET", "_", 7, "det", "O"],
            ["reviewers", "reviewer", "NOUN", "_", 5, "dobj", "O"],
            [".", ".", "PUNCT", "_", 5, "punct", "O"],
        ],
        said_that(["The/DET", "team/NOUN"], "claims/VERB/claim",
                  ["the/DET", "design/NOUN"], "scales/VERB/scale",
                  inner_pps=[("to", ["a/DET", "thousand/NUM",
                                     "qubits/NOUN/qubit"])]),
        simple(["Rivals/NOUN/rival"], "questioned/VERB/question",
               ["the/DET", "benchmark/NOUN", "choice/NOUN"],
               pps=[("in", ["early/ADJ", "reactions/NOUN/reaction"])]),
        simple(["The/DET", "lab/NOUN"], "posted/VERB/post",
               ["its/PRON", "raw/ADJ", "data/NOUN"],
               pps=[("for", ["outside/ADJ", "review/NOUN"])]),
        copula_np(["The/DET", "milestone/NOUN"], "is/AUX/be",
                  ["a/DET", "decade-long/ADJ", "goal/NOUN"],
                  pps=[("for", ["the/DET", "whole/ADJ", "field/NOUN"])]),
    ]


def article_a11() -> List[List[Row]]:
    """Rare bird sighting."""
    return [
        title_np(["A/DET", "rare/ADJ", "visitor/NOUN"],
                 pps=[("at", ["the/DET", "coastal/ADJ", "wetland/NOUN"])]),
        simple(["A/DET", "Siberian/ADJ", "thrush/NOUN"],
               "appeared/VERB/appear",
               pps=[("at", ["a/DET", "coastal/ADJ", "wetland/NOUN"]),
                    ("on", ["Friday/PROPN//DATE"])]),
        # Too short for presentation: dropped by the sentence filter.
        simple(["Birders/NOUN/birder"], "came/VERB/come"),
        simple(["Several/ADJ", "hundred/NUM", "birders/NOUN/birder"],
               "arrived/VERB/arrive",
               pps=[("with", ["cameras/NOUN/camera"]),
                    ("before", ["dawn/NOUN"])]),
        said_that(["Rangers/NOUN/ranger"], "said/VERB/say",
                  ["the/DET", "bird/NOUN"], "feeds/VERB/feed",
                  inner_pps=[("near", ["the/DET", "reed/NOUN", "beds/NOUN/bed"])]),
        simple(["Volunteers/NOUN/volunteer"], "roped/VERB/rope",
               ["a/DET", "viewing/NOUN", "corridor/NOUN"],
               pps=[("along", ["the/DET", "trail/NOUN"])]),
        simple(["The/DET", "sighting/NOUN"], "marks/VERB/mark",
               ["a/DET", "first/ADJ", "record/NOUN"],
               pps=[("for", ["the/DET", "region/NOUN"])]),
    ]


def article_a12() -> List[List[Row]]:
    """Startup funding round."""
    return [
        title_np(["A/DET", "fresh/ADJ", "bet/NOUN"],
                 pps=[("on", ["warehouse/NOUN", "robots/NOUN/robot"])]),
        simple(["A/DET", "warehouse/NOUN", "robotics/NOUN", "startup/NOUN"],
               "raised/VERB/raise",
               ["ninety/NUM", "million/NUM", "dollars/NOUN/dollar"],
               pps=[("in", ["a/DET", "new/ADJ", "round/NOUN"])]),
        simple(["The/DET", "company/NOUN"], "doubled/VERB/double",
               ["its/PRON", "deployed/ADJ", "fleet/NOUN"],
               pps=[("during", ["the/DET", "past/ADJ", "year/NOUN"])]),
        said_that(["The/DET", "founders/NOUN/founder"], "said/VERB/say",
                  ["the/DET", "money/NOUN"], "funds/VERB/fund",
                  ["a/DET", "second/ADJ", "factory/NOUN"]),
        simple(["Investors/NOUN/investor"], "cited/VERB/cite",
               ["strong/ADJ", "repeat/NOUN", "orders/NOUN/order"],
               pps=[("from", ["grocery/NOUN", "chains/NOUN/chain"])]),
        # Boilerplate credit line: dropped by the sentence filter.
        [
            ["Image", "image", "NOUN", "_", 2, "compound", "O"],
            ["Credits", "credit", "NOUN", "_", 0, "root", "O"],
            [":", ":", "PUNCT", "_", 2, "punct", "O"],
            ["staff", "staff", "NOUN", "_", 5, "compound", "O"],
            ["photo", "photo", "NOUN", "_", 2, "appos", "O"],
            [".", ".", "PUNCT", "_", 2, "punct", "O"],
        ],
        simple(["The/DET", "firm/NOUN"], "hires/VERB/hire",
               ["fifty/NUM", "engineers/NOUN/engineer"],
               pps=[("across", ["three/NUM", "offices/NOUN/office"])]),
        copula_np(["The/DET", "valuation/NOUN"], "is/AUX/be",
                  ["a/DET", "company/NOUN", "record/NOUN"],
                  pps=[("for", ["the/DET", "young/ADJ", "firm/NOUN"])]),
    ]


ARTICLES = {
    "a1": (article_a1, "https://example.org/texas-education"),
    "a2": (article_a2, "https://example.org/clean-energy-taiwan"),
    "a3": (article_a3, "https://example.org/billionaire-space-race"),
    "a4": (article_a4, "https://example.org/solid-state-battery"),
    "a5": (article_a5, "https://example.org/city-marathon"),
    "a6": (article_a6, "https://example.org/coral-reef-survey"),
    "a7": (article_a7, "https://example.org/chess-engine-upset"),
    "a8": (article_a8, "https://example.org/island-wind-farm"),
    "a9": (article_a9, "https://example.org/painting-recovered"),
    "a10": (article_a10, "https://example.org/quantum-chip"),
    "a11": (article_a11, "https://example.org/rare-thrush"),
    "a12": (article_a12, "https://example.org/robotics-funding"),
}

COMMENTS = {
    "a2": [
        {"sentence_position": 4, "text": "that's a good deal for Google"},
        {"sentence_position": 2, "text": "solar in Tainan makes sense"},
        {"sentence_position": 4, "text": "wow"},
    ],
    "a3": [
        {"sentence_position": 2,
         "text": "this probably won't happen in their lifetime"},
        {"sentence_position": 5,
         "text": "government contracts are where the real money is"},
        {"sentence_position": 1, "text": "nice"},
    ],
    "a7": [
        {"sentence_position": 4,
         "text": "the queen sacrifice was pure showmanship"},
    ],
    "a10": [
        {"sentence_position": 2,
         "text": "error correction is the whole ballgame"},
    ],
}

COREF = {
    # "The company" in a2 sentence 2 refers to Google.
    "a2": [[
        {"position": 0, "start": 1, "end": 1},
        {"position": 1, "start": 1, "end": 1},
        {"position": 2, "start": 1, "end": 2},
        {"position": 3, "start": 1, "end": 1},
        {"position": 4, "start": 4, "end": 4},
    ]],
    # "The company" in a3 sentence 8 refers to Virgin Galactic; the Musk
    # mentions in sentences 2 and 3 are one person.
    "a3": [
        [
            {"position": 7, "start": 5, "end": 6},
            {"position": 8, "start": 1, "end": 2},
        ],
        [
            {"position": 2, "start": 5, "end": 7},
            {"position": 3, "start": 1, "end": 5},
        ],
    ],
}


def chain_rows(article_ids: Sequence[str], eligible: dict, rng: Random,
               flip_rate: float = 0.0) -> List[dict]:
    """Labeled (context, candidate) rows; the adjacent candidate is positive."""
    rows = []
    for aid in article_ids:
        positions = eligible[aid]
        for ctx_len in (1, 2, 3):
            for i in range(len(positions) - ctx_len):
                context = positions[i:i + ctx_len]
                nxt = positions[i + ctx_len]
                for candidate in positions[i + ctx_len:i + ctx_len + 3]:
                    label = 1 if candidate == nxt else 0
                    if flip_rate and rng.random() < flip_rate:
                        label = 1 - label
                    rows.append({
                        "article_id": aid,
                        "context": list(context),
                        "candidate": candidate,
                        "label": label,
                    })
    return rows


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="corpus", type=Path)
    args = parser.parse_args()
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)

    manifest = []
    for aid, (builder, url) in ARTICLES.items():
        sentences = builder()
        (out / f"{aid}.conllu").write_text(render(sentences))
        entry = {"article_id": aid, "conllu": f"{aid}.conllu", "url": url}
        if aid in COMMENTS:
            lines = [
                json.dumps({"article_id": aid, **c}, sort_keys=True)
                for c in COMMENTS[aid]
            ]
            (out / f"{aid}.comments.jsonl").write_text("\n".join(lines) + "\n")
            entry["comments"] = f"{aid}.comments.jsonl"
        if aid in COREF:
            (out / f"{aid}.coref.json").write_text(
                json.dumps({"chains": COREF[aid]}, indent=2, sort_keys=True)
            )
            entry["coref"] = f"{aid}.coref.json"
        manifest.append(entry)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2))

    # Sanity pass through the package's own loader and filters, and collect
    # filter-eligible positions for the synthetic chain-training rows.
    from newsgraph.corpus import classify_sentences, load_corpus

    articles = load_corpus(out)
    eligible = {}
    total = 0
    kept = 0
    for aid, article in articles.items():
        verdicts = classify_sentences(article.sentences)
        eligible[aid] = [
            s.position for s, v in zip(article.sentences, verdicts) if v.eligible
        ]
        total += len(article.sentences)
        kept += len(eligible[aid])
    print(f"{len(articles)} articles, {total} sentences, {kept} pass filters")

    rng = Random(11)
    ids = sorted(articles, key=lambda a: int(a[1:]))
    train_ids, val_ids, test_ids = ids[:8], ids[8:10], ids[10:]
    for name, subset, flip in (
        ("chain_train", train_ids, 0.08),
        ("chain_val", val_ids, 0.0),
        ("chain_test", test_ids, 0.0),
    ):
        rows = chain_rows(subset, eligible, rng, flip)
        lines = [json.dumps(r, sort_keys=True) for r in rows]
        (out / f"{name}.jsonl").write_text("\n".join(lines) + "\n")
        print(f"{name}: {len(rows)} rows")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
