"""Question generation over dependency parses.

A sentence passes an eligibility gate, each question-worthy dependent of the
root becomes an answer target, the target resolves to a question type, and a
sentence plan is realized both as an interrogative ("What did the chairman
say?") and as an embedded clause ("what the chairman said") for use inside
introduction templates.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Set, Tuple

from .conllu import ParsedSentence, Token
from .lexicon import (
    DOUBLING_VERBS,
    IRREGULAR_PAST,
    LOCATION_NER,
    PAST_TO_LEMMA,
    PERSON_NER,
    PLACE_NOUNS,
    TEMPORAL_NER,
    TEMPORAL_NOUNS,
)
from .text import detokenize

logger = logging.getLogger(__name__)

QUESTION_TYPES = (
    "what", "who", "when", "where", "why", "how", "how_many", "whether",
)

# Eligibility skip reasons.
CLAUSAL_SUBJECT = "ClausalSubject"
NO_SUBJECT = "NoSubject"
MULTIPLE_SUBJECTS = "MultipleSubjects"
NEGATED_SUBJECT = "NegatedSubject"
PRECONJ_SUBJECT = "PreconjSubject"
BAD_PREDICATE_POS = "BadPredicatePos"
NEGATED_PREDICATE = "NegatedPredicate"

# Auxiliary strategies for the interrogative form.
FRONT_EXISTING_AUX = "FrontExistingAux"
DO_SUPPORT = "DoSupport"
COPULA_INVERSION = "CopulaInversion"
NO_AUX = "None"

_PREDICATE_POS = {"VERB", "NOUN", "ADJ"}

_VOWELS = set("aeiou")
_SIBILANT_ENDINGS = ("s", "x", "z", "ch", "sh")


class GenerationError(ValueError):
    """A sentence plan that cannot be realized."""


@dataclass(frozen=True)
class QuestionGenConfig:
    # When set, sentences whose predicate carries neg, cc, or conj
    # dependents are skipped instead of yielding whether-questions.
    strict_predicate_filter: bool = False
    # When set, whether-questions also get a polite interrogative wrapper;
    # by default they are realized in clause form only.
    realize_whether_interrogative: bool = False


@dataclass(frozen=True)
class EligibilityResult:
    eligible: bool
    skip_reason: Optional[str] = None
    subject: Optional[Token] = None


@dataclass(frozen=True)
class AnswerTarget:
    """One dependent (or the root itself) a question may ask about."""

    dep_path: str
    token: Token
    via: Optional[Token] = None  # the xcomp head for nested paths


@dataclass
class SentencePlan:
    """Constituents of one question before surface realization."""

    qtype: str
    qword: str
    subject_tokens: List[Token]
    aux_strategy: str
    predicate_tokens: List[Token]
    constituents: List[List[Token]]
    target: AnswerTarget
    sentence: ParsedSentence
    fronted: Optional[Token] = None
    do_form: Optional[str] = None
    root_lemma: Optional[str] = None
    folded_form: Optional[str] = None


@dataclass(frozen=True)
class GeneratedQuestion:
    qtype: str
    dep_path: str
    answer_index: int
    clause: str
    interrogative: Optional[str]
    subject_text: str


# ---------------------------------------------------------------------------
# verb conjugation


def present_3sg(lemma: str) -> str:
    if lemma == "be":
        return "is"
    if lemma == "have":
        return "has"
    if lemma.endswith("y") and len(lemma) > 1 and lemma[-2] not in _VOWELS:
        return lemma[:-1] + "ies"
    if lemma.endswith(_SIBILANT_ENDINGS) or lemma.endswith("o"):
        return lemma + "es"
    return lemma + "s"


def past_tense(lemma: str) -> str:
    if lemma in IRREGULAR_PAST:
        return IRREGULAR_PAST[lemma]
    if lemma.endswith("e"):
        return lemma + "d"
    if lemma.endswith("y") and len(lemma) > 1 and lemma[-2] not in _VOWELS:
        return lemma[:-1] + "ied"
    if lemma in DOUBLING_VERBS:
        return lemma + lemma[-1] + "ed"
    return lemma + "ed"


def conjugate(lemma: str, tense: str) -> str:
    """Inflect ``lemma`` for ``tense`` in {present, present_3sg, past}."""
    if not lemma:
        raise GenerationError("cannot conjugate an empty lemma")
    if tense == "past":
        return past_tense(lemma)
    if tense == "present_3sg":
        return present_3sg(lemma)
    if tense == "present":
        return lemma
    raise GenerationError(f"unknown tense {tense!r}")


def infer_tense(form: str, lemma: str) -> str:
    """Read the tense off an inflected verb form."""
    low = form.lower()
    if low == lemma:
        return "present"
    if low == present_3sg(lemma):
        return "present_3sg"
    if low == past_tense(lemma) or low in PAST_TO_LEMMA:
        return "past"
    if low.endswith("ed"):
        return "past"
    return "present"


_DO_BY_TENSE = {"past": "did", "present_3sg": "does", "present": "do"}


# ---------------------------------------------------------------------------
# eligibility


def check_eligibility(
    sentence: ParsedSentence, config: QuestionGenConfig = QuestionGenConfig()
) -> EligibilityResult:
    """Gate a sentence before any question is attempted."""
    root = sentence.root
    if sentence.dependents(root.index, "csubj", "csubjpass"):
        return EligibilityResult(False, CLAUSAL_SUBJECT)
    subjects = sentence.dependents(root.index, "nsubj", "nsubjpass")
    if not subjects:
        return EligibilityResult(False, NO_SUBJECT)
    if len(subjects) > 1:
        return EligibilityResult(False, MULTIPLE_SUBJECTS)
    subject = subjects[0]
    if sentence.dependents(subject.index, "neg"):
        return EligibilityResult(False, NEGATED_SUBJECT, subject)
    if any(t.deprel == "cc:preconj" for t in sentence.children(subject.index)):
        return EligibilityResult(False, PRECONJ_SUBJECT, subject)
    if root.upos not in _PREDICATE_POS:
        return EligibilityResult(False, BAD_PREDICATE_POS, subject)
    if config.strict_predicate_filter and (
        sentence.dependents(root.index, "neg", "cc", "conj")
    ):
        return EligibilityResult(False, NEGATED_PREDICATE, subject)
    return EligibilityResult(True, None, subject)


# ---------------------------------------------------------------------------
# answer targets


def enumerate_answer_targets(
    sentence: ParsedSentence, subject: Token
) -> List[AnswerTarget]:
    """Dependents of the root a question may mask, left to right."""
    root = sentence.root
    targets: List[AnswerTarget] = []
    if root.upos == "NOUN":
        targets.append(AnswerTarget("root", root))
    for dep in sentence.children(root.index):
        base = dep.base_deprel
        if base == "neg" and root.upos == "VERB":
            targets.append(AnswerTarget("root/neg", dep))
        elif base == "dep" and root.upos == "VERB":
            targets.append(AnswerTarget("root/dep", dep))
        elif base == "ccomp":
            targets.append(AnswerTarget("root/ccomp", dep))
        elif base == "dobj":
            targets.append(AnswerTarget("root/dobj", dep))
        elif dep.deprel == "nmod:tmod":
            targets.append(AnswerTarget("root/nmod:tmod", dep))
        elif base == "nmod":
            targets.append(AnswerTarget("root/nmod", dep))
        elif base == "advcl":
            targets.append(AnswerTarget("root/advcl", dep))
        elif base == "xcomp":
            targets.append(AnswerTarget("root/xcomp", dep))
            for sub in sentence.children(dep.index):
                sub_base = sub.base_deprel
                if sub_base == "ccomp":
                    targets.append(AnswerTarget("root/xcomp/ccomp", sub, via=dep))
                elif sub_base == "dobj":
                    targets.append(AnswerTarget("root/xcomp/dobj", sub, via=dep))
                elif sub_base == "nmod":
                    targets.append(AnswerTarget("root/xcomp/nmod", sub, via=dep))
    for dep in sentence.dependents(subject.index, "nummod"):
        targets.append(
            AnswerTarget(f"root/{subject.base_deprel}/nummod", dep, via=subject)
        )
    targets.sort(key=lambda t: t.token.index)
    return targets


def _in_person_span(sentence: ParsedSentence, token: Token) -> bool:
    return token.ner in PERSON_NER


def _is_temporal(sentence: ParsedSentence, token: Token) -> bool:
    if token.ner in TEMPORAL_NER:
        return True
    if token.lemma.lower() in TEMPORAL_NOUNS:
        return True
    return token.form.isdigit() and len(token.form) == 4


def _is_place(sentence: ParsedSentence, token: Token) -> bool:
    return token.ner in LOCATION_NER or token.lemma.lower() in PLACE_NOUNS


def determine_question_types(
    sentence: ParsedSentence, target: AnswerTarget
) -> List[str]:
    """Question types a target admits, most specific first."""
    path = target.dep_path
    token = target.token
    if path == "root":
        return ["what"]
    if path == "root/neg":
        return ["whether"]
    if path in ("root/dep", "root/ccomp", "root/xcomp/ccomp"):
        return ["what"]
    if path in ("root/dobj", "root/xcomp/dobj"):
        return ["who"] if _in_person_span(sentence, token) else ["what"]
    if path == "root/nmod:tmod":
        return ["when"]
    if path in ("root/nmod", "root/xcomp/nmod"):
        cases = sentence.dependents(token.index, "case")
        case_lemma = cases[0].lemma.lower() if cases else ""
        if case_lemma in ("because", "due"):
            return ["why"]
        if case_lemma in ("by", "with", "via"):
            return ["how"]
        if case_lemma in ("in", "at", "on"):
            if _is_place(sentence, token):
                return ["where"]
            if _is_temporal(sentence, token):
                return ["when"]
            return ["what"]
        if _is_temporal(sentence, token):
            return ["when"]
        return ["what"]
    if path == "root/advcl":
        marks = sentence.dependents(token.index, "mark")
        mark_lemma = marks[0].lemma.lower() if marks else ""
        if mark_lemma in ("because", "since", "as"):
            return ["why"]
        if mark_lemma in ("after", "before", "when", "while", "once", "until"):
            return ["when"]
        if mark_lemma == "by":
            return ["how"]
        return ["what"]
    if path == "root/xcomp":
        if token.upos == "ADJ":
            return ["how"]
        return ["what"]
    if path.endswith("/nummod"):
        return ["how_many"]
    raise GenerationError(f"unknown answer path {path!r}")


_QWORDS = {
    "what": "what", "who": "who", "when": "when", "where": "where",
    "why": "why", "how": "how", "how_many": "how many", "whether": "whether",
}

_PREDICATE_GROUP = ("aux", "auxpass", "neg")
_CONSTITUENT_RELS = ("iobj", "dobj", "nmod")


def _predicate_tokens(sentence: ParsedSentence, root: Token) -> List[Token]:
    group = [root]
    for dep in sentence.children(root.index):
        if dep.base_deprel in _PREDICATE_GROUP or dep.deprel in (
            "cop",
            "compound:prt",
        ):
            group.append(dep)
    group.sort(key=lambda t: t.index)
    return group


def answer_token_indexes(sentence: ParsedSentence, target: AnswerTarget) -> Set[int]:
    """Token indexes covered by the answer constituent."""
    if target.dep_path == "root":
        root = target.token
        keep = {root.index}
        for dep in sentence.children(root.index):
            if dep.base_deprel in ("det", "amod", "compound", "nummod", "nmod",
                                   "acl", "case"):
                keep.update(t.index for t in sentence.subtree(dep.index))
        return keep
    return {t.index for t in sentence.subtree(target.token.index)}


def build_sentence_plan(
    sentence: ParsedSentence,
    target: AnswerTarget,
    qtype: str,
    subject: Token,
) -> SentencePlan:
    """Assemble the constituents of one question.

    The plan is the question word, the subject, the predicate under an
    auxiliary strategy, and the root's other in-scope dependents (iobj,
    dobj, nmod, plus the xcomp chain for nested targets) in original order,
    with the answer constituent left out.

    Args:
        sentence: the parsed source sentence.
        target: the answer constituent being masked.
        qtype: resolved question type.
        subject: the root's subject dependent.

    Returns:
        A SentencePlan ready for realization.

    Raises:
        GenerationError: when no grammatical plan exists.
    """
    root = sentence.root
    answer = answer_token_indexes(sentence, target)

    subject_tokens = sentence.subtree(subject.index)
    if qtype == "how_many":
        dropped = {t.index for t in sentence.subtree(target.token.index)}
        subject_tokens = [t for t in subject_tokens if t.index not in dropped]
        if not subject_tokens:
            raise GenerationError("subject vanished after dropping the numeral")

    predicate = _predicate_tokens(sentence, root)
    if target.dep_path == "root":
        predicate = [t for t in predicate if t.index != root.index]

    folded_form = None
    if qtype == "whether":
        predicate = [t for t in predicate if t.base_deprel != "neg"]
        aux_left = [t for t in predicate if t.base_deprel in ("aux", "auxpass")]
        if aux_left and aux_left[0].lemma.lower() == "do":
            do_aux = aux_left[0]
            predicate = [t for t in predicate if t.index != do_aux.index]
            folded_form = conjugate(
                root.lemma.lower(), infer_tense(do_aux.form, "do")
            )

    # Pick the auxiliary strategy for the interrogative surface.
    auxes = [t for t in predicate if t.base_deprel in ("aux", "auxpass")]
    cops = [t for t in predicate if t.deprel == "cop"]
    fronted = None
    do_form = None
    root_lemma = None
    if qtype == "how_many":
        strategy = NO_AUX
    elif auxes:
        strategy = FRONT_EXISTING_AUX
        fronted = auxes[0]
    elif root.upos == "VERB":
        strategy = DO_SUPPORT
        tense = infer_tense(root.form, root.lemma.lower())
        do_form = _DO_BY_TENSE[tense]
        root_lemma = root.lemma.lower()
    elif cops:
        strategy = COPULA_INVERSION
        fronted = cops[0]
    else:
        strategy = NO_AUX

    # Collect the other in-scope constituents, skipping the answer.
    groups: List[List[Token]] = []

    def add_group(head: Token) -> None:
        toks = sentence.subtree(head.index)
        if any(t.index in answer for t in toks):
            return
        groups.append(toks)

    for dep in sentence.children(root.index):
        if dep.index in answer:
            continue
        if dep.base_deprel in _CONSTITUENT_RELS or dep.deprel == "nmod:tmod":
            add_group(dep)
    if target.via is not None and target.via.base_deprel == "xcomp":
        xcomp = target.via
        chain: List[Token] = list(sentence.dependents(xcomp.index, "mark"))
        chain.append(xcomp)
        chain.sort(key=lambda t: t.index)
        groups.append(chain)
        for dep in sentence.children(xcomp.index):
            if dep.index in answer or dep.base_deprel == "mark":
                continue
            if dep.base_deprel in _CONSTITUENT_RELS:
                add_group(dep)
    groups.sort(key=lambda g: g[0].index)

    return SentencePlan(
        qtype=qtype,
        qword=_QWORDS[qtype],
        subject_tokens=subject_tokens,
        aux_strategy=strategy,
        predicate_tokens=predicate,
        constituents=groups,
        target=target,
        sentence=sentence,
        fronted=fronted,
        do_form=do_form,
        root_lemma=root_lemma,
        folded_form=folded_form,
    )


# ---------------------------------------------------------------------------
# realization


def _token_form(token: Token) -> str:
    """Surface form with sentence-initial decapitalization."""
    form = token.form
    if (
        token.index == 1
        and form[:1].isupper()
        and token.upos not in ("PROPN",)
        and form != "I"
        and not form.isupper()
    ):
        return form[0].lower() + form[1:]
    return form


def _forms(tokens: Sequence[Token]) -> List[str]:
    return [_token_form(t) for t in tokens]


def _predicate_forms(plan: SentencePlan, fronting: bool) -> List[str]:
    root = plan.sentence.root
    out: List[str] = []
    for tok in plan.predicate_tokens:
        if fronting and plan.fronted is not None and tok.index == plan.fronted.index:
            continue
        if tok.index == root.index:
            if plan.folded_form is not None:
                out.append(plan.folded_form)
            elif fronting and plan.aux_strategy == DO_SUPPORT:
                out.append(plan.root_lemma or tok.lemma.lower())
            else:
                out.append(_token_form(tok))
        else:
            out.append(_token_form(tok))
    return out


def realize_clause(plan: SentencePlan) -> str:
    """Embedded-clause surface, original inflection kept: no inversion."""
    words: List[str] = [plan.qword]
    words.extend(_forms(plan.subject_tokens))
    words.extend(_predicate_forms(plan, fronting=False))
    for group in plan.constituents:
        words.extend(_forms(group))
    return detokenize(words)


def realize_interrogative(plan: SentencePlan) -> str:
    """Question surface with the auxiliary strategy applied."""
    words: List[str] = [plan.qword]
    if plan.aux_strategy == NO_AUX:
        words.extend(_forms(plan.subject_tokens))
        words.extend(_predicate_forms(plan, fronting=False))
    elif plan.aux_strategy == DO_SUPPORT:
        words.append(plan.do_form or "did")
        words.extend(_forms(plan.subject_tokens))
        words.extend(_predicate_forms(plan, fronting=True))
    else:
        if plan.fronted is None:
            raise GenerationError("no auxiliary available to front")
        words.append(_token_form(plan.fronted))
        words.extend(_forms(plan.subject_tokens))
        words.extend(_predicate_forms(plan, fronting=True))
    for group in plan.constituents:
        words.extend(_forms(group))
    text = detokenize(words + ["?"])
    return text[0].upper() + text[1:]


def generate_questions(
    sentence: ParsedSentence, config: QuestionGenConfig = QuestionGenConfig()
) -> List[GeneratedQuestion]:
    """All questions a sentence yields, one per answer target.

    Each target takes its first resolved question type only. Targets whose
    plan fails to realize are skipped with a log line rather than aborting
    the sentence.
    """
    elig = check_eligibility(sentence, config)
    if not elig.eligible or elig.subject is None:
        return []
    out: List[GeneratedQuestion] = []
    for target in enumerate_answer_targets(sentence, elig.subject):
        try:
            qtype = determine_question_types(sentence, target)[0]
            plan = build_sentence_plan(sentence, target, qtype, elig.subject)
            clause = realize_clause(plan)
            if qtype == "whether" and not config.realize_whether_interrogative:
                interrogative: Optional[str] = None
            elif qtype == "whether":
                interrogative = f"Do you know {clause}?"
            else:
                interrogative = realize_interrogative(plan)
        except GenerationError as exc:
            logger.info(
                "sentence %d target %s skipped: %s",
                sentence.position, target.dep_path, exc,
            )
            continue
        out.append(
            GeneratedQuestion(
                qtype=qtype,
                dep_path=target.dep_path,
                answer_index=target.token.index,
                clause=clause,
                interrogative=interrogative,
                subject_text=detokenize(_forms(sentence.subtree(elig.subject.index))),
            )
        )
    return out
