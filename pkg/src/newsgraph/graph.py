"""The document graph: sentence, entity, question, and comment nodes.

Built once per article and immutable afterwards. Sentence nodes follow the
article order; a follow-up path (the discussion chain) links the title to a
strictly increasing sequence of body sentences; entities attach to the
sentences whose syntactic subject mentions them; question and comment nodes
attach to the sentence they target.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .chains import (
    ChainConfig,
    HeuristicScorer,
    Scorer,
    build_discussion_chain,
    textrank_scores,
)
from .conllu import ParsedSentence, Token
from .corpus import Article, CommentRecord, classify_sentences
from .lexicon import (
    BOILERPLATE_PATTERNS,
    GENERIC_COMMENT_PHRASES,
    ORG_NER,
    PERSON_NER,
)
from .questions import QuestionGenConfig, generate_questions

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

_NP_INTERNAL = ("det", "amod", "compound", "nummod")


class GraphSchemaError(ValueError):
    """A serialized graph that cannot be loaded safely."""


@dataclass(frozen=True)
class Mention:
    position: int
    start: int  # 1-based token index, inclusive
    end: int
    text: str
    ner: str = "O"


@dataclass(frozen=True)
class EntityNode:
    node_id: str
    name: str
    kind: str  # Person, Organization, Other
    mentions: Tuple[Mention, ...]


@dataclass(frozen=True)
class SentenceNode:
    node_id: str
    position: int
    text: str
    eligible: bool
    filter_reasons: Tuple[str, ...]
    tokens: Tuple[Token, ...]
    textrank: float = 0.0

    @property
    def is_title(self) -> bool:
        return self.position == 0


@dataclass(frozen=True)
class QuestionNode:
    node_id: str
    position: int
    qtype: str
    dep_path: str
    answer_index: int
    clause: str
    interrogative: Optional[str]
    subject_text: str

    @property
    def match_text(self) -> str:
        return self.interrogative if self.interrogative else self.clause


@dataclass(frozen=True)
class CommentNode:
    node_id: str
    position: int
    text: str
    kind: str = "comment"


@dataclass
class DocumentGraph:
    article_id: str
    sentences: List[SentenceNode]
    entities: List[EntityNode]
    questions: List[QuestionNode]
    comments: List[CommentNode]
    chain: List[int]
    subject_edges: List[Tuple[int, str]]
    schema_version: int = SCHEMA_VERSION

    def sentence(self, position: int) -> SentenceNode:
        return self.sentences[position]

    @property
    def title(self) -> SentenceNode:
        return self.sentences[0]

    def eligible_positions(self) -> List[int]:
        return [s.position for s in self.sentences if s.eligible]

    def questions_for(self, position: int) -> List[QuestionNode]:
        return [q for q in self.questions if q.position == position]

    def comments_for(self, position: int) -> List[CommentNode]:
        return [c for c in self.comments if c.position == position]

    def entity(self, node_id: str) -> Optional[EntityNode]:
        for ent in self.entities:
            if ent.node_id == node_id:
                return ent
        return None

    def sentences_for_entity(self, node_id: str) -> List[int]:
        return sorted(pos for pos, ent in self.subject_edges if ent == node_id)


# ---------------------------------------------------------------------------
# entity mentions


def _nominal_span(sentence: ParsedSentence, head: Token) -> Tuple[int, int]:
    keep = {head.index}
    stack = [head.index]
    while stack:
        idx = stack.pop()
        for dep in sentence.children(idx):
            internal = (
                dep.base_deprel in _NP_INTERNAL
                or dep.deprel == "nmod:poss"
                or (
                    dep.base_deprel == "flat"
                    and not sentence.dependents(dep.index, "case")
                )
            )
            if internal and dep.index not in keep:
                keep.add(dep.index)
                stack.append(dep.index)
    # Trim to the contiguous run around the head if anything fell out.
    lo = hi = head.index
    while lo - 1 in keep:
        lo -= 1
    while hi + 1 in keep:
        hi += 1
    return lo, hi


def extract_entity_mentions(sentence: ParsedSentence) -> List[Mention]:
    """Candidate entity mentions of one sentence.

    NER spans (maximal runs of one label) and nominal noun phrases both
    become mentions; overlapping spans keep the longest, and a surviving
    span inherits the label of any NER span it covers.
    """
    spans: List[Tuple[int, int, str, bool]] = []
    run_start = None
    run_label = "O"
    for tok in list(sentence.tokens) + [None]:
        label = tok.ner if tok is not None else "O"
        if label != run_label:
            if run_label != "O" and run_start is not None:
                end = (tok.index - 1) if tok is not None else len(sentence.tokens)
                spans.append((run_start, end, run_label, True))
            run_start = tok.index if tok is not None else None
            run_label = label
    for tok in sentence.tokens:
        if tok.upos in ("NOUN", "PROPN"):
            lo, hi = _nominal_span(sentence, tok)
            spans.append((lo, hi, "O", False))

    spans.sort(key=lambda s: (-(s[1] - s[0]), not s[3], s[0]))
    kept: List[Tuple[int, int, str]] = []
    for lo, hi, label, _ in spans:
        clash = False
        for k_lo, k_hi, _ in kept:
            if lo <= k_hi and k_lo <= hi:
                clash = True
                break
        if not clash:
            kept.append((lo, hi, label))
    # Inherit a label from any NER span the kept span covers.
    ner_spans = [(lo, hi, label) for lo, hi, label, is_ner in spans if is_ner]
    out: List[Mention] = []
    for lo, hi, label in sorted(kept):
        if label == "O":
            for n_lo, n_hi, n_label in ner_spans:
                if lo <= n_lo and n_hi <= hi:
                    label = n_label
                    break
        text = sentence.span_text(sentence.tokens[lo - 1:hi])
        out.append(
            Mention(position=sentence.position, start=lo, end=hi, text=text,
                    ner=label)
        )
    return out


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _mention_lemmas(sentence: ParsedSentence, mention: Mention) -> str:
    toks = sentence.tokens[mention.start - 1:mention.end]
    return " ".join((t.lemma or t.form).lower() for t in toks)


def _kind_from_ner(labels: Sequence[str]) -> str:
    for label in labels:
        if label in PERSON_NER:
            return "Person"
        if label in ORG_NER:
            return "Organization"
        if label != "O":
            return "Other"
    return "Other"


def resolve_coreference(
    sentences: Sequence[ParsedSentence],
    mentions: Sequence[Mention],
    coref_chains: Sequence[Sequence[Tuple[int, int, int]]] = (),
) -> List[EntityNode]:
    """Group mentions into entities.

    Merging passes run in order: sidecar coreference chains (exact span
    match), exact lemma match, person last-name match, organization
    acronym match; anything left is a singleton. The canonical name is the
    longest named-entity mention, falling back to the longest mention of
    any kind, earliest first on ties.
    """
    n = len(mentions)
    uf = _UnionFind(n)
    by_span = {(m.position, m.start, m.end): i for i, m in enumerate(mentions)}
    by_sentence = {s.position: s for s in sentences}

    for chain in coref_chains:
        linked = [by_span[span] for span in chain if tuple(span) in by_span]
        skipped = len(chain) - len(linked)
        if skipped:
            logger.info("coref chain: %d spans match no mention", skipped)
        for a, b in zip(linked, linked[1:]):
            uf.union(a, b)

    lemma_keys: Dict[str, int] = {}
    for i, m in enumerate(mentions):
        key = _mention_lemmas(by_sentence[m.position], m)
        if key in lemma_keys:
            uf.union(lemma_keys[key], i)
        else:
            lemma_keys[key] = i

    multi_person = [
        (i, m) for i, m in enumerate(mentions)
        if m.ner in PERSON_NER and m.end > m.start
    ]
    for i, m in enumerate(mentions):
        if m.ner in PERSON_NER and m.start == m.end:
            surname = m.text.lower()
            for j, other in multi_person:
                if other.text.split()[-1].lower() == surname:
                    uf.union(i, j)
                    break

    multi_org = [
        (i, m) for i, m in enumerate(mentions)
        if m.ner in ORG_NER and m.end > m.start
    ]
    for i, m in enumerate(mentions):
        if m.start == m.end and m.text.isupper() and len(m.text) >= 2:
            for j, other in multi_org:
                initials = "".join(w[0] for w in other.text.split()).upper()
                if initials == m.text:
                    uf.union(i, j)
                    break

    groups: Dict[int, List[Mention]] = {}
    for i, m in enumerate(mentions):
        groups.setdefault(uf.find(i), []).append(m)

    entities: List[EntityNode] = []
    ordered = sorted(
        groups.values(), key=lambda ms: min((m.position, m.start) for m in ms)
    )
    for idx, group in enumerate(ordered):
        group = sorted(group, key=lambda m: (m.position, m.start))
        canonical = max(
            group,
            key=lambda m: (m.ner != "O", len(m.text), -m.position, -m.start),
        )
        entities.append(
            EntityNode(
                node_id=f"e{idx}",
                name=canonical.text,
                kind=_kind_from_ner([m.ner for m in group]),
                mentions=tuple(group),
            )
        )
    return entities


def create_subject_edges(
    sentences: Sequence[ParsedSentence],
    entities: Sequence[EntityNode],
) -> List[Tuple[int, str]]:
    """Edges from sentences to entities mentioned in their subject."""
    edges: Set[Tuple[int, str]] = set()
    for sent in sentences:
        try:
            root = sent.root
        except Exception:
            continue
        for subj in sent.dependents(root.index, "nsubj", "nsubjpass"):
            for ent in entities:
                for m in ent.mentions:
                    if m.position == sent.position and m.start <= subj.index <= m.end:
                        edges.add((sent.position, ent.node_id))
                        break
    return sorted(edges)


# ---------------------------------------------------------------------------
# comments


def _normalize_phrase(text: str) -> str:
    return re.sub(r"[^a-z0-9' ]+", "", text.lower()).strip()


def attach_comments(
    records: Sequence[CommentRecord],
    chain: Sequence[int],
    generic_phrases: Sequence[str] = GENERIC_COMMENT_PHRASES,
) -> List[CommentNode]:
    """Keep comments that target a chain sentence and carry information.

    Comments shorter than two words, aimed off the follow-up path, or
    matching a generic phrase are dropped with a log line.
    """
    generic = {_normalize_phrase(p) for p in generic_phrases}
    on_path = set(chain)
    out: List[CommentNode] = []
    for record in records:
        if record.sentence_position not in on_path:
            logger.info(
                "comment dropped (target %d off the follow-up path): %.40r",
                record.sentence_position, record.text,
            )
            continue
        if len(record.text.split()) < 2:
            logger.info("comment dropped (too short): %.40r", record.text)
            continue
        if _normalize_phrase(record.text) in generic:
            logger.info("comment dropped (generic phrase): %.40r", record.text)
            continue
        out.append(
            CommentNode(
                node_id=f"c{len(out)}",
                position=record.sentence_position,
                text=record.text,
                kind=record.kind,
            )
        )
    return out


# ---------------------------------------------------------------------------
# build


def build_graph(
    article: Article,
    chain_scorer: Optional[Scorer] = None,
    chain_config: ChainConfig = ChainConfig(),
    question_config: QuestionGenConfig = QuestionGenConfig(),
    boilerplate_patterns: Sequence[str] = BOILERPLATE_PATTERNS,
    generic_phrases: Sequence[str] = GENERIC_COMMENT_PHRASES,
) -> DocumentGraph:
    """Build the document graph for one article.

    Sentence nodes keep their eligibility verdicts; the follow-up chain is
    constructed over eligible sentences with the given scorer (a fixed
    heuristic blend when none is passed); question nodes are generated for
    eligible sentences; comments attach to chain sentences.
    """
    verdicts = classify_sentences(article.sentences, boilerplate_patterns)
    eligible = [
        s for s, v in zip(article.sentences, verdicts) if v.eligible
    ]
    ranks = textrank_scores(eligible)
    sentence_nodes = [
        SentenceNode(
            node_id=f"s{s.position}",
            position=s.position,
            text=s.text,
            eligible=v.eligible,
            filter_reasons=tuple(sorted(v.reasons)),
            tokens=tuple(s.tokens),
            textrank=ranks.get(s.position, 0.0),
        )
        for s, v in zip(article.sentences, verdicts)
    ]

    if chain_scorer is None:
        chain_scorer = HeuristicScorer(ranks)
    chain = build_discussion_chain(
        [s.position for s in eligible], chain_scorer, chain_config
    )

    questions: List[QuestionNode] = []
    for sent in eligible:
        for i, q in enumerate(generate_questions(sent, question_config)):
            questions.append(
                QuestionNode(
                    node_id=f"q{sent.position}-{i}",
                    position=sent.position,
                    qtype=q.qtype,
                    dep_path=q.dep_path,
                    answer_index=q.answer_index,
                    clause=q.clause,
                    interrogative=q.interrogative,
                    subject_text=q.subject_text,
                )
            )

    mentions: List[Mention] = []
    for sent in eligible:
        mentions.extend(extract_entity_mentions(sent))
    entities = resolve_coreference(eligible, mentions, article.coref_chains)
    subject_edges = create_subject_edges(eligible, entities)

    comments = attach_comments(article.comments, chain, generic_phrases)

    return DocumentGraph(
        article_id=article.article_id,
        sentences=sentence_nodes,
        entities=entities,
        questions=questions,
        comments=comments,
        chain=chain,
        subject_edges=subject_edges,
    )


# ---------------------------------------------------------------------------
# serialization


def serialize_graph(graph: DocumentGraph) -> str:
    """Deterministic JSON for a document graph."""
    follow_up = [
        [graph.chain[i], graph.chain[i + 1]] for i in range(len(graph.chain) - 1)
    ]
    data = {
        "schema_version": graph.schema_version,
        "article_id": graph.article_id,
        "sentences": [
            {
                "id": s.node_id,
                "position": s.position,
                "text": s.text,
                "eligible": s.eligible,
                "filter_reasons": list(s.filter_reasons),
                "textrank": s.textrank,
                "tokens": [
                    [t.index, t.form, t.lemma, t.upos, t.head, t.deprel, t.ner]
                    for t in s.tokens
                ],
            }
            for s in graph.sentences
        ],
        "entities": [
            {
                "id": e.node_id,
                "name": e.name,
                "kind": e.kind,
                "mentions": [
                    {
                        "position": m.position,
                        "start": m.start,
                        "end": m.end,
                        "text": m.text,
                        "ner": m.ner,
                    }
                    for m in e.mentions
                ],
            }
            for e in graph.entities
        ],
        "questions": [
            {
                "id": q.node_id,
                "position": q.position,
                "qtype": q.qtype,
                "dep_path": q.dep_path,
                "answer_index": q.answer_index,
                "clause": q.clause,
                "interrogative": q.interrogative,
                "subject_text": q.subject_text,
            }
            for q in graph.questions
        ],
        "comments": [
            {
                "id": c.node_id,
                "position": c.position,
                "text": c.text,
                "kind": c.kind,
            }
            for c in graph.comments
        ],
        "edges": {
            "follow_up": follow_up,
            "subject": [[pos, ent] for pos, ent in graph.subject_edges],
            "question": [[q.node_id, q.position] for q in graph.questions],
            "comment": [[c.node_id, c.position] for c in graph.comments],
        },
    }
    return json.dumps(data, sort_keys=True, indent=2)


def _chain_from_edges(edges: Sequence[Sequence[int]]) -> List[int]:
    if not edges:
        return [0]
    outgoing: Dict[int, int] = {}
    for src, dst in edges:
        if src in outgoing:
            raise GraphSchemaError(
                f"sentence {src} has two outgoing follow-up edges"
            )
        outgoing[src] = dst
    if 0 not in outgoing:
        raise GraphSchemaError("follow-up path does not start at the title")
    chain = [0]
    while chain[-1] in outgoing:
        nxt = outgoing[chain[-1]]
        if nxt <= chain[-1]:
            raise GraphSchemaError("follow-up path is not strictly increasing")
        chain.append(nxt)
    if len(chain) != len(edges) + 1:
        raise GraphSchemaError("follow-up edges do not form a single path")
    return chain


def deserialize_graph(text: str) -> DocumentGraph:
    """Load a serialized graph, validating schema and edge invariants."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphSchemaError(f"not valid JSON: {exc}") from exc
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise GraphSchemaError(
            f"unsupported schema version {version!r}, expected {SCHEMA_VERSION}"
        )
    try:
        sentences = [
            SentenceNode(
                node_id=s["id"],
                position=int(s["position"]),
                text=s["text"],
                eligible=bool(s["eligible"]),
                filter_reasons=tuple(s["filter_reasons"]),
                tokens=tuple(
                    Token(
                        index=t[0], form=t[1], lemma=t[2], upos=t[3],
                        head=t[4], deprel=t[5], ner=t[6],
                    )
                    for t in s["tokens"]
                ),
                textrank=float(s["textrank"]),
            )
            for s in data["sentences"]
        ]
        entities = [
            EntityNode(
                node_id=e["id"],
                name=e["name"],
                kind=e["kind"],
                mentions=tuple(
                    Mention(
                        position=m["position"], start=m["start"],
                        end=m["end"], text=m["text"], ner=m["ner"],
                    )
                    for m in e["mentions"]
                ),
            )
            for e in data["entities"]
        ]
        questions = [
            QuestionNode(
                node_id=q["id"],
                position=int(q["position"]),
                qtype=q["qtype"],
                dep_path=q["dep_path"],
                answer_index=int(q["answer_index"]),
                clause=q["clause"],
                interrogative=q["interrogative"],
                subject_text=q["subject_text"],
            )
            for q in data["questions"]
        ]
        comments = [
            CommentNode(
                node_id=c["id"], position=int(c["position"]),
                text=c["text"], kind=c["kind"],
            )
            for c in data["comments"]
        ]
        edges = data["edges"]
        chain = _chain_from_edges(edges["follow_up"])
        subject_edges = [(int(pos), ent) for pos, ent in edges["subject"]]
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        if isinstance(exc, GraphSchemaError):
            raise
        raise GraphSchemaError(f"malformed graph payload: {exc}") from exc

    graph = DocumentGraph(
        article_id=data["article_id"],
        sentences=sentences,
        entities=entities,
        questions=questions,
        comments=comments,
        chain=chain,
        subject_edges=subject_edges,
        schema_version=version,
    )
    validate_graph(graph)
    return graph


def validate_graph(graph: DocumentGraph) -> None:
    """Check structural invariants; raises GraphSchemaError on violation."""
    positions = [s.position for s in graph.sentences]
    if positions != list(range(len(positions))):
        raise GraphSchemaError("sentence positions are not 0..n-1")
    if graph.chain and graph.chain[0] != 0:
        raise GraphSchemaError("follow-up path does not start at the title")
    if any(b <= a for a, b in zip(graph.chain, graph.chain[1:])):
        raise GraphSchemaError("follow-up path is not strictly increasing")
    eligible = {s.position for s in graph.sentences if s.eligible}
    for pos in graph.chain:
        if pos not in eligible:
            raise GraphSchemaError(f"chain sentence {pos} is not eligible")
    for q in graph.questions:
        if q.position not in eligible:
            raise GraphSchemaError(
                f"question {q.node_id} targets ineligible sentence {q.position}"
            )
    entity_ids = {e.node_id for e in graph.entities}
    for pos, ent in graph.subject_edges:
        if pos not in positions or ent not in entity_ids:
            raise GraphSchemaError(f"dangling subject edge ({pos}, {ent})")
    on_path = set(graph.chain)
    for c in graph.comments:
        if c.position not in on_path:
            raise GraphSchemaError(
                f"comment {c.node_id} targets off-path sentence {c.position}"
            )
