"""Article ingestion: manifests, sentence filtering, comments, coreference."""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .conllu import ParsedSentence, parse_conllu
from .lexicon import BOILERPLATE_PATTERNS

logger = logging.getLogger(__name__)

# Reasons a body sentence is kept out of presentation and question generation.
TOO_SHORT = "TooShort"
TOO_LONG = "TooLong"
BAD_CHARS = "BadChars"
URL = "Url"
MULTI_SENTENCE_QUOTE = "MultiSentenceQuote"
BOILERPLATE = "Boilerplate"

MIN_TOKENS = 8
MAX_TOKENS = 80

_URL_RE = re.compile(r"https?://|www\.")
_BAD_CHARS = set("\\<>#")
_QUOTE_FORMS = {'"', "``", "''", "“", "”"}


class CorpusError(ValueError):
    """Bad manifest, comments file, or coreference sidecar."""


@dataclass(frozen=True)
class SentenceFilterVerdict:
    eligible: bool
    reasons: frozenset = frozenset()


@dataclass(frozen=True)
class CommentRecord:
    """One reader comment tied to a sentence of an article."""

    article_id: str
    sentence_position: int
    text: str
    kind: str = "comment"


@dataclass
class Article:
    """A parsed article: the title sentence at position 0, then the body."""

    article_id: str
    sentences: List[ParsedSentence]
    source_url: str = ""
    comments: List[CommentRecord] = field(default_factory=list)
    coref_chains: List[List[Tuple[int, int, int]]] = field(default_factory=list)

    @property
    def title(self) -> ParsedSentence:
        return self.sentences[0]

    @property
    def body(self) -> List[ParsedSentence]:
        return self.sentences[1:]


def detect_multi_sentence_quotes(sentences: Sequence[ParsedSentence]) -> Set[int]:
    """Positions covered by a double-quote region spanning sentences.

    A parity counter runs over straight and curly double quotes; a region
    that opens in one sentence and closes in a later one marks every
    position from the opening sentence through the closing one. A quote
    fully contained in one sentence marks nothing. A region still open at
    the end of the article extends to the last sentence.
    """
    marked: Set[int] = set()
    parity = 0
    open_start = 0
    for sent in sentences:
        count = sum(1 for tok in sent.tokens if tok.form in _QUOTE_FORMS)
        if count % 2 == 0:
            continue
        if parity == 0:
            parity = 1
            open_start = sent.position
        else:
            parity = 0
            marked.update(range(open_start, sent.position + 1))
    if parity == 1 and sentences:
        marked.update(range(open_start, sentences[-1].position + 1))
    return marked


def classify_sentence(
    sentence: ParsedSentence,
    quote_positions: Set[int],
    boilerplate_patterns: Sequence[str] = BOILERPLATE_PATTERNS,
) -> SentenceFilterVerdict:
    """Decide whether a sentence may be presented or asked about.

    The title (position 0) is never filtered.
    """
    if sentence.position == 0:
        return SentenceFilterVerdict(eligible=True)
    reasons = set()
    if len(sentence.tokens) < MIN_TOKENS:
        reasons.add(TOO_SHORT)
    if len(sentence.tokens) > MAX_TOKENS:
        reasons.add(TOO_LONG)
    if any(_URL_RE.search(tok.form) for tok in sentence.tokens):
        reasons.add(URL)
    if _BAD_CHARS & set(sentence.text):
        reasons.add(BAD_CHARS)
    if sentence.position in quote_positions:
        reasons.add(MULTI_SENTENCE_QUOTE)
    for pattern in boilerplate_patterns:
        if re.search(pattern, sentence.text):
            reasons.add(BOILERPLATE)
            break
    return SentenceFilterVerdict(eligible=not reasons, reasons=frozenset(reasons))


def classify_sentences(
    sentences: Sequence[ParsedSentence],
    boilerplate_patterns: Sequence[str] = BOILERPLATE_PATTERNS,
) -> List[SentenceFilterVerdict]:
    quotes = detect_multi_sentence_quotes(sentences)
    return [classify_sentence(s, quotes, boilerplate_patterns) for s in sentences]


def _load_comments(path: Path, article_id: str) -> List[CommentRecord]:
    records: List[CommentRecord] = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
            record = CommentRecord(
                article_id=row.get("article_id", article_id),
                sentence_position=int(row["sentence_position"]),
                text=str(row["text"]),
                kind=str(row.get("kind", "comment")),
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise CorpusError(f"{path}:{lineno}: bad comment record: {exc}") from exc
        records.append(record)
    return records


def _load_coref(path: Path) -> List[List[Tuple[int, int, int]]]:
    try:
        data = json.loads(path.read_text())
        chains = []
        for chain in data["chains"]:
            spans = []
            for span in chain:
                spans.append(
                    (int(span["position"]), int(span["start"]), int(span["end"]))
                )
            chains.append(spans)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise CorpusError(f"{path}: bad coreference sidecar: {exc}") from exc
    return chains


def load_article(
    conllu_path: Path,
    article_id: str,
    source_url: str = "",
    comments_path: Optional[Path] = None,
    coref_path: Optional[Path] = None,
) -> Article:
    """Load one article from its CoNLL-U file and optional sidecars."""
    conllu_path = Path(conllu_path)
    sentences = parse_conllu(conllu_path.read_text(), article_id=article_id)
    if not sentences:
        raise CorpusError(f"{conllu_path}: article has no sentences")
    article = Article(
        article_id=article_id, sentences=sentences, source_url=source_url
    )
    if comments_path is not None:
        article.comments = _load_comments(Path(comments_path), article_id)
    if coref_path is not None:
        article.coref_chains = _load_coref(Path(coref_path))
    return article


def load_corpus(root: Path) -> Dict[str, Article]:
    """Load every article listed in ``manifest.json`` under ``root``."""
    root = Path(root)
    manifest_path = root / "manifest.json"
    try:
        entries = json.loads(manifest_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CorpusError(f"cannot read manifest at {manifest_path}: {exc}") from exc
    articles: Dict[str, Article] = {}
    for entry in entries:
        try:
            article_id = entry["article_id"]
            conllu_rel = entry["conllu"]
        except (KeyError, TypeError) as exc:
            raise CorpusError(f"{manifest_path}: bad manifest entry {entry!r}") from exc
        comments = entry.get("comments")
        coref = entry.get("coref")
        articles[article_id] = load_article(
            root / conllu_rel,
            article_id,
            source_url=entry.get("url", ""),
            comments_path=root / comments if comments else None,
            coref_path=root / coref if coref else None,
        )
    logger.info("loaded %d articles from %s", len(articles), root)
    return articles
