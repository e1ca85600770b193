"""CoNLL-U reading: tokens, sentences, and dependency-tree access helpers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence

from .text import detokenize

NER_KEY = "NER="


class ConlluError(ValueError):
    """Malformed CoNLL-U input (bad column count, ids, or fields)."""


class SentenceStructureError(ConlluError):
    """A sentence whose head pointers do not form a single rooted tree."""


@dataclass(frozen=True)
class Token:
    """One syntactic word. ``index`` is 1-based; ``head`` 0 means the root."""

    index: int
    form: str
    lemma: str
    upos: str
    head: int
    deprel: str
    ner: str = "O"

    @property
    def base_deprel(self) -> str:
        """Relation label with any subtype stripped (``nmod:tmod`` -> ``nmod``)."""
        return self.deprel.split(":", 1)[0]


@dataclass
class ParsedSentence:
    """A dependency-parsed sentence within an article.

    ``position`` is the 0-based sentence index; position 0 is the title.
    """

    tokens: List[Token]
    text: str
    position: int = 0
    article_id: str = ""
    _children: Optional[Dict[int, List[Token]]] = field(
        default=None, repr=False, compare=False
    )

    def __len__(self) -> int:
        return len(self.tokens)

    def token(self, index: int) -> Token:
        return self.tokens[index - 1]

    @property
    def root(self) -> Token:
        for tok in self.tokens:
            if tok.head == 0:
                return tok
        raise SentenceStructureError(f"sentence {self.position} has no root")

    def children(self, index: int) -> List[Token]:
        """Direct dependents of the token at ``index``, in surface order."""
        if self._children is None:
            table: Dict[int, List[Token]] = {}
            for tok in self.tokens:
                table.setdefault(tok.head, []).append(tok)
            object.__setattr__(self, "_children", table)
        return list(self._children.get(index, []))

    def dependents(self, index: int, *deprels: str) -> List[Token]:
        """Direct dependents whose relation matches any of ``deprels``.

        A name without a subtype matches any subtype of that relation, so
        ``nsubj`` also matches ``nsubj:xsubj`` while ``nmod:tmod`` matches
        only the exact label.
        """
        out = []
        for tok in self.children(index):
            for want in deprels:
                if tok.deprel == want or (":" not in want and tok.base_deprel == want):
                    out.append(tok)
                    break
        return out

    def subtree(self, index: int) -> List[Token]:
        """All tokens of the subtree rooted at ``index``, in surface order."""
        keep = {index}
        stack = [index]
        while stack:
            for tok in self.children(stack.pop()):
                if tok.index not in keep:
                    keep.add(tok.index)
                    stack.append(tok.index)
        return [tok for tok in self.tokens if tok.index in keep]

    def span_text(self, tokens: Sequence[Token]) -> str:
        return detokenize([t.form for t in tokens])

    def subtree_text(self, index: int) -> str:
        return self.span_text(self.subtree(index))


def _validate_tree(tokens: List[Token], position: int) -> None:
    n = len(tokens)
    roots = [t for t in tokens if t.head == 0]
    if len(roots) != 1:
        raise SentenceStructureError(
            f"sentence {position}: expected exactly one root, found {len(roots)}"
        )
    for tok in tokens:
        if not 0 <= tok.head <= n:
            raise SentenceStructureError(
                f"sentence {position}: token {tok.index} head {tok.head} out of range"
            )
    # Walk up from every token; a cycle never reaches the root.
    for tok in tokens:
        seen = set()
        cur = tok.head
        while cur != 0:
            if cur in seen:
                raise SentenceStructureError(
                    f"sentence {position}: cycle through token {cur}"
                )
            seen.add(cur)
            cur = tokens[cur - 1].head


def _parse_token_line(line: str, lineno: int) -> Optional[Token]:
    cols = line.split("\t")
    if len(cols) != 10:
        raise ConlluError(f"line {lineno}: expected 10 columns, got {len(cols)}")
    tok_id = cols[0]
    if "-" in tok_id or "." in tok_id:
        # Multiword-token ranges and empty nodes carry no tree structure.
        return None
    try:
        index = int(tok_id)
    except ValueError as exc:
        raise ConlluError(f"line {lineno}: bad token id {tok_id!r}") from exc
    try:
        head = int(cols[6])
    except ValueError as exc:
        raise ConlluError(f"line {lineno}: bad head {cols[6]!r}") from exc
    ner = "O"
    if cols[9] != "_":
        for part in cols[9].split("|"):
            if part.startswith(NER_KEY):
                ner = part[len(NER_KEY):] or "O"
    lemma = cols[2] if cols[2] != "_" else cols[1].lower()
    return Token(
        index=index,
        form=cols[1],
        lemma=lemma,
        upos=cols[3],
        head=head,
        deprel=cols[7],
        ner=ner,
    )


def _iter_blocks(text: str) -> Iterator[tuple[int, List[str]]]:
    block: List[str] = []
    start = 1
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip():
            if not block:
                start = lineno
            block.append(line)
        elif block:
            yield start, block
            block = []
    if block:
        yield start, block


def parse_conllu(text: str, article_id: str = "") -> List[ParsedSentence]:
    """Parse CoNLL-U text into sentences with validated tree structure.

    Sentences are separated by blank lines; ``# text = ...`` comments are
    used as the sentence surface when present, otherwise the surface is
    detokenized from the forms. NER labels are read from a ``NER=`` key in
    the MISC column.
    """
    sentences: List[ParsedSentence] = []
    for start, block in _iter_blocks(text):
        surface: Optional[str] = None
        tokens: List[Token] = []
        for offset, line in enumerate(block):
            if line.startswith("#"):
                comment = line[1:].strip()
                if comment.startswith("text =") or comment.startswith("text="):
                    surface = comment.split("=", 1)[1].strip()
                continue
            tok = _parse_token_line(line, start + offset)
            if tok is not None:
                tokens.append(tok)
        if not tokens:
            continue
        position = len(sentences)
        expected = list(range(1, len(tokens) + 1))
        if [t.index for t in tokens] != expected:
            raise ConlluError(
                f"sentence {position}: token ids are not 1..{len(tokens)}"
            )
        _validate_tree(tokens, position)
        if surface is None:
            surface = detokenize([t.form for t in tokens])
        sentences.append(
            ParsedSentence(
                tokens=tokens, text=surface, position=position, article_id=article_id
            )
        )
    return sentences
