"""Shared fixtures: file paths, a hand-built dialog graph, tiny parse helpers."""

from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import pytest

from newsgraph.conllu import ParsedSentence, Token
from newsgraph.corpus import load_corpus
from newsgraph.graph import (
    CommentNode,
    DocumentGraph,
    EntityNode,
    Mention,
    QuestionNode,
    SentenceNode,
)

FIXTURES = Path(__file__).parent / "fixtures"
CORPUS = Path(__file__).parent.parent / "corpus"

TOY_TEXTS = [
    "The billionaires fuelling a space race",
    'Dubbed "NewSpace", an increasing number of entrepreneurs are joining in '
    "the race to create cheap, commercialised space travel.",
    "Among these entrepreneurs are billionaires Elon Musk, Jeff Bezos and "
    "Sir Richard Branson, who all made their fortunes in other industries.",
    "South African-born businessman Elon Musk started SpaceX in 2002 with "
    "the ambition of colonising Mars.",
    "Amazon founder Jeff Bezos, the world's richest man, was one of the "
    'first billionaires to jump into the commercial "space race", starting '
    "Blue Origin in 2000.",
    "Gaining momentum, Blue Origin is now securing lucrative government "
    "contracts and recently gained national security certifications from "
    "the US government.",
    "Blue Origin was chosen by the US Air Force to develop rocket systems.",
]

# The scripted eight-turn conversation driven against the toy graph.
SAMPLE_TURNS = [
    "let's chat about recent news",
    "Sounds good!",
    "No, I did not. Please tell me.",
    "I think a new space race is beginning. How about you?",
    "That's probably true.",
    "No. Tell me more about Jeff Bezos.",
    "What does Blue Origin do?",
    "Sure!",
]

EXPECTED_STRATEGIES = [
    "ChainMove",
    "ChainMove+QuestionEdge",
    "ChainMove+CommentEdge",
    "CommentRetrieval",
    "QuestionEdge",
    "EntityRetrieval",
    "QuestionRetrieval+QuestionEdge",
]


def build_toy_graph() -> DocumentGraph:
    """Seven-sentence space-race graph with hand-authored nodes and edges.

    The fourth body sentence sits off the follow-up path so an entity jump
    to Jeff Bezos is a pure retrieval, mirroring the scripted conversation.
    """
    sentences = [
        SentenceNode(node_id=f"s{i}", position=i, text=t, eligible=True,
                     filter_reasons=(), tokens=())
        for i, t in enumerate(TOY_TEXTS)
    ]
    questions = [
        QuestionNode(node_id="q2-0", position=2, qtype="who",
                     dep_path="root", answer_index=4,
                     clause="who are among these entrepreneurs",
                     interrogative="Who are among these entrepreneurs?",
                     subject_text="billionaires Elon Musk, Jeff Bezos and "
                                  "Sir Richard Branson"),
        QuestionNode(node_id="q3-0", position=3, qtype="how",
                     dep_path="root/dobj", answer_index=7,
                     clause="how South African-born businessman Elon Musk "
                            "started SpaceX",
                     interrogative="How did South African-born businessman "
                                   "Elon Musk start SpaceX?",
                     subject_text="South African-born businessman Elon Musk"),
        QuestionNode(node_id="q5-0", position=5, qtype="what",
                     dep_path="root/dobj", answer_index=7,
                     clause="what Blue Origin is securing",
                     interrogative="What is Blue Origin securing?",
                     subject_text="Blue Origin"),
        QuestionNode(node_id="q6-0", position=6, qtype="what",
                     dep_path="root/xcomp/dobj", answer_index=10,
                     clause="what Blue Origin was chosen by the US Air Force "
                            "to develop",
                     interrogative="What was Blue Origin chosen by the US "
                                   "Air Force to develop?",
                     subject_text="Blue Origin"),
    ]
    entities = [
        EntityNode(
            node_id="e0", name="Jeff Bezos", kind="Person",
            mentions=(
                Mention(position=2, start=8, end=9, text="Jeff Bezos",
                        ner="PERSON"),
                Mention(position=4, start=3, end=4, text="Jeff Bezos",
                        ner="PERSON"),
            ),
        ),
        EntityNode(
            node_id="e1", name="Blue Origin", kind="Organization",
            mentions=(
                Mention(position=5, start=3, end=4, text="Blue Origin",
                        ner="ORGANIZATION"),
            ),
        ),
    ]
    comments = [
        CommentNode(node_id="c0", position=2,
                    text="this probably won't happen in their lifetime"),
    ]
    return DocumentGraph(
        article_id="space-race",
        sentences=sentences,
        entities=entities,
        questions=questions,
        comments=comments,
        chain=[0, 1, 2, 3, 5, 6],
        subject_edges=[(4, "e0"), (5, "e1"), (6, "e1")],
    )


@pytest.fixture
def toy_graph() -> DocumentGraph:
    return build_toy_graph()


@pytest.fixture(scope="session")
def desk_articles():
    return load_corpus(CORPUS)


def make_sentence(
    position: int,
    words: Sequence[Tuple[str, str]],
    text: Optional[str] = None,
) -> ParsedSentence:
    """Flat one-root parse for tests that only need forms and lemmas."""
    tokens: List[Token] = []
    for i, (form, lemma) in enumerate(words, start=1):
        head = 0 if i == 1 else 1
        deprel = "root" if i == 1 else "dep"
        tokens.append(Token(index=i, form=form, lemma=lemma, upos="NOUN",
                            head=head, deprel=deprel))
    return ParsedSentence(
        tokens=tokens,
        text=text or " ".join(form for form, _ in words),
        position=position,
    )
