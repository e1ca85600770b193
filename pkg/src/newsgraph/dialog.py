"""Mixed-initiative dialog engine over a document graph.

Each turn runs three stages: ``analyze`` maps the user utterance to an
intent plus reaction attributes, ``step`` walks a hand-written decision
tree over the graph to produce a response plan, and ``realize_response``
renders the plan from a template pack. All randomness flows through one
``random.Random`` owned by the session, so a seed fixes the conversation.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from random import Random
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .graph import DocumentGraph, QuestionNode
from .lexicon import GUARD_PRONOUNS, INNOCUOUS_NOUNS, PROFANITY, STOP_WORDS
from .text import simple_tokens, strip_leading_article

# intents
EXIT = "Exit"
REPEAT = "Repeat"
ENTITY_REQUEST = "EntityRequest"
ASK_QUESTION = "AskQuestion"
OPINION_SEEKING = "OpinionSeeking"
CONTINUE = "Continue"
REJECT = "Reject"
GENERAL_STATEMENT = "GeneralStatement"

# strategy labels
CHAIN_MOVE = "ChainMove"
QUESTION_EDGE = "QuestionEdge"
COMMENT_EDGE = "CommentEdge"
ENTITY_RETRIEVAL = "EntityRetrieval"
QUESTION_RETRIEVAL = "QuestionRetrieval"
COMMENT_RETRIEVAL = "CommentRetrieval"
DEFLECTION = "Deflection"
EXIT_STRATEGY = "Exit"

# phases
PROPOSE = "Propose"
PRESENT = "Present"
OPINION_EXCHANGE = "OpinionExchange"
ANSWERING = "Answering"
WRAPUP = "WrapUp"
ENDED = "Ended"

# pending-request kinds
PROPOSAL = "proposal"
WANT_KNOW = "want_know"
DO_KNOW = "do_know"
OPINION = "opinion"
AGREE = "agree"
MORE = "more"

DEFAULT_CONFIDENCE_THRESHOLD = 0.6

QABackend = Callable[[str], Optional[str]]


def null_qa_backend(question: str) -> Optional[str]:
    """Default external question-answering hook: always no answer."""
    return None


class TemplateError(ValueError):
    """A template pack that cannot realize every plan."""


class TerminalStateError(RuntimeError):
    """A message arrived for a session whose conversation already ended."""


# ---------------------------------------------------------------------------
# frames and state


@dataclass
class ReactionFrame:
    yes_no: Optional[str] = None  # yes | no
    acceptance: Optional[str] = None  # accept | reject | uncertain
    knowledge: Optional[str] = None  # known | not_known
    agreement: Optional[str] = None  # agree | disagree
    comment: Optional[str] = None  # positive | negative_interest | duplicated
    #                                | doubt | confusion | other_negative


@dataclass
class UserFrame:
    intent: str
    raw: str
    entity_text: Optional[str] = None
    reaction: ReactionFrame = field(default_factory=ReactionFrame)


@dataclass
class PendingRequest:
    """The turn-taking question the bot asked last and awaits an answer to."""

    kind: str
    target_pos: Optional[int] = None
    target_idx: Optional[int] = None
    question_id: Optional[str] = None
    template_key: str = ""
    slots: Dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "target_pos": self.target_pos,
            "target_idx": self.target_idx,
            "question_id": self.question_id,
            "template_key": self.template_key,
            "slots": dict(self.slots),
        }


@dataclass
class DialogState:
    session_id: str
    article_id: str
    phase: str = PROPOSE
    cursor: int = -1  # index into the follow-up chain of the last consumed hop
    presented_sentences: set = field(default_factory=set)
    presented_comments: set = field(default_factory=set)
    offered_questions: set = field(default_factory=set)
    pending: Optional[PendingRequest] = None
    opinion_exchange_done: bool = False
    last_presented: Optional[int] = None
    turn_index: int = 0
    last_reply_text: str = ""
    last_strategy: str = ""
    history: List[Tuple[str, str, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "article_id": self.article_id,
            "phase": self.phase,
            "cursor": self.cursor,
            "presented_sentences": sorted(self.presented_sentences),
            "presented_comments": sorted(self.presented_comments),
            "offered_questions": sorted(self.offered_questions),
            "pending": self.pending.to_dict() if self.pending else None,
            "opinion_exchange_done": self.opinion_exchange_done,
            "last_presented": self.last_presented,
            "turn_index": self.turn_index,
            "last_strategy": self.last_strategy,
        }


@dataclass
class DialogAct:
    category: str  # grounding | inform | request | instruction
    template_key: str
    slots: Dict[str, str] = field(default_factory=dict)


@dataclass
class ResponsePlan:
    acts: List[DialogAct] = field(default_factory=list)
    strategies: List[str] = field(default_factory=list)
    informed_nodes: List[str] = field(default_factory=list)

    @property
    def strategy(self) -> str:
        return "+".join(self.strategies)

    def add_strategy(self, label: str) -> None:
        if label not in self.strategies:
            self.strategies.append(label)


# ---------------------------------------------------------------------------
# utterance analysis


def _content_set(text: str) -> set:
    return {t for t in simple_tokens(text) if t not in STOP_WORDS}


_YES_RE = re.compile(
    r"(?<!not )\b(yes|yeah|yep|yup|sure|ok|okay|of course|definitely"
    r"|absolutely|sounds good|why not)\b"
)
_NO_RE = re.compile(r"\b(no|nope|nah|not really|i don'?t think so)\b")
_ACCEPT_RE = re.compile(
    r"(?<!not )\b(sounds good|sure|of course|why not|go ahead|please do"
    r"|let'?s do it|yes please|i'?d love to)\b"
)
_REJECT_RE = re.compile(
    r"\b(no thanks|no thank you|not really|nothing else|rather not"
    r"|not interested|skip (it|this|that))\b"
)
_UNCERTAIN_RE = re.compile(r"\b(not sure|maybe|i guess|perhaps|hard to say)\b")
_KNOWN_RE = re.compile(r"\bi (already )?(know|knew)\b|\bi'?ve heard\b")
_NOT_KNOWN_RE = re.compile(
    r"\b(do not|don'?t|did not|didn'?t) know\b|\bno idea\b|\bnever heard\b"
    r"|\bi did not\b|\bi didn'?t\b"
)
_AGREE_RE = re.compile(
    r"\bi agree\b|\bagreed\b|\b(that'?s|that is|probably|very) true\b"
    r"|\bthat'?s right\b|\bmakes sense\b|\bexactly\b|\bfair enough\b"
)
_DISAGREE_RE = re.compile(
    r"\bi disagree\b|\bnot true\b|\bi don'?t think so\b|\bthat'?s wrong\b"
)
_COMMENT_RES = (
    ("positive", re.compile(
        r"\b(interesting|cool|awesome|amazing|nice|wow|fascinating|lovely)\b")),
    ("negative_interest", re.compile(
        r"\b(boring|not interest(ed|ing)|don'?t care|who cares)\b")),
    ("duplicated", re.compile(
        r"\byou (already )?(said|told me) (that|this)\b|\bsame thing again\b")),
    ("doubt", re.compile(r"really\?|\b(are you sure|i doubt)\b")),
    ("confusion", re.compile(
        r"\b(confus(ed|ing)|don'?t understand|what do you mean"
        r"|makes no sense)\b")),
)

_EXIT_RE = re.compile(
    r"^(ok |okay )?(please )?(stop|quit|exit)\b|\b(goodbye|bye)\b"
    r"|\blet'?s stop\b|\bstop talking\b|\bi('?m| am) done\b"
)
_REPEAT_RE = re.compile(
    r"\b(say (that|it) again|repeat|what did you (just )?say|come again"
    r"|one more time)\b"
)
_ENTITY_RE = re.compile(
    r"\b(?:tell me(?: more)? about|what about|how about|more about"
    r"|talk about|know more about)\s+(.+?)\s*$"
)
_PRONOUN_TARGETS = {
    "you", "it", "this", "that", "them", "him", "her", "me", "us", "yourself",
}
_OPINION_RE = re.compile(
    r"\b(what do you think|how about you|what about you"
    r"|your (opinion|thoughts?|take)|do you (think|agree|believe)"
    r"|any thoughts)\b"
)
_QUESTION_LEAD_RE = re.compile(
    r"^(what|who|whom|whose|when|where|why|how|which|is|are|was|were|do"
    r"|does|did|can|could|would|will|should|has|have|had)\b"
)
_CONTINUE_RE = re.compile(
    r"\b(tell me|go on|continue|keep going|next one|more please|please)\b"
)


def _entity_target(lowered: str) -> Optional[str]:
    m = _ENTITY_RE.search(lowered)
    if not m:
        return None
    target = re.sub(r"[^\w\s'-]+", " ", m.group(1)).strip()
    target = strip_leading_article(target)
    # Requests aimed at pronouns are opinion or clarification turns.
    if not target or target.split()[0] in _PRONOUN_TARGETS:
        return None
    return target


def _is_question(lowered: str) -> bool:
    for part in re.split(r"[.!?]+", lowered):
        part = part.strip()
        if part and _QUESTION_LEAD_RE.match(part):
            return True
    return False


def analyze(utterance: str, state: DialogState) -> UserFrame:
    """Two-stage understanding: reaction attributes, then one intent.

    Reaction attributes come from state-independent patterns plus a
    state-dependent reading of bare yes/no answers (a "yes" after "do you
    want to know" is an acceptance; after "do you know" it claims
    knowledge). Intent priority: Exit, Repeat, EntityRequest, AskQuestion,
    OpinionSeeking, Continue or Reject, then GeneralStatement.
    """
    lowered = utterance.lower().strip()
    reaction = ReactionFrame()
    if _YES_RE.search(lowered):
        reaction.yes_no = "yes"
    if _NO_RE.search(lowered):
        # An explicit leading "no" wins over trailing agreement words.
        if reaction.yes_no is None or _NO_RE.search(lowered).start() == 0:
            reaction.yes_no = "no"
    if _ACCEPT_RE.search(lowered):
        reaction.acceptance = "accept"
    if _REJECT_RE.search(lowered):
        reaction.acceptance = "reject"
    if _UNCERTAIN_RE.search(lowered) and reaction.acceptance is None:
        reaction.acceptance = "uncertain"
    if _KNOWN_RE.search(lowered):
        reaction.knowledge = "known"
    if _NOT_KNOWN_RE.search(lowered):
        reaction.knowledge = "not_known"
    if _AGREE_RE.search(lowered):
        reaction.agreement = "agree"
    if _DISAGREE_RE.search(lowered):
        reaction.agreement = "disagree"
    for name, pattern in _COMMENT_RES:
        if pattern.search(lowered):
            reaction.comment = name
            break

    pending_kind = state.pending.kind if state.pending else None
    if reaction.yes_no == "yes":
        if pending_kind in (PROPOSAL, WANT_KNOW, MORE):
            reaction.acceptance = reaction.acceptance or "accept"
        elif pending_kind == DO_KNOW:
            reaction.knowledge = reaction.knowledge or "known"
        elif pending_kind == AGREE:
            reaction.agreement = reaction.agreement or "agree"
    elif reaction.yes_no == "no":
        if pending_kind in (PROPOSAL, WANT_KNOW, MORE):
            # "No, I did not. Please tell me." answers the embedded
            # question rather than declining the offer.
            if reaction.acceptance is None and reaction.knowledge is None:
                reaction.acceptance = "reject"
        elif pending_kind == DO_KNOW:
            reaction.knowledge = reaction.knowledge or "not_known"
        elif pending_kind == AGREE:
            reaction.agreement = reaction.agreement or "disagree"

    opinionated = bool(_OPINION_RE.search(lowered))
    entity = None if opinionated else _entity_target(lowered)

    if _EXIT_RE.search(lowered):
        intent = EXIT
    elif _REPEAT_RE.search(lowered):
        intent = REPEAT
    elif entity:
        intent = ENTITY_REQUEST
    elif not opinionated and _is_question(lowered) and _content_set(lowered):
        intent = ASK_QUESTION
    elif opinionated:
        intent = OPINION_SEEKING
    elif reaction.acceptance == "accept" or _CONTINUE_RE.search(lowered):
        intent = CONTINUE
    elif reaction.acceptance == "reject":
        intent = REJECT
    else:
        intent = GENERAL_STATEMENT
    return UserFrame(intent=intent, raw=utterance, entity_text=entity,
                     reaction=reaction)


# ---------------------------------------------------------------------------
# retrieval over the graph


def match_score(query: str, node: QuestionNode) -> int:
    """Number of shared content words between query and question text."""
    return len(_content_set(query) & _content_set(node.match_text))


def retrieve_by_question(
    graph: DocumentGraph, state: DialogState, query: str
) -> Optional[Tuple[int, int, float]]:
    """Best-matching question node target: (position, score, confidence).

    Only question nodes whose target sentence is unpresented compete; the
    highest match score wins and ties go to the smaller target position.
    Confidence is the matched share of the query's distinct words.
    """
    query_tokens = set(simple_tokens(query))
    if not query_tokens:
        return None
    best: Optional[Tuple[int, int]] = None
    candidates = sorted(graph.questions, key=lambda q: (q.position, q.node_id))
    for node in candidates:
        if node.position in state.presented_sentences:
            continue
        score = match_score(query, node)
        if best is None or score > best[1]:
            best = (node.position, score)
    if best is None or best[1] == 0:
        return None
    confidence = best[1] / len(query_tokens)
    return best[0], best[1], confidence


def _normalize_entity(text: str) -> str:
    cleaned = re.sub(r"[^\w\s'-]+", " ", text.lower()).strip()
    return strip_leading_article(cleaned)


def retrieve_by_entity(
    graph: DocumentGraph, state: DialogState, entity_text: str
) -> Optional[int]:
    """Earliest unpresented sentence whose subject mentions the entity.

    Entities are matched case-insensitively by canonical name, then exact
    mention text, then substring containment; the query loses any leading
    article first.
    """
    query = _normalize_entity(entity_text)
    if not query:
        return None
    best_rank = None
    best_entity = None
    for ent in graph.entities:
        names = [_normalize_entity(ent.name)]
        names += [_normalize_entity(m.text) for m in ent.mentions]
        if query == names[0]:
            rank = 0
        elif query in names[1:]:
            rank = 1
        elif any(query in name for name in names if name):
            rank = 2
        else:
            continue
        if best_rank is None or rank < best_rank:
            best_rank = rank
            best_entity = ent
    if best_entity is None:
        return None
    for pos in graph.sentences_for_entity(best_entity.node_id):
        if pos not in state.presented_sentences:
            return pos
    return None


def retrieve_comment(graph: DocumentGraph, state: DialogState) -> Optional[str]:
    """Unpresented comment on the last presented sentence, earliest first."""
    if state.last_presented is None:
        return None
    for node in graph.comments_for(state.last_presented):
        if node.node_id not in state.presented_comments:
            return node.node_id
    return None


_TIER_ONE = frozenset(
    {"root/neg", "root/ccomp", "root/dep", "root/xcomp/ccomp",
     "root/xcomp/dobj"}
)
_TIER_TWO = frozenset(
    {"root/dobj", "root/advcl", "root/nsubj/nummod", "root/nsubjpass/nummod"}
)
_GUARD_RE = re.compile(
    r"\b(" + "|".join(re.escape(p) for p in sorted(GUARD_PRONOUNS)) + r")\b",
    re.IGNORECASE,
)


def question_tier(node: QuestionNode) -> int:
    if node.dep_path in _TIER_ONE:
        return 1
    if node.dep_path in _TIER_TWO:
        return 2
    return 3


def select_intro_question(
    graph: DocumentGraph, position: int
) -> Optional[QuestionNode]:
    """Best question node of a sentence for a turn-taking introduction.

    Lowest tier wins, then the leftmost answer token. The winner is
    dropped when its subject contains a confusing pronoun (we, I, this,
    it), so the caller falls back to a generic turn-taking question.
    """
    nodes = graph.questions_for(position)
    if not nodes:
        return None
    best = min(nodes, key=lambda q: (question_tier(q), q.answer_index, q.node_id))
    if _GUARD_RE.search(best.subject_text):
        return None
    return best


# ---------------------------------------------------------------------------
# the decision tree


def _ensure_period(text: str) -> str:
    text = text.strip()
    if text and text[-1] not in ".!?\"'":
        return text + "."
    return text


class DialogEngine:
    """Owns one article graph plus the template pack and policies."""

    def __init__(
        self,
        graph: DocumentGraph,
        templates: Optional[Mapping[str, Sequence[str]]] = None,
        qa_backend: QABackend = null_qa_backend,
        confidence_threshold: float = DEFAULT_CONFIDENCE_THRESHOLD,
        profanity: Sequence[str] = PROFANITY,
        innocuous_nouns: Sequence[str] = INNOCUOUS_NOUNS,
    ):
        self.graph = graph
        self.templates = dict(templates) if templates else load_templates()
        validate_templates(self.templates)
        self.qa_backend = qa_backend
        self.confidence_threshold = confidence_threshold
        self.profanity = list(profanity)
        self.innocuous_nouns = list(innocuous_nouns)

    # -- public API ---------------------------------------------------------

    def new_state(self, session_id: str) -> DialogState:
        return DialogState(session_id=session_id, article_id=self.graph.article_id)

    def analyze(self, utterance: str, state: DialogState) -> UserFrame:
        return analyze(utterance, state)

    def respond(self, state: DialogState, utterance: str, rng: Random) -> Tuple[str, ResponsePlan]:
        """Analyze, step, realize, and purify one turn."""
        frame = self.analyze(utterance, state)
        plan, state = self.step(state, frame, rng)
        text = realize_response(plan, self.templates, rng)
        text = purify(text, self.profanity, self.innocuous_nouns, rng)
        state.turn_index += 1
        state.last_reply_text = text
        state.last_strategy = plan.strategy
        state.history.append((utterance, text, plan.strategy))
        return text, plan

    def step(
        self, state: DialogState, frame: UserFrame, rng: Random
    ) -> Tuple[ResponsePlan, DialogState]:
        """One decision-tree pass; mutates and returns the same state.

        User-initiative intents run first; otherwise the pending
        turn-taking question routes the reaction. Every plan before the
        wrap-up carries exactly one request act.
        """
        if state.phase == ENDED:
            raise TerminalStateError(
                f"session {state.session_id} has already ended"
            )
        plan = ResponsePlan()

        if frame.intent == EXIT:
            self._wrap_goodbye(state, plan)
        elif state.phase == WRAPUP:
            # The article is exhausted; any follow-up closes the session.
            self._wrap_goodbye(state, plan)
        elif not state.presented_sentences:
            self._open(state, plan)
        elif frame.intent == REPEAT:
            plan.acts.append(DialogAct("grounding", "repeat.prefix"))
            plan.acts.append(
                DialogAct("request", "__literal__",
                          {"text": state.last_reply_text})
            )
            if state.last_strategy:
                plan.strategies = state.last_strategy.split("+")
        else:
            self._consume_rejection(state, frame, plan, rng)
            if state.phase == WRAPUP or state.phase == ENDED:
                pass
            elif frame.intent == ENTITY_REQUEST:
                self._handle_entity_request(state, frame, plan, rng)
            elif frame.intent == ASK_QUESTION:
                self._handle_question(state, frame, plan, rng)
            elif frame.intent == OPINION_SEEKING:
                self._handle_opinion_seeking(state, plan, rng)
            elif plan.acts:
                # A bare rejection already produced the next offer.
                pass
            else:
                self._system_initiative(state, frame, plan, rng)

        self._check_plan(state, plan)
        return plan, state

    # -- opening and closing --------------------------------------------

    def _open(self, state: DialogState, plan: ResponsePlan) -> None:
        title = self.graph.title
        plan.acts.append(DialogAct("grounding", "greet.found_story"))
        plan.acts.append(
            DialogAct("inform", "inform.title", {"title": title.text})
        )
        plan.acts.append(DialogAct("request", "request.go_through"))
        plan.add_strategy(CHAIN_MOVE)
        plan.informed_nodes.append(title.node_id)
        state.presented_sentences.add(title.position)
        state.last_presented = title.position
        state.cursor = 0 if self.graph.chain and self.graph.chain[0] == 0 else -1
        state.pending = PendingRequest(kind=PROPOSAL,
                                       template_key="request.go_through")
        state.phase = PROPOSE

    def _wrap_goodbye(self, state: DialogState, plan: ResponsePlan) -> None:
        plan.acts.append(DialogAct("grounding", "exit.goodbye"))
        plan.add_strategy(EXIT_STRATEGY)
        state.pending = None
        state.phase = ENDED

    def _wrap_up(self, state: DialogState, plan: ResponsePlan) -> None:
        plan.acts.append(DialogAct("inform", "wrapup.done"))
        state.pending = None
        state.phase = WRAPUP

    # -- rejection of the standing offer ----------------------------------

    def _consume_rejection(
        self, state: DialogState, frame: UserFrame, plan: ResponsePlan,
        rng: Random,
    ) -> None:
        """Handle "no" to the standing turn-taking question.

        Rejected content is skipped, never informed; rejecting the article
        proposal or the generic hear-more question wraps up unless the
        same utterance carries a new request to serve.
        """
        if state.pending is None:
            return
        initiative = frame.intent in (ENTITY_REQUEST, ASK_QUESTION,
                                      OPINION_SEEKING)
        rejected = frame.reaction.acceptance == "reject"
        if not rejected and initiative and frame.reaction.yes_no == "no":
            # "No, tell me about X" declines the standing offer however it
            # was phrased, then redirects.
            rejected = True
        if not rejected:
            return
        pending = state.pending
        if pending.kind in (PROPOSAL, MORE):
            state.pending = None
            if not initiative:
                plan.acts.append(DialogAct("grounding", "ground.no_problem"))
                self._wrap_up(state, plan)
        elif pending.kind in (WANT_KNOW, DO_KNOW):
            if pending.target_idx is not None:
                state.cursor = max(state.cursor, pending.target_idx)
            state.pending = None
            if not initiative:
                plan.acts.append(DialogAct("grounding", "ground.no_problem"))
                self._compose_request(state, plan, rng, allow_gate=False)
        elif pending.kind == OPINION:
            state.opinion_exchange_done = True
            state.pending = None
            if not initiative:
                plan.acts.append(DialogAct("grounding", "ground.no_problem"))
                self._compose_request(state, plan, rng, allow_gate=False)
        # A "no" to "do you agree" is a normal answer, not a rejection,
        # and is handled by the answering flow.

    # -- user initiative ----------------------------------------------------

    def _handle_entity_request(
        self, state: DialogState, frame: UserFrame, plan: ResponsePlan,
        rng: Random,
    ) -> None:
        pos = retrieve_by_entity(self.graph, state, frame.entity_text or "")
        if pos is None:
            plan.acts.append(DialogAct("grounding", "apology.no_answer"))
            plan.add_strategy(DEFLECTION)
            self._fallback(state, plan, rng)
            return
        plan.acts.append(DialogAct("grounding", "ground.sure"))
        self._inform_sentence(state, plan, pos, chain_move=False)
        plan.add_strategy(ENTITY_RETRIEVAL)
        # After a jump off the follow-up path, re-offer the article
        # generically rather than introducing the next chain sentence.
        self._request_more(state, plan)

    def _handle_question(
        self, state: DialogState, frame: UserFrame, plan: ResponsePlan,
        rng: Random,
    ) -> None:
        found = retrieve_by_question(self.graph, state, frame.raw)
        if found is None:
            answer = self.qa_backend(frame.raw)
            if answer:
                plan.acts.append(
                    DialogAct("inform", "inform.qa_answer",
                              {"text": _ensure_period(answer)})
                )
                plan.add_strategy(DEFLECTION)
                self._fallback(state, plan, rng)
                return
            plan.acts.append(DialogAct("grounding", "apology.no_answer"))
            plan.add_strategy(DEFLECTION)
            self._fallback(state, plan, rng)
            return
        pos, _score, confidence = found
        if confidence < self.confidence_threshold:
            plan.acts.append(DialogAct("grounding", "ground.low_confidence"))
        else:
            plan.acts.append(DialogAct("grounding", "ground.found_answer"))
        self._inform_sentence(state, plan, pos, key="inform.sentence_found",
                              chain_move=False)
        plan.add_strategy(QUESTION_RETRIEVAL)
        self._compose_request(state, plan, rng, allow_gate=True)

    def _handle_opinion_seeking(
        self, state: DialogState, plan: ResponsePlan, rng: Random
    ) -> None:
        comment_id = retrieve_comment(self.graph, state)
        in_exchange = state.pending is not None and state.pending.kind == OPINION
        if comment_id is None:
            plan.acts.append(DialogAct("grounding", "apology.no_comment"))
            plan.add_strategy(DEFLECTION)
            if in_exchange:
                state.pending = None
                state.opinion_exchange_done = True
            self._fallback(state, plan, rng)
            return
        plan.acts.append(DialogAct("grounding", "ground.ack_asked_back"))
        self._inform_comment(state, plan, comment_id)
        plan.add_strategy(COMMENT_RETRIEVAL)
        plan.acts.append(DialogAct("request", "request.agree"))
        state.pending = PendingRequest(kind=AGREE, template_key="request.agree")
        state.phase = ANSWERING

    # -- system initiative ----------------------------------------------

    def _system_initiative(
        self, state: DialogState, frame: UserFrame, plan: ResponsePlan,
        rng: Random,
    ) -> None:
        pending = state.pending
        if pending is None:
            self._advance_chain(state, plan, rng)
            return
        if pending.kind == PROPOSAL:
            if frame.reaction.acceptance == "accept":
                state.pending = None
                plan.acts.append(DialogAct("grounding", "ground.great"))
                self._advance_chain(state, plan, rng)
            else:
                plan.acts.append(DialogAct("grounding", "ground.okay"))
                self._restate(state, plan)
        elif pending.kind == WANT_KNOW:
            if frame.reaction.acceptance == "accept" or frame.intent == CONTINUE:
                target_pos, target_idx = pending.target_pos, pending.target_idx
                state.pending = None
                plan.acts.append(DialogAct("grounding", "ground.great"))
                self._inform_sentence(state, plan, target_pos)
                if target_idx is not None:
                    state.cursor = max(state.cursor, target_idx)
                self._compose_request(state, plan, rng, allow_gate=True)
            else:
                plan.acts.append(DialogAct("grounding", "ground.okay"))
                self._restate(state, plan)
        elif pending.kind == DO_KNOW:
            # Either answer leads to the sentence; the content is the point.
            target_pos, target_idx = pending.target_pos, pending.target_idx
            state.pending = None
            if frame.reaction.knowledge == "known":
                plan.acts.append(DialogAct("grounding", "ground.known"))
            self._inform_sentence(state, plan, target_pos)
            if target_idx is not None:
                state.cursor = max(state.cursor, target_idx)
            self._compose_request(state, plan, rng, allow_gate=True)
        elif pending.kind == OPINION:
            state.pending = None
            state.opinion_exchange_done = True
            comment_id = retrieve_comment(self.graph, state)
            if comment_id is None:
                plan.acts.append(DialogAct("grounding", "ground.okay"))
                self._compose_request(state, plan, rng, allow_gate=False)
                return
            plan.acts.append(DialogAct("grounding", "ground.hmm"))
            self._inform_comment(state, plan, comment_id)
            plan.add_strategy(COMMENT_EDGE)
            plan.acts.append(DialogAct("request", "request.agree"))
            state.pending = PendingRequest(kind=AGREE,
                                           template_key="request.agree")
            state.phase = ANSWERING
        elif pending.kind == AGREE:
            state.pending = None
            plan.acts.append(DialogAct("grounding", "ground.ack_opinion"))
            plan.acts.append(DialogAct("grounding", "ground.anyway"))
            self._compose_request(state, plan, rng, allow_gate=False)
        elif pending.kind == MORE:
            if frame.reaction.acceptance == "accept" or frame.intent == CONTINUE:
                state.pending = None
                plan.acts.append(DialogAct("grounding", "ground.great"))
                self._advance_chain(state, plan, rng)
            else:
                plan.acts.append(DialogAct("grounding", "ground.okay"))
                self._restate(state, plan)

    def _advance_chain(
        self, state: DialogState, plan: ResponsePlan, rng: Random
    ) -> None:
        nxt = self._next_chain_target(state)
        if nxt is None:
            self._wrap_up(state, plan)
            return
        idx, pos = nxt
        self._inform_sentence(state, plan, pos)
        state.cursor = idx
        self._compose_request(state, plan, rng, allow_gate=True)

    def _next_chain_target(self, state: DialogState) -> Optional[Tuple[int, int]]:
        for idx, pos in enumerate(self.graph.chain):
            if idx > state.cursor and pos not in state.presented_sentences:
                return idx, pos
        return None

    def _compose_request(
        self, state: DialogState, plan: ResponsePlan, rng: Random,
        allow_gate: bool,
    ) -> None:
        """Append this turn's turn-taking question and set the phase."""
        body_presented = len(state.presented_sentences - {0})
        if (
            allow_gate
            and body_presented >= 2
            and not state.opinion_exchange_done
            and retrieve_comment(self.graph, state) is not None
        ):
            plan.acts.append(DialogAct("request", "request.opinion"))
            plan.add_strategy(COMMENT_EDGE)
            state.pending = PendingRequest(kind=OPINION,
                                           template_key="request.opinion")
            state.phase = OPINION_EXCHANGE
            return
        nxt = self._next_chain_target(state)
        if nxt is None:
            self._wrap_up(state, plan)
            return
        idx, pos = nxt
        intro = select_intro_question(self.graph, pos)
        if intro is not None:
            kind = rng.choice((WANT_KNOW, DO_KNOW))
            key = ("request.intro.want_know" if kind == WANT_KNOW
                   else "request.intro.do_know")
            plan.acts.append(
                DialogAct("request", key, {"clause": intro.clause})
            )
            plan.add_strategy(QUESTION_EDGE)
            state.offered_questions.add(intro.node_id)
            state.pending = PendingRequest(
                kind=kind, target_pos=pos, target_idx=idx,
                question_id=intro.node_id, template_key=key,
                slots={"clause": intro.clause},
            )
            state.phase = PRESENT
            return
        self._request_more(state, plan, target=(idx, pos))

    def _request_more(
        self, state: DialogState, plan: ResponsePlan,
        target: Optional[Tuple[int, int]] = None,
    ) -> None:
        if target is None:
            target = self._next_chain_target(state)
        plan.acts.append(DialogAct("request", "request.more"))
        idx, pos = target if target else (None, None)
        state.pending = PendingRequest(kind=MORE, target_pos=pos,
                                       target_idx=idx,
                                       template_key="request.more")
        state.phase = PRESENT

    def _restate(self, state: DialogState, plan: ResponsePlan) -> None:
        assert state.pending is not None
        plan.acts.append(
            DialogAct("request", state.pending.template_key,
                      dict(state.pending.slots))
        )

    def _fallback(
        self, state: DialogState, plan: ResponsePlan, rng: Random
    ) -> None:
        """Resort to system initiative after a failed retrieval."""
        if state.pending is not None:
            self._restate(state, plan)
        else:
            self._compose_request(state, plan, rng, allow_gate=False)

    # -- informing nodes --------------------------------------------------

    def _inform_sentence(
        self, state: DialogState, plan: ResponsePlan, pos: int,
        key: str = "inform.sentence", chain_move: bool = True,
    ) -> None:
        node = self.graph.sentence(pos)
        assert pos not in state.presented_sentences, (
            f"sentence {pos} would be informed twice"
        )
        plan.acts.append(
            DialogAct("inform", key, {"text": _ensure_period(node.text)})
        )
        plan.informed_nodes.append(node.node_id)
        if chain_move:
            plan.add_strategy(CHAIN_MOVE)
        state.presented_sentences.add(pos)
        state.last_presented = pos
        if state.phase == PROPOSE:
            state.phase = PRESENT

    def _inform_comment(
        self, state: DialogState, plan: ResponsePlan, comment_id: str
    ) -> None:
        node = next(c for c in self.graph.comments if c.node_id == comment_id)
        assert comment_id not in state.presented_comments, (
            f"comment {comment_id} would be informed twice"
        )
        plan.acts.append(
            DialogAct("inform", "inform.comment",
                      {"text": _ensure_period(node.text)})
        )
        plan.informed_nodes.append(comment_id)
        state.presented_comments.add(comment_id)
        state.opinion_exchange_done = True

    def _check_plan(self, state: DialogState, plan: ResponsePlan) -> None:
        requests = sum(1 for act in plan.acts if act.category == "request")
        if state.phase in (WRAPUP, ENDED):
            assert requests == 0, "wrap-up turns must not ask anything"
        else:
            assert requests == 1, (
                f"expected exactly one request act, found {requests}"
            )


# ---------------------------------------------------------------------------
# realization


def load_templates(path: Optional[Path] = None) -> Dict[str, List[str]]:
    """Template pack from a JSON file, or the embedded default pack."""
    if path is None:
        text = (
            resources.files("newsgraph") / "data" / "templates.json"
        ).read_text()
    else:
        text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TemplateError(f"template pack is not valid JSON: {exc}") from exc
    validate_templates(data)
    return data


def validate_templates(pack: Mapping[str, Sequence[str]]) -> None:
    for key, variants in pack.items():
        if not isinstance(variants, (list, tuple)) or len(variants) < 2:
            raise TemplateError(
                f"template {key!r} needs at least two variants"
            )
        for v in variants:
            if not isinstance(v, str) or not v.strip():
                raise TemplateError(f"template {key!r} has an empty variant")


def _fill(template: str, slots: Mapping[str, str]) -> str:
    out = template
    for name, value in slots.items():
        out = out.replace("{" + name + "}", value)
    return out


def realize_response(
    plan: ResponsePlan,
    templates: Mapping[str, Sequence[str]],
    rng: Random,
) -> str:
    """Render a plan's acts in order, joining chunks with spaces.

    Each act picks a random template variant; a chunk following one that
    ends with a comma is folded into the same sentence by lowercasing its
    first letter. The final reply starts with a capital.
    """
    chunks: List[str] = []
    for act in plan.acts:
        if act.template_key == "__literal__":
            chunks.append(act.slots.get("text", ""))
            continue
        variants = templates.get(act.template_key)
        if not variants:
            raise TemplateError(f"no template for key {act.template_key!r}")
        chunk = _fill(variants[rng.randrange(len(variants))], act.slots)
        chunks.append(chunk.strip())
    out = ""
    for chunk in chunks:
        if not chunk:
            continue
        if out.endswith(","):
            for i, ch in enumerate(chunk):
                if ch.isalpha():
                    chunk = chunk[:i] + ch.lower() + chunk[i + 1:]
                    break
        out = f"{out} {chunk}" if out else chunk
    for i, ch in enumerate(out):
        if ch.isalpha():
            if ch.islower():
                out = out[:i] + ch.upper() + out[i + 1:]
            break
    return out


def purify(
    text: str,
    profanity: Sequence[str] = PROFANITY,
    innocuous_nouns: Sequence[str] = INNOCUOUS_NOUNS,
    rng: Optional[Random] = None,
) -> str:
    """Replace listed profanity with random innocuous nouns, keeping case."""
    rng = rng or Random(0)
    if not profanity or not innocuous_nouns:
        return text

    pattern = re.compile(
        r"\b(" + "|".join(re.escape(w) for w in sorted(profanity)) + r")\b",
        re.IGNORECASE,
    )

    def replace(match: "re.Match[str]") -> str:
        word = match.group(0)
        noun = innocuous_nouns[rng.randrange(len(innocuous_nouns))]
        if word.isupper():
            return noun.upper()
        if word[0].isupper():
            return noun.capitalize()
        return noun

    return pattern.sub(replace, text)
