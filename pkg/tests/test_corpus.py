"""Sentence filtering and corpus loading."""

import json

import pytest

from newsgraph.corpus import (
    BAD_CHARS,
    BOILERPLATE,
    MULTI_SENTENCE_QUOTE,
    TOO_LONG,
    TOO_SHORT,
    URL,
    CorpusError,
    classify_sentence,
    classify_sentences,
    detect_multi_sentence_quotes,
    load_article,
    load_corpus,
)

from conftest import CORPUS, make_sentence


def _sent(position, forms, text=None):
    return make_sentence(position, [(f, f.lower()) for f in forms], text=text)


def test_too_short():
    verdict = classify_sentence(_sent(1, ["Birders", "came", "."]), set())
    assert not verdict.eligible
    assert verdict.reasons == {TOO_SHORT}


def test_too_long():
    words = ["word"] * 81
    verdict = classify_sentence(_sent(1, words), set())
    assert TOO_LONG in verdict.reasons


def test_url_and_bad_chars():
    base = ["The", "report", "lives", "at", "https://example.org", "for",
            "now", "."]
    verdict = classify_sentence(_sent(1, base), set())
    assert URL in verdict.reasons
    tagged = ["Results", "use", "the", "tag", "#marathon", "today", "ok",
              "."]
    verdict = classify_sentence(_sent(1, tagged), set())
    assert BAD_CHARS in verdict.reasons


def test_boilerplate():
    forms = ["Read", "more", ":", "our", "coverage", "of", "solar", "power"]
    sent = _sent(1, forms, text="Read more: our coverage of solar power.")
    verdict = classify_sentence(sent, set())
    assert BOILERPLATE in verdict.reasons


def test_title_is_never_filtered():
    verdict = classify_sentence(_sent(0, ["Too", "short"]), {0})
    assert verdict.eligible
    assert verdict.reasons == frozenset()


def test_quote_region_spans_sentences():
    sents = [
        _sent(0, ["A", "headline", "here"]),
        _sent(1, ['"', "We", "never", "stopped", "looking", ","]),
        _sent(2, ["the", "curator", "said", ".", '"']),
        _sent(3, ["Unquoted", "sentence", "follows", "."]),
    ]
    assert detect_multi_sentence_quotes(sents) == {1, 2}


def test_quote_within_one_sentence_is_fine():
    sents = [
        _sent(0, ["He", "said", '"', "hello", '"', "twice", "."]),
        _sent(1, ["Another", "sentence", "."]),
    ]
    assert detect_multi_sentence_quotes(sents) == set()


def test_unclosed_quote_extends_to_the_end():
    sents = [
        _sent(0, ["Fine", "opening", "."]),
        _sent(1, ['"', "An", "unclosed", "quote"]),
        _sent(2, ["keeps", "going", "."]),
    ]
    assert detect_multi_sentence_quotes(sents) == {1, 2}


def test_classify_sentences_marks_quote_positions():
    sents = [
        _sent(0, ["A", "headline"]),
        _sent(1, ['"', "Quote", "opens", "with", "many", "words", "here",
                  "now"]),
        _sent(2, ["and", "closes", "with", "enough", "words", "here", "too",
                  '"']),
    ]
    verdicts = classify_sentences(sents)
    assert verdicts[0].eligible
    assert MULTI_SENTENCE_QUOTE in verdicts[1].reasons
    assert MULTI_SENTENCE_QUOTE in verdicts[2].reasons


def test_load_corpus_manifest(desk_articles):
    assert len(desk_articles) == 12
    assert set(desk_articles) == {f"a{i}" for i in range(1, 13)}
    total = sum(len(a.sentences) for a in desk_articles.values())
    assert 90 <= total <= 110


def test_loaded_article_shape(desk_articles):
    art = desk_articles["a3"]
    assert art.title.position == 0
    assert len(art.body) == len(art.sentences) - 1
    assert art.source_url.startswith("https://")
    assert art.comments, "a3 ships reader comments"
    assert art.coref_chains, "a3 ships a coreference sidecar"
    positions = {c.sentence_position for c in art.comments}
    assert positions <= {s.position for s in art.sentences}


def test_missing_manifest_raises(tmp_path):
    with pytest.raises(CorpusError, match="manifest"):
        load_corpus(tmp_path)


def test_bad_manifest_entry_raises(tmp_path):
    (tmp_path / "manifest.json").write_text(json.dumps([{"conllu": "x"}]))
    with pytest.raises(CorpusError, match="bad manifest entry"):
        load_corpus(tmp_path)


def test_empty_article_raises(tmp_path):
    (tmp_path / "empty.conllu").write_text("\n")
    with pytest.raises(CorpusError, match="no sentences"):
        load_article(tmp_path / "empty.conllu", "x")


def test_bad_comment_record_raises(tmp_path):
    conllu = (
        "1\tWord\tword\tNOUN\t_\t_\t2\tnsubj\t_\t_\n"
        "2\tarrived\tarrive\tVERB\t_\t_\t0\troot\t_\t_\n"
    )
    (tmp_path / "a.conllu").write_text(conllu)
    (tmp_path / "c.jsonl").write_text('{"text": "missing position"}\n')
    with pytest.raises(CorpusError, match="bad comment record"):
        load_article(tmp_path / "a.conllu", "a",
                     comments_path=tmp_path / "c.jsonl")


def test_bad_coref_sidecar_raises(tmp_path):
    conllu = (
        "1\tWord\tword\tNOUN\t_\t_\t2\tnsubj\t_\t_\n"
        "2\tarrived\tarrive\tVERB\t_\t_\t0\troot\t_\t_\n"
    )
    (tmp_path / "a.conllu").write_text(conllu)
    (tmp_path / "coref.json").write_text('{"chains": [[{"position": 0}]]}')
    with pytest.raises(CorpusError, match="bad coreference sidecar"):
        load_article(tmp_path / "a.conllu", "a",
                     coref_path=tmp_path / "coref.json")


def test_comment_records_parse(desk_articles):
    comment = desk_articles["a2"].comments[0]
    assert comment.article_id == "a2"
    assert comment.kind == "comment"
    assert comment.sentence_position == 4
    assert "good deal" in comment.text
