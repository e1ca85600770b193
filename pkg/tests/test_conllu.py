"""Reader and tree-utility tests over hand-written CoNLL-U snippets."""

import pytest

from newsgraph.conllu import (
    ConlluError,
    SentenceStructureError,
    parse_conllu,
)

from conftest import FIXTURES

SIMPLE = """\
# text = Researchers built a new telescope.
1\tResearchers\tresearcher\tNOUN\tNNS\t_\t2\tnsubj\t_\t_
2\tbuilt\tbuild\tVERB\tVBD\t_\t0\troot\t_\t_
3\ta\ta\tDET\tDT\t_\t5\tdet\t_\t_
4\tnew\tnew\tADJ\tJJ\t_\t5\tamod\t_\t_
5\ttelescope\ttelescope\tNOUN\tNN\t_\t2\tdobj\t_\tNER=MISC
"""


def test_parses_fields_and_ner():
    sent = parse_conllu(SIMPLE, article_id="a1")[0]
    assert sent.article_id == "a1"
    assert sent.text == "Researchers built a new telescope."
    assert len(sent) == 5
    tok = sent.token(5)
    assert (tok.form, tok.lemma, tok.upos) == ("telescope", "telescope", "NOUN")
    assert tok.ner == "MISC"
    assert sent.token(1).ner == "O"
    assert sent.root.form == "built"


def test_text_comment_optional():
    no_comment = "\n".join(SIMPLE.splitlines()[1:])
    sent = parse_conllu(no_comment)[0]
    assert sent.text == "Researchers built a new telescope"


def test_missing_lemma_falls_back_to_lowercased_form():
    block = SIMPLE.replace("Researchers\tresearcher", "Researchers\t_")
    sent = parse_conllu(block)[0]
    assert sent.token(1).lemma == "researchers"


def test_multiword_ranges_are_skipped():
    lines = SIMPLE.splitlines()
    lines.insert(1, "3-4\ta new\t_\t_\t_\t_\t_\t_\t_\t_")
    sent = parse_conllu("\n".join(lines))[0]
    assert len(sent) == 5


def test_base_deprel_strips_subtype():
    block = SIMPLE.replace("2\tnsubj", "2\tnsubj:xsubj")
    sent = parse_conllu(block)[0]
    assert sent.token(1).deprel == "nsubj:xsubj"
    assert sent.token(1).base_deprel == "nsubj"
    # A bare name matches subtypes; an exact subtype name does not widen.
    assert [t.form for t in sent.dependents(2, "nsubj")] == ["Researchers"]
    assert sent.dependents(2, "nsubj:other") == []


def test_children_and_subtree_order():
    sent = parse_conllu(SIMPLE)[0]
    assert [t.form for t in sent.children(2)] == ["Researchers", "telescope"]
    assert [t.form for t in sent.subtree(5)] == ["a", "new", "telescope"]
    assert sent.subtree_text(5) == "a new telescope"


def test_span_text_detokenizes():
    sent = parse_conllu(SIMPLE)[0]
    assert sent.span_text(sent.tokens) == "Researchers built a new telescope"


def test_blank_lines_split_sentences():
    two = SIMPLE + "\n" + SIMPLE
    sents = parse_conllu(two)
    assert [s.position for s in sents] == [0, 1]


def test_bad_column_count_raises():
    with pytest.raises(ConlluError, match="expected 10 columns"):
        parse_conllu("1\tword\tword\n")


def test_bad_head_raises():
    bad = SIMPLE.replace("0\troot", "x\troot")
    with pytest.raises(ConlluError, match="bad head"):
        parse_conllu(bad)


def test_nonsequential_ids_raise():
    bad = SIMPLE.replace("5\ttelescope", "7\ttelescope")
    with pytest.raises(ConlluError, match="not 1"):
        parse_conllu(bad)


def test_two_roots_raise():
    bad = SIMPLE.replace("2\tnsubj", "0\troot")
    with pytest.raises(SentenceStructureError, match="exactly one root"):
        parse_conllu(bad)


def test_head_out_of_range_raises():
    bad = SIMPLE.replace("5\tdet", "9\tdet")
    with pytest.raises(SentenceStructureError, match="out of range"):
        parse_conllu(bad)


def test_cycle_raises():
    cyclic = (
        "1\ta\ta\tDET\t_\t_\t2\tdet\t_\t_\n"
        "2\tb\tb\tNOUN\t_\t_\t1\tdep\t_\t_\n"
        "3\tc\tc\tVERB\t_\t_\t0\troot\t_\t_\n"
    )
    with pytest.raises(SentenceStructureError, match="cycle"):
        parse_conllu(cyclic)


def test_fixture_files_parse():
    for name, count in (
        ("hinojosa.conllu", 1),
        ("google_taiwan.conllu", 5),
        ("eligibility.conllu", 12),
    ):
        sents = parse_conllu((FIXTURES / name).read_text())
        assert len(sents) == count
        for sent in sents:
            assert sent.root is not None
