"""Chain features, metrics, training, and construction against oracles."""

import random
import time

import numpy as np
import pytest

from newsgraph.chains import (
    DEFAULT_LAMBDA_GRID,
    ChainConfig,
    ChainModel,
    EmbeddingStore,
    FeatureConfig,
    FeatureError,
    HeuristicScorer,
    ModelScorer,
    TrainRow,
    build_discussion_chain,
    content_lemmas,
    evaluate_accuracy,
    featurize,
    fit_logistic,
    load_chain_rows,
    roc_auc,
    sentence_distance_feature,
    textrank_scores,
    train_chain_model,
)
from newsgraph.conllu import parse_conllu

from conftest import CORPUS, FIXTURES, make_sentence

# ---------------------------------------------------------------------------
# oracles: independent reference computations the implementations must match


def textrank_oracle(sentences, damping=0.85, tol=1e-6, max_iter=100):
    """Dense matrix power iteration over the lexical-overlap graph."""
    n = len(sentences)
    sets = [content_lemmas(s) for s in sentences]
    lens = np.array([len(s.tokens) for s in sentences], dtype=float)
    W = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            shared = len(sets[i] & sets[j])
            denom = np.log(lens[i]) + np.log(lens[j])
            if shared and denom > 0:
                W[i, j] = W[j, i] = shared / denom
    strength = W.sum(axis=1)
    P = np.divide(
        W, strength[:, None], out=np.zeros_like(W),
        where=strength[:, None] > 0,
    )
    scores = np.ones(n)
    for _ in range(max_iter):
        new = (1.0 - damping) + damping * (P.T @ scores)
        delta = float(np.max(np.abs(new - scores))) if n else 0.0
        scores = new
        if delta < tol:
            break
    return scores


def auc_brute_force(scores, labels):
    """Pairwise comparison count; ties between classes score one half."""
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    total = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                total += 1.0
            elif p == q:
                total += 0.5
    return total / (len(pos) * len(neg))


_VOCAB = [
    "rocket", "engine", "market", "solar", "panel", "battery", "museum",
    "quantum", "bird", "chess", "harbor", "storm", "the", "and", "of",
]


def random_document(rng, max_sentences=6):
    sents = []
    for pos in range(rng.randint(1, max_sentences)):
        words = [rng.choice(_VOCAB) for _ in range(rng.randint(5, 10))]
        sents.append(make_sentence(pos, [(w, w) for w in words]))
    return sents


# ---------------------------------------------------------------------------
# features


def test_content_lemmas_drop_stops_and_punctuation():
    sent = make_sentence(1, [
        ("The", "the"), ("agreement", "agreement"), (",", ","),
        ("means", "mean"), ("what", "what"), ("agreements", "agreement"),
    ])
    assert content_lemmas(sent) == {"agreement", "mean"}


def test_sentence_distance_sweep():
    for d in range(21):
        assert sentence_distance_feature(0, d + 1) == 1.0 / (d + 1)
    assert sentence_distance_feature(5, 6) == 1.0


def test_sentence_distance_rejects_backward_candidates():
    with pytest.raises(ValueError):
        sentence_distance_feature(4, 4)


def test_textrank_matches_dense_power_iteration():
    rng = random.Random(4)
    for _ in range(100):
        doc = random_document(rng)
        got = textrank_scores(doc)
        want = textrank_oracle(doc)
        for i, sent in enumerate(doc):
            assert abs(got[sent.position] - want[i]) <= 1e-6


def test_textrank_symmetric_sentences_score_equal():
    words = [("solar", "solar"), ("panel", "panel"), ("market", "market"),
             ("growth", "growth"), ("report", "report")]
    bridge = [("solar", "solar"), ("battery", "battery"), ("panel", "panel"),
              ("storage", "storage"), ("cost", "cost")]
    doc = [
        make_sentence(0, words),
        make_sentence(1, bridge),
        make_sentence(2, words),
    ]
    scores = textrank_scores(doc)
    assert scores[0] == scores[2]


def test_textrank_isolated_sentence_and_empty_doc():
    doc = [
        make_sentence(0, [("solar", "solar"), ("panel", "panel"),
                          ("market", "market"), ("report", "report")]),
        make_sentence(1, [("chess", "chess"), ("match", "match"),
                          ("verdict", "verdict"), ("crowd", "crowd")]),
    ]
    scores = textrank_scores(doc)
    assert scores[0] == pytest.approx(0.15, abs=1e-12)
    assert scores[1] == pytest.approx(0.15, abs=1e-12)
    assert textrank_scores([]) == {}


def test_embedding_store_keys_and_lookup(tmp_path):
    path = tmp_path / "emb.json"
    path.write_text(
        '{"dim": 2, "vectors": {"a1||3": [0.1, 0.2], "a1|0-2|3": [0.3, 0.4]}}'
    )
    store = EmbeddingStore.load(path)
    assert EmbeddingStore.single_key("a1", 3) == "a1||3"
    assert EmbeddingStore.chain_key("a1", 0, 2, 3) == "a1|0-2|3"
    assert np.array_equal(store.get("a1||3"), np.array([0.1, 0.2]))
    with pytest.raises(KeyError):
        store.get("a1||9")


def test_embedding_store_rejects_bad_files(tmp_path):
    bad_dim = tmp_path / "bad_dim.json"
    bad_dim.write_text('{"dim": 3, "vectors": {"k": [1.0, 2.0]}}')
    with pytest.raises(FeatureError, match="header says 3"):
        EmbeddingStore.load(bad_dim)
    bad_json = tmp_path / "bad.json"
    bad_json.write_text("{nope")
    with pytest.raises(FeatureError, match="bad embedding file"):
        EmbeddingStore.load(bad_json)


def test_featurize_block_order(tmp_path):
    path = tmp_path / "emb.json"
    path.write_text(
        '{"dim": 2, "vectors": {"a1||3": [0.1, 0.2], "a1|0-2|3": [0.3, 0.4]}}'
    )
    store = EmbeddingStore.load(path)
    config = FeatureConfig(single_store=store, chain_store=store)
    vec = featurize("a1", [0, 2], 3, {3: 0.5}, config)
    assert np.array_equal(vec, np.array([1.0, 0.5, 0.1, 0.2, 0.3, 0.4]))
    assert config.n_dense == 2
    assert config.names() == [
        "sentence_distance", "textrank",
        "single_sentence_embedding", "chain_embedding",
    ]


def test_featurize_rejects_empty_context():
    with pytest.raises(ValueError, match="context"):
        featurize("a1", [], 3, {3: 0.5}, FeatureConfig())


def test_feature_config_subsets():
    sd_only = FeatureConfig(use_textrank=False)
    assert sd_only.names() == ["sentence_distance"]
    vec = featurize("a1", [1], 2, {}, sd_only)
    assert np.array_equal(vec, np.array([1.0]))


# ---------------------------------------------------------------------------
# ROC-AUC


def test_roc_auc_matches_brute_force():
    rng = random.Random(9)
    grid = [0.0, 0.25, 0.5, 0.75, 1.0]
    checked = 0
    while checked < 200:
        n = rng.randint(2, 12)
        labels = [rng.randint(0, 1) for _ in range(n)]
        if len(set(labels)) < 2:
            continue
        scores = [rng.choice(grid) for _ in range(n)]
        assert roc_auc(scores, labels) == auc_brute_force(scores, labels)
        checked += 1


def test_roc_auc_rejects_degenerate_input():
    with pytest.raises(ValueError, match="one class"):
        roc_auc([0.1, 0.9], [1, 1])
    with pytest.raises(ValueError, match="length"):
        roc_auc([0.1], [1, 0])


# ---------------------------------------------------------------------------
# logistic regression


def _separable_data(rng, n_per_class):
    pos = rng.normal(loc=(2.0, 1.5), scale=0.4, size=(n_per_class, 2))
    neg = rng.normal(loc=(-1.5, -2.0), scale=0.4, size=(n_per_class, 2))
    X = np.vstack([pos, neg])
    y = np.array([1] * n_per_class + [0] * n_per_class, dtype=float)
    perm = rng.permutation(len(y))
    return X[perm], y[perm]


def test_logistic_separates_clean_clusters_quickly():
    rng = np.random.default_rng(7)
    X, y = _separable_data(rng, 100)
    Xv, yv = _separable_data(rng, 50)
    started = time.perf_counter()
    model = fit_logistic(X, y, lam=0.001, n_dense=2)
    elapsed = time.perf_counter() - started
    auc = roc_auc(list(model.predict_proba(Xv)), list(yv.astype(int)))
    assert auc >= 0.99
    assert elapsed < 5.0


def test_logistic_objective_never_increases():
    rng = np.random.default_rng(3)
    X, y = _separable_data(rng, 60)
    model = fit_logistic(X, y, lam=0.01, n_dense=2)
    history = model.objective_history
    assert len(history) >= 2
    assert all(b <= a for a, b in zip(history, history[1:]))


def test_logistic_fit_is_deterministic():
    rng = np.random.default_rng(5)
    X, y = _separable_data(rng, 40)
    m1 = fit_logistic(X, y, lam=0.1, n_dense=2)
    m2 = fit_logistic(X, y, lam=0.1, n_dense=2)
    assert np.array_equal(m1.weights, m2.weights)
    assert m1.bias == m2.bias
    assert m1.objective_history == m2.objective_history


def test_logistic_standardizes_only_the_dense_prefix():
    X = np.array([
        [10.0, 5.0, 1.0],
        [12.0, 5.0, 0.0],
        [14.0, 5.0, 1.0],
        [16.0, 5.0, 0.0],
    ])
    y = np.array([0.0, 0.0, 1.0, 1.0])
    model = fit_logistic(X, y, lam=0.1, n_dense=2)
    assert model.mean.shape == (2,)
    assert model.std[1] == 1.0, "zero-variance columns fall back to unit scale"
    probe = model._standardize(X)
    assert np.array_equal(probe[:, 2], X[:, 2])


# ---------------------------------------------------------------------------
# top-1 accuracy against the closed form


def _sd_score(row):
    return sentence_distance_feature(row.context[-1], row.candidate)


def test_accuracy_matches_adjacent_positive_fraction():
    rng = random.Random(21)
    for _ in range(50):
        rows = []
        used = set()
        correct = counted = skipped = 0
        for _ in range(rng.randint(3, 8)):
            art = f"a{rng.randint(1, 3)}"
            end = rng.randint(0, 5)
            ctx = (end,) if rng.random() < 0.5 else (max(0, end - 1), end)
            if (art, ctx) in used:
                continue
            used.add((art, ctx))
            cands = rng.sample(range(end + 1, end + 9), rng.randint(2, 5))
            labels = [rng.randint(0, 1) for _ in cands]
            rows.extend(
                TrainRow(art, ctx, c, l) for c, l in zip(cands, labels)
            )
            if not any(labels):
                skipped += 1
                continue
            counted += 1
            if labels[cands.index(min(cands))] == 1:
                correct += 1
        rng.shuffle(rows)
        report = evaluate_accuracy(rows, _sd_score)
        assert report.correct == correct
        assert report.groups == counted
        assert report.skipped_no_positive == skipped
        expected = correct / counted if counted else 0.0
        assert report.accuracy == expected


# ---------------------------------------------------------------------------
# training


def _tr_map():
    class Flat(dict):
        def __missing__(self, key):
            return 0.2

    return Flat()


def _synthetic_rows(article_ids, ctx_lens):
    rows = []
    for art in article_ids:
        for ctx_len in ctx_lens:
            for start in range(4):
                ctx = tuple(range(start, start + ctx_len))
                end = ctx[-1]
                for offset, label in ((1, 1), (2, 0), (3, 0)):
                    rows.append(TrainRow(art, ctx, end + offset, label))
    return rows


def _featurizer():
    tr = _tr_map()
    config = FeatureConfig()

    def feat(row):
        return featurize(row.article_id, row.context, row.candidate, tr,
                         config)

    return feat


def test_train_builds_one_model_per_context_length():
    feat = _featurizer()
    model = train_chain_model(
        _synthetic_rows(["a", "b", "c"], [1, 2]),
        _synthetic_rows(["d"], [1, 2]),
        feat,
        n_dense=2,
        feature_names=FeatureConfig().names(),
    )
    assert model.mode == "per_context_length"
    assert set(model.models) == {"1", "2"}
    assert model.feature_names == ["sentence_distance", "textrank"]
    near = feat(TrainRow("x", (0,), 1, 1))
    far = feat(TrainRow("x", (0,), 3, 0))
    assert model.score(near, 1) > model.score(far, 1)


def test_lambda_ties_resolve_to_the_smallest():
    model = train_chain_model(
        _synthetic_rows(["a", "b"], [1]),
        _synthetic_rows(["c"], [1]),
        _featurizer(),
        n_dense=2,
    )
    assert model.models["1"].lam == DEFAULT_LAMBDA_GRID[0]


def test_joint_mode_pools_context_lengths():
    model = train_chain_model(
        _synthetic_rows(["a", "b"], [1, 2]),
        _synthetic_rows(["c"], [1, 2]),
        _featurizer(),
        n_dense=2,
        joint=True,
    )
    assert model.mode == "joint"
    assert set(model.models) == {"joint"}
    assert model.context_length(1) == 1
    assert model.context_length(7) == 2


def test_context_length_for_per_length_models():
    feat = _featurizer()
    model = train_chain_model(
        _synthetic_rows(["a", "b"], [1, 2]),
        _synthetic_rows(["c"], [1, 2]),
        feat,
        n_dense=2,
    )
    assert model.context_length(1) == 1
    assert model.context_length(2) == 2
    assert model.context_length(9) == 2


def test_train_requires_validation_rows_per_group():
    with pytest.raises(ValueError, match="no validation rows"):
        train_chain_model(
            _synthetic_rows(["a"], [1, 2]),
            _synthetic_rows(["c"], [1]),
            _featurizer(),
            n_dense=2,
        )


def test_model_save_load_round_trip(tmp_path):
    feat = _featurizer()
    model = train_chain_model(
        _synthetic_rows(["a", "b"], [1, 2]),
        _synthetic_rows(["c"], [1, 2]),
        feat,
        n_dense=2,
        feature_names=FeatureConfig().names(),
    )
    path = tmp_path / "model.json"
    model.save(path)
    loaded = ChainModel.load(path)
    assert loaded.mode == model.mode
    assert loaded.feature_names == model.feature_names
    probe = feat(TrainRow("x", (1, 2), 3, 1))
    assert loaded.score(probe, 2) == model.score(probe, 2)


def test_model_load_rejects_bad_file(tmp_path):
    path = tmp_path / "model.json"
    path.write_text("{nope")
    with pytest.raises(FeatureError, match="bad chain model file"):
        ChainModel.load(path)


def test_load_chain_rows_from_the_corpus():
    rows = load_chain_rows(CORPUS / "chain_train.jsonl")
    assert len(rows) == 315
    assert all(r.label in (0, 1) for r in rows)
    assert all(isinstance(r.context, tuple) and r.context for r in rows)
    assert all(r.candidate > r.context[-1] for r in rows)


def test_load_chain_rows_rejects_bad_lines(tmp_path):
    path = tmp_path / "rows.jsonl"
    path.write_text('{"article_id": "a", "context": [0]}\n')
    with pytest.raises(FeatureError, match="rows.jsonl:1: bad training row"):
        load_chain_rows(path)


# ---------------------------------------------------------------------------
# chain construction


def test_first_hop_window_is_wider():
    picks = {4: 1.0}
    scorer = lambda chain, cand: picks.get(cand, 0.5)
    chain = build_discussion_chain(list(range(11)), scorer)
    assert chain[1] == 4
    assert len(chain) == ChainConfig().max_length


def test_later_hops_use_the_narrow_window():
    scorer = lambda chain, cand: 1.0 if cand == 8 else 0.4
    chain = build_discussion_chain(list(range(11)), scorer,
                                   ChainConfig(max_length=4))
    assert chain == [0, 1, 2, 3], "position 8 sits outside every window"
    assert 8 not in chain


def test_stop_threshold_ends_the_chain():
    chain = build_discussion_chain(list(range(11)),
                                   lambda chain, cand: 0.2)
    assert chain == [0]


def test_chain_respects_gaps_in_eligibility():
    chain = build_discussion_chain([0, 3, 9], lambda chain, cand: 1.0)
    assert chain == [0, 3, 9]


def test_chain_over_empty_body():
    assert build_discussion_chain([0], lambda chain, cand: 1.0) == [0]


def test_oracle_scorer_reproduces_the_expected_chain():
    sents = parse_conllu((FIXTURES / "google_taiwan.conllu").read_text())
    lemmas = {s.position: content_lemmas(s) for s in sents}

    def scorer(chain, cand):
        covered = set()
        for pos in chain:
            covered |= lemmas[pos]
        if lemmas[cand] <= covered:
            return 0.0
        return sentence_distance_feature(chain[-1], cand)

    chain = build_discussion_chain([s.position for s in sents], scorer)
    assert chain == [0, 2, 3, 4]


# ---------------------------------------------------------------------------
# scorer adapters


def test_heuristic_scorer_blends_the_dense_features():
    scorer = HeuristicScorer({2: 0.4})
    want = 1.0 / (1.0 + np.exp(-(1.0 + 0.4)))
    assert scorer([0, 1], 2) == pytest.approx(want, abs=1e-12)
    fallback = HeuristicScorer({})
    want = 1.0 / (1.0 + np.exp(-(0.5 + 0.15)))
    assert fallback([0], 2) == pytest.approx(want, abs=1e-12)


def test_model_scorer_trims_context_to_model_capacity():
    feat = _featurizer()
    model = train_chain_model(
        _synthetic_rows(["a", "b"], [1, 2]),
        _synthetic_rows(["c"], [1, 2]),
        feat,
        n_dense=2,
    )
    scorer = ModelScorer(model, "a", _tr_map(), FeatureConfig())
    manual = featurize("a", [2, 3], 4, _tr_map(), FeatureConfig())
    assert scorer([0, 1, 2, 3], 4) == model.score(manual, 2)
