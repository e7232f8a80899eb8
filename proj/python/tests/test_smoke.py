import itertools

import pytest

import autoss


def levenshtein(a, b):
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


@pytest.fixture(scope="module")
def owner():
    corpus = autoss.generate_corpus(600, seed=3)
    index = autoss.Index(corpus, fanout=8)
    pub, priv = autoss.generate_keys()
    index.sign(priv)
    return index, autoss.Embedding(index.corpus, dim=5, seed=3), pub


def test_edit_distance_matches_python():
    for a, b in [("kitten", "sitting"), ("", "abc"), ("café", "cafe"), ("smith", "smith")]:
        assert autoss.edit_distance(a, b) == levenshtein(a, b)


def test_search_matches_scan(owner):
    index, _, _ = owner
    for q in autoss.generate_queries(index.corpus, 5, seed=1):
        want = sorted(s for s in index.corpus if levenshtein(q, s) <= 2)
        assert index.search(q, 2) == want


@pytest.mark.parametrize("mode,topk", [("vs2", 0), ("evs2", 0), ("vs2", 3), ("evs2", 3)])
def test_honest_round_trip(owner, mode, topk):
    index, emb, pub = owner
    for q in autoss.generate_queries(index.corpus, 4, seed=2):
        response = index.respond(q, 2, mode=mode, embedding=emb, topk=topk)
        report = autoss.verify(response, q, 2, pub, embedding=emb)
        assert report.passed, report.detail
        assert report.counters.vo_bytes > 0


def test_attacks_are_detected(owner):
    index, emb, pub = owner
    queries = autoss.generate_queries(index.corpus, 6, seed=4)
    seen = 0
    for kind, q in itertools.product(["tamper_string", "drop_similar_v2", "add_false_hits_v1"], queries):
        forged = autoss.attack(index, kind, q, 2, mode="evs2", embedding=emb)
        if forged is None:
            continue
        response, step, diagnosis = forged
        report = autoss.verify(response, q, 2, pub, embedding=emb)
        assert not report
        assert (report.step, report.diagnosis) == (step, diagnosis)
        seen += 1
    assert seen > 0


def test_wrong_query_fails(owner):
    index, _, pub = owner
    q = index.corpus[10]
    response = index.respond(q, 1)
    assert autoss.verify(response, q, 1, pub)
    assert not autoss.verify(response, q + "zz", 1, pub)


def test_bytes_round_trip(owner):
    index, emb, _ = owner
    assert autoss.Index.from_bytes(index.to_bytes()).root_digest == index.root_digest
    assert autoss.Embedding.from_bytes(emb.to_bytes()).reference_sets == emb.reference_sets
    with pytest.raises(autoss.ParseError):
        autoss.verify(b"SSR1\x00", "a", 1, b"")


def test_bad_input_raises():
    with pytest.raises(RuntimeError):
        autoss.Index([], 4)
    with pytest.raises(RuntimeError):
        autoss.Index(["a", "a"], 4)
