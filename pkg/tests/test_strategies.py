import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ironyinterp.corpus import StrategyLabel as L, build_tree, make_pair
from ironyinterp.lexicons import load_lexicons
from ironyinterp.phrases import PhrasePair, PhraseTable
from ironyinterp.strategies import (Method, Resources, StrategySet, check_strategy_set, classify_pair,
                                    desiderative_match, detect_desiderative, detect_interrog_to_decl,
                                    detect_lexical_antonym, detect_phrasal_pragmatic, detect_simple_negation,
                                    detect_weaken_sentiment)

YACHT = PhraseTable([PhrasePair("buy a yacht", "so poor", 1, 1.0, 1.0)])


def by_id(pairs, pid):
    return next(p for p in pairs if p.pair_id == pid)


def test_dependency_antonym(quoted_pairs, quoted_trees, lexicons):
    (ev,) = detect_lexical_antonym(by_id(quoted_pairs, "steelers"), None, quoted_trees, lexicons)
    assert ev.method is Method.DependencyAntonym and ev.trigger == ("more", "less")


def test_fallback_antonym(quoted_pairs, quoted_trees, lexicons):
    (ev,) = detect_lexical_antonym(by_id(quoted_pairs, "bowl"), None, quoted_trees, lexicons)
    assert ev.method is Method.FallbackAntonym and ev.trigger == ("yay", "awful")


def test_aligned_antonym_wins(quoted_pairs, quoted_trees, lexicons):
    p = by_id(quoted_pairs, "steelers")
    (ev,) = detect_lexical_antonym(p, {(5, 2)}, quoted_trees, lexicons)
    assert ev.method is Method.AlignedAntonym and ev.s_span == (5, 5) and ev.h_span == (2, 2)


def test_fallback_only_when_others_silent(lexicons):
    p = make_pair("x", "I love mondays and hate fridays", "I hate mondays")
    assert detect_lexical_antonym(p, None, {}, lexicons) == []
    p = make_pair("x", "I love mondays", "I hate mondays")
    (ev,) = detect_lexical_antonym(p, None, {}, lexicons)
    assert ev.method is Method.FallbackAntonym


def test_copy_has_no_evidence(lexicons):
    p = make_pair("c", "I love to hate mondays", "I love to hate mondays")
    assert detect_lexical_antonym(p, None, {}, lexicons) == []
    assert classify_pair(p, Resources(lexicons)).labels == frozenset()


def test_negation_scope(quoted_pairs, quoted_trees, lexicons):
    (ev,) = detect_simple_negation(by_id(quoted_pairs, "looks"), quoted_trees, lexicons)
    assert ev.trigger == ("not", "look") and ev.h_span == (2, 3) and ev.s_span == (1, 1)


def test_negation_in_message_for_blame(lexicons):
    p = make_pair("b", "not a biggie", "a biggie")
    trees = {"b.s": build_tree("b.s", [[("not", "not", "PART", 3, "advmod"), ("a", "a", "DET", 3, "det"),
                                        ("biggie", "biggie", "NOUN", 0, "root")]])}
    (ev,) = detect_simple_negation(p, trees, lexicons)
    assert ev.s_span == (1, 3) and ev.h_span == (2, 2)


def test_negation_on_both_sides(lexicons):
    p = make_pair("r", "no rain today", "no rain today")
    trees = {u: build_tree(u, [[("no", "no", "DET", 2, "det"), ("rain", "rain", "NOUN", 0, "root"),
                                ("today", "today", "NOUN", 2, "obl")]]) for u in ("r.s", "r.h")}
    assert detect_simple_negation(p, trees, lexicons) == []


def test_negation_needs_parse(lexicons):
    p = make_pair("u", "looks just like me", "does not look like me")
    notes = []
    assert detect_simple_negation(p, {}, lexicons, report=notes) == []
    assert notes
    ss = classify_pair(p, Resources(lexicons))
    assert ss.labels == frozenset() and any("parse" in n for n in ss.notes)


def test_weaken_neutralize(quoted_pairs, quoted_trees, lexicons):
    p = by_id(quoted_pairs, "sick")
    new, consumed = detect_weaken_sentiment(p, None, quoted_trees, lexicons, [])
    (ev,) = new
    assert ev.method is Method.WeakenNeutralize and ev.trigger == ("love", "like")


def test_weaken_drop_intensifier(quoted_pairs, quoted_trees, lexicons):
    p = by_id(quoted_pairs, "cake")
    prior = detect_simple_negation(p, quoted_trees, lexicons)
    new, consumed = detect_weaken_sentiment(p, None, quoted_trees, lexicons, prior)
    (ev,) = new
    assert ev.method is Method.WeakenDropIntensifier and ev.trigger[0] == "so" and consumed == {0}


def test_no_neutralize_for_same_lemma(quoted_pairs, quoted_trees, lexicons):
    p = by_id(quoted_pairs, "looks")
    prior = detect_simple_negation(p, quoted_trees, lexicons)
    new, _ = detect_weaken_sentiment(p, {(1, 3)}, quoted_trees, lexicons, prior)
    assert new == []


def test_weaken_margin(quoted_pairs, quoted_trees, lexicons):
    p = by_id(quoted_pairs, "sick")
    new, _ = detect_weaken_sentiment(p, None, quoted_trees, lexicons, [], margin=0.9)
    assert new == []


def test_interrog_to_decl(quoted_pairs, quoted_trees, lexicons, rq_model):
    p = by_id(quoted_pairs, "fighting")
    prior = detect_lexical_antonym(p, None, quoted_trees, lexicons)
    new, consumed = detect_interrog_to_decl(p, rq_model, prior, lexicons)
    assert [e.label for e in new] == [L.AnInterrogToDecl] and consumed == {0}


def test_interrog_requires_question_and_declarative(lexicons, rq_model):
    p = make_pair("q", "you love fighting", "I hate fighting")
    prior = detect_lexical_antonym(p, None, {}, lexicons)
    assert detect_interrog_to_decl(p, rq_model, prior, lexicons) == ([], set())
    p = make_pair("q", "don't you love fighting?", "do you hate fighting?")
    prior = detect_lexical_antonym(p, None, {}, lexicons)
    assert detect_interrog_to_decl(p, rq_model, prior, lexicons) == ([], set())


@pytest.mark.parametrize("text,hit", [
    ("I wish you hadn't relayed this news", True),
    ("I really wish my friends and family would check up on me", True),
    ("i just really wish it rained", True),
    ("I very very much wish", False),
    ("the wishbone broke", False),
    ("I wished for it", False),
    ("I'm sure. wish me luck", False),
    ("WISH", False),
])
def test_desiderative_pattern(text, hit):
    assert (desiderative_match(text) is not None) == hit
    assert bool(detect_desiderative(make_pair("d", "x", text))) == hit


def test_phrasal_last_resort(quoted_pairs, quoted_trees, lexicons):
    p = by_id(quoted_pairs, "yacht")
    (ev,) = detect_phrasal_pragmatic(p, YACHT, [], quoted_trees)
    assert ev.trigger == ("buy a yacht", "so poor")
    assert detect_phrasal_pragmatic(p, PhraseTable(), [], quoted_trees) == []
    lexant = detect_lexical_antonym(by_id(quoted_pairs, "bowl"), None, quoted_trees, lexicons)
    assert detect_phrasal_pragmatic(p, YACHT, lexant, quoted_trees) == []


def test_dave_two_strategies(quoted_pairs, quoted_trees, lexicons):
    ss = classify_pair(by_id(quoted_pairs, "dave"), Resources(lexicons, quoted_trees))
    assert ss.labels == {L.LexAnt, L.SimpleNeg}
    live = [e for e in ss.evidence if not e.consumed]
    assert len(live) == 2 and {e.s_sentence for e in live} == {0, 1}


def test_such_flag(quoted_pairs, quoted_trees, lexicons):
    p = by_id(quoted_pairs, "t1h3")
    assert classify_pair(p, Resources(lexicons, quoted_trees)).labels == {L.SimpleNeg}
    from ironyinterp.lexicons import default_config_path
    import tomli

    cfg = tomli.loads(default_config_path().read_text())
    base = default_config_path().parent
    for key in ("sentiment_source", "intensifier_source", "negation_source"):
        cfg[key] = str(base / cfg[key])
    for src in cfg["antonym_sources"]:
        src["path"] = str(base / src["path"])
    cfg["extra_intensifiers"] = [["such", "ADJ"]]
    ss = classify_pair(p, Resources(load_lexicons(cfg), quoted_trees))
    assert ss.labels == {L.AnWeakSent}


def test_unrelated_pair_empty(lexicons, rq_model):
    ss = classify_pair(make_pair("u", "the bus was late", "green tea tastes fine"),
                       Resources(lexicons, rq_model=rq_model, opposite_table=YACHT))
    assert ss.labels == frozenset() and ss.evidence == ()


def test_strategy_set_round_trip(quoted_pairs, quoted_trees, lexicons, rq_model):
    res = Resources(lexicons, quoted_trees, rq_model=rq_model, opposite_table=YACHT)
    for p in quoted_pairs:
        ss = classify_pair(p, res)
        assert StrategySet.from_dict(ss.to_dict()) == ss


VOCAB = ["i", "you", "love", "hate", "like", "not", "don't", "so", "nice", "mean", "great", "terrible",
         "wish", "really", "healthy", "buy", "a", "yacht", "poor", "?", "fighting", "is", "more", "less"]
sentence = st.lists(st.sampled_from(VOCAB), min_size=1, max_size=8).map(" ".join)


def random_tree(uid, text, draw):
    words = text.split()
    heads = [0] + [draw(st.integers(1, k)) for k in range(1, len(words))]
    # node k+1 points to an earlier node: a valid tree rooted at token 1
    rows = [(w, w.replace("don't", "not"), draw(st.sampled_from(["ADV", "ADJ", "VERB", "PART"])), h, "dep")
            for w, h in zip(words, heads)]
    return build_tree(uid, [rows])


_LEX = load_lexicons()


@st.composite
def pairs_with_resources(draw):
    s, h = draw(sentence), draw(sentence)
    p = make_pair("p", s, h)
    trees = {}
    if draw(st.booleans()):
        trees = {"p.s": random_tree("p.s", s, draw), "p.h": random_tree("p.h", h, draw)}
    ns, nh = len(trees["p.s"].tokens) if trees else len(s.split()), len(trees["p.h"].tokens) if trees else 0
    links = None
    if trees and draw(st.booleans()):
        links = frozenset(draw(st.lists(st.tuples(st.integers(1, ns), st.integers(1, nh)), max_size=6)))
    return p, trees, links


@given(pairs_with_resources())
@settings(max_examples=300, deadline=None)
def test_no_double_counting(case):
    from ironyinterp.rq import RqModel
    import numpy as np

    p, trees, links = case
    always_rq = RqModel(np.zeros(6), 5.0, np.zeros(6), np.ones(6))
    res = Resources(_LEX, trees, alignments={"p": links} if links is not None else {},
                    rq_model=always_rq, opposite_table=YACHT)
    ss = classify_pair(p, res)
    check_strategy_set(ss)
    for k, ev in enumerate(ss.evidence):
        if ev.consumed:
            owners = [e for e in ss.evidence if k in e.consumes]
            assert len(owners) == 1 and not owners[0].consumed
    if L.AntPhrasePragInf in ss.labels:
        assert ss.labels == {L.AntPhrasePragInf}
    assert classify_pair(p, res) == ss
    assert detect_desiderative(p) == detect_desiderative(make_pair("z", "other", p.h_int.text))
