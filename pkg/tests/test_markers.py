import pytest
from hypothesis import given
from hypothesis import strategies as st

from ironyinterp.corpus import GoldAnnotation, Incongruity, Role, Utterance, make_pair
from ironyinterp.markers import MarkerSet, detect_markers, marker_prevalence


def ms(text, tree=None):
    return detect_markers(Utterance("u", text, Role.SpeakerIronic), tree)


def test_quoted_examples():
    assert ms("Studying 5 subjects … #worstsaturdaynight").typographic == {"Hashtag"}
    assert ms("Driving in Detroit is fun ;)").typographic == {"Emoticon"}
    assert not ms("plain sentence with no devices").any_marker


def test_collection_hashtags_excluded():
    m = ms("what a day #sarcasm #Irony #sarcastic")
    assert not m.any_marker


@pytest.mark.parametrize("text,kind", [
    ("great job!!", "MultiPunct"), ("really?!", "MultiPunct"), ("this is GREAT", "AllCaps"),
    ('such a "genius" move', "Quotation"), ("love it 😂", "Emoji"), ("fun :-(", "Emoticon"),
])
def test_typographic(text, kind):
    assert kind in ms(text).typographic


@pytest.mark.parametrize("text", ["yay another monday", "oh great", "Wow. just wow"])
def test_interjections(text):
    assert ms(text).morphosyntactic == {"Interjection"}


@pytest.mark.parametrize("text", ["nice weather, isn't it?", "best day ever, right?"])
def test_tag_questions(text):
    assert "TagQuestion" in ms(text).morphosyntactic


def test_single_capital_letter_is_not_all_caps():
    assert not ms("I am fine").any_marker


def test_url_is_report_only():
    m = ms("look at this http://x.co/abc")
    assert m.report_only == {"Url"} and not m.any_marker


def test_hits_carry_spans():
    text = "so fun ;)"
    (hit,) = ms(text).hits
    assert text[hit.start:hit.end] == ";)"


def test_tree_interjection(quoted_trees):
    assert "Interjection" in ms("circling down the bowl. Yay", quoted_trees["bowl.s"]).morphosyntactic


def test_round_trip():
    m = ms("WOW... GREAT!!! #fun")
    assert MarkerSet.from_dict(m.to_dict()) == m


plain = st.text(alphabet="abcdefghijklmnopqrstuvwxyz ", max_size=30)


@given(plain, plain)
def test_marker_free_concatenation_adds_nothing(a, b):
    text = "so fun ;) " + a
    assert ms(text + " " + b).typographic >= ms(text).typographic
    kinds = lambda m: m.typographic | m.morphosyntactic
    assert kinds(ms("hello " + a)) <= kinds(ms("hello " + a + " " + b)) | {"Interjection"}


def test_prevalence():
    pairs = [make_pair("a", "fun ;)", "x", gold=GoldAnnotation(incongruity=Incongruity.Explicit)),
             make_pair("b", "so fun", "x", gold=GoldAnnotation(incongruity=Incongruity.Implicit)),
             make_pair("c", "yay", "x", gold=GoldAnnotation(incongruity=Incongruity.Unknown)),
             make_pair("d", "wow", "x", gold=GoldAnnotation(incongruity=Incongruity.Explicit, valid=False))]
    prev = marker_prevalence(pairs)
    assert (prev.explicit, prev.implicit, prev.n_unknown) == (100.0, 0.0, 1)
    empty = marker_prevalence([])
    assert empty.explicit is None and empty.implicit is None
