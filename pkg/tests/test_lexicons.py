import pytest
from hypothesis import given
from hypothesis import strategies as st

from ironyinterp.errors import FormatError
from ironyinterp.lexicons import (is_antonym, is_intensifier, is_negation_marker, load_lexicons, normalize_scores,
                                  sentiment_strength)

NEGATIONS = ("not n't no never none nobody nothing neither nor nowhere cannot cant wont dont doesnt didnt isnt "
             "arent wasnt werent aint without hardly barely scarcely lack lacks lacking refuse fail").split()


def mini_config(tmp_path, antonyms="love\thate\n", extra=None):
    (tmp_path / "ant.tsv").write_text(antonyms)
    (tmp_path / "ant2.tsv").write_text("great\tterrible\n")
    (tmp_path / "sent.tsv").write_text("love\t3\nlike\t1.5\nok\t1\n")
    (tmp_path / "int.tsv").write_text("so\tADV\nreal\tADJ\n")
    (tmp_path / "neg.txt").write_text("not\nn't\n")
    cfg = {"antonym_sources": [{"path": str(tmp_path / "ant.tsv"), "tag": "a"},
                               {"path": str(tmp_path / "ant2.tsv"), "tag": "b"}],
           "sentiment_source": str(tmp_path / "sent.tsv"),
           "intensifier_source": str(tmp_path / "int.tsv"),
           "negation_source": str(tmp_path / "neg.txt")}
    cfg.update(extra or {})
    return cfg


def test_default_bundle(lexicons):
    assert is_antonym("love", "hate", lexicons)
    assert is_antonym("great", "terrible", lexicons)
    assert not is_antonym("love", "love", lexicons)
    assert list(lexicons.negation_markers) == NEGATIONS
    assert lexicons.source_counts["negation"] == 30


def test_symmetry_closure(tmp_path):
    b = load_lexicons(mini_config(tmp_path))
    assert is_antonym("hate", "love", b) and is_antonym("love", "hate", b)


def test_self_pair_rejected_with_warning(tmp_path, caplog):
    b = load_lexicons(mini_config(tmp_path, "good\tgood\nlove\thate\n"))
    assert not is_antonym("good", "good", b)
    assert "good" in caplog.text


def test_same_pair_from_two_sources_merges_tags(tmp_path):
    cfg = mini_config(tmp_path, "terrible\tgreat\n")
    b = load_lexicons(cfg)
    assert len(b.antonyms) == 1
    assert b.antonyms.sources("great", "terrible") == {"a", "b"}


def test_malformed_line_reports_position(tmp_path):
    with pytest.raises(FormatError, match=":2:"):
        load_lexicons(mini_config(tmp_path, "love\thate\nlonely\n"))


def test_unreadable_resource_names_path(tmp_path):
    cfg = mini_config(tmp_path)
    cfg["sentiment_source"] = str(tmp_path / "missing.tsv")
    with pytest.raises(FormatError, match="missing.tsv"):
        load_lexicons(cfg)


def test_config_file_resolves_relative_paths(tmp_path):
    mini_config(tmp_path)
    (tmp_path / "lex.toml").write_text(
        'sentiment_source = "sent.tsv"\nintensifier_source = "int.tsv"\nnegation_source = "neg.txt"\n'
        '[[antonym_sources]]\npath = "ant.tsv"\ntag = "mine"\n')
    b = load_lexicons(tmp_path / "lex.toml")
    assert b.antonyms.sources("love", "hate") == {"mine"}


def test_strength(tmp_path, lexicons):
    assert sentiment_strength("love", lexicons) > sentiment_strength("like", lexicons)
    assert sentiment_strength("zzxqv", lexicons) is None
    b = load_lexicons(mini_config(tmp_path))
    assert sentiment_strength("love", b) == 1.0 and sentiment_strength("ok", b) == 0.0
    assert sentiment_strength("like", b) == pytest.approx(0.25)


def test_bundled_strength_extremes(lexicons):
    vals = lexicons.sentiment.values.values()
    assert min(vals) == 0.0 and max(vals) == 1.0


@given(st.dictionaries(st.text(min_size=1, max_size=4), st.floats(-100, 100), min_size=1))
def test_normalization_in_range_and_monotone(raw):
    norm = normalize_scores(raw)
    assert all(0.0 <= v <= 1.0 for v in norm.values())
    for a in raw:
        for b in raw:
            if raw[a] < raw[b]:
                assert norm[a] <= norm[b]


def test_intensifiers(lexicons):
    assert is_intensifier("so", "ADV", lexicons)
    assert not is_intensifier("so", "CONJ", lexicons) and not is_intensifier("so", "SCONJ", lexicons)
    assert is_intensifier("really", "ADV", lexicons)
    assert not is_intensifier("such", "ADJ", lexicons)


def test_extra_intensifier_flag(tmp_path):
    b = load_lexicons(mini_config(tmp_path, extra={"extra_intensifiers": [["such", "ADJ"], ["and", "CCONJ"]]}))
    assert is_intensifier("such", "ADJ", b) and not is_intensifier("and", "CCONJ", b)


def test_non_adj_adv_intensifier_skipped(tmp_path):
    cfg = mini_config(tmp_path)
    (tmp_path / "int.tsv").write_text("so\tADV\nso\tCONJ\n")
    b = load_lexicons(cfg)
    assert b.intensifiers == {("so", "ADV")}


def test_negation(lexicons):
    assert is_negation_marker("not", lexicons)
    assert is_negation_marker("Don't", lexicons) and is_negation_marker("hadn’t", lexicons)
    assert not is_negation_marker("note", lexicons)


def test_loading_is_deterministic(lexicons):
    assert load_lexicons() == lexicons


words = st.sampled_from(["love", "hate", "great", "terrible", "nice", "mean", "like", "x", "more", "less"])
_BUNDLE = load_lexicons()


@given(words, words)
def test_antonymy_symmetric(a, b):
    assert is_antonym(a, b, _BUNDLE) == is_antonym(b, a, _BUNDLE)
