"""
Distribution tables and agreement
=================================

Aggregate labels into the strategy distribution, the incongruity and marker
cross-tabulations, and the per-message agreement histogram.  With only the
example pairs the numbers are tiny; point PAIRS at a full corpus for real ones.
"""
import os
from pathlib import Path

from ironyinterp.analysis import (agreement_histogram, incongruity_crosstab, marker_crosstab,
                                  strategy_distribution)
from ironyinterp.corpus import load_pairs, load_parses
from ironyinterp.lexicons import load_lexicons
from ironyinterp.markers import detect_markers, marker_prevalence
from ironyinterp.rq import default_rq_model
from ironyinterp.strategies import Resources, classify_pair

FIX = Path(__file__).resolve().parents[1] / "tests" / "fixtures"
pairs = load_pairs(os.environ.get("PAIRS", FIX / "quoted_pairs.tsv"))
trees = load_parses(FIX / "quoted_parses.conllu") if "PAIRS" not in os.environ else {}
lex = load_lexicons()
res = Resources(lex, trees, rq_model=default_rq_model(lex))

sets = {p.pair_id: classify_pair(p, res) for p in pairs if p.valid}
markers = {p.s_im.id: detect_markers(p.s_im, trees.get(p.s_im.id)) for p in pairs}

print(strategy_distribution(sets.values(), "examples").to_text(), "\n")
print(incongruity_crosstab(sets, pairs).to_text(), "\n")
print(marker_crosstab(sets, pairs, markers).to_text(), "\n")
print(agreement_histogram(sets, pairs).to_text(), "\n")
print(marker_prevalence(pairs, markers))
