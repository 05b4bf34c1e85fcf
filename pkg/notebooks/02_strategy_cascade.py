"""
Labelling interpretation strategies
===================================

Run the detector cascade over the example pairs and print the evidence
behind each label, including evidence that a later detector consumed.
"""
from pathlib import Path

from ironyinterp.alignment import train_aligner
from ironyinterp.corpus import load_pairs, load_parses
from ironyinterp.lexicons import load_lexicons
from ironyinterp.phrases import PhrasePair, PhraseTable, st_bitext
from ironyinterp.rq import default_rq_model
from ironyinterp.strategies import Resources, classify_pair

FIX = Path(__file__).resolve().parents[1] / "tests" / "fixtures"
pairs = load_pairs(FIX / "quoted_pairs.tsv")
trees = load_parses(FIX / "quoted_parses.conllu")
lex = load_lexicons()

# the yacht pair cannot be mined from 18 pairs, so it is added by hand
opposites = PhraseTable([PhrasePair("buy a yacht", "so poor", 1, 1.0, 1.0)])
res = Resources(lex, trees, aligner=train_aligner(st_bitext(pairs, trees)),
                rq_model=default_rq_model(lex), opposite_table=opposites)

for p in pairs:
    ss = classify_pair(p, res)
    mark = "ok " if ss.labels == p.gold.strategies else "!! "
    print(mark + p.pair_id, sorted(l.value for l in ss.labels))
    print("     S:", p.s_im.text)
    print("     H:", p.h_int.text)
    for ev in ss.evidence:
        tag = " (consumed)" if ev.consumed else ""
        print(f"       {ev.method.value:<22} {ev.trigger}{tag}")
