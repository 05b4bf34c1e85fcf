"""
Aligning ironic messages with their interpretations
===================================================

Train the bidirectional aligner on the bundled example pairs, look at a few
link sets, then mine opposite phrase pairs.
"""
from pathlib import Path

from ironyinterp.alignment import train_aligner
from ironyinterp.corpus import load_pairs, load_parses
from ironyinterp.phrases import hh_bitext, phrase_table, score_and_filter, st_bitext

FIX = Path(__file__).resolve().parents[1] / "tests" / "fixtures"
pairs = load_pairs(FIX / "quoted_pairs.tsv")
trees = load_parses(FIX / "quoted_parses.conllu")

# lemma bitext: message tokens on the left, interpretation tokens on the right
bitext = st_bitext(pairs, trees)
aligner = train_aligner(bitext, iters_m1=5, iters_hmm=5)

for src, tgt in bitext[:4]:
    links = sorted(aligner.align(src, tgt))
    print(" ".join(src), "|||", " ".join(tgt))
    print("   ", ", ".join(f"{src[i - 1]}-{tgt[j - 1]}" for i, j in links))

# phrases seen between two interpretations of one message are paraphrases,
# so they are subtracted before the phi filter
st = phrase_table(bitext, aligner)
hh = phrase_table(hh_bitext(pairs, trees), aligner)
opposite = score_and_filter(st, hh)
print(f"\n{len(st)} message/interpretation phrase pairs, {len(opposite)} kept as opposites")
# identity pairs survive the filter too; the detectors skip them
for p in sorted((p for p in opposite if p.e != p.f), key=lambda p: (-p.phi_f_given_e, p.e))[:10]:
    print(f"  {p.e!r:>24} -> {p.f!r:<24} phi={p.phi_f_given_e:.2f}")
