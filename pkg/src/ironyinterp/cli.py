"""Command-line entry point.

Exit codes: 0 success, 1 input error, 2 internal invariant violation.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .errors import FormatError, InvariantError, IronyInterpError

log = logging.getLogger("ironyinterp")


def _write_json(obj, path):
    text = json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _write_jsonl(rows, path):
    with open(path, "w", encoding="utf-8") as fh:
        for r in rows:
            fh.write(json.dumps(r, ensure_ascii=False) + "\n")


def _read_jsonl(path):
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise FormatError(f"invalid JSON ({exc.msg})", path, lineno) from None
    return out


def _pairs(path):
    from .corpus import load_pairs

    fmt = "JSONL" if str(path).endswith((".jsonl", ".json")) else "TSV"
    return load_pairs(path, fmt)


def _parses(path):
    from .corpus import load_parses

    return load_parses(path) if path else {}


def _lexicons(path):
    from .lexicons import load_lexicons

    return load_lexicons(path)


def cmd_validate(args):
    from .corpus import validate_corpus

    report = validate_corpus(_pairs(args.pairs), _parses(args.parses))
    text = report.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


def cmd_align_train(args):
    from .alignment import train_aligner, write_bitext
    from .phrases import st_bitext

    bitext = st_bitext(_pairs(args.bitext), _parses(args.parses))
    aligner = train_aligner(bitext, args.iters_m1, args.iters_hmm, identity_prior=not args.no_identity_prior,
                            heuristic=args.heuristic)
    out = Path(args.out)
    aligner.save(out)
    write_bitext(bitext, out / "bitext.tsv")
    log.info("trained on %d sentence pairs -> %s", len(bitext), out)
    return 0


def cmd_align_hh(args):
    from .alignment import write_bitext
    from .phrases import hh_bitext

    bitext = hh_bitext(_pairs(args.pairs), _parses(args.parses))
    write_bitext(bitext, args.out)
    log.info("%d interpretation pairs -> %s", len(bitext), args.out)
    return 0


def cmd_align_mine(args):
    from .alignment import Aligner, read_bitext
    from .phrases import phrase_table, score_and_filter

    model = Path(args.model)
    aligner = Aligner.load(model)
    st = read_bitext(args.bitext or model / "bitext.tsv")
    hh = read_bitext(args.hh_bitext)
    table = score_and_filter(phrase_table(st, aligner, args.max_len), phrase_table(hh, aligner, args.max_len))
    table.to_tsv(args.out)
    log.info("%d opposite phrase pairs -> %s", len(table), args.out)
    return 0


def cmd_classify(args):
    from .alignment import Aligner
    from .phrases import PhraseTable
    from .rq import RqModel, default_rq_model, load_embeddings
    from .strategies import Resources, check_strategy_set, classify_pair

    pairs = _pairs(args.pairs)
    lex = _lexicons(args.lexicons)
    rq_model = RqModel.load(args.rq_model) if args.rq_model else default_rq_model(lex)
    res = Resources(
        lexicons=lex,
        trees=_parses(args.parses),
        aligner=Aligner.load(args.model) if args.model else None,
        rq_model=rq_model,
        opposite_table=PhraseTable.from_tsv(args.phrases) if args.phrases else None,
        embeddings=load_embeddings(args.embeddings) if args.embeddings else None,
        weaken_margin=args.weaken_margin,
    )
    rows = []
    for p in sorted((p for p in pairs if p.valid or args.include_invalid), key=lambda p: p.pair_id):
        ss = classify_pair(p, res)
        check_strategy_set(ss)
        rows.append(ss.to_dict())
    _write_jsonl(rows, args.out)
    log.info("classified %d pairs -> %s", len(rows), args.out)
    return 0


def cmd_train_rq(args):
    from .rq import RqConfig, load_embeddings, read_training_tsv, train_rq_classifier

    lex = _lexicons(args.lexicons)
    emb = load_embeddings(args.embeddings) if args.embeddings else None
    config = RqConfig(l2=args.l2, learning_rate=args.learning_rate, max_epochs=args.max_epochs, seed=args.seed)
    model = train_rq_classifier(read_training_tsv(args.data), lex, config, emb)
    model.save(args.out)
    log.info("loss %.4f after %d epochs -> %s", model.meta["loss"], model.meta["epochs"], args.out)
    return 0


def cmd_markers(args):
    from .markers import detect_markers

    trees = _parses(args.parses)
    seen, rows = set(), []
    for p in _pairs(args.pairs):
        if p.s_im.id in seen:
            continue
        seen.add(p.s_im.id)
        rows.append(detect_markers(p.s_im, trees.get(p.s_im.id)).to_dict())
    _write_jsonl(rows, args.out)
    return 0


def _check_columns(name, percents):
    vals = [v for v in percents if v is not None]
    if vals and abs(sum(vals) - 100.0) > 0.1:
        raise InvariantError(f"{name}: shares sum to {sum(vals):.3f}")


def cmd_report(args):
    from .analysis import (agreement_histogram, incongruity_crosstab, marker_crosstab,
                           per_hearer_distribution, strategy_distribution)
    from .markers import MarkerSet, detect_markers
    from .strategies import StrategySet

    pairs = [p for p in _pairs(args.pairs) if p.valid]
    sets = {d["pair_id"]: StrategySet.from_dict(d) for d in _read_jsonl(args.labels)}
    known = {p.pair_id for p in pairs}
    missing = sorted(set(sets) - known)
    if missing:
        raise FormatError(f"labels for unknown or invalid pairs: {', '.join(missing[:5])}", args.labels)
    if args.markers:
        markers = {d["utterance_id"]: MarkerSet.from_dict(d) for d in _read_jsonl(args.markers)}
    else:
        markers = {p.s_im.id: detect_markers(p.s_im) for p in pairs}

    ordered = [sets[p.pair_id] for p in pairs if p.pair_id in sets]
    dist = strategy_distribution(ordered, args.tag, args.denominator)
    inc = incongruity_crosstab(sets, pairs)
    mk = marker_crosstab(sets, pairs, markers)
    ph = per_hearer_distribution(sets, pairs, args.min_shared)
    ag = agreement_histogram(sets, pairs)

    if dist.denominator == "instances":
        _check_columns("distribution", dist.percentages.values())
    for tab in (inc, mk):
        for c in tab.conditions:
            _check_columns(f"{tab.kind}/{c}", tab.percentages[c].values())
    _check_columns("agreement", ag.shares.values())

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(dist.to_dict(), out / "distribution.json")
    _write_json(inc.to_dict(), out / "crosstab_incongruity.json")
    _write_json(mk.to_dict(), out / "crosstab_markers.json")
    _write_json(ph.to_dict(), out / "per_hearer.json")
    _write_json(ag.to_dict(), out / "agreement.json")
    if not args.quiet:
        for title, obj in (("Strategy distribution", dist), ("By incongruity", inc), ("By irony markers", mk),
                           ("Per hearer", ph), ("Agreement per message", ag)):
            print(f"== {title}\n{obj.to_text()}\n")
    return 0


def cmd_evaluate(args):
    from .analysis import evaluate
    from .strategies import StrategySet

    pred = {d["pair_id"]: StrategySet.from_dict(d) for d in _read_jsonl(args.predicted)}
    gold = {p.pair_id: p.gold.strategies for p in _pairs(args.gold) if p.gold is not None and p.valid}
    if not gold:
        raise FormatError("gold file has no annotated pairs", args.gold)
    report = evaluate(pred, gold)
    _write_json(report.to_dict(), args.out)
    if args.out not in (None, "-"):
        print(report.to_text())
    return 0


def cmd_kappa(args):
    from .analysis import cohen_kappa

    with open(args.file, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh, delimiter="\t"))
    for col in (args.a, args.b):
        if not rows or col not in rows[0]:
            raise FormatError(f"column {col!r} not found", args.file, 1)
    res = cohen_kappa([r[args.a] for r in rows], [r[args.b] for r in rows])
    _write_json(res.to_dict(), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ironyinterp", description="Irony interpretation strategy analysis")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a pairs file and its parses")
    p.add_argument("--pairs", required=True)
    p.add_argument("--parses")
    p.add_argument("--out", help="JSON report path (default stdout)")
    p.set_defaults(func=cmd_validate)

    align = sub.add_parser("align", help="word alignment and phrase mining")
    asub = align.add_subparsers(dest="align_command", required=True)
    p = asub.add_parser("train", help="train the bidirectional aligner on message/interpretation pairs")
    p.add_argument("--bitext", required=True, help="pairs file")
    p.add_argument("--parses", help="CoNLL-U; lemmas are used when present")
    p.add_argument("--iters-m1", type=int, default=5)
    p.add_argument("--iters-hmm", type=int, default=5)
    p.add_argument("--heuristic", choices=("Intersection", "GrowDiagFinal"), default="GrowDiagFinal")
    p.add_argument("--no-identity-prior", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_align_train)
    p = asub.add_parser("hh-bitext", help="write the interpretation-interpretation bitext")
    p.add_argument("--pairs", required=True)
    p.add_argument("--parses")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_align_hh)
    p = asub.add_parser("mine-phrases", help="extract, score and filter opposite phrase pairs")
    p.add_argument("--model", required=True)
    p.add_argument("--hh-bitext", required=True)
    p.add_argument("--bitext", help="message/interpretation bitext (default: the one saved with the model)")
    p.add_argument("--max-len", type=int, default=4)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_align_mine)

    p = sub.add_parser("classify", help="label every pair with interpretation strategies")
    p.add_argument("--pairs", required=True)
    p.add_argument("--parses")
    p.add_argument("--model", help="aligner directory")
    p.add_argument("--phrases", help="opposite phrase table")
    p.add_argument("--rq-model", help="rhetorical-question model (default: bundled seed model)")
    p.add_argument("--lexicons", help="lexicon config (default: bundled)")
    p.add_argument("--embeddings")
    p.add_argument("--weaken-margin", type=float, default=0.05)
    p.add_argument("--include-invalid", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("train-rq", help="train the rhetorical-question classifier")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--embeddings")
    p.add_argument("--lexicons")
    p.add_argument("--l2", type=float, default=1e-3)
    p.add_argument("--learning-rate", type=float, default=0.5)
    p.add_argument("--max-epochs", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train_rq)

    p = sub.add_parser("markers", help="detect irony markers in the ironic messages")
    p.add_argument("--pairs", required=True)
    p.add_argument("--parses")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_markers)

    p = sub.add_parser("report", help="distribution tables, cross-tabulations and agreement patterns")
    p.add_argument("--labels", required=True)
    p.add_argument("--pairs", required=True)
    p.add_argument("--markers")
    p.add_argument("--tag", default="")
    p.add_argument("--denominator", choices=("instances", "pairs"), default="instances")
    p.add_argument("--min-shared", type=int, default=500)
    p.add_argument("--quiet", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("evaluate", help="precision/recall/F1 against gold strategy labels")
    p.add_argument("--predicted", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("kappa", help="Cohen's kappa between two label columns of a TSV file")
    p.add_argument("--file", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_kappa)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2
    except (IronyInterpError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
