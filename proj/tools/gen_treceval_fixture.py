#!/usr/bin/env python3
"""Regenerates the 50-query metric agreement fixture under tests/fixtures/treceval/.

Writes run.trec, qrels.tsv, and expected.json with per-query ndcg_cut_10,
map_cut_10, and recall_10 values. Expected values come from pytrec_eval (the
compiled trec_eval) when it is importable; otherwise from the reference
implementation below, which follows trec_eval's measure semantics:

  * rankings are re-sorted by (score desc, docno desc), ignoring given ranks
  * ndcg_cut uses linear gains rel/log2(rank+1), ideal DCG cut at k
  * map_cut divides by R, the total relevant count in the qrels
  * recall_10 is |relevant in top-10| / R

All generated scores are distinct, so the docno tie-break never fires and the
values are identical under either sort convention. expected.json records which
oracle produced it. Run from the repository root:

    python3 tools/gen_treceval_fixture.py
"""

import json
import math
import os
import random

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
OUT = os.path.join(ROOT, "tests", "fixtures", "treceval")

K = 10
NUM_QUERIES = 50


def reference_metrics(run, qrels, k):
    """trec_eval-style metrics; run: qid -> {docno: score}, qrels: qid -> {docno: rel}."""
    out = {}
    for qid, doc_scores in run.items():
        judgments = qrels.get(qid, {})
        # trec_eval re-sorts by score desc (docno desc on ties; the generator
        # emits distinct scores so the tie-break can never fire here)
        ranked_ids = [d for d, _ in sorted(doc_scores.items(), key=lambda kv: -kv[1])]

        rels = sorted((r for r in judgments.values() if r > 0), reverse=True)
        idcg = sum(r / math.log2(i + 2) for i, r in enumerate(rels[:k]))
        dcg = sum(
            judgments.get(d, 0) / math.log2(i + 2)
            for i, d in enumerate(ranked_ids[:k])
            if judgments.get(d, 0) > 0
        )
        ndcg = dcg / idcg if idcg > 0 else 0.0

        total_rel = len(rels)
        hits = 0
        ap = 0.0
        for i, d in enumerate(ranked_ids[:k]):
            if judgments.get(d, 0) > 0:
                hits += 1
                ap += hits / (i + 1)
        ap = ap / total_rel if total_rel else 0.0

        found = sum(1 for d in ranked_ids[:k] if judgments.get(d, 0) > 0)
        recall = found / total_rel if total_rel else 0.0

        out[qid] = {"ndcg_cut_10": ndcg, "map_cut_10": ap, "recall_10": recall}
    return out


def pytrec_metrics(run, qrels, k):
    import pytrec_eval

    evaluator = pytrec_eval.RelevanceEvaluator(
        qrels, {f"ndcg_cut.{k}", f"map_cut.{k}", f"recall.{k}"})
    raw = evaluator.evaluate(run)
    return {
        qid: {
            "ndcg_cut_10": vals[f"ndcg_cut_{k}"],
            "map_cut_10": vals[f"map_cut_{k}"],
            "recall_10": vals[f"recall_{k}"],
        }
        for qid, vals in raw.items()
    }


def main():
    rng = random.Random(4217)
    run = {}
    qrels = {}
    for qn in range(NUM_QUERIES):
        qid = f"tq{qn:02d}"
        pool = [f"doc{qn:02d}_{d:03d}" for d in range(40)]
        retrieved = rng.sample(pool, rng.randint(5, 30))
        # strictly decreasing, distinct scores with 6-decimal-safe spacing
        base = rng.uniform(5.0, 20.0)
        run[qid] = {d: round(base - i * 0.0731, 6) for i, d in enumerate(retrieved)}

        judged = rng.sample(pool, rng.randint(2, 25))
        if qn == 7:
            grades = {d: 0 for d in judged}  # judged but nothing relevant
        else:
            grades = {d: rng.choice([0, 1, 1, 2, 2, 3]) for d in judged}
            if all(g == 0 for g in grades.values()):
                grades[judged[0]] = 1
        qrels[qid] = grades

    oracle = "builtin-reference"
    try:
        per_query = pytrec_metrics(run, qrels, K)
        oracle = "pytrec_eval"
    except ImportError:
        per_query = reference_metrics(run, qrels, K)

    os.makedirs(OUT, exist_ok=True)
    with open(os.path.join(OUT, "run.trec"), "w", encoding="utf-8") as fh:
        for qid in sorted(run):
            ranked = sorted(run[qid].items(), key=lambda kv: -kv[1])
            for rank, (docno, score) in enumerate(ranked, start=1):
                fh.write(f"{qid} Q0 {docno} {rank} {score:.6f} fixture\n")

    with open(os.path.join(OUT, "qrels.tsv"), "w", encoding="utf-8") as fh:
        fh.write("query-id\tcorpus-id\tscore\n")
        for qid in sorted(qrels):
            for docno in sorted(qrels[qid]):
                fh.write(f"{qid}\t{docno}\t{qrels[qid][docno]}\n")

    means = {
        m: sum(v[m] for v in per_query.values()) / len(per_query)
        for m in ("ndcg_cut_10", "map_cut_10", "recall_10")
    }
    with open(os.path.join(OUT, "expected.json"), "w", encoding="utf-8") as fh:
        json.dump({"oracle": oracle, "k": K, "num_queries": len(per_query),
                   "per_query": per_query, "means": means}, fh, indent=2, sort_keys=True)
        fh.write("\n")

    print(f"oracle={oracle} queries={len(per_query)} "
          f"mean ndcg={means['ndcg_cut_10']:.4f} map={means['map_cut_10']:.4f} "
          f"recall={means['recall_10']:.4f}")


if __name__ == "__main__":
    main()
