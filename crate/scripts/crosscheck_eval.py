#!/usr/bin/env python3
"""Recompute AUROC, AUARC and PRR from a score file and corpus, independently
of the Rust implementation, and compare against an `snne evaluate` report.

usage: crosscheck_eval.py CORPUS SCORES REPORT [--tol 1e-12]
"""
import argparse
import json
import re
import string
import sys
from collections import Counter, OrderedDict


def normalize(text):
    text = text.lower()
    text = "".join(ch for ch in text if ch not in set(string.punctuation))
    text = re.sub(r"\b(a|an|the)\b", " ", text)
    return " ".join(text.split())


def f1(pred, gold):
    p, g = normalize(pred).split(), normalize(gold).split()
    if not p or not g:
        return float(p == g)
    common = sum((Counter(p) & Counter(g)).values())
    if common == 0:
        return 0.0
    prec, rec = common / len(p), common / len(g)
    return 2 * prec * rec / (prec + rec)


def quality(rec):
    if rec.get("quality") is not None:
        return rec["quality"]
    golds = rec.get("gold_answers") or []
    if not golds:
        return None
    return max(f1(rec["greedy_answer"]["text"], g) for g in golds)


def auroc(rows):
    pos = [r[0] for r in rows if not r[2]]
    neg = [r[0] for r in rows if r[2]]
    if not pos or not neg:
        return None
    wins = sum(1.0 if a > b else 0.5 if a == b else 0.0 for a in pos for b in neg)
    return wins / (len(pos) * len(neg))


def auarc(rows):
    order = sorted(rows, key=lambda r: (r[0], r[3]))
    total, correct = 0.0, 0
    for m, r in enumerate(order, 1):
        correct += r[2]
        total += correct / m
    return total / len(order)


def area(qs, mean):
    n = len(qs)
    pts = [sum(qs[: n - j]) / (n - j) if n - j else mean for j in range(n + 1)]
    return sum((pts[j] - mean) + (pts[j + 1] - mean) for j in range(n)) * 0.5 / n


def prr(rows):
    qs = [r[1] for r in sorted(rows, key=lambda r: (r[0], r[3]))]
    if len(qs) < 2 or min(qs) == max(qs):
        return None
    mean = sum(qs) / len(qs)
    return area(qs, mean) / area(sorted(qs, reverse=True), mean)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("corpus")
    ap.add_argument("scores")
    ap.add_argument("report")
    ap.add_argument("--tol", type=float, default=1e-12)
    args = ap.parse_args()

    with open(args.corpus) as fh:
        corpus = {r["id"]: r for r in map(json.loads, filter(str.strip, fh))}
    with open(args.report) as fh:
        report = json.load(fh)["report"]
    threshold = report["correctness_threshold"]

    groups = OrderedDict()
    with open(args.scores) as fh:
        for line in filter(str.strip, fh):
            s = json.loads(line)
            if "run" in s:
                continue
            params = {k: v for k, v in s["params"].items() if not k.startswith("diag_")}
            key = (s["method"], json.dumps(params, sort_keys=True))
            q = quality(corpus[s["record_id"]])
            if q is not None:
                groups.setdefault(key, []).append((s["value"], q, q >= threshold, s["record_id"]))
            else:
                groups.setdefault(key, [])

    failures = 0
    for m in report["methods"]:
        method = m["method"]
        rows = groups[(method, json.dumps(m["params"], sort_keys=True))]
        for name, fn in (("auroc", auroc), ("auarc", auarc), ("prr", prr)):
            want = fn(rows)
            got = m[name].get("value")
            ok = (want is None and got is None) or (
                want is not None and got is not None and abs(want - got) <= args.tol
            )
            failures += not ok
            print(f"{'ok' if ok else 'MISMATCH':8} {method:8} {name:6} rust={got} python={want}")
    print("crosscheck:", "PASS" if failures == 0 else f"FAIL ({failures})")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
