"""Run the bundled worked-example corpus and print a result table.

Thin wrapper around germlab.corpus for use outside the CLI, e.g. when
bisecting a regression with a custom seed or dumping the full JSON
report for diffing between revisions.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from germlab.corpus import corpus_report, run_corpus
from germlab.sampling import RunConfig, default_seed


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--filter", default="", help="substring of entry ids")
    ap.add_argument("--seed", type=lambda s: int(s, 0), default=None)
    ap.add_argument("--json", metavar="PATH", help="write the full report here")
    args = ap.parse_args()

    seed = default_seed() if args.seed is None else args.seed
    config = RunConfig(seed=seed)
    results = run_corpus(filter_substr=args.filter, config=config)
    if not results:
        print(f"no corpus entry matches {args.filter!r}", file=sys.stderr)
        return 2

    for r in results:
        print(f"{r.entry:14s} {r.status}")
        if r.status == "error":
            print(f"    {r.detail}")
        for c in r.checks:
            if not c.passed:
                print(f"    {c.name}: want {c.want!r}, got {c.got!r}")
    passed = sum(r.passed for r in results)
    print(f"corpus: {passed}/{len(results)} entries passed (seed {seed})")

    if args.json:
        report = corpus_report(results, seed)
        Path(args.json).write_text(json.dumps(report, indent=2, sort_keys=True))
    return 0 if passed == len(results) else 1


if __name__ == "__main__":
    raise SystemExit(main())
