#!/usr/bin/env python3
"""Run the minimal |X|*|Y| bipartite KS search on a ray set, with checkpointing.

The peres33 run over the 16 declared contexts certifies every product below 63
and takes several minutes on one core; restart with the same checkpoint to
skip levels that were already certified.

    python scripts/minimal_search.py peres33 --pool declared --max-product 63 \
        --checkpoint peres33.ckpt.json
"""

import argparse
import json
import logging
import time

from bpqs.catalog import load
from bpqs.search import NoBKSFound, minimal_bks_search


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("rayset", help="builtin name or path to a .rays file")
    ap.add_argument("--max-product", type=int, required=True)
    ap.add_argument("--pool", choices=("declared", "all"), default="all")
    ap.add_argument("--checkpoint")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    rs = load(args.rayset)
    start = time.perf_counter()
    try:
        r = minimal_bks_search(rs, args.max_product, args.pool, args.checkpoint, args.workers)
    except NoBKSFound as e:
        print(json.dumps({"found": False, "exhaustive_below": e.exhaustive_below,
                          "explored": e.explored}, indent=2, sort_keys=True))
        return 2
    s_a, s_b = r.contexts()
    print(json.dumps({
        "found": True,
        "product": r.product,
        "sum": r.sum,
        "exhaustive_below": r.exhaustive_below,
        "S_A": [c.label for c in s_a],
        "S_B": [c.label for c in s_b],
        "explored": r.explored,
        "seconds": round(time.perf_counter() - start, 1),
    }, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
