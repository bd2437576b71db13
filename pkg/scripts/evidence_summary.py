#!/usr/bin/env python3
"""Print the headline numbers for both builtin scenarios.

KS verdicts, bipartite KS verdicts, classical and quantum values of the
zeros games, criticality, party counts, and the peres24 minimal search.
"""

import time

from bpqs.bks import bks_admissible
from bpqs.catalog import builtin
from bpqs.coloring import ks_colorable
from bpqs.correlations import correlation, theorem1_construct
from bpqs.games import is_bpqs
from bpqs.orthograph import party_counts, party_membership, scenario_rayset
from bpqs.search import criticality_check, minimal_bks_search


def timed(label, fn):
    t = time.perf_counter()
    out = fn()
    print(f"{label:<44} {out}  ({time.perf_counter() - t:.2f}s)")
    return out


def main() -> None:
    for name in ("peres24", "peres33", "cabello18"):
        timed(f"{name}: KS set", lambda: ks_colorable(builtin(name)).is_ks_set)
    for name in ("magic-square-scenario", "qutrit-scenario"):
        sc = builtin(name)
        timed(f"{name}: bipartite KS", lambda: bks_admissible(sc).is_bks_set)
        timed(f"{name}: BPQS, omega_c, omega_q",
              lambda: (lambda r: f"{r.bpqs} {r.omega_c} {r.omega_q}")(is_bpqs(correlation(sc))))
        s_a, s_b = theorem1_construct(sc)
        counts = party_counts(party_membership(scenario_rayset(sc), s_a, s_b))
        print(f"{name + ': red/blue/violet':<44} {counts}")
        timed(f"{name}: critical", lambda: criticality_check(sc).critical)
    for pool in ("declared", "all"):
        timed(f"peres24 minimal search ({pool} pool)",
              lambda: (lambda r: f"best={r.best} product={r.product} exhaustive_below={r.exhaustive_below}")(
                  minimal_bks_search(builtin("peres24"), 9, pool)))


if __name__ == "__main__":
    main()
