"""Classify every catalog entry and print one row per semigroup."""

import argparse
import time

from germwork import catalog
from germwork.algebra import F_iso
from germwork.core import check_axioms, has_local_units, is_f_restriction, is_proper
from germwork.germs import universal_category


def row(name):
    S = catalog.semigroup(name)
    t0 = time.perf_counter()
    restriction = S.star is not None and check_axioms(S, "restriction") is None
    cells = {"size": S.size, "restriction": restriction}
    if restriction:
        lu = has_local_units(S)
        cells.update(proper=is_proper(S), local_units=lu, f_restriction=is_f_restriction(S))
        if lu:
            cells["arrows"] = universal_category(S).size
            cells["F iso"] = F_iso(S).ok
    cells["seconds"] = round(time.perf_counter() - t0, 3)
    return cells


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("names", nargs="*", help="catalog names (default: the standard sweep)")
    args = p.parse_args()
    for name in args.names or catalog.SWEEP:
        cells = row(name)
        print(f"{name:12} " + "  ".join(f"{k}={v}" for k, v in cells.items()))


if __name__ == "__main__":
    main()
