"""Walk the four-element monoid ∅, f, g, 1 on two points through the pipeline."""

from germwork import catalog
from germwork.algebra import F_iso
from germwork.category import category_to_dot, slice_semigroup
from germwork.constellation import P_of
from germwork.core import check_axioms, is_proper, sigma
from germwork.germs import range_oplus, spectral_action, universal_category


def main():
    S = catalog.semigroup("paper-4")
    names = [S.label(s) for s in range(S.size)]
    print("elements:", names)
    print("maps:", [m.image for m in S.maps])
    print("restriction:", check_axioms(S, "restriction") is None)
    print("sigma classes:", [[names[s] for s in c] for c in sigma(S).classes()], " proper:", is_proper(S))

    beta = spectral_action(S)
    print("spectrum:", list(beta.point_labels))
    for s in range(S.size):
        print(f"  beta_{names[s]}:", beta.theta[s].image)

    G = universal_category(S)
    print("universal category arrows:", [G.category.label(a) for a in range(G.size)])
    print(category_to_dot(G.category, "C"), end="")
    print("compact slices:", len(slice_semigroup(G.category).slices))

    rep = range_oplus(S)
    print("oplus:", [names[e] for e in rep.table], " range axioms:", rep.is_range)
    if rep.violation is not None:
        print("  fails", rep.violation.law, "at", [names[w] for w in rep.violation.witness])

    Q = P_of(S)
    print("constellation composable pairs:",
          [(names[s], names[t]) for s in range(S.size) for t in range(S.size) if Q.pp[s][t] is not None])

    r = F_iso(S)
    print("F order:", [names[s] for s in r.order])
    for s, line in zip(r.order, r.matrix):
        print(f"  F({names[s]}) =", [str(v) for v in line])
    print("F is an isomorphism:", r.ok)


if __name__ == "__main__":
    main()
