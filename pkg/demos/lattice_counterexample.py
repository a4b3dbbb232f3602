"""Stacks of M_3: every small sublattice maps onto 2, the whole stack does not."""

from pinchlab.lattices import TWO, a_n, check_witness, hom_onto_two, p_n, verify_lattice_cex

for n in (1, 2):
    A = a_n(n, 3)
    rep = verify_lattice_cex(TWO, n)
    print(f"{A.name}: {A.size} elements, maps into 2: {not rep.no_hom_into_L}, "
          f"{rep.onto_two}/{rep.generator_sets} generated sublattices map onto 2")
    w = check_witness(n)
    print(f"  p_{n}: {p_n(n).size} elements, onto 2: {hom_onto_two(p_n(n))}, "
          f"atoms generate: {w.atoms_generate}, smaller atom sets that generate: {w.smaller_generating}")
