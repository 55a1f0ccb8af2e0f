"""Coherence, the recovery bound and brute-force identifiability.

Run: python3 demos/theory.py
"""

import numpy as np

import blindgraph as bg
from blindgraph.experiments import gen_graph
from blindgraph.theory import support_family

cycle = bg.build_shift(bg.Graph(50), "directed_cycle")
er = bg.build_shift(gen_graph("er", 0, connected=True, n=50, p=0.1))

# the DFT basis is maximally incoherent: rho_U(S) = S, rho_Psi(L) = L / N
for name, spec in (("directed cycle", cycle), ("ER(50, 0.1)", er)):
    prof = bg.coherence_profile(spec, bg.build_filter_basis(spec, 3), K=5)
    print(f"{name:15s} rho_U(1..5) = {np.round([prof.rho_u[k] for k in range(1, 6)], 3)}, "
          f"rho_Psi(3) = {prof.rho_psi[3]:.4f}")
    b = bg.theorem1_bound(prof, 3, 3, 50)
    print(f"{'':15s} alpha = {b.alpha:.2e}, P_rec >= {b.p_rec_lower}  (informative: {b.applicable})")

# identifiability on a small cycle: adjacent supports need N > L + S - 2
c6 = bg.build_shift(bg.Graph(6), "directed_cycle")
print("\nadjacent supports on the 6-cycle (rows S, columns L):")
for S in range(1, 5):
    print(f"S={S}: " + " ".join("yes" if bg.check_identifiability(c6, L, S, "adjacent") else " no"
                                 for L in range(1, 5)))
print("equally spaced {0,2,4}, L=3:", bool(bg.check_identifiability(c6, 3, 3, "equally_spaced")),
      "(supports:", support_family(6, 3, "equally_spaced"), ")")
