# The asymmetric double well and its low-lying spectrum.
# Everything is in natural units: hbar = M = omega_0 = k_B = 1.

import numpy as np

from qmetastable import PotentialParams, build_dvr, geometry, solve_spectrum, splittings
from qmetastable.dvr import localized_density

np.set_printoptions(precision=4, suppress=True)

# barrier height 1.4 hbar*omega_0, tilt 0.27: the left well is metastable
params = PotentialParams(barrier_height=1.4, asymmetry=0.27)
geo = geometry(params)
print("left minimum  q=%.4f  V=%.4f" % (geo.q_left_min, geo.v_left_min))
print("barrier top   q=%.4f  V=%.4f" % (geo.q_barrier, geo.v_barrier))
print("right minimum q=%.4f  V=%.4f" % (geo.q_right_min, geo.v_right_min))
print("q_c (inflection on the stable side) = %.4f" % geo.q_c)

# six lowest levels; the solver re-checks them on a grid twice as fine
sol = solve_spectrum(params, n_levels=6)
print("\nE_n:", sol.energies)
print("gaps:", splittings(sol))
# levels 3 and 4 form the tunneling doublet across the barrier top

# position eigenstates in the truncated basis
dvr = build_dvr(sol, params=params)
print("\nDVR points q_mu:", dvr.q_points)
print("DVR energies   :", dvr.dvr_energies)
print("states left of q_b:", dvr.n_metastable, " states left of q_c:", dvr.partition)

# each localized density is centred on its DVR point
for mu in range(dvr.size):
    rho = localized_density(dvr, sol, mu)
    mean = (sol.q * rho).sum() * sol.dx
    width = np.sqrt(((sol.q - mean) ** 2 * rho).sum() * sol.dx)
    print("mu=%d  <q>=%7.4f  width=%.3f" % (mu + 1, mean, width))

# tunneling couplings Delta_mu_nu (nearest neighbours dominate)
print("\nDelta:\n", dvr.couplings)
