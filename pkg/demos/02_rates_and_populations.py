# Rate matrix and population dynamics at one bath point.

import numpy as np

from qmetastable import BathCorrelation, BathParams, PotentialParams, basis_state, build_dvr, build_rate_matrix
from qmetastable import escape_time, evolve, relaxation_time, right_population, solve_spectrum

np.set_printoptions(precision=4, suppress=False, linewidth=120)

params = PotentialParams(1.4, 0.27)
dvr = build_dvr(solve_spectrum(params, n_levels=6), params=params)

bath = BathParams(gamma=0.65, temperature=0.352)  # cutoff omega_c = 50 by default
corr = BathCorrelation(bath)

# Q(t) grows linearly at long times with slope gamma*T
for t in (0.1, 1.0, 10.0, 50.0, 60.0):
    print("Q(%5.1f) = %s" % (t, np.round(corr(t), 5)))
print("slope between 50 and 60:", (corr.real(60.0) - corr.real(50.0)) / 10)

rm = build_rate_matrix(dvr, corr)
print("\nGamma (column nu -> row mu):\n", rm.gamma_matrix)
print("eigenvalues:", rm.eigenvalues.real)

# detailed balance: Gamma_mu_nu / Gamma_nu_mu = exp((E_nu - E_mu)/T)
e = dvr.dvr_energies
g = rm.gamma_matrix
print("\nlog ratio vs (E_nu - E_mu)/T for neighbours:")
for mu in range(dvr.size - 1):
    print("  %d<->%d  %.6f  %.6f" % (mu + 1, mu + 2, np.log(g[mu, mu + 1] / g[mu + 1, mu]), (e[mu + 1] - e[mu]) / bath.temperature))

# start in state 3, just right of the barrier top
rho0 = basis_state(dvr.size, 2)
tau_r = relaxation_time(rm)
traj = evolve(rm, rho0, 10 * tau_r, 12, t_min=1.0)
p_right = right_population(traj, dvr.partition)
print("\n     t      P_left_well  P_right")
for t, row, pr in zip(traj.times, traj.populations, p_right):
    print("%10.2f  %10.4f  %8.4f" % (t, row[: dvr.n_metastable].sum(), pr))

res = escape_time(rm, rho0, dvr.partition, 0.95, n_metastable=dvr.n_metastable)
print("\ntau = %.2f   tau_relax = %.2f   stationary P_right = %.4f" % (res.escape_time, res.relaxation_time, res.stationary_right))
print("largest transient population of the metastable well: %.4f" % res.metastable_peak)
