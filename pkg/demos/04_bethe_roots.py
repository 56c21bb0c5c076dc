#!/usr/bin/env python3
"""Solve the rapidity equations for a few atom numbers, rebuild the Bethe
eigenvectors, and cross-check every energy against exact diagonalization."""

import numpy as np

from twowell import (
    bethe_vector,
    build_hamiltonian,
    default_integrable_params,
    eigensolve,
    enumerate_sector,
    identify_parameters,
    match_spectrum,
    solve_bae,
    transfer_eigenvalue,
)

ip = default_integrable_params(2)
print(f"parameters: eta = {ip.eta}, zeta = {ip.zeta:.3f}, W = {ip.omega_sum}, "
      f"s = t = {np.round(ip.s, 4)}")

for N in (1, 2, 3):
    result = solve_bae(ip, N, seed=11)
    sector = enumerate_sector(2, N)
    spectrum = eigensolve(build_hamiltonian(identify_parameters(ip), sector))
    report = match_spectrum(result.solutions, spectrum, tol=1e-8)
    print(f"\nN = {N}: {result.converged}/{result.attempts} attempts converged, "
          f"{result.unique} unique solutions, {report.n_matched} matched to ED "
          f"(of {report.n_eigenvalues} levels)")
    for sol in result.solutions:
        roots = ", ".join(f"{r:.6f}" for r in sol.roots)
        print(f"  E = {sol.energy.real:+.8f}   roots [{roots}]")
        print(f"      |BAE| = {sol.residual:.1e}, |Hx - Ex| = {sol.h_residual:.1e}, "
              f"|t x - Lx| = {sol.t_residual:.1e}")

# The N = 1 case in closed form: v^2 = W^2 + zeta^2/eta^2 = 5, and the Bethe
# state is supported on the symmetric one-atom combinations only.
v = np.sqrt(5.0)
vec = bethe_vector([v], ip)
print(f"\nclosed-form N = 1 root ±sqrt(5); vector for +sqrt(5): {np.round(vec.real, 6)}")
print(f"transfer eigenvalue at u = 0: {transfer_eigenvalue(0.0, [v], ip).real:.8f} "
      f"(= -3 + sqrt(5))")

# The unmatched ED levels sit in the antisymmetric sector, which the Bethe
# construction does not reach for these couplings; the coverage count above
# reports that honestly rather than asserting completeness.
