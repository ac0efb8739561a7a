"""Two different initial states whose expectation-value trajectories coincide.

For the spin-1 raising operator the trajectory spaces are built, a state
pair differing by an element of X_A is evolved under a Hamiltonian from
H_A, and the two trajectories are compared with and without a perturbation
of the Hamiltonian.

    python3 demos/identical_trajectories.py
"""
import math

import numpy as np

from shadowlab.dynamics import period, trajectories_identical, trajectory_spaces


def main():
    jp = np.diag([math.sqrt(2), math.sqrt(2)], 1).astype(complex)
    sp = trajectory_spaces(jp)
    print(f"dim X_A = {sp.dim_xa}, dim H_A = {sp.dim_ha}")
    h = 0.7 * sp.ha_basis[0] + 1.3 * sp.ha_basis[1]
    x = 0.1 * sp.xa_basis[0]
    rho0 = np.diag([0.5, 0.3, 0.2]).astype(complex) + x / 2
    rho1 = rho0 - x
    print(f"|rho0 - rho1|_HS = {np.linalg.norm(rho0 - rho1):.3f}, period of H = {period(h)}")
    times = np.linspace(0, 10, 200)
    _, dev = trajectories_identical(jp, h, rho0, rho1, times)
    print(f"H in H_A:        max trajectory deviation {dev:.2e}")
    for eps in (1e-3, 1e-2, 1e-1):
        bump = np.zeros((3, 3), complex)
        bump[0, 2] = bump[2, 0] = eps
        _, dev = trajectories_identical(jp, h + bump, rho0, rho1, times)
        print(f"H + {eps:g} bump:  max trajectory deviation {dev:.2e}")


if __name__ == "__main__":
    main()
