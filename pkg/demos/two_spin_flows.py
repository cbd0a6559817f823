"""Energy flows for two driven spins, step by step.

Builds the driven two-spin model, integrates the Schrodinger equation on a
short grid, and checks the two headline identities numerically: the split
of d<U>/dt into heat-like and work-like flows, and the saturation of the
variance bound by the work route.
"""

import numpy as np

from qflows.dynamics import TimeGrid, evolve_von_neumann, finite_difference
from qflows.flows import flow_ops_hamiltonian
from qflows.models import ModelSpec, TimeFunction, build_model
from qflows.tensorops import expect, variance
from qflows.uncertainty import qw_bound_two_spins, rs_report, sigma_u_bounds

# A sinusoidal drive on the first spin, constant coupling g = 1.
spec = ModelSpec(
    model="two_spins",
    parameters={"g": 1.0, "hbar": 1.0},
    drive=TimeFunction(kind="sinusoid_offset", amplitude=1.0, rate=1.0, offset=2.0),
)
parts = build_model(spec)

# Start in |uu> and integrate over a couple of drive periods.
psi0 = np.zeros(4, dtype=np.complex128)
psi0[0] = 1.0
grid = TimeGrid(t_start=0.0, t_end=6.0, n_steps=601)
traj = evolve_von_neumann(parts, psi0, grid)

# First law: the finite-difference slope of <U> should equal <Udot>.
exp_u = np.array([expect(flow_ops_hamiltonian(parts, t).u, psi)
                  for t, psi in zip(traj.times, traj.states)])
exp_udot = np.array([expect(flow_ops_hamiltonian(parts, t).u_dot, psi)
                     for t, psi in zip(traj.times, traj.states)])
residual = finite_difference(exp_u, grid.dt) - exp_udot
print(f"first-law residual (max abs): {np.max(np.abs(residual)):.3e}")

# Uncertainty data at a handful of times.
print("\n   t     sigma_q*sigma_w   closed-form bound   var_u - via_wdot")
for i in range(0, len(traj.times), 120):
    t = float(traj.times[i])
    psi = traj.states[i]
    ops = flow_ops_hamiltonian(parts, t)
    rep = rs_report(ops.q_dot, ops.w_dot, psi)
    closed = qw_bound_two_spins(parts.drive.value(t), parts.drive.derivative(t),
                                1.0, 1.0, psi)
    var_u = variance(ops.u, psi)
    via = sigma_u_bounds(ops.u, ops.q_dot, ops.w_dot, ops.u_dot, psi)
    print(f"{t:5.2f}   {np.sqrt(rep.product):15.6f}   {closed:17.6f}"
          f"   {var_u - via[2]:16.3e}")

print("\nThe closed form reproduces the commutator bound, and the work-flow")
print("route recovers var(U) to floating-point accuracy on this model.")
