"""A kicked qubit battery, with and without a mid-run measurement.

The closed-form commutator bound for the battery depends only on the
transverse Bloch components. A nonselective energy measurement dephases
the state in the energy eigenbasis, so the bound collapses to zero at the
measurement and then recovers as the kick rebuilds coherence.
"""

import numpy as np

from qflows.dynamics import TimeGrid, qubit_propagator
from qflows.flows import battery_ops_closed
from qflows.linalg import dag
from qflows.measurement import measure_nonselective_schedule, spectral_basis
from qflows.models import ModelSpec, bloch_state, build_model
from qflows.uncertainty import commutator_probe, qubit_battery_bound_exact

spec = ModelSpec(
    model="qubit_battery",
    parameters={"h0": 1.2, "h3": 0.2, "v0": 0.0, "v1": 0.5, "v2": 0.6, "v3": 0.0,
                "hbar": 1.0},
)
parts = build_model(spec)
beta0 = np.array([0.0, 0.0, 0.5])
rho0 = bloch_state(beta0)
v = np.array([0.5, 0.6, 0.0])

# Free evolution: closed form against the direct operator evaluation.
print("free evolution (no measurement):")
print("   t    direct probe    closed form")
for t in np.linspace(0.0, 5.0, 6):
    u = qubit_propagator(parts, float(t))
    rho = u @ rho0 @ dag(u)
    ops = battery_ops_closed(parts, float(t))
    direct = commutator_probe(ops.e_b, ops.p_b, rho)
    closed = qubit_battery_bound_exact(0.2, v, beta0, parts.extras["alpha_vec"],
                                       float(t))
    print(f"{t:5.2f}   {direct:12.6e}   {closed:12.6e}")

# Now interrupt the same evolution with an energy measurement at t = 2.5.
grid = TimeGrid(t_start=0.0, t_end=5.0, n_steps=251)
basis = spectral_basis(parts.h_0)
traj = measure_nonselective_schedule(parts, rho0, grid, basis, [2.5])
times = np.asarray(traj.times)

print("\nwith a nonselective energy measurement at t = 2.5:")
print("   t    probe")
for target in (2.0, 2.5, 3.0, 4.0):
    idx = int(np.flatnonzero(np.isclose(times, target))[-1])
    ops = battery_ops_closed(parts, float(times[idx]))
    probe = commutator_probe(ops.e_b, ops.p_b, traj.states[idx])
    tag = "  <- post-measurement row" if target == 2.5 else ""
    print(f"{times[idx]:5.2f}   {probe:12.6e}{tag}")

print("\nThe probe vanishes identically on the dephased state and grows back")
print("once the kick rotates the Bloch vector off the z axis again.")
