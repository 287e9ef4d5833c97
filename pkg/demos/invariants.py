"""
Invariants of a discrete trajectory
===================================

A solved trajectory carries several exact identities: the mass of
theta + phi changes only through the forcing, the subgradient inequality
holds at every step, and the interpolants satisfy closed-form norm
identities.  ``run_checks`` evaluates all of them.
"""

from nlphase import load_config, scenario_path
from nlphase.checks import mass_balance, run_checks
from nlphase.scheme import solve_trajectory

scenario, _ = load_config(scenario_path('quintic1d'))
traj = solve_trajectory(scenario)

for result in run_checks(traj, scenario):
    print(result.line())

# mass of theta + phi, step by step
defect = mass_balance(traj)
print('\nworst scaled mass defect: {:.2e}'.format(defect.max()))

# size of the first increment in the V norm
state0, state1 = traj.state(0), traj.state(1)
g = traj.grid
print('|theta_1 - theta_0|_V = {:.4f}'.format(
    g.v_norm(state1.theta - state0.theta)))
