"""
A two dimensional run
=====================

The ``bump2d`` scenario evolves a Gaussian bump on a rectangle.  The
nonlocal term is evaluated by zero-padded FFT convolution and the
implicit diffusion solve by a DCT.  We print a few scalar diagnostics
and the a-priori estimate terms.
"""

import numpy as np

from nlphase import load_config, scenario_path
from nlphase.analysis import apriori_report
from nlphase.scheme import solve_trajectory

scenario, _ = load_config(scenario_path('bump2d'))
g = scenario.grid
print('grid', g.cells, 'spacing', g.spacing)

traj = solve_trajectory(scenario)

print('\n  n      t     max phi   mean theta')
for n in range(0, traj.N + 1, 4):
    s = traj.state(n)
    print('{:3d} {:6.3f}  {:9.4f}  {:10.5f}'.format(
        n, traj.times[n], s.phi.max(), g.integrate(s.theta) / g.volume))

rep = apriori_report(traj)
print()
for term in rep.TERMS:
    print('{} = {:.4e}'.format(term, getattr(rep, term)))

# the residuals of both equations of the scheme, per step
print('\nmax residuals:', np.max(traj.residuals, axis=0))
