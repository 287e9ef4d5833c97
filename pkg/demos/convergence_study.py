"""
Convergence of the time discretisation
======================================

Run the bundled ``smooth1d`` scenario at five step sizes, compare each run
against a fine reference on its own partition and fit the observed order.
The error bound predicts O(sqrt(h)); smooth data usually does better.
"""

import numpy as np

from nlphase import load_config, scenario_path
from nlphase.analysis import convergence_study

scenario, study = load_config(scenario_path('smooth1d'))
print(scenario.grid, 'T =', scenario.T)

# the reference run dominates the cost (about ten seconds)
table = convergence_study(scenario, study.N_list, study.N_ref)

print()
print(table.to_csv())

# total error divided by sqrt(h) should stay bounded as h shrinks
h = np.array([row.h for row in table.rows])
total = np.array([row.total for row in table.rows])
for hi, ti in zip(h, total):
    print('h = {:.2e}   total = {:.3e}   total/sqrt(h) = {:.3f}'
          .format(hi, ti, ti / np.sqrt(hi)))
print('observed order {:.2f}, guaranteed order 0.5'.format(table.slope))
