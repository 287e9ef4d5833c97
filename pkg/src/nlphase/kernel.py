"""Nonlocal interaction kernels on a bounded box.

The convolution is taken over the box itself (not periodically):

    (J * phi)(x_i) = sum_j J(x_i - x_j) phi(x_j) |cell|

and ``a = J * 1`` uses the very same sum, so ``a phi - J * phi`` annihilates
constants up to rounding.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.fft

from .grid import Grid

__all__ = ('KernelSpec', 'Kernel', 'KernelError', 'build_kernel')

KINDS = ('constant', 'gaussian', 'tabulated')


class KernelError(ValueError):
    """Invalid kernel specification (asymmetric or non-finite samples)."""


@dataclass(frozen=True)
class KernelSpec:
    """Description of an even kernel ``J``.

    ``constant``: ``J = value``.
    ``gaussian``: ``J(x) = amplitude * exp(-|x|^2 / (2 width^2))``.
    ``tabulated``: ``samples`` are the values of ``J`` on the difference
    lattice ``{x_i - x_j}``, i.e. ``2 n - 1`` offsets per axis with the zero
    offset in the middle, flattened in row-major order.
    """

    kind: str = 'gaussian'
    value: float = 0.0
    amplitude: float = 1.0
    width: float = 0.1
    samples: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise KernelError('unknown kernel kind {!r}, expected one of {}'
                              .format(self.kind, KINDS))
        if self.kind == 'gaussian' and not self.width > 0:
            raise KernelError('gaussian width must be positive')
        object.__setattr__(self, 'samples',
                           tuple(float(s) for s in self.samples))

    def table(self, grid):
        """Tabulate ``J`` on the offset lattice of ``grid``."""
        offsets = [np.arange(-(n - 1), n) * dx
                   for n, dx in zip(grid.cells, grid.spacing)]
        tshape = tuple(len(o) for o in offsets)
        if self.kind == 'constant':
            table = np.full(tshape, float(self.value))
        elif self.kind == 'gaussian':
            r2 = sum(o**2 for o in np.meshgrid(*offsets, indexing='ij'))
            table = self.amplitude * np.exp(-r2 / (2.0 * self.width**2))
        else:
            if len(self.samples) != int(np.prod(tshape)):
                raise KernelError(
                    'tabulated kernel needs {} samples for this grid, got {}'
                    .format(int(np.prod(tshape)), len(self.samples)))
            table = np.asarray(self.samples, dtype=float).reshape(tshape)
        if not np.all(np.isfinite(table)):
            raise KernelError('kernel samples must be finite')
        mirrored = table[(slice(None, None, -1),) * table.ndim]
        scale = max(1.0, float(np.max(np.abs(table))))
        if np.max(np.abs(table - mirrored)) > 1e-12 * scale:
            raise KernelError('kernel is not even: J(-x) != J(x)')
        return table


class Kernel:
    """A kernel tabulated on a grid, with ``a = J * 1`` precomputed.

    Parameters
    ----------
    spec : KernelSpec
    grid : Grid
    plan : {'auto', 'direct', 'fft'}
        Summation strategy.  ``'auto'`` picks a dense matrix product for
        1-D grids up to 512 cells and the zero-padded FFT otherwise.

    Notes
    -----
    Instances hold only read-only precomputed arrays and can be shared
    between threads.
    """

    def __init__(self, spec, grid, plan='auto', table=None):
        if plan not in ('auto', 'direct', 'fft'):
            raise ValueError('unknown plan {!r}'.format(plan))
        if plan == 'auto':
            plan = ('direct' if grid.dim == 1 and grid.cells[0] <= 512
                    else 'fft')
        self.spec = spec
        self.grid = grid
        self.plan = plan
        self.table = spec.table(grid) if table is None else table
        self._matrix = None
        self._pad = tuple(scipy.fft.next_fast_len(2 * n - 1, real=True)
                          for n in grid.cells)
        self._table_hat = None
        self.a = self.convolve(np.ones(grid.shape))

    @property
    def matrix(self):
        """Dense ``J(x_i - x_j) |cell|`` matrix (cells flattened row-major)."""
        if self._matrix is None:
            idx = np.indices(self.grid.shape).reshape(self.grid.dim, -1)
            diff = idx[:, :, None] - idx[:, None, :]
            diff += np.array([n - 1 for n in self.grid.cells])[:, None, None]
            self._matrix = self.table[tuple(diff)] * self.grid.cell_volume
        return self._matrix

    def convolve(self, phi, plan=None):
        """Return ``J * phi`` on the grid."""
        phi = self.grid.check(phi, 'phi')
        plan = plan or self.plan
        if plan == 'direct':
            return self._convolve_direct(phi)
        if plan == 'fft':
            return self._convolve_fft(phi)
        raise ValueError('unknown plan {!r}'.format(plan))

    def _convolve_direct(self, phi):
        if self.grid.dim == 1:
            return self.matrix @ phi
        # shift-and-add over the offset lattice, O(N^2) work
        n1, n2 = self.grid.cells
        out = np.zeros_like(phi)
        for k1 in range(-(n1 - 1), n1):
            for k2 in range(-(n2 - 1), n2):
                w = self.table[k1 + n1 - 1, k2 + n2 - 1]
                if w == 0.0:
                    continue
                dst = (slice(max(k1, 0), n1 + min(k1, 0)),
                       slice(max(k2, 0), n2 + min(k2, 0)))
                src = (slice(max(-k1, 0), n1 + min(-k1, 0)),
                       slice(max(-k2, 0), n2 + min(-k2, 0)))
                out[dst] += w * phi[src]
        return out * self.grid.cell_volume

    def _convolve_fft(self, phi):
        axes = tuple(range(self.grid.dim))
        if self._table_hat is None:
            self._table_hat = scipy.fft.rfftn(self.table, s=self._pad,
                                              axes=axes)
        full = scipy.fft.irfftn(
            scipy.fft.rfftn(phi, s=self._pad, axes=axes) * self._table_hat,
            s=self._pad, axes=axes)
        # entry i of the box convolution sits at linear index i + n - 1
        window = tuple(slice(n - 1, 2 * n - 1) for n in self.grid.cells)
        return full[window] * self.grid.cell_volume

    def abs_row_sum(self):
        """``max_i sum_j |J(x_i - x_j)| |cell|``, the discrete (A1) bound."""
        absk = Kernel(self.spec, self.grid, self.plan,
                      table=np.abs(self.table))
        return float(np.max(absk.a))

    def nonlocal_term(self, phi):
        """``a phi - J * phi``, the nonlocal interaction in the phi equation."""
        return self.a * phi - self.convolve(phi)


def build_kernel(spec, grid, plan='auto'):
    return Kernel(spec, grid, plan=plan)
