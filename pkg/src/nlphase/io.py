"""Run outputs: time-series CSV and flat binary field snapshots.

Snapshot layout (``.npfs``), all little-endian::

    bytes 0-4   magic b"NPFS1"
    uint32      ndim
    uint64[ndim] dimensions
    float64[]   values, row-major (C order)

``write_run_snapshot`` stores the array ``(4, *grid.shape)`` holding
``theta, phi, v, z`` in that order.
"""
import struct

import numpy as np

__all__ = ('TIMESERIES_HEADER', 'timeseries_rows', 'timeseries_csv',
           'write_snapshot', 'read_snapshot', 'SnapshotFormatError')

MAGIC = b'NPFS1'
TIMESERIES_HEADER = ('n', 't', 'theta_H', 'theta_V', 'phi_Linf', 'v_Linf',
                     'z_H', 'mass')


class SnapshotFormatError(ValueError):
    pass


def timeseries_rows(traj):
    g = traj.grid
    rows = []
    for n in range(traj.N + 1):
        rows.append((n, n * traj.h, g.l2_norm(traj.theta[n]),
                     g.v_norm(traj.theta[n]), g.linf_norm(traj.phi[n]),
                     g.linf_norm(traj.v[n]), g.l2_norm(traj.z[n]),
                     g.integrate(traj.theta[n] + traj.phi[n])))
    return rows


def timeseries_csv(traj):
    """CSV text with one row per node ``n = 0..N`` (``z`` is 0 at ``n = 0``)."""
    lines = [','.join(TIMESERIES_HEADER)]
    for row in timeseries_rows(traj):
        lines.append(','.join([str(row[0])]
                              + [repr(float(x)) for x in row[1:]]))
    return '\n'.join(lines) + '\n'


def write_snapshot(path, array):
    a = np.ascontiguousarray(array, dtype='<f8')
    with open(path, 'wb') as fh:
        fh.write(MAGIC)
        fh.write(struct.pack('<I', a.ndim))
        fh.write(struct.pack('<{}Q'.format(a.ndim), *a.shape))
        fh.write(a.tobytes(order='C'))


def read_snapshot(path):
    with open(path, 'rb') as fh:
        data = fh.read()
    if data[:5] != MAGIC:
        raise SnapshotFormatError('bad magic {!r}'.format(data[:5]))
    (ndim,) = struct.unpack_from('<I', data, 5)
    shape = struct.unpack_from('<{}Q'.format(ndim), data, 9)
    offset = 9 + 8 * ndim
    count = int(np.prod(shape)) if ndim else 1
    if len(data) - offset != 8 * count:
        raise SnapshotFormatError('payload size does not match header')
    return np.frombuffer(data, dtype='<f8', offset=offset).reshape(shape)
