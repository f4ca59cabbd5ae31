"""The reports module.

JSON and CSV artifacts. Every JSON report embeds the :class:`RunManifest`
that produced it and the digests of the grids it was computed on. Keys are
sorted and floats are written with ``repr`` so that reruns of a manifest are
byte-identical.
"""

from collections import namedtuple
import csv
import hashlib
import io
import json
import math
from pathlib import Path

import numpy as np

from .__version__ import __version__
from .base import ConfigError, grid_hash


RAY_COLUMNS = ('theta', 'r', 're_f', 'im_f', 'abs_f', 'envelope',
               'weighted_abs_f')
KERNEL_COLUMNS = ('n', 'log_delta_sq', 'delta_sq', 'peak')


class RunManifest(namedtuple('RunManifest', [
        'command', 'inputs', 'overrides', 'seed', 'out'])):
    """The description of one CLI run.

    Attributes:
        command (str): Command path such as ``'kernel table'``.
        inputs (dict): Input name to file path.
        overrides (dict): Config overrides from flags.
        seed (int): Seed of randomized batteries.
        out (str|None): Output path, ``None`` for stdout.
    """
    __slots__ = ()

    def __new__(cls, command, inputs=None, overrides=None, seed=0, out=None):
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            raise ConfigError('must be a non-negative integer', field='seed')
        return super().__new__(cls, command, dict(inputs or {}),
                               dict(overrides or {}), seed,
                               None if out is None else str(out))

    def to_dict(self):
        data = dict(self._asdict())
        data['version'] = __version__
        return data

    def manifest_hash(self):
        return _digest(dumps(self.to_dict()).encode('utf-8'))


def plain(obj):
    """Convert records, numpy values and complex numbers into JSON types.

    Non-finite floats become the strings ``'inf'``, ``'-inf'`` and ``'nan'``.

    Example:

        >>> plain({'a': (1, np.float64(2.5)), 'b': 1j, 'c': math.inf})
        {'a': [1, 2.5], 'b': [0.0, 1.0], 'c': 'inf'}
    """
    if hasattr(obj, 'to_dict'):
        return plain(obj.to_dict())

    if isinstance(obj, dict):
        return {str(key): plain(value) for key, value in obj.items()}

    if isinstance(obj, (list, tuple)):
        return [plain(value) for value in obj]

    if isinstance(obj, np.ndarray):
        return [plain(value) for value in obj.tolist()]

    if isinstance(obj, np.bool_):
        return bool(obj)

    if isinstance(obj, (np.integer, np.floating, np.complexfloating)):
        obj = obj.item()

    if isinstance(obj, complex):
        return [plain(obj.real), plain(obj.imag)]

    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)

    if isinstance(obj, Path):
        return str(obj)

    return obj


def dumps(data):
    """Serialize `data` with sorted keys."""
    return json.dumps(plain(data), sort_keys=True, indent=2,
                      allow_nan=False) + '\n'


def grid_hashes(**grids):
    """Return the SHA-256 digests of named grids given as arrays or records
    with a ``to_dict`` method.
    """
    hashes = {}
    for name, grid in sorted(grids.items()):
        if hasattr(grid, 'to_dict'):
            hashes[name] = _digest(dumps(grid.to_dict()).encode('utf-8'))
        else:
            hashes[name] = grid_hash(grid)
    return hashes


def build_report(manifest, result, **grids):
    """Assemble the JSON report of a run."""
    return {'manifest': manifest.to_dict(),
            'manifest_hash': manifest.manifest_hash(),
            'grid_hashes': grid_hashes(**grids),
            'result': plain(result)}


def write_json(report, path=None):
    """Write the report to `path` or return the text when `path` is
    ``None``.
    """
    text = dumps(report)
    if path is None:
        return text
    Path(path).write_text(text, encoding='utf-8')
    return text


def ray_rows(traces, envelopes=None):
    """Yield the CSV rows of ray traces, in the order of `traces`."""
    envelopes = envelopes or [None] * len(traces)
    for trace, envelope in zip(traces, envelopes):
        f = trace.f
        bound = trace.envelope
        if envelope is not None:
            bound = np.interp(trace.radii, envelope.radii, envelope.values)
        for i, r in enumerate(trace.radii):
            yield (trace.theta, r, f[i].real, f[i].imag, abs(f[i]),
                   None if bound is None else bound[i],
                   None if trace.weighted is None else trace.weighted[i])


def kernel_rows(basis):
    """Yield the CSV rows of a kernel basis table."""
    with np.errstate(over='ignore'):
        delta_sq = np.exp(basis.log_delta_sq)
    for n, log_delta_sq in enumerate(basis.log_delta_sq):
        yield (n, log_delta_sq, delta_sq[n], basis.peaks[n])


def write_csv(columns, rows, path=None):
    """Write rows under a header. Floats are written with ``repr`` and
    missing values as empty fields.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(value) for value in row])

    text = buffer.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding='utf-8')
    return text


def _cell(value):
    if value is None:
        return ''
    if isinstance(value, (np.integer, np.floating)):
        value = value.item()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _digest(payload):
    return hashlib.sha256(payload).hexdigest()
