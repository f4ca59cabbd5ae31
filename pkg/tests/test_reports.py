
import json
import math
from pathlib import Path

import numpy as np
import pytest

from fockcheck.__version__ import __version__
from fockcheck.base import ConfigError, grid_hash
from fockcheck.kernel import KernelBasis
from fockcheck.ode import RayTrace
from fockcheck.quadrature import QuadratureConfig
from fockcheck.reports import (
    KERNEL_COLUMNS,
    RAY_COLUMNS,
    RunManifest,
    build_report,
    dumps,
    grid_hashes,
    kernel_rows,
    plain,
    ray_rows,
    write_csv,
    write_json,
)
from fockcheck.weights import power


parametrize = pytest.mark.parametrize


@parametrize('case', [
    dict(obj=np.array([1 + 2j, 3]), expected=[[1.0, 2.0], [3.0, 0.0]]),
    dict(obj=np.bool_(True), expected=True),
    dict(obj=np.int64(3), expected=3),
    dict(obj=(-math.inf, math.nan), expected=['-inf', 'nan']),
    dict(obj=Path('a') / 'b', expected=str(Path('a') / 'b')),
    dict(obj={1: power(3)}, expected={'1': {'kind': 'power',
                                            'alpha': 3.0}}),
])
def test_plain(case):
    assert plain(case['obj']) == case['expected']


def test_dumps_sorts_keys():
    text = dumps({'b': math.inf, 'a': [1j]})

    assert text.endswith('\n')
    assert list(json.loads(text)) == ['a', 'b']
    assert json.loads(text)['b'] == 'inf'


@parametrize('seed', [-1, True, 1.5])
def test_run_manifest_rejects_bad_seed(seed):
    with pytest.raises(ConfigError) as exc:
        RunManifest('battery', seed=seed)

    assert exc.value.field == 'seed'


def test_run_manifest_hash():
    manifest = RunManifest('kernel table', {'weight': 'w.json'}, seed=3)

    assert manifest.to_dict()['version'] == __version__
    assert manifest.manifest_hash() == RunManifest(
        'kernel table', {'weight': 'w.json'}, seed=3).manifest_hash()
    assert manifest.manifest_hash() != manifest._replace(
        seed=4).manifest_hash()


def test_build_report(tmp_path):
    cfg = QuadratureConfig()
    radii = np.linspace(0, 1, 5)
    report = build_report(RunManifest('solve'), {'value': 1j},
                          quadrature=cfg, radii=radii)

    assert report['result'] == {'value': [0.0, 1.0]}
    assert report['grid_hashes']['radii'] == grid_hash(radii)
    assert report['grid_hashes'] == grid_hashes(radii=radii, quadrature=cfg)
    assert len(report['grid_hashes']['quadrature']) == 64

    path = tmp_path / 'report.json'
    text = write_json(report, path)

    assert path.read_text(encoding='utf-8') == text
    assert write_json(report) == text


def test_write_csv(tmp_path):
    path = tmp_path / 'rows.csv'
    text = write_csv(('a', 'b', 'c'), [(0.1, None, 2),
                                       (np.float64(1 / 3), 'x', np.int64(4))],
                     path)

    assert text == 'a,b,c\n0.1,,2\n0.3333333333333333,x,4\n'
    assert path.read_text(encoding='utf-8') == text


def test_kernel_rows():
    basis = KernelBasis(power(3), 1, np.array([0.0, 1.0]),
                        np.array([0.5, 1.0]), math.exp(-1))
    rows = list(kernel_rows(basis))

    assert len(KERNEL_COLUMNS) == 4
    assert rows[0] == (0, 0.0, 1.0, 0.5)
    assert rows[1][0] == 1
    assert rows[1][2] == pytest.approx(math.e)


def test_ray_rows():
    radii = np.array([0.0, 1.0])
    values = np.array([[1 + 0j, 0], [3 - 4j, 0]])
    trace = RayTrace(0.5, radii, values, None, None, False, 'ok')
    rows = list(ray_rows([trace]))

    assert len(RAY_COLUMNS) == len(rows[0])
    assert rows[1] == (0.5, 1.0, 3.0, -4.0, 5.0, None, None)
