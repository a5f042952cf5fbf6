import json

import pytest
import numpy as np
from numpy.testing import assert_allclose

from squatcalc.cli import main
from squatcalc.io import (read_field, read_matrix, read_norms_csv,
                          write_field, write_matrix)
from squatcalc.field import SpectralField
from squatcalc.qmatrix import QMatrixOperator
from squatcalc.quaternion import Quaternion
from squatcalc.utils import rand_sectorial_qmatrix


@pytest.fixture
def matrix_file(tmp_path):
    path = str(tmp_path / 'T.json')
    write_matrix(path, QMatrixOperator.diag([Quaternion(1.0, 1.0), 4.0]))
    return path


@pytest.fixture
def field_file(tmp_path):
    path = str(tmp_path / 'v.sqf')
    write_field(path, SpectralField.gaussian((8, 8, 8), width=0.8))
    return path


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


# ------------------------------- matrices ---------------------------------- #

def test_spectrum(matrix_file, capsys):
    code, out, err = run(['spectrum', '--matrix', matrix_file], capsys)
    assert code == 0
    spheres = json.loads(out)
    assert len(spheres) == 2
    assert spheres[0]['u'] == pytest.approx(1.0)
    assert spheres[0]['v'] == pytest.approx(1.0)
    assert spheres[1]['u'] == pytest.approx(4.0)


def test_spectrum_to_file(matrix_file, tmp_path, capsys):
    out_path = tmp_path / 'spec.json'
    code, out, _ = run(['spectrum', '--matrix', matrix_file,
                        '--out', str(out_path)], capsys)
    assert code == 0
    assert out == ''
    assert len(json.loads(out_path.read_text())) == 2


@pytest.mark.parametrize("extra", [[], ['--circle', '2.5,0,2.2'],
                                   ['--nodes', '64', '--side', 'right']])
def test_funcalc(matrix_file, capsys, extra):
    code, out, _ = run(['funcalc', '--matrix', matrix_file,
                        '--expr', 'pow(s, 0.5)'] + extra, capsys)
    assert code == 0
    res = json.loads(out)
    assert set(res) == {'operator', 'est_quadrature_error', 'contour_used'}
    R = QMatrixOperator(np.array(res['operator']['entries']))
    T = read_matrix(matrix_file)
    assert (R @ R).allclose(T, rtol=1e-7, atol=1e-8)


def test_funcalc_domain_error(tmp_path, capsys):
    path = str(tmp_path / 'neg.json')
    write_matrix(path, QMatrixOperator.diag([-1.0, 2.0]))
    code, _, err = run(['funcalc', '--matrix', path, '--expr', 'log(s)'],
                       capsys)
    assert code == 1
    assert 'DomainError' in err


def test_fracpow(matrix_file, tmp_path, capsys):
    out_path = tmp_path / 'root.json'
    code, _, _ = run(['fracpow', '--matrix', matrix_file, '--alpha', '0.5',
                      '--check', '--out', str(out_path)], capsys)
    assert code == 0
    report = json.loads(out_path.read_text())
    assert report['method'] == 'spectral'
    assert report['sectorial']['sectorial']
    assert max(report['deltas'].values()) < 1e-7
    entries = np.array(report['operator']['entries'])
    assert_allclose(entries[1, 1], [2.0, 0.0, 0.0, 0.0], atol=1e-10)


def test_fracpow_nearly_real_spectrum(tmp_path, capsys):
    # a sphere lies close to the real axis, next to its mirror image
    path = str(tmp_path / 'S.json')
    T = QMatrixOperator(rand_sectorial_qmatrix(3, seed=0))
    write_matrix(path, T)
    code, out, err = run(['fracpow', '--matrix', path, '--alpha', '0.5',
                          '--check'], capsys)
    assert code == 0, err
    report = json.loads(out)
    assert report['sectorial']['sectorial']
    assert max(report['deltas'].values()) < 1e-7
    R = QMatrixOperator(np.array(report['operator']['entries']))
    assert (R @ R).allclose(read_matrix(path), rtol=1e-7, atol=1e-8)


def test_fracpow_sector_error(tmp_path, capsys):
    path = str(tmp_path / 'neg.json')
    write_matrix(path, QMatrixOperator.diag([-1.0, 2.0]))
    code, out, err = run(['fracpow', '--matrix', path, '--alpha', '0.5'],
                         capsys)
    assert code == 1
    assert out == ''
    assert err.startswith('squatcalc: SectorError')


# -------------------------------- fields ----------------------------------- #

@pytest.mark.parametrize("init", ['gauss', 'random', 'modes:1,0,0,2'])
def test_field_gen(tmp_path, capsys, init):
    path = str(tmp_path / 'u.sqf')
    code, _, _ = run(['field', 'gen', '--grid', '4,6,8', '--box', '3',
                      '--init', init, '--seed', '1', '--out', path], capsys)
    assert code == 0
    u = read_field(path)
    assert u.dims == (4, 6, 8)
    assert u.box == (3.0, 3.0, 3.0)
    assert u.is_real() == (init != 'random')


@pytest.mark.parametrize("op", ['nabla', 'laplacian', 'frac-nabla',
                                'frac-laplacian', 'div-vec'])
def test_field_apply(field_file, tmp_path, capsys, op):
    path = str(tmp_path / 'w.sqf')
    code, _, _ = run(['field', 'apply', '--in', field_file, '--op', op,
                      '--alpha', '0.75', '--out', path], capsys)
    assert code == 0
    assert read_field(path).dims == (8, 8, 8)


def test_field_norm(field_file, capsys):
    code, out, _ = run(['field', 'norm', '--in', field_file], capsys)
    assert code == 0
    res = json.loads(out)
    assert res['dims'] == [8, 8, 8]
    assert res['real'] is True
    assert res['max'] == pytest.approx(1.0)
    assert res['l2'] == pytest.approx(read_field(field_file).l2_norm())


def test_bad_field_file(tmp_path, capsys):
    path = tmp_path / 'junk.sqf'
    path.write_bytes(b'SQF1')
    code, _, err = run(['field', 'norm', '--in', str(path)], capsys)
    assert code == 2
    assert 'input error' in err


# --------------------------------- heat ------------------------------------ #

def test_heat_to_stdout(capsys):
    code, out, _ = run(['heat', '--alpha', '0.75', '--grid', '8',
                        '--dt', '1e-3', '--steps', '3', '--form', 'both'],
                       capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == 'step,t,l2,min,max,form_delta'
    assert len(lines) == 5
    assert float(lines[-1].split(',')[-1]) < 1e-10


def test_heat_to_directory(tmp_path, capsys):
    out_dir = tmp_path / 'run'
    code, out, _ = run(['heat', '--alpha', '0.5', '--grid', '8',
                        '--dt', '0.01', '--steps', '4', '--snap-every', '2',
                        '--init', 'modes:1,0,0', '--out', str(out_dir)],
                       capsys)
    assert code == 0
    assert out == ''
    header, rows = read_norms_csv(str(out_dir / 'norms.csv'))
    assert len(rows) == 5
    snaps = sorted(p.name for p in out_dir.glob('snap_*.sqf'))
    assert snaps == ['snap_000000.sqf', 'snap_000002.sqf', 'snap_000004.sqf']


@pytest.mark.parametrize(("argv", "code"), [
    (['--alpha', '1.5'], 1),
    (['--alpha', '0.5', '--scheme', 'euler', '--dt', '1.0'], 1),
    (['--alpha', '0.5', '--init', 'bogus'], 2),
    (['--alpha', '0.5', '--dt', '-1'], 2),
])
def test_heat_errors(capsys, argv, code):
    base = {'--dt': '1e-3', '--steps': '2', '--grid': '8'}
    for flag, value in base.items():
        if flag not in argv:
            argv = argv + [flag, value]
    assert run(['heat'] + argv, capsys)[0] == code


# ------------------------------- selftest ---------------------------------- #

def test_selftest_list(capsys):
    code, out, _ = run(['selftest', '--list'], capsys)
    assert code == 0
    assert 'cauchy-oracle' in out.split()


def test_selftest_subset(capsys):
    code, out, err = run(['selftest', 'resolvent-equation', 'nabla-symbol'],
                         capsys)
    assert code == 0
    assert out == ''
    assert '2/2 checks passed' in err


# ------------------------------- arguments --------------------------------- #

@pytest.mark.parametrize("argv", [
    [],
    ['nope'],
    ['spectrum'],
    ['funcalc', '--matrix', 'T.json', '--expr', 'exp(s)', '--circle', '1,2'],
    ['fracpow', '--matrix', 'T.json', '--alpha', 'half'],
    ['field', 'gen', '--grid', '1', '--out', 'u.sqf'],
    ['field', 'gen', '--grid', '4,4', '--out', 'u.sqf'],
    ['heat', '--alpha', '0.5', '--dt', '0', '--steps', '1'],
])
def test_bad_arguments(capsys, argv):
    assert run(argv, capsys)[0] == 2


def test_help(capsys):
    code, out, _ = run(['--help'], capsys)
    assert code == 0
    assert 'squatcalc' in out


def test_missing_and_malformed_inputs(tmp_path, capsys):
    code, _, err = run(['spectrum', '--matrix', str(tmp_path / 'no.json')],
                       capsys)
    assert code == 2
    bad = tmp_path / 'bad.json'
    bad.write_text('{"entries": "x"}')
    assert run(['spectrum', '--matrix', str(bad)], capsys)[0] == 2
    assert run(['funcalc', '--matrix', str(bad), '--expr', 'exp(s)'],
               capsys)[0] == 2


def test_bad_expression(matrix_file, capsys):
    code, _, err = run(['funcalc', '--matrix', matrix_file,
                        '--expr', 'sin(s'], capsys)
    assert code == 2
    assert 'input error' in err
