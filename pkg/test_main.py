"""
Tests for the command line.
"""

import json

import pytest

import main
from export_manager import manifest_path
from run_store import RunStore
from settings import Settings


def run(capsys, *argv):
    code = main.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_exact_cycle_document(capsys):
    code, out, _ = run(capsys, 'exact', 'cycle', '--n', '4', '--balls', '1', '--holes', '3')
    assert code == 0
    document = json.loads(out)
    assert document['support'] == [[0, 1], [0, 3], [1, 2], [2, 3]]
    assert document['mass'] == ['1/4'] * 4


def test_exact_parking_closed_form_and_chain_agree(capsys):
    _, closed, _ = run(capsys, 'exact', 'parking', '--n', '4', '--cars', '2')
    _, chain, _ = run(capsys, 'exact', 'parking', '--n', '4', '--cars', '2', '--p', '1/3')
    assert json.loads(closed) == json.loads(chain)


def test_exact_zlaw(capsys):
    code, out, _ = run(capsys, 'exact', 'zlaw', '--db', '0.4', '--dt', '0.6', '--max-b', '2')
    assert code == 0
    document = json.loads(out)
    assert document['block_size'] == [0, 2, 4]
    assert document['mass'][0] == pytest.approx(0.12)


def test_exact_multiball_census(capsys):
    code, out, _ = run(capsys, 'exact', 'multiball', '--census=-1:3,2:1')
    assert code == 0
    document = json.loads(out)
    assert document['census'] == {'-1': 3, '2': 1}
    assert document['n'] == 4


def test_simulate_line_on_fixed_window(capsys):
    code, out, _ = run(capsys, 'simulate', 'line', '--window', 'offset=-2\\nHHBHH', '--seed', '4')
    assert code == 0
    document = json.loads(out)
    assert document['separators'] == [-2, 2]
    assert len(document['remaining_holes']) == 3


def test_experiment_monotone_table(capsys):
    code, out, _ = run(capsys, 'experiment', 'monotone', '--n', '20', '--n-ls', '2,4,8', '--trials', '50',
                       '--seed', '3')
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == 'n,n_l,trials,mean_max,stderr,non_increasing'
    assert len(lines) == 4
    code, _, _ = run(capsys, 'experiment', 'monotone', '--n', '20', '--n-ls', '3,5')
    assert code == 2


def test_errors_exit_with_two(capsys):
    code, _, err = run(capsys, 'exact', 'cycle', '--n', '3', '--balls', '2', '--holes', '2')
    assert code == 2
    assert err.startswith('Error:')
    code, _, _ = run(capsys, 'simulate', 'golf', '--n', '10', '--balls', '2', '--holes', '4', '--strategy', 'walk')
    assert code == 2
    code, _, _ = run(capsys, 'exact', 'parking', '--n', '4', '--cars', '2', '--p', 'half')
    assert code == 2


def test_output_is_independent_of_worker_count(tmp_path, capsys):
    common = ['simulate', 'golf', '--n', '40', '--balls', '10', '--holes', '20', '--trials', '300',
              '--seed', '12']
    one = tmp_path / 'one.csv'
    two = tmp_path / 'two.csv'
    assert run(capsys, *common, '--threads', '1', '--emit', str(one))[0] == 0
    assert run(capsys, *common, '--threads', '2', '--emit', str(two))[0] == 0
    assert one.read_bytes() == two.read_bytes()
    assert one.read_text().startswith('trial,remaining_holes,blocks\n')


def test_emit_records_manifest_and_replays(tmp_path, capsys):
    output = tmp_path / 'law.json'
    code, out, _ = run(capsys, 'exact', 'block0', '--n', '7', '--balls', '1', '--holes', '3',
                       '--emit', str(output), '--archive', str(tmp_path / 'run.zip'))
    assert code == 0
    assert out.startswith(f"Wrote {output}")
    assert (tmp_path / 'run.zip').exists()

    manifest_file = manifest_path(str(output))
    with open(manifest_file) as f:
        manifest = json.load(f)
    assert manifest['subcommand'] == 'exact block0'
    assert manifest['params'] == {'n': 7, 'balls': 1, 'holes': 3}

    records = RunStore(Settings.from_env().database).get_manifests()
    assert [r['output_digest'] for r in records] == [manifest['output_digest']]

    assert run(capsys, 'manifest', 'replay', manifest_file)[0] == 0
    code, out, _ = run(capsys, 'manifest', 'list', '--subcommand', 'exact block0')
    assert code == 0
    assert json.loads(out.splitlines()[0])['master_seed'] == 0


def test_replay_of_simulation(tmp_path, capsys):
    output = tmp_path / 'golf.csv'
    run(capsys, 'simulate', 'golf', '--n', '20', '--balls', '4', '--holes', '9', '--trials', '25',
        '--seed', '99', '--emit', str(output))
    assert run(capsys, 'manifest', 'replay', manifest_path(str(output)))[0] == 0


def test_replay_rejects_tampered_or_foreign_manifests(tmp_path, capsys):
    output = tmp_path / 'law.json'
    run(capsys, 'exact', 'cycle', '--n', '5', '--balls', '1', '--holes', '2', '--emit', str(output))
    manifest_file = manifest_path(str(output))
    with open(manifest_file) as f:
        manifest = json.load(f)

    manifest['output_digest'] = '0' * 64
    with open(manifest_file, 'w') as f:
        json.dump(manifest, f)
    code, _, err = run(capsys, 'manifest', 'replay', manifest_file)
    assert code == 1
    assert 'Digest mismatch' in err

    manifest['tool_version'] = '2.0.0'
    with open(manifest_file, 'w') as f:
        json.dump(manifest, f)
    code, _, err = run(capsys, 'manifest', 'replay', manifest_file)
    assert code == 2
    assert 'version 2.0.0' in err
