import json

import pytest

from cycalc.cli import ScenarioConfig, build_parser, dumps, main, run
from cycalc.constants import EXIT_ASSERTION_FAILED, EXIT_CONFIG_ERROR, EXIT_OK, SCHEMA_VERSION

K2_SPEC = {
    'name': 'K2',
    'kind': 'finite',
    'basis': [{'name': '1', 'weight': 0}, {'name': 'x', 'weight': 1}],
    'unit': 0,
    'mult': [[0, 0, [[1, 0]]], [0, 1, [[1, 1]]], [1, 0, [[1, 1]]]],
}


def point_config(**kwargs):
    return ScenarioConfig(algebra='Q', weight_bound=1, arity_bound=2, u_bound=2, u_neg_bound=2, **kwargs)


def test_identities_on_dual_numbers_pass():
    code, report = run('identities', ScenarioConfig(algebra='K2', arity_bound=3, seed=7, trials=12))
    assert code == EXIT_OK
    assert report['ok']
    assert report['schema_version'] == SCHEMA_VERSION
    assert report['window']['N'] == 3
    assert report['result']['algebra'] == 'K2'


def test_negative_cyclic_homology_of_a_point():
    code, report = run('homology', point_config())
    assert code == EXIT_OK
    dims = {(e['degree'], e['weight']): e['dim'] for e in report['result']['tables']['negative']}
    assert dims == {(i, 0): 1 if i in (0, -2, -4) else 0 for i in range(-4, 3)}
    assert report['result']['exact_sequence_violations'] == []


def test_zero_eta_is_reported_with_a_witness():
    code, report = run('cy-check', ScenarioConfig(algebra='Q[x]', weight_bound=3, eta='zero'))
    assert code == EXIT_ASSERTION_FAILED
    duality = report['result']['duality']
    assert not duality['nondegenerate']
    assert duality['witness'] == [0, 0]


def test_line_is_calabi_yau():
    code, report = run('cy-check', ScenarioConfig(algebra='Q[x]', weight_bound=3, u_bound=3))
    assert code == EXIT_OK
    assert report['result']['vanishing_violations'] == []
    assert all(block['invertible'] for block in report['result']['pi_top_degree'])


def test_deformation_suite_on_dual_numbers():
    code, report = run('deform', ScenarioConfig(algebra='K2', arity_bound=3, u_bound=2, trials=1))
    assert code == EXIT_OK, report
    assert [r['ring']['name'] for r in report['result']['rings']] == [f"Q[e]/(e^{n})" for n in (2, 3, 4)]


def test_deformation_suite_rejects_non_mc_candidates():
    code, report = run('deform', ScenarioConfig(algebra='K2', arity_bound=3, u_bound=2, trials=2, seed=3))
    assert code == EXIT_OK, report
    for ring in report['result']['rings']:
        assert ring['perturbed_candidates'] > 0
        assert ring['failures']['non_mc_accepted'] == 0
        assert ring['failures']['mc_criterion'] == 0


def test_psi_suite_covers_the_whole_window():
    code, report = run('psi', ScenarioConfig(algebra='Q[x]', weight_bound=3, u_bound=3, trials=2))
    assert code == EXIT_OK, report
    blocks = {(b['degree'], b['piece']) for b in report['result']['blocks']}
    assert blocks == {(e, p) for e in (-1, 0, 1, 2) for p in (-1, 0, 1, 2)}
    assert report['result']['chain_map_failures'] == 0


def test_menichi_suite_finds_one_sign_on_the_plane():
    code, report = run('menichi', ScenarioConfig(algebra='Q[x,y]', weight_bound=2, u_bound=2))
    assert code == EXIT_OK, report
    result = report['result']
    assert result['nonzero_pairs'] > 0
    assert result['sign'] in (1, -1)
    assert {pair['relation'] for pair in result['pairs']} <= {0, result['sign']}


def test_obstruction_suite_uses_first_order_classes():
    code, report = run('obstruction', ScenarioConfig(algebra='Q[x,y]', weight_bound=2, u_bound=2, trials=2))
    assert code == EXIT_OK, report
    result = report['result']
    assert result['first_order_classes'] > 0
    assert result['images']
    assert result['images'][0]['order'] == 2


def test_linfty_suite_on_the_line():
    code, report = run('linfty', ScenarioConfig(algebra='Q[x]', weight_bound=1, u_bound=2, arity_k=3, trials=2))
    assert code == EXIT_OK, report
    assert report['window']['K'] == 3


@pytest.mark.parametrize('subcommand, config', [
    ('homology', ScenarioConfig()),
    ('homology', ScenarioConfig(algebra='Q', spec='a.json')),
    ('homology', ScenarioConfig(algebra='nowhere')),
    ('identities', ScenarioConfig(algebra='K2', trials=0)),
    ('linfty', ScenarioConfig(algebra='K2')),
    ('fly', ScenarioConfig(algebra='K2')),
])
def test_configuration_errors_exit_with_two(subcommand, config):
    code, report = run(subcommand, config)
    assert code == EXIT_CONFIG_ERROR
    assert not report['ok']
    assert report['error']


def test_missing_spec_file(tmp_path):
    code, report = run('homology', ScenarioConfig(spec=str(tmp_path / 'missing.json')))
    assert code == EXIT_CONFIG_ERROR
    assert report['error_type'] == 'ConfigError'


def test_spec_file_is_loaded(tmp_path):
    path = tmp_path / 'k2.json'
    path.write_text(json.dumps(K2_SPEC))
    algebra = ScenarioConfig(spec=str(path)).validate().load_algebra()
    assert algebra.name == 'K2'
    assert algebra.dim == 2


def test_reports_are_byte_identical():
    config = ScenarioConfig(algebra='K2', arity_bound=3, seed=5, trials=3)
    assert dumps(run('identities', config)[1]) == dumps(run('identities', config)[1])


def test_main_writes_the_report(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    code = main(['homology', '--algebra', 'Q', '--arity-bound', '2', '--u-bound', '2', '--u-neg-bound', '2',
                 '--out', 'report.json'])
    assert code == EXIT_OK
    report = json.loads((tmp_path / 'report.json').read_text())
    assert report['window'] == {'W': 4, 'N': 2, 'U': 2, 'P': 2, 'K': 4}
    assert report['algebra'] == 'Q'
    assert 'report written to report.json' in capsys.readouterr().out


def test_parser_defaults():
    args = build_parser().parse_args(['psi', '--algebra', 'Q[x]'])
    assert args.seed == 7
    assert args.trials == 100
    assert args.eta == 'catalog'
