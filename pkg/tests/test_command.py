import json
from dataclasses import replace
from io import StringIO

import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from api.management.commands import spannerweave
from core.formats import format_edgelist, read_graph
from core.graph import Graph
from spanners.system import SpannerMode, bfs_system
from treedec.decomposition import TreeDecomposition, validate

from .graphs import cycle_graph, path_graph

C6_TD = "s td 4 3 6\nb 1 1 2 6\nb 2 2 3 6\nb 3 3 5 6\nb 4 3 4 5\n1 2\n2 3\n3 4\n"
P6_TD = "s td 5 2 6\n" + "".join(f"b {i} {i} {i + 1}\n" for i in range(1, 6)) + "".join(f"{i} {i + 1}\n" for i in range(1, 5))


def run(*args, stderr=None):
    out = StringIO()
    call_command('spannerweave', *[str(a) for a in args], stdout=out, stderr=stderr or StringIO())
    return out.getvalue()


def run_json(*args):
    return json.loads(run(*args))


def exit_code(*args):
    with pytest.raises(CommandError) as excinfo:
        run(*args)
    return excinfo.value.returncode


@pytest.fixture
def c6_file(write_graph):
    return write_graph(cycle_graph(6), 'c6.txt')


@pytest.fixture
def write_text(tmp_path):
    def _write(text, name):
        path = tmp_path / name
        path.write_text(text, encoding='utf-8')
        return str(path)
    return _write


class TestGen:
    def test_to_stdout(self):
        assert run('gen', 'cycle', 6, '--seed', 0) == format_edgelist(cycle_graph(6))

    def test_to_file_with_certificate(self, tmp_path):
        out = tmp_path / 'planted.txt'
        run('gen', 'planted_tree_spanner', 30, 3, 10, '--seed', 4, '--out', out)
        g = read_graph(out)
        assert g.n == 30 and g.m == 39
        cert = json.loads((tmp_path / 'planted.txt.cert.json').read_text(encoding='utf-8'))
        assert cert['tree_breadth_upper'] == 2 and cert['seed'] == 4

    def test_unknown_parameters(self):
        assert exit_code('gen', 'grid', 1, 2, 3, '--seed', 0) == 3


class TestHierarchyCommands:
    def test_separator(self, c6_file):
        assert run_json('separator', c6_file) == {'centers': [0], 'radius': 1, 'cover_size': 3, 'max_component': 3}

    def test_separator_k_cap(self, c6_file):
        assert exit_code('separator', c6_file, '--k', 4) == 3
        assert run_json('separator', c6_file, '--k', 4, '--k-cap', 4)['radius'] == 0

    def test_decompose_json(self, c6_file):
        report = run_json('decompose', c6_file)
        assert [node['kind'] for node in report['nodes']] == ['internal', 'leaf']

    def test_decompose_dot(self, c6_file):
        assert run('decompose', c6_file, '--dot').startswith("digraph hierarchy {")

    def test_obstruction(self, write_graph):
        path = write_graph(cycle_graph(12))
        assert run_json('decompose', path, '--tree-spanner', 3)['spanner_obstruction']['obstructed']

    def test_unparsable_input(self, write_text):
        assert exit_code('decompose', write_text("0 1\n1 x\n", 'bad.txt')) == 2

    def test_missing_input(self, tmp_path):
        assert exit_code('separator', tmp_path / 'absent.txt') == 2

    def test_disconnected_input(self, write_graph):
        assert exit_code('decompose', write_graph(Graph.from_edges(4, [(0, 1), (2, 3)]))) == 3

    def test_tree_breadth(self, c6_file):
        assert run_json('tree-breadth', c6_file)['tree_breadth'] == 2

    def test_tree_breadth_cap_from_settings(self, settings, c6_file):
        settings.SPANNER_POLICY = {**settings.SPANNER_POLICY, 'brute_tb_cap': {1: 5}}
        assert exit_code('tree-breadth', c6_file) == 3


class TestSpannerAndVerify:
    def test_collective_with_verification(self, c6_file):
        report = run_json('spanner', c6_file, '--verify')
        assert report['mode'] == 'collective' and report['num_trees'] == 2
        assert report['measured']['max_surplus'] == 2
        assert all(check['holds'] for check in report['checks'])

    def test_sparse(self, c6_file):
        report = run_json('spanner', c6_file, '--mode', 'sparse', '--verify')
        assert report['num_edges'] == 6
        assert report['measured']['max_surplus'] == 0

    def test_bfs(self, c6_file):
        assert run_json('spanner', c6_file, '--mode', 'bfs', '--verify')['measured']['max_surplus'] == 0

    def test_edge_blocks_feed_verify(self, c6_file, tmp_path):
        trees = tmp_path / 'trees.txt'
        text = run('spanner', c6_file, '--format', 'edgelist', '--out', trees)
        assert text.startswith("# tree 0 level=0 center=0")
        report = run_json('verify', c6_file, trees, '--collective')
        assert report['max_surplus'] == 2 and report['num_trees'] == 2
        assert report['multiplicative_within_additive_plus_one']
        assert exit_code('verify', c6_file, trees, '--collective', '--bound', 1) == 4

    def test_verify_single_spanner(self, c6_file, write_graph):
        report = run_json('verify', c6_file, write_graph(path_graph(6), 'p6.txt'))
        assert report['max_surplus'] == 4 and report['num_edges'] == 5

    def test_verify_needs_collective_for_many_trees(self, c6_file, tmp_path):
        trees = tmp_path / 'trees.txt'
        run('spanner', c6_file, '--out', trees)
        assert exit_code('verify', c6_file, trees) == 3

    def test_verify_rejects_foreign_edges(self, c6_file, write_text):
        assert exit_code('verify', c6_file, write_text("0 3\n", 'h.txt')) == 3

    def test_apsp_limit(self, settings, c6_file):
        settings.SPANNER_POLICY = {**settings.SPANNER_POLICY, 'apsp_limit': 4}
        assert exit_code('spanner', c6_file, '--verify') == 3
        assert run_json('spanner', c6_file)['num_trees'] == 2

    def test_too_many_trees_exit_with_bound_code(self, monkeypatch, c6_file):
        def oversized(h, subtrees):
            return replace(bfs_system(h.graph), mode=SpannerMode.COLLECTIVE)

        monkeypatch.setattr(spannerweave, 'collective_system', oversized)
        assert exit_code('spanner', c6_file, '--verify') == 4

    def test_disabled_check_is_not_enforced(self, monkeypatch, settings, c6_file):
        def oversized(h, subtrees):
            return replace(bfs_system(h.graph), mode=SpannerMode.COLLECTIVE)

        monkeypatch.setattr(spannerweave, 'collective_system', oversized)
        bounds = {**settings.SPANNER_POLICY['bounds'], 'tree_count': False}
        settings.SPANNER_POLICY = {**settings.SPANNER_POLICY, 'bounds': bounds}
        assert run_json('spanner', c6_file, '--verify')['num_trees'] == 5


class TestDecompositionCommands:
    def test_validate(self, c6_file, write_text):
        assert run_json('td-validate', c6_file, write_text(C6_TD, 'c6.td')) == {'valid': True, 'violations': []}

    def test_validate_reports_violations(self, c6_file, write_text):
        td = write_text("s td 1 3 6\nb 1 1 2 3\n", 'bad.td')
        assert exit_code('td-validate', c6_file, td) == 3

    def test_bad_pace(self, c6_file, write_text):
        assert exit_code('td-validate', c6_file, write_text("b 1 1\n", 'bad.td')) == 2

    def test_metrics(self, c6_file, write_text):
        report = run_json('td-metrics', c6_file, write_text(C6_TD, 'c6.td'), '--k', 2)
        assert (report['width'], report['k_breadth']) == (2, 1)

    def test_expand(self, c6_file, write_text):
        text = run('td-expand', c6_file, write_text(C6_TD, 'c6.td'), '--radius', 1)
        assert validate(cycle_graph(6), TreeDecomposition.from_pace(text)) == []

    def test_expand_rejects_invalid_input(self, c6_file, write_text):
        assert exit_code('td-expand', c6_file, write_text("s td 1 3 6\nb 1 1 2 3\n", 'bad.td'), '--radius', 1) == 3

    def test_lift_with_check(self, c6_file, write_graph, write_text):
        spanner = write_graph(path_graph(6), 'p6.txt')
        err = StringIO()
        text = run('td-lift', c6_file, spanner, write_text(P6_TD, 'p6.td'), '--t', 5, '--check', stderr=err)
        assert validate(cycle_graph(6), TreeDecomposition.from_pace(text)) == []
        summary = json.loads(err.getvalue())
        assert summary['metrics']['k'] == 2
        assert all(check['holds'] for check in summary['checks'])

    def test_lift_to_file(self, c6_file, write_graph, write_text, tmp_path):
        out = tmp_path / 'lifted.td'
        summary = run_json('td-lift', c6_file, write_graph(path_graph(6), 'p6.txt'), write_text(P6_TD, 'p6.td'),
                           '--t', 5, '--check', '--out', out)
        assert summary['checks'][0]['name'] == 'lift_breadth'
        assert TreeDecomposition.from_pace(out.read_text(encoding='utf-8')).host_n == 6

    def test_lift_needs_the_stretch(self, c6_file, write_graph, write_text):
        args = ('td-lift', c6_file, write_graph(path_graph(6), 'p6.txt'), write_text(P6_TD, 'p6.td'), '--t', 3)
        assert exit_code(*args) == 3

    def test_lift_check_catches_wide_bags(self, monkeypatch, write_graph, write_text):
        def single_bag(g, h, td, t):
            return TreeDecomposition.build([range(g.n)], [], g.n)

        monkeypatch.setattr(spannerweave, 'lift', single_bag)
        p12_td = "s td 11 2 12\n" + "".join(f"b {i} {i} {i + 1}\n" for i in range(1, 12)) \
            + "".join(f"{i} {i + 1}\n" for i in range(1, 11))
        args = ('td-lift', write_graph(cycle_graph(12), 'c12.txt'), write_graph(path_graph(12), 'p12.txt'),
                write_text(p12_td, 'p12.td'), '--t', 3, '--check')
        assert exit_code(*args) == 4


class TestEvaluate:
    def test_small_sizes(self, tmp_path):
        csv = tmp_path / 'eval.csv'
        text = run('evaluate', '--sizes', 32, 64, '--modes', 'collective', '--csv', csv)
        assert 'ratio_per_doubling' in text
        assert len(csv.read_text(encoding='utf-8').splitlines()) == 1 + 6

    def test_apsp_limit(self, settings):
        settings.SPANNER_POLICY = {**settings.SPANNER_POLICY, 'apsp_limit': 40}
        assert exit_code('evaluate', '--sizes', 32, 64) == 3
        assert 'collective' in run('evaluate', '--sizes', 32, '--no-verify')
