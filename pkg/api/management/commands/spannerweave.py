"""
python manage.py spannerweave <subcommand> ...

Exit codes: 0 ok, 2 unparsable input, 3 any other library error, 4 a guarantee
(tree count, edge count, surplus, depth, lifted breadth) was violated.
"""
import logging
from pathlib import Path
from typing import Any, Dict, List

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from api.reports import hierarchy_dot, hierarchy_report, system_report, to_json, tree_edge_blocks
from core.exceptions import ContractViolation, GraphFormatError, SpannerweaveError
from core.formats import format_edgelist, parse_tree_blocks, read_graph, read_text
from decomposition.hierarchy import build_hierarchy
from decomposition.separators import best_k_disk_separator
from oracle.bounds import BoundChecker, BoundResult
from oracle.breadth import brute_tree_breadth
from oracle.distances import collective_surplus, multiplicative_from_additive, surplus
from oracle.evaluation import DEFAULT_SIZES, default_grid, evaluate, scaling_check
from oracle.generators import GENERATORS, gen, params_from_values
from spanners.local_subtrees import local_subtrees
from spanners.system import SpannerMode, bfs_system, collective_system, sparse_spanner
from treedec.decomposition import TreeDecomposition, expand, lift, metrics, validate

logger = logging.getLogger(__name__)

EXIT_FORMAT = 2
EXIT_ERROR = 3
EXIT_BOUND = 4


class Command(BaseCommand):
    help = "Sparse additive spanners and collective tree spanners from disk-separator hierarchies"

    def add_arguments(self, parser):
        sub = parser.add_subparsers(dest='subcommand', required=True)

        p = sub.add_parser('gen', help='generate a seeded instance with its certificate')
        p.add_argument('kind', choices=sorted(GENERATORS))
        p.add_argument('params', nargs='*', type=int)
        p.add_argument('--seed', type=int, required=True)
        p.add_argument('--out', help='edge-list file (default stdout)')
        p.add_argument('--certificate', help='certificate JSON file (default <out>.cert.json when --out is given)')

        p = sub.add_parser('separator', help='minimum-radius balanced (k-)disk separator')
        self._input(p)
        self._k(p)

        p = sub.add_parser('decompose', help='hierarchical decomposition tree as JSON or DOT')
        self._input(p)
        self._k(p)
        p.add_argument('--dot', action='store_true')
        p.add_argument('--tree-spanner', type=int, dest='tree_spanner',
                       help='report whether the hierarchy rules out a (tree-width k-1) t-spanner')

        p = sub.add_parser('spanner', help='sparse additive spanner or collective tree spanner system')
        self._input(p)
        self._k(p)
        p.add_argument('--mode', choices=[m.value for m in SpannerMode], default=SpannerMode.COLLECTIVE.value)
        p.add_argument('--verify', action='store_true', help='measure the exact surplus (all pairs)')
        p.add_argument('--format', choices=['json', 'edgelist'], default='json')
        p.add_argument('--out', help='also write the tree edge blocks to this file')

        p = sub.add_parser('verify', help='exact surplus of a spanner or of collective trees')
        self._input(p)
        p.add_argument('spanners', nargs='+', help="spanner edge list(s); '# tree' blocks split a file")
        p.add_argument('--collective', action='store_true')
        p.add_argument('--bound', type=float, help='exit 4 when the measured surplus exceeds this value')

        p = sub.add_parser('tree-breadth', help='exact k-tree-breadth of a tiny graph by exhaustive search')
        self._input(p)
        self._k(p)
        p.add_argument('--method', choices=['orderings', 'fill_subsets'], default='orderings')

        p = sub.add_parser('td-validate', help='check a tree decomposition against a graph')
        self._input(p)
        p.add_argument('td')

        p = sub.add_parser('td-metrics', help='width, length, breadth and k-breadth')
        self._input(p)
        p.add_argument('td')
        self._k(p)
        p.add_argument('--greedy', action='store_true', help='greedy k-breadth bound beyond the exact caps')

        p = sub.add_parser('td-expand', help='replace every bag by its radius-r neighbourhood')
        self._input(p)
        p.add_argument('td')
        p.add_argument('--radius', type=int, required=True)

        p = sub.add_parser('td-lift', help='decomposition of G from one of its t-spanner H')
        self._input(p)
        p.add_argument('spanner')
        p.add_argument('td')
        p.add_argument('--t', type=int, required=True)
        p.add_argument('--check', action='store_true', help='recompute the (width+1)-breadth and enforce ceil(t/2)')
        p.add_argument('--greedy', action='store_true')
        p.add_argument('--out', help='write the lifted decomposition here instead of stdout')

        p = sub.add_parser('evaluate', help='run the pipeline over planted instances and tabulate')
        p.add_argument('--sizes', type=int, nargs='+', default=list(DEFAULT_SIZES))
        self._k(p)
        p.add_argument('--modes', nargs='+', choices=[m.value for m in SpannerMode],
                       default=[SpannerMode.SPARSE.value, SpannerMode.COLLECTIVE.value])
        p.add_argument('--seed', type=int, default=0)
        p.add_argument('--no-verify', action='store_true', dest='no_verify')
        p.add_argument('--csv', help='write the result table as CSV')

        for p in sub.choices.values():
            p.add_argument('--threads', type=int, help='worker cap (default SPANNERWEAVE_THREADS)')
            p.add_argument('--k-cap', type=int, dest='k_cap', help='override the largest accepted k')

    @staticmethod
    def _input(p):
        p.add_argument('input', help="graph edge list, '-' for stdin")

    @staticmethod
    def _k(p):
        p.add_argument('--k', type=int, default=1)

    # ------------------------------------------------------------------

    def handle(self, *args, **options):
        self.policy: Dict[str, Any] = getattr(settings, 'SPANNER_POLICY', {}) or {}
        self.threads = int(options.get('threads') or self.policy.get('threads', 1))
        self.allow_over_cap = options.get('k_cap') is not None
        self.k_cap = int(options['k_cap']) if self.allow_over_cap else int(self.policy.get('k_cap', 3))
        self.checker = BoundChecker(self.policy)
        handler = getattr(self, '_' + options['subcommand'].replace('-', '_'))
        try:
            handler(options)
        except GraphFormatError as e:
            raise CommandError(f"format error: {e}", returncode=EXIT_FORMAT) from e
        except SpannerweaveError as e:
            raise CommandError(f"{type(e).__name__}: {e}", returncode=EXIT_ERROR) from e

    def _emit(self, text: str) -> None:
        self.stdout.write(text, ending='')

    def _enforce(self, results: List[BoundResult]) -> None:
        failed = BoundChecker.violations(results)
        for r in failed:
            logger.error(f"bound violated: {r.name}: {r.reason}")
        if failed:
            raise CommandError(
                "guarantee violated: " + "; ".join(f"{r.name} ({r.reason})" for r in failed), returncode=EXIT_BOUND,
            )

    def _hierarchy(self, g, k):
        return build_hierarchy(g, k=k, k_cap=self.k_cap, allow_over_cap=self.allow_over_cap, threads=self.threads)

    def _apsp_guard(self, n: int) -> None:
        limit = int(self.policy.get('apsp_limit', 5000))
        if n > limit:
            raise ContractViolation(f"exact verification refused for n={n} above the APSP limit {limit}")

    # -- subcommands ---------------------------------------------------

    def _gen(self, options):
        params = params_from_values(options['kind'], options['params'])
        instance = gen(options['kind'], params, options['seed'])
        text = format_edgelist(instance.graph)
        cert_path = options.get('certificate')
        if options.get('out'):
            Path(options['out']).write_text(text, encoding='utf-8')
            cert_path = cert_path or f"{options['out']}.cert.json"
        else:
            self._emit(text)
        if cert_path:
            Path(cert_path).write_text(to_json(instance.certificate_dict()), encoding='utf-8')

    def _separator(self, options):
        g = read_graph(options['input'])
        sep = best_k_disk_separator(g, options['k'], k_cap=self.k_cap, allow_over_cap=self.allow_over_cap,
                                    threads=self.threads)
        self._emit(to_json(sep.to_dict()))

    def _decompose(self, options):
        g = read_graph(options['input'])
        h = self._hierarchy(g, options['k'])
        if options['dot']:
            self._emit(hierarchy_dot(h))
        else:
            self._emit(to_json(hierarchy_report(h, options.get('tree_spanner'))))
        self._enforce(self.checker.check_hierarchy(h))

    def _spanner(self, options):
        g = read_graph(options['input'])
        mode = SpannerMode(options['mode'])
        if options['verify']:
            self._apsp_guard(g.n)
        if mode is SpannerMode.BFS:
            system = bfs_system(g)
            checks: List[BoundResult] = []
        else:
            h = self._hierarchy(g, options['k'])
            subtrees = local_subtrees(h, threads=self.threads, small_cap=int(self.policy.get('small_spanner_cap', 8)))
            system = sparse_spanner(h, subtrees) if mode is SpannerMode.SPARSE else collective_system(h, subtrees)
            checks = self.checker.check_hierarchy(h)

        report = None
        if options['verify']:
            if mode is SpannerMode.SPARSE:
                report = surplus(g, system.union, threads=self.threads)
            else:
                report = collective_surplus(g, [t.tree for t in system.trees], threads=self.threads)
        checks = checks + self.checker.check_system(system, report)

        blocks = "\n".join(tree_edge_blocks(system)) + "\n"
        if options.get('out'):
            Path(options['out']).write_text(blocks, encoding='utf-8')
        if options['format'] == 'edgelist':
            self._emit(blocks)
        else:
            measured = report.to_dict() if report is not None else None
            self._emit(to_json(system_report(system, checks, measured)))
        self._enforce(checks)

    def _verify(self, options):
        g = read_graph(options['input'])
        self._apsp_guard(g.n)
        graphs = []
        for path in options['spanners']:
            graphs.extend(parse_tree_blocks(read_text(path), g.n))
        if options['collective']:
            report = collective_surplus(g, graphs, threads=self.threads)
            payload = report.to_dict()
            payload['num_trees'] = len(graphs)
        else:
            if len(graphs) != 1:
                raise ContractViolation(f"expected one spanner, got {len(graphs)}; pass --collective for tree systems")
            report = surplus(g, graphs[0], threads=self.threads)
            payload = report.to_dict()
            payload['num_edges'] = graphs[0].m
        within = float(report.max_stretch) <= multiplicative_from_additive(float(report.max_surplus))
        payload['multiplicative_within_additive_plus_one'] = within
        self._emit(to_json(payload))
        if options.get('bound') is not None and report.max_surplus > options['bound']:
            raise CommandError(f"measured surplus {report.max_surplus} exceeds {options['bound']}", returncode=EXIT_BOUND)

    def _tree_breadth(self, options):
        g = read_graph(options['input'])
        caps = {int(k): int(v) for k, v in (self.policy.get('brute_tb_cap') or {1: 7, 2: 6}).items()}
        value = brute_tree_breadth(g, k=options['k'], caps=caps, method=options['method'], threads=self.threads)
        self._emit(to_json({'n': g.n, 'm': g.m, 'k': options['k'], 'tree_breadth': value, 'method': options['method']}))

    def _read_td(self, path: str) -> TreeDecomposition:
        return TreeDecomposition.from_pace(read_text(path))

    def _td_validate(self, options):
        g = read_graph(options['input'])
        violations = validate(g, self._read_td(options['td']))
        self._emit(to_json({'valid': not violations, 'violations': [v.to_dict() for v in violations]}))
        if violations:
            raise CommandError(f"invalid tree decomposition: {violations[0].detail}", returncode=EXIT_ERROR)

    def _metrics(self, g, td, k, greedy):
        return metrics(
            g, td, k=k,
            k_cap=int(self.policy.get('breadth_k_cap', 3)),
            bag_cap=int(self.policy.get('breadth_bag_cap', 24)),
            greedy=greedy,
        )

    def _td_metrics(self, options):
        g = read_graph(options['input'])
        result = self._metrics(g, self._read_td(options['td']), options['k'], options['greedy'])
        self._emit(to_json(result.to_dict()))

    def _td_expand(self, options):
        g = read_graph(options['input'])
        td = self._read_td(options['td'])
        problems = validate(g, td)
        if problems:
            raise ContractViolation(f"input decomposition is invalid: {problems[0].detail}")
        self._emit(expand(g, td, options['radius']).to_pace())

    def _td_lift(self, options):
        g = read_graph(options['input'])
        h = parse_tree_blocks(read_text(options['spanner']), g.n)
        if len(h) != 1:
            raise ContractViolation("the spanner file must hold a single edge list")
        td = self._read_td(options['td'])
        lifted = lift(g, h[0], td, options['t'])
        text = lifted.to_pace()
        if options.get('out'):
            Path(options['out']).write_text(text, encoding='utf-8')
        else:
            self._emit(text)
        if options['check']:
            result = self._metrics(g, lifted, td.width + 1, options['greedy'])
            checks = self.checker.check_lift(result, options['t'])
            summary = to_json({'metrics': result.to_dict(), 'checks': [c.to_dict() for c in checks]})
            if options.get('out'):
                self._emit(summary)
            else:
                self.stderr.write(summary, ending='')
            self._enforce(checks)

    def _evaluate(self, options):
        if not options['no_verify']:
            self._apsp_guard(max(options['sizes']))
        df = evaluate(
            default_grid(options['sizes'], seed=options['seed']),
            k=options['k'],
            modes=options['modes'],
            checker=self.checker,
            threads=self.threads,
            verify=not options['no_verify'],
        )
        timing = scaling_check(df)
        if options.get('csv'):
            df.to_csv(options['csv'], index=False)
        self._emit(df.to_string(index=False) + "\n\n" + timing.to_string(index=False) + "\n")
        if not timing['within_limit'].all():
            logger.warning("pipeline time grew faster than the near-linear scaling limit")
        failed = df[~df['passed']]
        if len(failed):
            raise CommandError(f"{len(failed)} evaluation row(s) violated a guarantee", returncode=EXIT_BOUND)
