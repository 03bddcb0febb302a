import pandas as pd
import pytest

from oracle.evaluation import certified_radius, default_grid, evaluate, run_instance, scaling_check
from oracle.generators import gen

SMALL_GRID = [
    ('planted_tree_spanner', {'n': 64, 't': 3, 'extra_edges': 64}, 0),
    ('planted_tree_spanner', {'n': 128, 't': 5, 'extra_edges': 128}, 1),
]


def test_certified_radius():
    assert certified_radius(gen('planted_tree_spanner', {'n': 20, 't': 5, 'extra_edges': 5}, 0), 1) == 3
    assert certified_radius(gen('cycle', {'n': 9}, 0), 1) == 3
    assert certified_radius(gen('cycle', {'n': 10}, 0), 1) is None
    planted = gen('planted_tw_spanner', {'n': 20, 'k': 2, 't': 3}, 0)
    assert certified_radius(planted, 1) is None
    assert certified_radius(planted, 3) == 2


def test_default_grid():
    grid = default_grid([250], seed=10)
    assert grid == [
        ('planted_tree_spanner', {'n': 250, 't': 3, 'extra_edges': 250}, 10),
        ('planted_tree_spanner', {'n': 250, 't': 5, 'extra_edges': 250}, 11),
        ('planted_tree_spanner', {'n': 250, 't': 7, 'extra_edges': 250}, 12),
    ]


def test_evaluate_small_grid():
    df = evaluate(SMALL_GRID)
    assert len(df) == 4
    assert list(df['mode']) == ['sparse', 'collective', 'sparse', 'collective']
    assert df['passed'].all()
    assert (df['surplus'] <= df['surplus_bound']).all()
    assert (df.loc[df['mode'] == 'sparse', 'trees'] == 0).all()


def test_bfs_rows_are_exact():
    (row,) = run_instance(gen('cycle', {'n': 12}, 0), modes=('bfs',))
    assert row['trees'] == 11
    assert row['surplus'] == 0
    assert row['passed']


def test_without_verification():
    rows = run_instance(gen('grid', {'rows': 5, 'cols': 5}, 0), verify=False)
    assert all(row['surplus'] is None and row['surplus_bound'] is None for row in rows)


@pytest.mark.parametrize("k", [2])
def test_general_k(k):
    df = evaluate(SMALL_GRID[:1], k=k)
    assert (df['k'] == k).all()
    assert df['passed'].all()


def test_scaling_check():
    df = pd.DataFrame({'n': [100, 200, 400, 400], 'seconds': [1.0, 2.0, 6.0, 10.0]})
    timing = scaling_check(df)
    assert list(timing['n']) == [100, 200, 400]
    assert list(timing['within_limit']) == [True, True, False]


def test_scaling_check_normalises_gaps():
    df = pd.DataFrame({'n': [100, 400], 'seconds': [1.0, 4.0]})
    timing = scaling_check(df)
    assert timing['ratio_per_doubling'].iloc[1] == pytest.approx(2.0)
    assert timing['within_limit'].all()
