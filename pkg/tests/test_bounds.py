import itertools
import json
import random

import pytest

from psqm import bounds
from psqm.bounds import (
    FunctionTable,
    InputDistribution,
    alpha,
    beta,
    collision_beta,
    dj_table,
    exact_smp_clique_sizes,
    is_non_degenerate,
    min_entropy,
    psqm_lower_bound,
    random_function_stats,
    similar_disjoint_pairs,
)

from _oracles import (
    oracle_alpha,
    oracle_beta,
    oracle_bound,
    oracle_max_clique,
    oracle_min_entropy,
    oracle_nondegenerate,
)


def table_of(entries, prefix=("x", "y")):
    rows = [f"{prefix[0]}{i}" for i in range(len(entries))]
    cols = [f"{prefix[1]}{j}" for j in range(len(entries[0]))]
    return FunctionTable.build(rows, cols, entries)


EQ1 = table_of([[1, 0], [0, 1]])


def random_table(rng, n1, n2, partial=False):
    choices = [0, 1, None] if partial else [0, 1]
    return table_of(
        [[rng.choice(choices) for _ in range(n2)] for _ in range(n1)]
    )


def literal_similar_disjoint(table, first, second):
    """Validity check for a witness pair, straight from the definitions."""
    ri = {lbl: i for i, lbl in enumerate(table.rows)}
    ci = {lbl: j for j, lbl in enumerate(table.cols)}
    S = [ri[x] for x in first.rows]
    T = [ci[y] for y in first.cols]
    S2 = [ri[x] for x in second.rows]
    T2 = [ci[y] for y in second.cols]
    if len(S) != len(S2) or len(T) != len(T2):
        return False
    same = all(
        table.entries[i][j] == table.entries[i2][j2]
        for (i, i2) in zip(S, S2)
        for (j, j2) in zip(T, T2)
    )
    rows_moved = all(i != i2 for i, i2 in zip(S, S2))
    cols_moved = all(j != j2 for j, j2 in zip(T, T2))
    return same and (rows_moved or cols_moved)


# ------------------------------------------------------------ golden EQ


def test_eq1_golden_values():
    mu = InputDistribution.uniform(EQ1)
    assert is_non_degenerate(EQ1, mu)
    a = alpha(EQ1, mu)
    assert a.value == 1.0
    first, second = a.witness
    assert literal_similar_disjoint(EQ1, first, second)
    assert len(first.rows) == 2 and len(first.cols) == 2  # full rectangle
    assert beta(EQ1, mu) == 0.5
    assert min_entropy(mu) == 2.0
    bound = psqm_lower_bound(EQ1, mu)
    assert bound.value == 0.0


def test_eq1_matches_oracles():
    entries = [[1, 0], [0, 1]]
    weights = [[0.25, 0.25], [0.25, 0.25]]
    assert oracle_nondegenerate(entries)
    assert oracle_alpha(entries, weights) == 1.0
    assert oracle_beta(entries, weights) == 0.5
    assert oracle_min_entropy(weights) == 2.0
    assert oracle_bound(entries, weights) == 0.0
    mu = InputDistribution.uniform(EQ1)
    assert alpha(EQ1, mu).value == oracle_alpha(entries, weights)
    assert beta(EQ1, mu) == oracle_beta(entries, weights)


# ------------------------------------------------------- oracle sweeps


def test_alpha_matches_oracle_on_all_2x2_totals():
    for bits in itertools.product([0, 1], repeat=4):
        entries = [[bits[0], bits[1]], [bits[2], bits[3]]]
        table = table_of(entries)
        mu = InputDistribution.uniform(table)
        got = alpha(table, mu).value
        want = oracle_alpha(entries, mu.weights)
        assert abs(got - want) < 1e-12, entries


def test_alpha_matches_oracle_on_random_3x3(subtests=None):
    rng = random.Random(31)
    for trial in range(25):
        table = random_table(rng, 3, 3, partial=trial % 3 == 2)
        if trial % 2:
            raw = [[rng.random() for _ in range(3)] for _ in range(3)]
            total = sum(map(sum, raw))
            weights = [[v / total for v in row] for row in raw]
            mu = InputDistribution(table, weights)
        else:
            mu = InputDistribution.uniform(table)
        got = alpha(table, mu)
        want = oracle_alpha(table.entries, mu.weights)
        assert abs(got.value - want) < 1e-12, table.entries
        if got.witness is not None:
            assert literal_similar_disjoint(table, *got.witness)


def test_alpha_on_rectangular_table():
    rng = random.Random(4)
    for _ in range(10):
        table = random_table(rng, 2, 4)
        mu = InputDistribution.uniform(table)
        got = alpha(table, mu).value
        assert abs(got - oracle_alpha(table.entries, mu.weights)) < 1e-12


def test_alpha_size_cap_monotone():
    rng = random.Random(8)
    table = random_table(rng, 4, 4)
    mu = InputDistribution.uniform(table)
    values = [alpha(table, mu, size_cap=c).value for c in (1, 2, 3, 4)]
    assert values == sorted(values)
    assert values[-1] == alpha(table, mu).value
    with pytest.raises(ValueError):
        alpha(table, mu, size_cap=0)


def test_alpha_domain_cap():
    table = table_of([[0] * 7 for _ in range(7)])
    with pytest.raises(ValueError):
        alpha(table, InputDistribution.uniform(table))
    assert bounds.ALPHA_DOMAIN_CAP == 6


def test_similar_disjoint_stream_is_valid():
    rng = random.Random(12)
    table = random_table(rng, 3, 3)
    mu = InputDistribution.uniform(table)
    seen = 0
    for value, cells, (first, second) in similar_disjoint_pairs(table, mu):
        assert literal_similar_disjoint(table, first, second)
        assert cells == len(first.rows) * len(first.cols)
        assert value <= 1.0 + 1e-12
        seen += 1
    assert seen > 0


def test_beta_matches_oracle():
    rng = random.Random(55)
    for trial in range(30):
        table = random_table(rng, 3, 4)
        if trial % 2:
            raw = [[rng.random() for _ in range(4)] for _ in range(3)]
            total = sum(map(sum, raw))
            mu = InputDistribution(
                table, [[v / total for v in row] for row in raw]
            )
        else:
            mu = InputDistribution.uniform(table)
        assert abs(beta(table, mu) - oracle_beta(table.entries, mu.weights)) < 1e-12


def test_beta_closed_form_agrees_with_literal():
    rng = random.Random(70)
    table = random_table(rng, 4, 4)
    mu = InputDistribution.uniform(table)
    masses: dict = {}
    for i, j in mu.support():
        masses.setdefault(table.entries[i][j], []).append(mu.weights[i][j])
    assert abs(beta(table, mu) - collision_beta(masses)) < 1e-12


def test_beta_errors():
    partial = table_of([[1, None], [0, 1]])
    with pytest.raises(ValueError):
        beta(partial, InputDistribution.uniform(partial))
    # fine when the distribution avoids the hole
    ok = InputDistribution.uniform_defined(partial)
    assert beta(partial, ok) >= 0.0
    with pytest.raises(ValueError):
        collision_beta({})
    with pytest.raises(ValueError):
        collision_beta({0: [0.0]})


def test_bound_composition_matches_oracle():
    rng = random.Random(91)
    done = 0
    while done < 10:
        table = random_table(rng, 3, 3)
        mu = InputDistribution.uniform(table)
        if not is_non_degenerate(table, mu):
            continue
        try:
            got = psqm_lower_bound(table, mu)
        except ValueError:
            assert oracle_beta(table.entries, mu.weights) == 0.0
            done += 1
            continue
        want = oracle_bound(table.entries, mu.weights)
        assert abs(got.value - want) < 1e-12
        assert got.alpha == alpha(table, mu).value
        done += 1


def test_bound_errors():
    degenerate = table_of([[1, 1], [1, 1]])
    with pytest.raises(ValueError, match="degenerate"):
        psqm_lower_bound(degenerate, InputDistribution.uniform(degenerate))
    and_table = table_of([[0, 0], [0, 1]])
    with pytest.raises(ValueError, match="beta is zero"):
        psqm_lower_bound(and_table, InputDistribution.uniform(and_table))


def test_alpha_zero_when_no_pairs():
    # a single row cannot move, and single-column moves are blocked by
    # differing entries, so no similar disjoint pair exists at all
    table = table_of([[1, 0]])
    mu = InputDistribution.uniform(table)
    result = alpha(table, mu)
    assert result.value == 0.0
    assert result.witness is None and result.max_cells == 0
    # both output classes are singletons, so the bound is refused
    with pytest.raises(ValueError, match="beta is zero"):
        psqm_lower_bound(table, mu)


# --------------------------------------------------------- degeneracy


def test_non_degeneracy_cases():
    xor = table_of([[0, 1], [1, 0]])
    assert is_non_degenerate(xor, InputDistribution.uniform(xor))
    flat = table_of([[1, 1], [0, 1]])
    assert oracle_nondegenerate(flat.entries) == is_non_degenerate(
        flat, InputDistribution.uniform(flat)
    )
    rows_equal = table_of([[1, 0], [1, 0]])
    assert not is_non_degenerate(rows_equal, InputDistribution.uniform(rows_equal))


def test_non_degeneracy_matches_oracle_on_totals():
    rng = random.Random(44)
    for _ in range(40):
        table = random_table(rng, 3, 3)
        got = is_non_degenerate(table, InputDistribution.uniform(table))
        assert got == oracle_nondegenerate(table.entries)


def test_non_degeneracy_partial_support_error():
    partial = table_of([[1, None], [0, 1]])
    with pytest.raises(ValueError, match="undefined"):
        is_non_degenerate(partial, InputDistribution.uniform(partial))
    # the support is a rectangle, so the hole's whole row must go
    mu = InputDistribution(partial, [[0.0, 0.0], [0.5, 0.5]])
    assert is_non_degenerate(partial, mu) is True


# ------------------------------------------------------------- cliques


def test_dj2_clique_sizes():
    result = exact_smp_clique_sizes(dj_table(2))
    assert (result.row_clique_size, result.col_clique_size) == (2, 2)
    assert len(result.row_clique) == 2


def test_cliques_on_total_tables_count_distinct_lines():
    rng = random.Random(77)
    for _ in range(30):
        table = random_table(rng, 4, 4)
        result = exact_smp_clique_sizes(table)
        distinct_rows = len(set(table.entries))
        cols = list(zip(*table.entries))
        distinct_cols = len(set(cols))
        assert result.row_clique_size == distinct_rows
        assert result.col_clique_size == distinct_cols


def test_cliques_match_subset_oracle_on_partials():
    rng = random.Random(101)
    for _ in range(20):
        table = random_table(rng, 4, 5, partial=True)
        result = exact_smp_clique_sizes(table)

        def row_edge(i, j):
            return any(
                table.entries[i][c] is not None
                and table.entries[j][c] is not None
                and table.entries[i][c] != table.entries[j][c]
                for c in range(5)
            )

        def col_edge(a, b):
            return any(
                table.entries[r][a] is not None
                and table.entries[r][b] is not None
                and table.entries[r][a] != table.entries[r][b]
                for r in range(4)
            )

        assert result.row_clique_size == oracle_max_clique(4, row_edge)[0]
        assert result.col_clique_size == oracle_max_clique(5, col_edge)[0]


def test_clique_vertex_cap():
    assert bounds.CLIQUE_VERTEX_CAP == 20
    with pytest.raises(ValueError, match="capped"):
        exact_smp_clique_sizes(dj_table(8))


def test_max_clique_search_random_graphs():
    rng = random.Random(5)
    for _ in range(25):
        count = rng.randint(1, 10)
        edges = {
            (i, j): rng.random() < 0.5
            for i in range(count)
            for j in range(i + 1, count)
        }

        def edge(i, j):
            return edges[(min(i, j), max(i, j))]

        adj = [0] * count
        for (i, j), present in edges.items():
            if present:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
        got = bounds._max_clique_bits(adj)
        assert bin(got).count("1") == oracle_max_clique(count, edge)[0]
        members = [i for i in range(count) if (got >> i) & 1]
        assert all(edge(i, j) for i, j in itertools.combinations(members, 2))


# ------------------------------------------------------------- tables


def test_function_table_json_round_trip():
    table = table_of([[1, None], [0, 1]])
    payload = json.loads(json.dumps(table.to_json()))
    assert FunctionTable.from_json(payload) == table
    assert not table.is_total()
    assert table.shape == (2, 2)


def test_function_table_validation():
    with pytest.raises(ValueError):
        FunctionTable.build(["a", "a"], ["b"], [[1], [0]])
    with pytest.raises(ValueError):
        FunctionTable.build(["a"], ["b"], [[2]])
    with pytest.raises(ValueError):
        FunctionTable.build(["a"], ["b", "c"], [[1]])
    with pytest.raises(ValueError, match="malformed"):
        FunctionTable.from_json({"rows": ["a"]})
    with pytest.raises(ValueError, match="malformed"):
        FunctionTable.from_json(None)


def test_input_distribution_validation():
    table = table_of([[1, 0], [0, 1]])
    with pytest.raises(ValueError):
        InputDistribution(table, [[0.5, 0.5]])
    with pytest.raises(ValueError):
        InputDistribution(table, [[0.7, 0.4], [0.0, 0.0]])
    with pytest.raises(ValueError):
        InputDistribution(table, [[-0.5, 0.5], [0.5, 0.5]])
    empty = table_of([[None, None]])
    with pytest.raises(ValueError):
        InputDistribution.uniform_defined(empty)


def test_dj_table_entries():
    table = dj_table(4)
    assert table.shape == (16, 16)
    idx = {lbl: i for i, lbl in enumerate(table.rows)}
    assert table.entries[idx["0101"]][idx["0101"]] == 1
    assert table.entries[idx["0000"]][idx["0011"]] == 0
    assert table.entries[idx["0000"]][idx["0001"]] is None
    with pytest.raises(ValueError):
        dj_table(16)
    with pytest.raises(ValueError):
        dj_table(3)


# --------------------------------------------------------------- stats


def test_stats_exhaustive_n1_matches_independent_enumeration():
    summary = random_function_stats(1, 0, None, exhaustive=True)
    tables, nondeg, beta_zero, values = 0, 0, 0, []
    for bits in itertools.product([0, 1], repeat=4):
        entries = [[bits[0], bits[1]], [bits[2], bits[3]]]
        tables += 1
        if not oracle_nondegenerate(entries):
            continue
        nondeg += 1
        weights = [[0.25, 0.25], [0.25, 0.25]]
        if oracle_beta(entries, weights) == 0.0:
            beta_zero += 1
        else:
            values.append(oracle_bound(entries, weights))
    assert summary["tables"] == tables == 16
    assert summary["fraction_nondegenerate"] == nondeg / tables == 0.625
    assert summary["beta_zero"] == beta_zero == 8
    assert summary["bounds"]["count"] == len(values) == 2
    assert summary["bounds"]["min"] == min(values) == 0.0
    assert summary["bounds"]["max"] == max(values) == 0.0
    assert summary["max_similar_disjoint_cells"] == 4
    assert summary["cells_bound_reference"] == 2
    assert summary["coverage"] == "exhaustive:16"


def test_stats_sampled_deterministic():
    a = random_function_stats(2, 40, seed=9)
    b = random_function_stats(2, 40, seed=9)
    assert a == b
    assert a["coverage"] == "sampled:40"
    assert a["cells_bound_reference"] == 16
    assert 0.0 <= a["fraction_nondegenerate"] <= 1.0


def test_stats_guards():
    with pytest.raises(ValueError):
        random_function_stats(3, 10, seed=1)
    with pytest.raises(ValueError):
        random_function_stats(2, 0, None, exhaustive=True)
    with pytest.raises(ValueError):
        random_function_stats(2, 10, None)
