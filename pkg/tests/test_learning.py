"""Parameter estimation against a rational-arithmetic oracle, CMI against a
direct triple-sum, and the spanning-tree / orientation machinery."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmtbn import (
    Dag,
    Dataset,
    DisconnectedError,
    EmptyDataError,
    MISSING,
    Schema,
    UnknownNodeError,
    Variable,
    WeightedPairGraph,
    conditional_mutual_information,
    estimate_cpts,
    learn_tan,
    max_spanning_tree,
    orient_tree,
    pairwise_cmi_graph,
    tan_dag,
)


def make_schema(cards):
    return Schema(
        [
            Variable(f"v{i}", tuple(f"s{j}" for j in range(c)))
            for i, c in enumerate(cards)
        ]
    )


def fraction_cpt_oracle(dataset, dag, alpha):
    """Count-and-normalize in exact rational arithmetic, reduced to float."""
    schema = dataset.schema
    tables = {}
    for name in schema.names:
        parents = tuple(p for p in schema.names if (p, name) in set(dag.edges))
        pcols = [schema.index_of(p) for p in parents]
        ccol = schema.index_of(name)
        card = schema.variable(name).cardinality
        pcards = [schema.variable(p).cardinality for p in parents]
        n_rows = math.prod(pcards)
        counts = [[0] * card for _ in range(n_rows)]
        for row in dataset.rows:
            if row[ccol] == MISSING or any(row[j] == MISSING for j in pcols):
                continue
            ridx = 0
            for j, c in zip(pcols, pcards):
                ridx = ridx * c + int(row[j])
            counts[ridx][int(row[ccol])] += 1
        table = np.empty((n_rows, card))
        for r in range(n_rows):
            total = sum(counts[r])
            for s in range(card):
                if total + alpha * card == 0:
                    table[r, s] = float(Fraction(1, card))
                else:
                    table[r, s] = float(
                        Fraction(counts[r][s] + alpha, total + alpha * card)
                    )
        tables[name] = table
    return tables


class TestEstimateCpts:
    def test_single_node_by_hand(self):
        schema = make_schema([2])
        ds = Dataset(schema, [[0], [1], [1], [1]])
        model = estimate_cpts(ds, Dag(("v0",), ()), alpha=1)
        # (1+1)/(4+2) and (3+1)/(4+2)
        assert model.cpts["v0"].table.tolist() == [
            [0.3333333333333333, 0.6666666666666666]
        ]

    def test_matches_fraction_oracle_bitwise(self):
        rng = np.random.default_rng(20)
        schema = make_schema([2, 3, 2])
        dag = Dag(schema.names, [("v0", "v1"), ("v1", "v2")])
        for trial in range(20):
            rows = np.stack(
                [rng.integers(0, c, size=30) for c in (2, 3, 2)], axis=1
            )
            ds = Dataset(schema, rows)
            for alpha in (0, 1, 2):
                model = estimate_cpts(ds, dag, alpha=alpha)
                want = fraction_cpt_oracle(ds, dag, alpha)
                for name in schema.names:
                    got = model.cpts[name].table
                    assert got.tobytes() == want[name].tobytes(), (trial, alpha, name)

    def test_missing_rows_skipped_per_node(self):
        schema = make_schema([2, 2])
        dag = Dag(schema.names, [("v0", "v1")])
        ds = Dataset(schema, [[0, 0], [0, MISSING], [1, 1], [MISSING, 1]])
        model = estimate_cpts(ds, dag, alpha=0)
        # v0 counts rows 1-3 (its column present): 2 zeros, 1 one
        assert model.cpts["v0"].table[0, 0] == pytest.approx(2 / 3)
        # v1 needs both columns: only rows 0 and 2 count
        assert model.cpts["v1"].table[0].tolist() == [1.0, 0.0]
        assert model.cpts["v1"].table[1].tolist() == [0.0, 1.0]

    def test_alpha_zero_empty_row_is_uniform(self):
        schema = make_schema([2, 3])
        dag = Dag(schema.names, [("v0", "v1")])
        ds = Dataset(schema, [[0, 1], [0, 2]])  # v0=1 never seen
        model = estimate_cpts(ds, dag, alpha=0)
        assert model.cpts["v1"].table[1].tolist() == [1 / 3, 1 / 3, 1 / 3]

    def test_rows_always_sum_to_one(self):
        rng = np.random.default_rng(3)
        schema = make_schema([3, 2, 4])
        dag = Dag(schema.names, [("v0", "v2"), ("v1", "v2")])
        rows = np.stack([rng.integers(0, c, size=50) for c in (3, 2, 4)], axis=1)
        rows[rng.random(rows.shape) < 0.3] = MISSING
        model = estimate_cpts(Dataset(schema, rows), dag, alpha=1)
        for cpt in model.cpts.values():
            np.testing.assert_allclose(cpt.table.sum(axis=1), 1.0, atol=1e-12)

    def test_negative_alpha_rejected(self):
        schema = make_schema([2])
        ds = Dataset(schema, [[0]])
        with pytest.raises(ValueError):
            estimate_cpts(ds, Dag(("v0",), ()), alpha=-1)


def triple_sum_cmi(rows, n_states=2):
    """Direct I(X;Y|C) over an explicit count cube; nats."""
    n = len(rows)
    joint = np.zeros((n_states,) * 3)
    for x, y, c in rows:
        joint[x, y, c] += 1
    total = 0.0
    for c in range(n_states):
        n_c = joint[:, :, c].sum()
        if n_c == 0:
            continue
        for x in range(n_states):
            for y in range(n_states):
                nxy = joint[x, y, c]
                if nxy == 0:
                    continue
                nx = joint[x, :, c].sum()
                ny = joint[:, y, c].sum()
                total += (nxy / n) * math.log(nxy * n_c / (nx * ny))
    return total


CMI_ROWS = [
    (0, 0, 0),
    (0, 1, 0),
    (1, 0, 0),
    (1, 1, 0),
    (0, 0, 1),
    (0, 0, 1),
    (1, 1, 1),
    (1, 0, 1),
]


class TestConditionalMutualInformation:
    def make_ds(self, rows):
        schema = make_schema([2, 2, 2])
        return Dataset(schema, rows)

    def test_explicit_eight_rows(self):
        ds = self.make_ds(CMI_ROWS)
        got = conditional_mutual_information(ds, "v0", "v1", "v2")
        assert got == pytest.approx(0.10788077716941782, abs=1e-15)
        assert got == pytest.approx(triple_sum_cmi(CMI_ROWS), abs=1e-15)

    def test_perfect_dependence_is_ln2(self):
        rows = [(x, x, c) for x in (0, 1) for c in (0, 1) for _ in range(2)]
        ds = self.make_ds(rows)
        got = conditional_mutual_information(ds, "v0", "v1", "v2")
        assert got == pytest.approx(math.log(2), abs=1e-15)

    def test_symmetry_is_exact(self):
        ds = self.make_ds(CMI_ROWS)
        a = conditional_mutual_information(ds, "v0", "v1", "v2")
        b = conditional_mutual_information(ds, "v1", "v0", "v2")
        assert a == b

    def test_constant_column_gives_zero(self):
        rows = [(0, y, c) for y in (0, 1) for c in (0, 1)]
        ds = self.make_ds(rows)
        assert conditional_mutual_information(ds, "v0", "v1", "v2") == 0.0

    def test_missing_rows_excluded(self):
        rows = list(CMI_ROWS) + [(MISSING, 0, 0), (0, MISSING, 1)]
        ds = self.make_ds(rows)
        got = conditional_mutual_information(ds, "v0", "v1", "v2")
        assert got == pytest.approx(triple_sum_cmi(CMI_ROWS), abs=1e-15)

    def test_no_complete_rows(self):
        ds = self.make_ds([(MISSING, 0, 0), (0, MISSING, 0)])
        with pytest.raises(EmptyDataError):
            conditional_mutual_information(ds, "v0", "v1", "v2")

    @given(
        st.lists(
            st.tuples(
                st.integers(0, 1), st.integers(0, 1), st.integers(0, 1)
            ),
            min_size=1,
            max_size=60,
        )
    )
    @settings(max_examples=150, deadline=None)
    def test_matches_triple_sum_and_invariants(self, rows):
        ds = self.make_ds(rows)
        got = conditional_mutual_information(ds, "v0", "v1", "v2")
        want = triple_sum_cmi(rows)
        assert got == pytest.approx(want, abs=1e-12)
        assert got >= 0.0
        assert got == conditional_mutual_information(ds, "v1", "v0", "v2")


class TestWeightedPairGraph:
    def test_symmetric_storage(self):
        g = WeightedPairGraph(("a", "b", "c"))
        g.set_weight("b", "a", 0.5)
        assert g.weight("a", "b") == 0.5
        assert g.weight("b", "a") == 0.5

    def test_unset_pairs_are_zero(self):
        g = WeightedPairGraph(("a", "b"))
        assert g.weight("a", "b") == 0.0

    def test_tiny_negative_clamped(self):
        g = WeightedPairGraph(("a", "b"))
        g.set_weight("a", "b", -1e-13)
        assert g.weight("a", "b") == 0.0

    def test_large_negative_rejected(self):
        g = WeightedPairGraph(("a", "b"))
        with pytest.raises(ValueError):
            g.set_weight("a", "b", -0.5)

    def test_unknown_feature(self):
        g = WeightedPairGraph(("a", "b"))
        with pytest.raises(UnknownNodeError):
            g.set_weight("a", "z", 0.1)


class TestMaxSpanningTree:
    def graph(self, weights):
        feats = sorted({f for pair in weights for f in pair})
        g = WeightedPairGraph(tuple(feats))
        for (a, b), w in weights.items():
            g.set_weight(a, b, w)
        return g

    def test_picks_heaviest(self):
        g = self.graph({("a", "b"): 0.1, ("a", "c"): 0.9, ("b", "c"): 0.5})
        assert max_spanning_tree(g) == frozenset({("a", "c"), ("b", "c")})

    def test_tie_break_is_lexicographic(self):
        g = self.graph({("a", "b"): 1.0, ("a", "c"): 1.0, ("b", "c"): 1.0})
        assert max_spanning_tree(g) == frozenset({("a", "b"), ("a", "c")})

    def test_total_weight_is_maximal(self):
        # brute-force all spanning trees of K4 and compare total weight
        import itertools

        rng = np.random.default_rng(8)
        feats = ("a", "b", "c", "d")
        pairs = list(itertools.combinations(feats, 2))
        for _ in range(25):
            weights = {p: float(w) for p, w in zip(pairs, rng.random(len(pairs)))}
            g = self.graph(weights)
            tree = max_spanning_tree(g)
            got = sum(weights[e] for e in tree)
            best = 0.0
            for cand in itertools.combinations(pairs, 3):
                parent = {f: f for f in feats}

                def find(x):
                    while parent[x] != x:
                        x = parent[x]
                    return x

                ok = True
                for a, b in cand:
                    ra, rb = find(a), find(b)
                    if ra == rb:
                        ok = False
                        break
                    parent[ra] = rb
                if ok:
                    best = max(best, sum(weights[e] for e in cand))
            assert got == pytest.approx(best, abs=1e-12)


class TestOrientTree:
    def test_bfs_away_from_root(self):
        tree = frozenset({("a", "b"), ("b", "c")})
        assert orient_tree(tree, "a") == (("a", "b"), ("b", "c"))
        assert orient_tree(tree, "c") == (("c", "b"), ("b", "a"))

    def test_neighbor_order_lexicographic(self):
        star = frozenset({("m", "a"), ("m", "z"), ("m", "k")})
        assert orient_tree(star, "m") == (("m", "a"), ("m", "k"), ("m", "z"))

    def test_single_node(self):
        assert orient_tree(frozenset(), "a") == ()

    def test_disconnected(self):
        with pytest.raises(DisconnectedError):
            orient_tree(frozenset({("b", "c")}), "a")


class TestLearnTan:
    def sample_ds(self, n=400, seed=4):
        rng = np.random.default_rng(seed)
        schema = make_schema([2, 2, 2, 2])
        x0 = rng.integers(0, 2, n)
        x1 = (x0 + (rng.random(n) < 0.1)) % 2  # strongly tied to x0
        x2 = rng.integers(0, 2, n)
        y = (x0 ^ x2) & 1
        return schema, Dataset(schema, np.stack([x0, x1, x2, y], axis=1))

    def test_structure_shape(self):
        schema, ds = self.sample_ds()
        model = learn_tan(ds, "v3")
        dag = model.dag
        feats = ("v0", "v1", "v2")
        for f in feats:
            assert ("v3", f) in dag.edges
        # root (first feature) has only the class as parent
        assert dag.parents_of("v0") == ("v3",)
        for f in ("v1", "v2"):
            parents = dag.parents_of(f)
            assert len(parents) == 2 and "v3" in parents
        # feature tree has exactly len(feats) - 1 edges
        tree = [e for e in dag.edges if e[0] != "v3"]
        assert len(tree) == len(feats) - 1

    def test_tied_pair_becomes_tree_edge(self):
        schema, ds = self.sample_ds()
        model = learn_tan(ds, "v3")
        undirected = {frozenset(e) for e in model.dag.edges if e[0] != "v3"}
        assert frozenset({"v0", "v1"}) in undirected

    def test_cpts_match_plain_estimation(self):
        schema, ds = self.sample_ds()
        model = learn_tan(ds, "v3", alpha=1)
        again = estimate_cpts(ds, model.dag, alpha=1)
        assert model == again

    def test_single_feature(self):
        schema = make_schema([2, 2])
        ds = Dataset(schema, [[0, 0], [1, 1], [0, 0], [1, 0]])
        model = learn_tan(ds, "v1")
        assert model.dag.edges == (("v1", "v0"),)

    def test_class_only_rejected(self):
        schema = make_schema([2])
        ds = Dataset(schema, [[0]])
        with pytest.raises(ValueError):
            learn_tan(ds, "v0")

    def test_unknown_class(self):
        schema, ds = self.sample_ds()
        with pytest.raises(UnknownNodeError):
            learn_tan(ds, "nope")

    def test_deterministic(self):
        schema, ds = self.sample_ds()
        a = learn_tan(ds, "v3")
        b = learn_tan(ds, "v3")
        assert a == b


class TestTanDag:
    def test_uses_first_feature_as_root(self):
        schema = make_schema([2, 2, 2])
        tree = frozenset({("v1", "v2")})
        dag = tan_dag(schema, "v0", tree)
        assert ("v1", "v2") in dag.edges
        assert dag.parents_of("v1") == ("v0",)

    def test_pairwise_graph_covers_all_pairs(self):
        schema = make_schema([2, 2, 2])
        ds = Dataset(schema, [[0, 0, 0], [1, 1, 0], [0, 1, 1], [1, 0, 1]])
        g = pairwise_cmi_graph(ds, ("v0", "v1"), "v2")
        assert [p[:2] for p in g.pairs()] == [("v0", "v1")]
