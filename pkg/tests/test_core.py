"""Value types: variables, schemas, DAG validation, CPTs, joint probability."""

import numpy as np
import pytest

from pmtbn import (
    Cpt,
    CycleError,
    Dag,
    Dataset,
    DuplicateError,
    IncompleteAssignmentError,
    MISSING,
    NetworkModel,
    RowSumError,
    Schema,
    UnknownNodeError,
    Variable,
    joint_probability,
    validate_dag,
)


def binary(name):
    return Variable(name, ("f", "t"))


@pytest.fixture
def chain_model():
    # A -> B -> C with hand-picked tables; joint values are products by hand.
    schema = Schema([binary("A"), binary("B"), binary("C")])
    dag = Dag(("A", "B", "C"), [("A", "B"), ("B", "C")])
    return NetworkModel(
        schema,
        dag,
        [
            Cpt("A", (), np.array([[0.3, 0.7]])),
            Cpt("B", ("A",), np.array([[0.2, 0.8], [0.6, 0.4]])),
            Cpt("C", ("B",), np.array([[0.5, 0.5], [0.9, 0.1]])),
        ],
    )


class TestVariable:
    def test_cardinality(self):
        assert Variable("x", ("a", "b", "c")).cardinality == 3

    def test_needs_two_states(self):
        with pytest.raises(ValueError):
            Variable("x", ("only",))

    def test_duplicate_states(self):
        with pytest.raises(DuplicateError):
            Variable("x", ("a", "a"))

    def test_bad_name(self):
        with pytest.raises(ValueError):
            Variable("2bad", ("a", "b"))
        with pytest.raises(ValueError):
            Variable("sp ace", ("a", "b"))

    def test_bad_state_label(self):
        with pytest.raises(ValueError):
            Variable("x", ("ok", "no,comma"))
        with pytest.raises(ValueError):
            Variable("x", ("", "b"))


class TestSchema:
    def test_lookup(self):
        s = Schema([binary("A"), Variable("B", ("x", "y", "z"))])
        assert s.names == ("A", "B")
        assert s.index_of("B") == 1
        assert s.state_index("B", "z") == 2
        assert s.cardinalities.tolist() == [2, 3]

    def test_unknown_name(self):
        s = Schema([binary("A")])
        with pytest.raises(UnknownNodeError):
            s.index_of("Z")

    def test_duplicate_names(self):
        with pytest.raises(DuplicateError):
            Schema([binary("A"), binary("A")])

    def test_empty(self):
        with pytest.raises(ValueError):
            Schema([])


class TestDag:
    def test_normalized_storage(self):
        d = Dag(("B", "A"), [("B", "A")])
        assert d.nodes == ("A", "B")
        assert d.parents_of("A") == ("B",)
        assert d.children_of("B") == ("A",)

    def test_duplicate_edge(self):
        with pytest.raises(DuplicateError):
            Dag(("A", "B"), [("A", "B"), ("A", "B")])

    def test_self_loop(self):
        with pytest.raises(CycleError):
            Dag(("A",), [("A", "A")])


class TestValidateDag:
    def test_lexicographic_kahn(self):
        # Both B and C ready after A; B comes first by name.
        d = Dag(("A", "B", "C"), [("A", "B"), ("A", "C")])
        assert validate_dag(d) == ["A", "B", "C"]
        d2 = Dag(("A", "B", "C"), [("C", "A")])
        assert validate_dag(d2) == ["B", "C", "A"]

    def test_cycle_reports_a_cycle_edge(self):
        d = Dag(("A", "B", "C"), [("A", "B"), ("B", "C"), ("C", "A")])
        with pytest.raises(CycleError) as err:
            validate_dag(d)
        edge = err.value.edge
        assert edge in {("A", "B"), ("B", "C"), ("C", "A")}

    def test_cycle_among_many(self):
        d = Dag(
            ("A", "B", "C", "D", "E"),
            [("A", "B"), ("C", "D"), ("D", "E"), ("E", "C")],
        )
        with pytest.raises(CycleError) as err:
            validate_dag(d)
        assert err.value.edge in {("C", "D"), ("D", "E"), ("E", "C")}

    def test_undeclared_endpoint(self):
        d = Dag(("A", "B"), [("A", "B")])
        d.edges = (("A", "Z"),)  # simulate a hand-built bad graph
        with pytest.raises(UnknownNodeError):
            validate_dag(d)

    def test_empty_edges(self):
        assert validate_dag(Dag(("B", "A"), ())) == ["A", "B"]


class TestCpt:
    def test_row_sum_enforced(self):
        with pytest.raises(RowSumError):
            Cpt("A", (), np.array([[0.5, 0.6]]))

    def test_tolerates_1e_10(self):
        Cpt("A", (), np.array([[0.5, 0.5 + 1e-10]]))

    def test_range_enforced(self):
        with pytest.raises(ValueError):
            Cpt("A", (), np.array([[-0.1, 1.1]]))
        with pytest.raises(ValueError):
            Cpt("A", (), np.array([[np.nan, 1.0]]))

    def test_table_read_only(self):
        c = Cpt("A", (), np.array([[0.4, 0.6]]))
        with pytest.raises(ValueError):
            c.table[0, 0] = 0.9

    def test_equality_by_value(self):
        a = Cpt("A", (), np.array([[0.4, 0.6]]))
        b = Cpt("A", (), np.array([[0.4, 0.6]]))
        assert a == b
        assert a != Cpt("A", (), np.array([[0.6, 0.4]]))


class TestNetworkModel:
    def test_missing_cpt(self, chain_model):
        schema, dag = chain_model.schema, chain_model.dag
        with pytest.raises(ValueError):
            NetworkModel(schema, dag, list(chain_model.cpts.values())[:2])

    def test_parents_must_match_dag(self, chain_model):
        schema, dag = chain_model.schema, chain_model.dag
        bad = [
            Cpt("A", (), np.array([[0.3, 0.7]])),
            Cpt("B", (), np.array([[0.5, 0.5]])),  # dag says B has parent A
            Cpt("C", ("B",), np.array([[0.5, 0.5], [0.9, 0.1]])),
        ]
        with pytest.raises(ValueError):
            NetworkModel(schema, dag, bad)

    def test_parents_in_schema_order(self):
        schema = Schema([binary("A"), binary("B"), binary("C")])
        dag = Dag(("A", "B", "C"), [("B", "C"), ("A", "C")])
        table = np.full((4, 2), 0.5)
        NetworkModel(
            schema,
            dag,
            [
                Cpt("A", (), np.array([[0.5, 0.5]])),
                Cpt("B", (), np.array([[0.5, 0.5]])),
                Cpt("C", ("A", "B"), table),
            ],
        )
        with pytest.raises(ValueError):
            NetworkModel(
                schema,
                dag,
                [
                    Cpt("A", (), np.array([[0.5, 0.5]])),
                    Cpt("B", (), np.array([[0.5, 0.5]])),
                    Cpt("C", ("B", "A"), table),
                ],
            )

    def test_dag_must_cover_schema(self):
        schema = Schema([binary("A"), binary("B")])
        dag = Dag(("A",), ())
        with pytest.raises(UnknownNodeError):
            NetworkModel(schema, dag, [Cpt("A", (), np.array([[0.5, 0.5]]))])

    def test_duplicate_cpt(self, chain_model):
        cpts = list(chain_model.cpts.values())
        with pytest.raises(DuplicateError):
            NetworkModel(chain_model.schema, chain_model.dag, cpts + [cpts[0]])


class TestDataset:
    def test_bounds_checked(self):
        schema = Schema([binary("A"), binary("B")])
        Dataset(schema, [[0, 1], [MISSING, 0]])
        with pytest.raises(ValueError):
            Dataset(schema, [[0, 2]])
        with pytest.raises(ValueError):
            Dataset(schema, [[-2, 0]])

    def test_zero_rows(self):
        schema = Schema([binary("A")])
        assert len(Dataset(schema, np.empty((0, 1), dtype=np.int64))) == 0

    def test_column(self):
        schema = Schema([binary("A"), binary("B")])
        ds = Dataset(schema, [[0, 1], [1, 1]])
        assert ds.column("B").tolist() == [1, 1]

    def test_read_only(self):
        schema = Schema([binary("A")])
        ds = Dataset(schema, [[0], [1]])
        with pytest.raises(ValueError):
            ds.rows[0, 0] = 1


class TestJointProbability:
    def test_chain_value(self, chain_model):
        # P(A=1) * P(B=0 | A=1) * P(C=1 | B=0) = 0.7 * 0.6 * 0.5
        assert joint_probability(chain_model, {"A": 1, "B": 0, "C": 1}) == 0.21

    def test_sequence_form(self, chain_model):
        assert joint_probability(chain_model, (1, 0, 1)) == 0.21

    def test_sums_to_one(self, chain_model):
        total = sum(
            joint_probability(chain_model, (a, b, c))
            for a in range(2)
            for b in range(2)
            for c in range(2)
        )
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_matches_enumerated_cpt_lookups(self, chain_model):
        # Independent oracle: walk the three tables directly.
        pa = chain_model.cpts["A"].table[0]
        pb = chain_model.cpts["B"].table
        pc = chain_model.cpts["C"].table
        for a in range(2):
            for b in range(2):
                for c in range(2):
                    want = pa[a] * pb[a, b] * pc[b, c]
                    assert joint_probability(chain_model, (a, b, c)) == pytest.approx(
                        want, abs=1e-15
                    )

    def test_incomplete_rejected(self, chain_model):
        with pytest.raises(IncompleteAssignmentError):
            joint_probability(chain_model, {"A": 1, "B": 0})
        with pytest.raises(IncompleteAssignmentError):
            joint_probability(chain_model, (1, 0))

    def test_out_of_range_rejected(self, chain_model):
        with pytest.raises(ValueError):
            joint_probability(chain_model, {"A": 2, "B": 0, "C": 0})

    def test_unknown_variable_rejected(self, chain_model):
        with pytest.raises(UnknownNodeError):
            joint_probability(chain_model, {"A": 1, "B": 0, "C": 1, "Z": 0})
