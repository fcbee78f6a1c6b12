import random

import pytest

from ekf.ontology import (
    ClassGraph,
    OntologyClass,
    TaxonomyError,
    TypeMapping,
    UnknownClassError,
    UnmappedTypeError,
    closure_depths,
    load_class_graph,
    load_type_mapping,
    subclass_closure,
)

from oracles import closure_oracle, load_taxonomy_file


def graph_of(*rows: tuple[str, str, tuple[str, ...]]) -> ClassGraph:
    return ClassGraph({qid: OntologyClass(qid, label, parents) for qid, label, parents in rows})


class TestClassGraph:
    def test_contains_and_len(self, class_graph):
        assert "Q4" in class_graph
        assert "Q999999" not in class_graph
        assert len(class_graph) == 12

    def test_get_unknown(self, class_graph):
        with pytest.raises(UnknownClassError):
            class_graph.get("Q999999")

    def test_label(self, class_graph):
        assert class_graph.label("Q4") == "death"
        assert class_graph.label("Q1071447") == "detention"

    def test_children_sorted_numerically(self):
        g = graph_of(
            ("Q1", "root", ()),
            ("Q10", "a", ("Q1",)),
            ("Q2", "b", ("Q1",)),
        )
        assert g.children("Q1") == ("Q2", "Q10")

    def test_dangling_parent_rejected(self):
        with pytest.raises(TaxonomyError, match="dangling parent"):
            graph_of(("Q1", "a", ("Q99",)))


class TestLoader:
    def test_fixture_loads(self, class_graph):
        assert class_graph.get("Q2717573").parents == ("Q844482",)

    def test_root_rows_may_omit_parents_field(self, tmp_path):
        path = tmp_path / "t.tsv"
        path.write_text("Q1\troot\nQ2\tchild\tQ1\n")
        g = load_class_graph(path)
        assert g.get("Q1").parents == ()
        assert g.children("Q1") == ("Q2",)

    def test_multiple_parents(self, tmp_path):
        path = tmp_path / "t.tsv"
        path.write_text("Q1\ta\nQ2\tb\nQ3\tc\tQ1,Q2\n")
        assert load_class_graph(path).get("Q3").parents == ("Q1", "Q2")

    def test_comments_and_blanks_skipped(self, tmp_path):
        path = tmp_path / "t.tsv"
        path.write_text("# header\n\nQ1\troot\n")
        assert len(load_class_graph(path)) == 1

    @pytest.mark.parametrize(
        "row, message",
        [
            ("Q1\n", "expected 2 or 3"),
            ("Q1\ta\tb\tc\n", "expected 2 or 3"),
            ("X1\ta\n", "bad qid"),
            ("Q1\t \n", "empty label"),
            ("Q1\ta\nQ1\tb\n", "duplicate qid"),
            ("Q1\ta\tnope\n", "bad parent qid"),
        ],
    )
    def test_malformed_rows(self, tmp_path, row, message):
        path = tmp_path / "t.tsv"
        path.write_text(row)
        with pytest.raises(TaxonomyError, match=message):
            load_class_graph(path)

    def test_errors_carry_line_numbers(self, tmp_path):
        path = tmp_path / "t.tsv"
        path.write_text("Q1\ta\nX2\tb\n")
        with pytest.raises(TaxonomyError, match="line 2"):
            load_class_graph(path)


class TestClosure:
    def test_death_reaches_extrajudicial_killing(self, class_graph):
        assert "Q2717573" in subclass_closure(class_graph, "Q4")

    def test_legal_action_reaches_detention(self, class_graph):
        assert "Q1071447" in subclass_closure(class_graph, "Q2135540")

    def test_root_first_depth_order(self, class_graph):
        # Q4 -> {Q844482} -> {Q149086, Q2717573} -> {Q132821}
        assert subclass_closure(class_graph, "Q4") == [
            "Q4",
            "Q844482",
            "Q149086",
            "Q2717573",
            "Q132821",
        ]

    def test_depth_zero_is_root_only(self, class_graph):
        assert subclass_closure(class_graph, "Q4", max_depth=0) == ["Q4"]

    def test_depth_bound_respected(self, class_graph):
        assert subclass_closure(class_graph, "Q4", max_depth=1) == ["Q4", "Q844482"]
        assert subclass_closure(class_graph, "Q4", max_depth=2) == [
            "Q4",
            "Q844482",
            "Q149086",
            "Q2717573",
        ]

    def test_negative_depth_rejected(self, class_graph):
        with pytest.raises(ValueError):
            subclass_closure(class_graph, "Q4", max_depth=-1)

    def test_unknown_root_rejected(self, class_graph):
        with pytest.raises(UnknownClassError):
            subclass_closure(class_graph, "Q999999")

    def test_leaf_closure_is_singleton(self, class_graph):
        assert subclass_closure(class_graph, "Q132821") == ["Q132821"]

    def test_cycle_visits_each_once(self):
        g = graph_of(("Q1", "a", ("Q2",)), ("Q2", "b", ("Q1",)))
        assert subclass_closure(g, "Q1", max_depth=10) == ["Q1", "Q2"]

    def test_diamond_visited_once(self):
        g = graph_of(
            ("Q1", "top", ()),
            ("Q2", "l", ("Q1",)),
            ("Q3", "r", ("Q1",)),
            ("Q4", "bottom", ("Q2", "Q3")),
        )
        assert subclass_closure(g, "Q1") == ["Q1", "Q2", "Q3", "Q4"]

    def test_depths(self, class_graph):
        depths = closure_depths(class_graph, "Q4")
        assert depths == {"Q4": 0, "Q844482": 1, "Q149086": 2, "Q2717573": 2, "Q132821": 3}

    def test_matches_networkx_oracle_on_fixture(self, class_graph, fixture_dir):
        nodes, edges = load_taxonomy_file(fixture_dir / "taxonomy.tsv")
        for root in sorted(nodes):
            for depth in (0, 1, 2, 5):
                expected = closure_oracle(nodes, edges, root, depth)
                assert set(subclass_closure(class_graph, root, depth)) == expected

    def test_matches_networkx_oracle_on_random_dags(self):
        rng = random.Random(99)
        for _ in range(30):
            n = rng.randint(2, 20)
            qids = [f"Q{i + 1}" for i in range(n)]
            rows = []
            edges = []
            for i, qid in enumerate(qids):
                # Parents drawn from earlier qids keeps the graph acyclic.
                parents = tuple(
                    q for q in qids[:i] if rng.random() < 0.3
                )
                rows.append((qid, f"class {qid}", parents))
                edges.extend((p, qid) for p in parents)
            g = graph_of(*rows)
            root = rng.choice(qids)
            depth = rng.randint(0, 4)
            expected = closure_oracle(set(qids), edges, root, depth)
            got = subclass_closure(g, root, depth)
            assert set(got) == expected
            assert len(got) == len(set(got))


class TestTypeMapping:
    def test_fixture_entries(self, type_mapping):
        assert type_mapping.map_event_type("Die") == "Q4"
        assert type_mapping.map_event_type("Arrest") == "Q2135540"
        assert type_mapping.map_event_type("Attack") == "Q178561"
        assert type_mapping.types() == ["Arrest", "Attack", "Die"]

    def test_unmapped_type(self, type_mapping):
        with pytest.raises(UnmappedTypeError) as err:
            type_mapping.map_event_type("Transport")
        assert err.value.type_name == "Transport"

    def test_target_must_be_in_graph(self, class_graph):
        with pytest.raises(TaxonomyError, match="not in class graph"):
            TypeMapping({"Die": "Q999999"}, class_graph)

    @pytest.mark.parametrize(
        "row, message",
        [
            ("Die\n", "expected 2"),
            ("Die\tQ4\textra\n", "expected 2"),
            ("\tQ4\n", "empty event type"),
            ("Die\tnope\n", "bad qid"),
            ("Die\tQ4\nDie\tQ4\n", "duplicate event type"),
        ],
    )
    def test_malformed_mapping_rows(self, tmp_path, class_graph, row, message):
        path = tmp_path / "m.tsv"
        path.write_text(row)
        with pytest.raises(TaxonomyError, match=message):
            load_type_mapping(path, class_graph)

    def test_mapping_comments(self, tmp_path, class_graph):
        path = tmp_path / "m.tsv"
        path.write_text("# vocab\nDie\tQ4  # death root\n")
        assert load_type_mapping(path, class_graph).map_event_type("Die") == "Q4"
