import pytest

from ekf.ontology import UnmappedTypeError
from ekf.resolver import (
    DEFAULT_QUESTION_TEMPLATES,
    DEFAULT_SCORE_FLOOR,
    ConstantScorer,
    EventMention,
    KeywordOverlapScorer,
    ResolutionMethod,
    SubEventNode,
    TemplateError,
    event_mention_from_dict,
    event_mention_to_dict,
    extract_event_mentions,
    generate_questions,
    keyword_stub_scorer,
    load_event_mentions,
    load_prefix_map,
    load_templates,
    load_trigger_lexicon,
    resolve,
    resolve_direct_baseline,
    subevent_from_dict,
    subevent_to_dict,
)

CROWD_SENTENCE = (
    "As of 20 January 2022, at least 1,488 protesters and bystanders, have been "
    "shot and killed by police forces and at least 8,702 people detained."
)


def mention(sentence=CROWD_SENTENCE, event_type="Arrest", trigger="detained", **kw):
    return EventMention(sentence=sentence, event_type=event_type, trigger=trigger, **kw)


class LabelTableScorer:
    """Scores by candidate label looked up in a fixed table."""

    def __init__(self, table: dict[str, float], templates=DEFAULT_QUESTION_TEMPLATES):
        self._inner = KeywordOverlapScorer(templates=templates)
        self._table = table

    def score(self, question: str, passage: str) -> float:
        label = " ".join(self._inner._label_tokens(question))
        return self._table.get(label, 0.0)


class TestEventMention:
    def test_trigger_must_occur(self):
        with pytest.raises(ValueError, match="does not occur"):
            EventMention(sentence="No such word here.", event_type="Die", trigger="killed")

    def test_empty_sentence_rejected(self):
        with pytest.raises(ValueError, match="nonempty"):
            EventMention(sentence="", event_type="Die", trigger="x")

    def test_score_range_enforced(self):
        m = mention()
        with pytest.raises(ValueError, match="outside"):
            SubEventNode(m, "Q4", "death", 1.5, 1, ResolutionMethod.QA)


class TestTemplates:
    def test_load_fixture_templates(self, fixture_dir):
        templates = load_templates(fixture_dir / "templates.txt")
        assert templates == DEFAULT_QUESTION_TEMPLATES

    def test_unknown_placeholder_rejected(self, tmp_path):
        path = tmp_path / "t.txt"
        path.write_text("Is {subject} a {label}?\n")
        with pytest.raises(TemplateError, match="unknown placeholder"):
            load_templates(path)

    def test_positional_placeholder_rejected(self):
        with pytest.raises(TemplateError):
            generate_questions("death", "died", templates=("Is this a {}?",))

    def test_unbalanced_brace_rejected(self):
        with pytest.raises(TemplateError, match="unparseable"):
            generate_questions("death", "died", templates=("Is this a {label?",))

    def test_generated_question_strings(self):
        assert generate_questions("detention", "detained") == [
            "Does the text describe a detention?",
            "Is the detained event an instance of detention?",
            "Did a detention take place?",
        ]

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "t.txt"
        path.write_text("\nDid a {label} take place?\n\n")
        assert load_templates(path) == ("Did a {label} take place?",)


class TestResolve:
    def test_crowd_sentence_detained_resolves_to_detention(
        self, class_graph, type_mapping, prefix_map
    ):
        scorer = keyword_stub_scorer(prefix_map=prefix_map)
        node = resolve(mention(), class_graph, type_mapping, scorer)
        assert node.resolved_qid == "Q1071447"
        assert node.resolved_label == "detention"
        assert node.score == pytest.approx(1.0)
        assert node.candidates_considered == 3
        assert node.method is ResolutionMethod.QA

    def test_crowd_sentence_shot_resolves_to_killing(
        self, class_graph, type_mapping, prefix_map
    ):
        scorer = keyword_stub_scorer(prefix_map=prefix_map)
        node = resolve(
            mention(event_type="Die", trigger="shot"), class_graph, type_mapping, scorer
        )
        assert node.resolved_qid == "Q844482"
        assert node.resolved_label == "killing"
        assert node.candidates_considered == 5

    def test_floor_falls_back_to_mapped_base(self, class_graph, type_mapping):
        node = resolve(mention(), class_graph, type_mapping, ConstantScorer(0.0))
        assert node.resolved_qid == "Q2135540"
        assert node.resolved_label == "legal action"
        assert node.score == 0.0

    def test_floor_boundary_keeps_best(self, class_graph, type_mapping):
        # Exactly at the floor is good enough.
        node = resolve(
            mention(),
            class_graph,
            type_mapping,
            ConstantScorer(DEFAULT_SCORE_FLOOR),
        )
        assert node.score == pytest.approx(DEFAULT_SCORE_FLOOR)
        assert node.resolved_qid == "Q2135540"  # uniform scores: shallowest wins

    def test_uniform_tie_prefers_shallowest(self, class_graph, type_mapping):
        node = resolve(
            mention(event_type="Die", trigger="killed"),
            class_graph,
            type_mapping,
            ConstantScorer(0.6),
        )
        assert node.resolved_qid == "Q4"
        assert node.score == pytest.approx(0.6)

    def test_same_depth_tie_prefers_smaller_qid(self, class_graph, type_mapping):
        # Q149086 and Q2717573 sit at the same depth under Q4.
        scorer = LabelTableScorer({"homicide": 1.0, "extra judicial killing": 1.0})
        node = resolve(
            mention(event_type="Die", trigger="killed"), class_graph, type_mapping, scorer
        )
        assert node.resolved_qid == "Q149086"

    def test_deeper_strict_max_wins(self, class_graph, type_mapping):
        scorer = LabelTableScorer({"murder": 0.9, "death": 0.5})
        node = resolve(
            mention(event_type="Die", trigger="killed"), class_graph, type_mapping, scorer
        )
        assert node.resolved_qid == "Q132821"
        assert node.score == pytest.approx(0.9)

    def test_max_depth_limits_candidates(self, class_graph, type_mapping):
        scorer = LabelTableScorer({"murder": 1.0})
        node = resolve(
            mention(event_type="Die", trigger="killed"),
            class_graph,
            type_mapping,
            scorer,
            max_depth=2,
        )
        # Murder is out of reach at depth 2; nothing else scores.
        assert node.resolved_qid == "Q4"
        assert node.candidates_considered == 4

    def test_unmapped_event_type(self, class_graph, type_mapping):
        with pytest.raises(UnmappedTypeError):
            resolve(
                mention(event_type="Transport"),
                class_graph,
                type_mapping,
                ConstantScorer(1.0),
            )

    def test_scope_validation(self, class_graph, type_mapping):
        with pytest.raises(ValueError, match="unknown question scope"):
            resolve(
                mention(), class_graph, type_mapping, ConstantScorer(1.0), scope="document"
            )

    def test_paragraph_scope_widens_passage(self, class_graph, type_mapping, prefix_map):
        m = mention(
            sentence="More were detained.",
            paragraph_text="Police held people in detention. More were detained.",
        )
        scorer = keyword_stub_scorer()  # no prefix map: sentence alone scores 0
        by_sentence = resolve(m, class_graph, type_mapping, scorer, scope="sentence")
        assert by_sentence.resolved_qid == "Q2135540"
        by_paragraph = resolve(m, class_graph, type_mapping, scorer, scope="paragraph")
        assert by_paragraph.resolved_qid == "Q1071447"

    def test_paragraph_scope_without_text_uses_sentence(self, class_graph, type_mapping):
        node = resolve(
            mention(paragraph_text=None),
            class_graph,
            type_mapping,
            ConstantScorer(0.2),
            scope="paragraph",
        )
        assert node.resolved_qid == "Q2135540"

    def test_scorer_values_clamped(self, class_graph, type_mapping):
        class Wild:
            def score(self, question, passage):
                return 7.5

        node = resolve(mention(), class_graph, type_mapping, Wild())
        assert node.score == 1.0

        class Negative:
            def score(self, question, passage):
                return -3.0

        node = resolve(mention(), class_graph, type_mapping, Negative())
        assert node.score == 0.0
        assert node.resolved_qid == "Q2135540"

    def test_no_templates_means_floor_fallback(self, class_graph, type_mapping):
        node = resolve(
            mention(), class_graph, type_mapping, ConstantScorer(1.0), templates=()
        )
        assert node.resolved_qid == "Q2135540"
        assert node.score == 0.0


class TestDirectBaseline:
    def test_takes_mapped_class(self, class_graph, type_mapping):
        node = resolve_direct_baseline(mention(), type_mapping, class_graph)
        assert node.resolved_qid == "Q2135540"
        assert node.resolved_label == "legal action"
        assert node.score == 1.0
        assert node.candidates_considered == 1
        assert node.method is ResolutionMethod.DIRECT_BASELINE


class TestKeywordOverlapScorer:
    def test_exact_label_match(self):
        scorer = KeywordOverlapScorer()
        q = "Does the text describe a death?"
        assert scorer.score(q, "A death occurred here.") == 1.0
        assert scorer.score(q, "Nothing relevant.") == 0.0

    def test_morphology_needs_prefix_map(self):
        q = "Does the text describe a detention?"
        passage = "8,702 people detained."
        assert KeywordOverlapScorer().score(q, passage) == 0.0
        with_map = KeywordOverlapScorer(prefix_map={"detent": "detain"})
        assert with_map.score(q, passage) == 1.0

    def test_partial_overlap_fraction(self):
        scorer = KeywordOverlapScorer(prefix_map={"killin": "kill"})
        q = "Does the text describe a extra-judicial killing?"
        assert scorer.score(q, "people were killed") == pytest.approx(1 / 3)

    def test_label_recovered_from_trigger_template(self):
        # The trigger word must not leak into the label tokens.
        scorer = KeywordOverlapScorer()
        q = "Is the detained event an instance of death?"
        assert scorer.score(q, "a death notice") == 1.0
        assert scorer.score(q, "people detained") == 0.0

    def test_unmatched_question_falls_back_to_all_tokens(self):
        scorer = KeywordOverlapScorer()
        assert scorer.score("free form query", "free form query text") == 1.0

    def test_empty_question(self):
        assert KeywordOverlapScorer().score("", "text") == 0.0

    def test_case_insensitive(self):
        scorer = KeywordOverlapScorer()
        assert scorer.score("Does the text describe a Death?", "DEATH came") == 1.0


class TestTriggerLexicon:
    def test_fixture_lexicon(self, trigger_lexicon):
        assert trigger_lexicon == {
            "shot": "Die",
            "killed": "Die",
            "died": "Die",
            "detained": "Arrest",
            "arrested": "Arrest",
            "engaged": "Attack",
        }

    def test_keys_casefolded(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("Killed\tDie\n")
        assert load_trigger_lexicon(path) == {"killed": "Die"}

    def test_malformed_row(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("killed\n")
        with pytest.raises(ValueError, match="line 1"):
            load_trigger_lexicon(path)

    def test_prefix_map_fixture(self, prefix_map):
        assert prefix_map == {"detent": "detain", "killin": "kill"}

    def test_prefix_map_malformed(self, tmp_path):
        path = tmp_path / "p.tsv"
        path.write_text("detent\t\n")
        with pytest.raises(ValueError, match="line 1"):
            load_prefix_map(path)


class TestExtractEventMentions:
    def test_protest_page_mentions(self, event_pages, trigger_lexicon):
        page = next(p for p in event_pages if "Myanmar protests" in p.title)
        mentions = extract_event_mentions(page, trigger_lexicon)
        assert [(m.trigger, m.event_type) for m in mentions] == [
            ("shot", "Die"),
            ("killed", "Die"),
            ("detained", "Arrest"),
        ]
        assert all(m.paragraph == 0 for m in mentions)
        assert all(m.sentence == CROWD_SENTENCE for m in mentions)
        assert all(m.page == page.title for m in mentions)
        assert all(m.paragraph_text and CROWD_SENTENCE in m.paragraph_text for m in mentions)

    def test_war_page_single_mention(self, event_pages, trigger_lexicon):
        page = next(p for p in event_pages if p.title == "Yom Kippur War")
        mentions = extract_event_mentions(page, trigger_lexicon)
        assert len(mentions) == 1
        assert mentions[0].trigger == "engaged"
        assert mentions[0].event_type == "Attack"

    def test_selection_page_has_no_triggers(self, event_pages, trigger_lexicon):
        page = next(p for p in event_pages if "vice presidential" in p.title)
        assert extract_event_mentions(page, trigger_lexicon) == []

    def test_repeated_trigger_counted_once_per_sentence(self, trigger_lexicon):
        from ekf.wiki_ingest import RawPage, parse_wikitext

        raw = RawPage(
            title="T",
            language="en",
            page_kind="event",
            wikitext="Police killed one man and killed another. Then more were killed.",
        )
        mentions = extract_event_mentions(parse_wikitext(raw), trigger_lexicon)
        assert [m.trigger for m in mentions] == ["killed", "killed"]
        assert mentions[0].sentence != mentions[1].sentence

    def test_casefold_match_keeps_surface_form(self, trigger_lexicon):
        from ekf.wiki_ingest import RawPage, parse_wikitext

        raw = RawPage(
            title="T", language="en", page_kind="event", wikitext="Killed by a storm."
        )
        mentions = extract_event_mentions(parse_wikitext(raw), trigger_lexicon)
        assert [m.trigger for m in mentions] == ["Killed"]


class TestSerialization:
    def test_event_mention_round_trip(self):
        m = mention(
            arguments=(("agent", "police"), ("place", "Yangon")),
            page="P",
            paragraph=2,
            paragraph_text="some paragraph",
        )
        assert event_mention_from_dict(event_mention_to_dict(m)) == m

    def test_paragraph_text_omitted_when_absent(self):
        m = mention(paragraph_text=None)
        record = event_mention_to_dict(m)
        assert "paragraph_text" not in record
        assert event_mention_from_dict(record) == m

    def test_subevent_round_trip(self, class_graph, type_mapping, prefix_map):
        node = resolve(
            mention(), class_graph, type_mapping, keyword_stub_scorer(prefix_map=prefix_map)
        )
        assert subevent_from_dict(subevent_to_dict(node)) == node

    def test_load_event_mentions(self, tmp_path):
        import json

        path = tmp_path / "events.jsonl"
        records = [event_mention_to_dict(mention()), event_mention_to_dict(mention(trigger="shot"))]
        path.write_text("\n".join(json.dumps(r) for r in records) + "\n")
        loaded = load_event_mentions(path)
        assert [m.trigger for m in loaded] == ["detained", "shot"]

    def test_load_event_mentions_bad_line(self, tmp_path):
        path = tmp_path / "events.jsonl"
        path.write_text('{"sentence": "x"}\n')
        with pytest.raises(ValueError, match="line 1"):
            load_event_mentions(path)
