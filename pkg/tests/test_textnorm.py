import unicodedata

from hypothesis import given
from hypothesis import strategies as st

from ekf.textnorm import content_hash, normalize_text, stable_hash


class TestNormalizeText:
    def test_collapses_whitespace(self):
        assert normalize_text("a  b\t c\nd") == "a b c d"

    def test_strips_outer_whitespace(self):
        assert normalize_text("  hello  ") == "hello"

    def test_nfc_composition(self):
        decomposed = "état"
        assert normalize_text(decomposed) == "état"
        assert unicodedata.is_normalized("NFC", normalize_text(decomposed))

    def test_strips_straight_quote_pair(self):
        assert normalize_text('"Tear down this wall."') == "Tear down this wall."

    def test_strips_curly_quote_pair(self):
        assert normalize_text("“Tear down this wall.”") == "Tear down this wall."

    def test_strips_guillemets(self):
        assert normalize_text("«bonjour»") == "bonjour"

    def test_strips_german_low_quotes(self):
        assert normalize_text("„Zitat“") == "Zitat"

    def test_strips_nested_quote_pairs(self):
        assert normalize_text('«"x"»') == "x"

    def test_keeps_unpaired_quote(self):
        assert normalize_text('"unbalanced') == '"unbalanced'

    def test_keeps_interior_quotes(self):
        text = 'He said "no" twice'
        assert normalize_text(text) == text

    def test_empty(self):
        assert normalize_text("") == ""
        assert normalize_text("   ") == ""

    @given(st.text(max_size=200))
    def test_idempotent(self, text):
        once = normalize_text(text)
        assert normalize_text(once) == once

    @given(st.text(max_size=200))
    def test_no_surrounding_whitespace(self, text):
        assert normalize_text(text) == normalize_text(text).strip()


class TestContentHash:
    def test_hex_length(self):
        assert len(content_hash("x")) == 32
        assert all(c in "0123456789abcdef" for c in content_hash("x"))

    def test_equal_for_normalization_equivalent(self):
        assert content_hash('  "A  quote" ') == content_hash("A quote")

    def test_distinct_texts_differ(self):
        assert content_hash("a") != content_hash("b")

    def test_deterministic(self):
        assert content_hash("same") == content_hash("same")

    @given(st.text(max_size=100))
    def test_matches_hash_of_normalized(self, text):
        assert content_hash(text) == content_hash(normalize_text(text))


class TestStableHash:
    def test_deterministic(self):
        assert stable_hash("a", "b") == stable_hash("a", "b")

    def test_order_sensitive(self):
        assert stable_hash("a", "b") != stable_hash("b", "a")

    def test_part_boundaries_matter(self):
        # "ab","c" and "a","bc" must not collide via naive concatenation.
        assert stable_hash("ab", "c") != stable_hash("a", "bc")

    def test_hex_length(self):
        assert len(stable_hash("x", "y", "z")) == 32
