import numpy as np
import pytest
from hypothesis import given, strategies as st

from credo.text import (
    ConfigurationError,
    EmbeddingTable,
    Token,
    UNK_ID,
    Vocabulary,
    embed_lookup,
    load_stopwords,
    split_sentences,
    token_surfaces,
    tokenize,
)


class TestTokenize:
    def test_empty(self):
        assert tokenize("") == []

    def test_strips_punctuation(self):
        assert token_surfaces("Lincoln University,") == ["lincoln", "university"]

    def test_keeps_hyphenated_compounds(self):
        assert token_surfaces("degree-granting black university") == [
            "degree-granting",
            "black",
            "university",
        ]

    def test_positions_are_sequential(self):
        tokens = tokenize("One two, three.")
        assert [t.position for t in tokens] == [0, 1, 2]

    def test_drops_bare_punctuation(self):
        assert token_surfaces("a -- b ...") == ["a", "b"]

    def test_numbers_survive(self):
        assert token_surfaces("May 1946,") == ["may", "1946"]

    @given(st.text(max_size=80))
    def test_idempotent_on_own_surfaces(self, text):
        for token in tokenize(text):
            again = tokenize(token.surface)
            assert [t.surface for t in again] == [token.surface]

    @given(st.text(max_size=80))
    def test_no_whitespace_in_surfaces(self, text):
        for token in tokenize(text):
            assert token.surface
            assert not any(c.isspace() for c in token.surface)


class TestSplitSentences:
    def test_empty(self):
        assert split_sentences("") == []

    def test_two_sentences(self):
        got = split_sentences("A b. C d.")
        assert [s.text for s in got] == ["A b.", "C d."]
        assert [s.index for s in got] == [0, 1]

    def test_no_terminator(self):
        got = split_sentences("No terminator here")
        assert len(got) == 1
        assert got[0].text == "No terminator here"

    def test_terminator_without_space_does_not_split(self):
        assert len(split_sentences("e.g.test then. done.")) == 2

    def test_tokens_match_text(self):
        for sentence in split_sentences("The cat sat! Where? On the mat."):
            assert [t.surface for t in sentence.tokens] == token_surfaces(sentence.text)

    @given(st.text(max_size=120))
    def test_character_conservation(self, text):
        joined = " ".join(s.text for s in split_sentences(text))
        stripped = lambda s: [c for c in s if not c.isspace()]  # noqa: E731
        assert stripped(joined) == stripped(text)


class TestStopwords:
    def test_default_list_loads(self, stopwords):
        assert "the" in stopwords
        assert "upon" in stopwords
        assert len(stopwords) > 100

    def test_comments_ignored(self, tmp_path):
        f = tmp_path / "sw.txt"
        f.write_text("# comment\nfoo\n\nbar\n")
        assert load_stopwords(f) == frozenset({"foo", "bar"})


class TestVocabularyAndEmbeddings:
    def test_ids_contiguous_and_bijective(self):
        vocab = Vocabulary.from_texts(["a b c", "b d"])
        ids = [vocab.id_for(w) for w in ["a", "b", "c", "d"]]
        assert sorted(ids) == [2, 3, 4, 5]
        for w in ["a", "b", "c", "d"]:
            assert vocab.id_to_token[vocab.id_for(w)] == w

    def test_unknown_maps_to_unk(self):
        vocab = Vocabulary.from_texts(["a b"])
        assert vocab.id_for("zebra") == UNK_ID

    def test_lookup_known_and_unknown(self, rng):
        vocab = Vocabulary.from_texts(["alpha beta"])
        table = EmbeddingTable.create(len(vocab), 8, rng)
        known = embed_lookup(Token("alpha", 0), vocab, table)
        np.testing.assert_array_equal(known, table.matrix[vocab.id_for("alpha")])
        unk = embed_lookup(Token("zzz", 0), vocab, table)
        np.testing.assert_array_equal(unk, table.matrix[UNK_ID])

    def test_lookup_is_pure(self, rng):
        vocab = Vocabulary.from_texts(["alpha beta"])
        table = EmbeddingTable.create(len(vocab), 4, rng)
        a = embed_lookup(Token("beta", 0), vocab, table)
        b = embed_lookup(Token("beta", 5), vocab, table)
        np.testing.assert_array_equal(a, b)

    def test_seeded_init_is_reproducible(self):
        t1 = EmbeddingTable.create(5, 4, np.random.default_rng(3))
        t2 = EmbeddingTable.create(5, 4, np.random.default_rng(3))
        np.testing.assert_array_equal(t1.matrix, t2.matrix)
        assert np.all(np.abs(t1.matrix) <= 0.1)

    def test_dimension_mismatch_raises(self, rng):
        vocab = Vocabulary.from_texts(["a b c"])
        table = EmbeddingTable.create(len(vocab) + 1, 4, rng)
        with pytest.raises(ConfigurationError):
            embed_lookup(Token("a", 0), vocab, table)
