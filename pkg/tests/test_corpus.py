"""Ingestion contracts: corpus, prediction, and embedding files."""

import numpy as np
import pytest

from woodscore import (
    Corpus,
    EmbeddingTable,
    PredictionRecord,
    Sample,
    ValidationError,
    load_corpus,
    load_embeddings,
    load_predictions,
    save_corpus,
)


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestCorpusLoading:
    def test_order_and_fields(self, tmp_path):
        path = write(
            tmp_path / "c.jsonl",
            '{"id": "a", "text": "alpha beta"}\n'
            '{"id": "b", "text": "gamma", "label": "pos"}\n',
        )
        corpus = load_corpus(path, role="train")
        assert corpus.ids() == ("a", "b")
        assert corpus[0].label is None
        assert corpus.by_id("b").label == "pos"
        assert len(corpus) == 2
        assert "a" in corpus and "zzz" not in corpus

    def test_blank_line_rejected(self, tmp_path):
        path = write(tmp_path / "c.jsonl", '{"id": "a", "text": "x"}\n\n')
        with pytest.raises(ValidationError, match="line 2: blank line"):
            load_corpus(path, role="train")

    def test_bad_json_names_line(self, tmp_path):
        path = write(tmp_path / "c.jsonl", '{"id": "a", "text": "x"}\n{oops\n')
        with pytest.raises(ValidationError, match="line 2"):
            load_corpus(path, role="train")

    def test_unknown_keys_rejected(self, tmp_path):
        path = write(tmp_path / "c.jsonl", '{"id": "a", "text": "x", "extra": 1}\n')
        with pytest.raises(ValidationError, match="unknown keys"):
            load_corpus(path, role="train")

    def test_duplicate_id_rejected(self, tmp_path):
        path = write(
            tmp_path / "c.jsonl",
            '{"id": "a", "text": "x"}\n{"id": "a", "text": "y"}\n',
        )
        with pytest.raises(ValidationError, match="duplicate id 'a' at line 2"):
            load_corpus(path, role="train")

    def test_empty_text_rejected(self, tmp_path):
        path = write(tmp_path / "c.jsonl", '{"id": "a", "text": "   "}\n')
        with pytest.raises(ValidationError, match="text is empty"):
            load_corpus(path, role="train")

    def test_empty_file_rejected(self, tmp_path):
        path = write(tmp_path / "c.jsonl", "")
        with pytest.raises(ValidationError, match="empty corpus"):
            load_corpus(path, role="train")

    def test_bad_role_rejected(self, tmp_path):
        path = write(tmp_path / "c.jsonl", '{"id": "a", "text": "x"}\n')
        with pytest.raises(ValidationError, match="role"):
            load_corpus(path, role="validation")

    def test_round_trip(self, tmp_path):
        original = Corpus(
            "test",
            (Sample("a", "héllo wörld"), Sample("b", "plain", label="neg")),
        )
        out = tmp_path / "out.jsonl"
        save_corpus(original, out)
        again = load_corpus(out, role="test")
        assert again.samples == original.samples
        # writing again produces identical bytes
        out2 = tmp_path / "out2.jsonl"
        save_corpus(again, out2)
        assert out.read_bytes() == out2.read_bytes()

    def test_unknown_id_lookup(self):
        corpus = Corpus("train", (Sample("a", "x"),))
        with pytest.raises(ValidationError, match="unknown sample id"):
            corpus.by_id("b")


class TestPredictions:
    @pytest.fixture
    def test_corpus(self):
        return Corpus(
            "test",
            (
                Sample("a", "one", label="pos"),
                Sample("b", "two", label="neg"),
                Sample("c", "three", label="pos"),
            ),
        )

    def test_resolution_precedence(self, tmp_path, test_corpus):
        # a: explicit flag wins even though prediction matches the label
        # b: record gold wins over the corpus label
        # c: corpus label used when nothing closer exists
        path = write(
            tmp_path / "p.jsonl",
            '{"id": "a", "correct": false, "prediction": "pos"}\n'
            '{"id": "b", "prediction": "neg", "gold": "pos"}\n'
            '{"id": "c", "prediction": "pos", "confidence": 0.75}\n',
        )
        records = load_predictions(path, test_corpus)
        assert [r.id for r in records] == ["a", "b", "c"]
        assert [r.correct for r in records] == [False, False, True]
        assert records[2].confidence == 0.75

    def test_corpus_order_not_file_order(self, tmp_path, test_corpus):
        path = write(
            tmp_path / "p.jsonl",
            '{"id": "c", "correct": true}\n'
            '{"id": "a", "correct": true}\n'
            '{"id": "b", "correct": true}\n',
        )
        records = load_predictions(path, test_corpus)
        assert [r.id for r in records] == ["a", "b", "c"]

    def test_missing_coverage(self, tmp_path, test_corpus):
        path = write(tmp_path / "p.jsonl", '{"id": "a", "correct": true}\n')
        with pytest.raises(ValidationError, match="missing prediction for 'b'"):
            load_predictions(path, test_corpus)

    def test_foreign_id(self, tmp_path, test_corpus):
        path = write(tmp_path / "p.jsonl", '{"id": "zz", "correct": true}\n')
        with pytest.raises(ValidationError, match="not in the test corpus"):
            load_predictions(path, test_corpus)

    def test_duplicate(self, tmp_path, test_corpus):
        path = write(
            tmp_path / "p.jsonl",
            '{"id": "a", "correct": true}\n{"id": "a", "correct": false}\n',
        )
        with pytest.raises(ValidationError, match="duplicate prediction"):
            load_predictions(path, test_corpus)

    def test_confidence_range(self, tmp_path, test_corpus):
        path = write(
            tmp_path / "p.jsonl", '{"id": "a", "correct": true, "confidence": 1.5}\n'
        )
        with pytest.raises(ValidationError, match="confidence"):
            load_predictions(path, test_corpus)

    def test_without_corpus_keeps_file_order(self, tmp_path):
        path = write(
            tmp_path / "p.jsonl",
            '{"id": "z", "correct": true}\n{"id": "a", "prediction": "x", "gold": "x"}\n',
        )
        records = load_predictions(path)
        assert [r.id for r in records] == ["z", "a"]
        assert [r.correct for r in records] == [True, True]

    def test_without_corpus_needs_self_contained_records(self, tmp_path):
        path = write(tmp_path / "p.jsonl", '{"id": "a", "prediction": "pos"}\n')
        with pytest.raises(ValidationError, match="correctness underivable"):
            load_predictions(path)

    def test_underivable_with_corpus_but_no_label(self, tmp_path):
        corpus = Corpus("test", (Sample("a", "one"),))
        path = write(tmp_path / "p.jsonl", '{"id": "a", "prediction": "pos"}\n')
        with pytest.raises(ValidationError, match="correctness underivable"):
            load_predictions(path, corpus)

    def test_non_boolean_flag(self, tmp_path, test_corpus):
        path = write(tmp_path / "p.jsonl", '{"id": "a", "correct": 1}\n')
        with pytest.raises(ValidationError, match="must be a boolean"):
            load_predictions(path, test_corpus)


class TestEmbeddings:
    def test_load_basic(self, tmp_path):
        path = write(
            tmp_path / "v.tsv",
            "#dim 3\n"
            "a\t1 0 0\n"
            "# encoder something\n"
            "b\t0.5 0.5 0.7071\n",
        )
        table = load_embeddings(path)
        assert table.dim == 3
        assert len(table) == 2
        np.testing.assert_array_equal(table["a"], [1.0, 0.0, 0.0])
        assert table.covers(Corpus("test", (Sample("a", "x"), Sample("b", "y"))))
        assert not table.covers(Corpus("test", (Sample("zz", "x"),)))
        with pytest.raises(ValidationError, match="no embedding for id"):
            table["zz"]

    def test_header_required(self, tmp_path):
        path = write(tmp_path / "v.tsv", "a\t1 0 0\n")
        with pytest.raises(ValidationError, match="#dim"):
            load_embeddings(path)

    def test_dim_mismatch(self, tmp_path):
        path = write(tmp_path / "v.tsv", "#dim 3\na\t1 0\n")
        with pytest.raises(ValidationError, match="expected 3 floats"):
            load_embeddings(path)

    def test_duplicate_id(self, tmp_path):
        path = write(tmp_path / "v.tsv", "#dim 1\na\t1\na\t2\n")
        with pytest.raises(ValidationError, match="duplicate id"):
            load_embeddings(path)

    def test_non_finite(self, tmp_path):
        path = write(tmp_path / "v.tsv", "#dim 1\na\tnan\n")
        with pytest.raises(ValidationError, match="non-finite"):
            load_embeddings(path)

    def test_non_numeric(self, tmp_path):
        path = write(tmp_path / "v.tsv", "#dim 1\na\tpotato\n")
        with pytest.raises(ValidationError, match="non-numeric"):
            load_embeddings(path)

    def test_missing_tab(self, tmp_path):
        path = write(tmp_path / "v.tsv", "#dim 1\na 1\n")
        with pytest.raises(ValidationError, match="id<TAB>floats"):
            load_embeddings(path)

    def test_vectors_read_only(self, tmp_path):
        path = write(tmp_path / "v.tsv", "#dim 2\na\t1 2\n")
        table = load_embeddings(path)
        with pytest.raises(ValueError):
            table["a"][0] = 99.0


class TestValueObjects:
    def test_sample_validation(self):
        with pytest.raises(ValidationError):
            Sample("", "text")
        with pytest.raises(ValidationError):
            Sample("a", "")

    def test_prediction_confidence_bounds(self):
        PredictionRecord("a", True, 0.0)
        PredictionRecord("a", True, 1.0)
        with pytest.raises(ValidationError):
            PredictionRecord("a", True, -0.1)

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValidationError, match="empty corpus"):
            Corpus("train", ())

    def test_embedding_table_shape_checks(self):
        with pytest.raises(ValidationError):
            EmbeddingTable(2, {"a": np.array([1.0])})
        with pytest.raises(ValidationError):
            EmbeddingTable(1, {"a": np.array([np.inf])})
