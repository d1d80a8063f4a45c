import numpy as np
import pytest

from matrep.embio import EmbeddingFileError, read_embeddings, write_embeddings


def random_bank(rng, n, p, r):
    bank = rng.standard_normal((n, p, r))
    return bank / np.linalg.norm(bank.reshape(n, -1), axis=1)[:, None, None]


class TestRoundtrip:
    def test_text_is_exact(self, tmp_path):
        bank = random_bank(np.random.default_rng(0), 20, 5, 3)
        tokens = [f"w{i}" for i in range(20)]
        write_embeddings(tmp_path / "e.txt", tokens, bank)
        back_tokens, back = read_embeddings(tmp_path / "e.txt")
        assert back_tokens == tokens
        assert np.array_equal(back, bank)

    def test_binary_is_float32(self, tmp_path):
        bank = random_bank(np.random.default_rng(1), 20, 5, 3)
        tokens = [f"tok_{i}" for i in range(20)]
        write_embeddings(tmp_path / "e.bin", tokens, bank, binary=True)
        back_tokens, back = read_embeddings(tmp_path / "e.bin", binary=True)
        assert back_tokens == tokens
        np.testing.assert_array_equal(back, bank.astype(np.float32).astype(np.float64))

    def test_binary_value_containing_newline_byte(self, tmp_path):
        # 0x0a inside the float payload must not end the record
        value = np.frombuffer(b"\x0a\x0a\x0a\x3f", dtype="<f4")[0]
        bank = np.array([[[value], [np.sqrt(1 - float(value) ** 2)]]])
        write_embeddings(tmp_path / "e.bin", ["x"], bank, binary=True)
        _, back = read_embeddings(tmp_path / "e.bin", binary=True)
        assert back[0, 0, 0] == float(value)

    def test_unicode_tokens(self, tmp_path):
        bank = random_bank(np.random.default_rng(2), 2, 2, 1)
        write_embeddings(tmp_path / "e.txt", ["café", "naïve"], bank)
        assert read_embeddings(tmp_path / "e.txt")[0] == ["café", "naïve"]

    def test_whitespace_token_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            write_embeddings(tmp_path / "e.txt", ["a b"], random_bank(np.random.default_rng(3), 1, 2, 1))


class TestHandWritten:
    def test_two_token_fixture(self, tmp_path):
        path = tmp_path / "hand.txt"
        path.write_text("2 2 2\nfoo 0.5 0.5 0.5 0.5\nbar 1 0 0 0\n")
        tokens, bank = read_embeddings(path)
        assert tokens == ["foo", "bar"]
        assert bank.shape == (2, 2, 2)
        np.testing.assert_array_equal(bank[1], [[1, 0], [0, 0]])
        # row-major: second value is row 0, column 1
        path.write_text("1 2 2\nfoo 0.6 0.8 0 0\n")
        assert read_embeddings(path)[1][0, 0, 1] == 0.8


class TestMalformed:
    def write(self, tmp_path, text):
        path = tmp_path / "bad.txt"
        path.write_text(text)
        return path

    @pytest.mark.parametrize(
        "text",
        [
            "two 2 1\na 1 0\n",
            "1 2\na 1 0\n",
            "2 2 1\na 1 0\n",
            "1 2 1\na 1 0\nb 0 1\n",
            "1 2 1\na 1\n",
            "1 2 1\na 1 zero\n",
            "1 2 1\na nan 0\n",
        ],
        ids=["header-word", "header-short", "too-few", "too-many", "short-row", "bad-float", "nan"],
    )
    def test_rejected(self, tmp_path, text):
        with pytest.raises(EmbeddingFileError):
            read_embeddings(self.write(tmp_path, text))

    def test_truncated_binary(self, tmp_path):
        bank = random_bank(np.random.default_rng(4), 3, 4, 2)
        path = tmp_path / "e.bin"
        write_embeddings(path, ["a", "b", "c"], bank, binary=True)
        data = path.read_bytes()
        path.write_bytes(data[:-10])
        with pytest.raises(EmbeddingFileError, match="truncated"):
            read_embeddings(path, binary=True)

    def test_binary_trailing_data(self, tmp_path):
        path = tmp_path / "e.bin"
        write_embeddings(path, ["a"], random_bank(np.random.default_rng(5), 1, 2, 1), binary=True)
        path.write_bytes(path.read_bytes() + b"junk")
        with pytest.raises(EmbeddingFileError):
            read_embeddings(path, binary=True)

    def test_slightly_off_norm_warns(self, tmp_path, caplog):
        tokens, bank = read_embeddings(self.write(tmp_path, "1 2 1\na 1.01 0\n"))
        assert "deviate" in caplog.text
        assert bank[0, 0, 0] == 1.01

    def test_far_off_norm_rejected(self, tmp_path):
        with pytest.raises(EmbeddingFileError, match="norm"):
            read_embeddings(self.write(tmp_path, "1 2 1\na 2 0\n"))
