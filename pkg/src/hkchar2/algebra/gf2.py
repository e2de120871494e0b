"""Bit-packed matrices over GF(2).

Rows are stored as numpy arrays of unsigned machine words; bit ``c % W`` of
word ``c // W`` holds column ``c``. Unused padding bits are always zero.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

_DTYPES = {8: np.uint8, 16: np.uint16, 32: np.uint32, 64: np.uint64}


class F2Matrix:
    __slots__ = ("n_rows", "n_cols", "word_bits", "words")

    def __init__(self, words: np.ndarray, n_cols: int, word_bits: int = 64):
        if word_bits not in _DTYPES:
            raise ValueError(f"unsupported word width {word_bits}")
        self.word_bits = word_bits
        self.n_cols = n_cols
        self.words = np.ascontiguousarray(words, dtype=_DTYPES[word_bits])
        self.words.setflags(write=False)
        self.n_rows = self.words.shape[0]
        if self.words.ndim != 2 or self.words.shape[1] != _n_words(n_cols, word_bits):
            raise ValueError("word array has the wrong shape")

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int, word_bits: int = 64) -> "F2Matrix":
        return cls(np.zeros((n_rows, _n_words(n_cols, word_bits)), _DTYPES[word_bits]), n_cols, word_bits)

    @classmethod
    def identity(cls, n: int, word_bits: int = 64) -> "F2Matrix":
        return cls.from_pairs(n, n, ((i, i) for i in range(n)), word_bits)

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[int]] | np.ndarray, word_bits: int = 64) -> "F2Matrix":
        arr = np.asarray(dense, dtype=np.int64) & 1
        if arr.ndim != 2:
            arr = arr.reshape(len(dense), -1)
        n_rows, n_cols = arr.shape
        rows, cols = np.nonzero(arr)
        return cls.from_pairs(n_rows, n_cols, zip(rows.tolist(), cols.tolist()), word_bits)

    @classmethod
    def from_pairs(
        cls, n_rows: int, n_cols: int, pairs: Iterable[tuple[int, int]], word_bits: int = 64
    ) -> "F2Matrix":
        """Set entry ``(r, c)`` for every pair; repeated pairs cancel (mod 2)."""
        dtype = _DTYPES[word_bits]
        words = np.zeros((n_rows, _n_words(n_cols, word_bits)), dtype)
        pairs = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
        if len(pairs):
            r, c = pairs[:, 0], pairs[:, 1]
            if r.min() < 0 or r.max() >= n_rows or c.min() < 0 or c.max() >= n_cols:
                raise IndexError("entry outside the matrix")
            bits = (np.ones(len(c), dtype) << (c % word_bits).astype(dtype))
            np.bitwise_xor.at(words, (r, c // word_bits), bits)
        return cls(words, n_cols, word_bits)

    @classmethod
    def from_int_rows(cls, rows: Sequence[int], n_cols: int, word_bits: int = 64) -> "F2Matrix":
        pairs = [(i, c) for i, row in enumerate(rows) for c in range(n_cols) if row >> c & 1]
        return cls.from_pairs(len(rows), n_cols, pairs, word_bits)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n_rows, self.n_cols), dtype=np.uint8)
        for c in range(self.n_cols):
            w, b = divmod(c, self.word_bits)
            out[:, c] = (self.words[:, w] >> b) & 1
        return out

    def __getitem__(self, rc: tuple[int, int]) -> int:
        r, c = rc
        w, b = divmod(c, self.word_bits)
        return int(self.words[r, w] >> b) & 1

    def transpose(self) -> "F2Matrix":
        return F2Matrix.from_dense(self.to_dense().T, self.word_bits)

    def __matmul__(self, other: "F2Matrix") -> "F2Matrix":
        if self.n_cols != other.n_rows:
            raise ValueError("incompatible shapes")
        prod = (self.to_dense().astype(np.int64) @ other.to_dense().astype(np.int64)) & 1
        return F2Matrix.from_dense(prod.reshape(self.n_rows, other.n_cols), self.word_bits)

    def __eq__(self, other):
        if not isinstance(other, F2Matrix):
            return NotImplemented
        return (
            self.n_rows == other.n_rows
            and self.n_cols == other.n_cols
            and np.array_equal(self.to_dense(), other.to_dense())
        )

    def is_zero(self) -> bool:
        return not self.words.any()

    def rank(self) -> int:
        return f2_rank(self)

    def __repr__(self):
        return f"F2Matrix({self.n_rows}x{self.n_cols}, word_bits={self.word_bits})"


def _n_words(n_cols: int, word_bits: int) -> int:
    return max(1, -(-n_cols // word_bits))


def f2_rank(m: F2Matrix) -> int:
    """Rank over GF(2) by forward elimination on a private copy of the words."""
    a = m.words.copy()
    wb = m.word_bits
    n_rows = m.n_rows
    rank = 0
    for c in range(m.n_cols):
        if rank == n_rows:
            break
        w, b = divmod(c, wb)
        hits = np.flatnonzero((a[rank:, w] >> b) & 1)
        if hits.size == 0:
            continue
        piv = rank + int(hits[0])
        if piv != rank:
            a[[rank, piv]] = a[[piv, rank]]
        if hits.size > 1:
            targets = rank + hits[1:]
            a[targets, w:] ^= a[rank, w:]
        rank += 1
    return rank
