import logging
from typing import Iterable, List, Optional, Union

import numpy as np

from .errors import ParameterError, RangeError

WORD_SIZE = 64
_WORD_MASK = (1 << WORD_SIZE) - 1


def _blocks_from_bytes(data: bytes, len_bits: int) -> np.ndarray:
    """Packs MSB-first bytes into zero-padded 64-bit blocks."""
    num_blocks = (len_bits + WORD_SIZE - 1) // WORD_SIZE
    size = num_blocks * 8
    padded = bytes(data[:size]).ljust(size, b"\0")
    blocks = np.frombuffer(padded, dtype=">u8").astype(np.uint64)

    tail = len_bits % WORD_SIZE
    if tail:
        keep = (_WORD_MASK << (WORD_SIZE - tail)) & _WORD_MASK
        blocks[-1] = int(blocks[-1]) & keep
    return blocks


class BitLayer:
    """
    A bit vector stored as 64-bit blocks, MSB-first.

    Logical bit i lives at shift (63 - i % 64) of block i // 64, so comparing
    left-aligned blocks orders layers lexicographically. Bits past len_bits
    are always zero.
    """

    __slots__ = ("blocks", "len_bits")

    def __init__(self, len_bits: int, blocks: Optional[np.ndarray] = None):
        if len_bits < 0:
            raise ParameterError("Layer length must be non-negative.")
        num_blocks = (len_bits + WORD_SIZE - 1) // WORD_SIZE
        if blocks is None:
            blocks = np.zeros(num_blocks, dtype=np.uint64)
        elif len(blocks) != num_blocks:
            raise ParameterError(
                f"Expected {num_blocks} blocks for {len_bits} bits, got {len(blocks)}."
            )
        self.blocks = blocks
        self.len_bits = len_bits

    @classmethod
    def from_bits(cls, bits: Union[Iterable[int], np.ndarray]) -> "BitLayer":
        bits = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits)
        bits = bits.astype(np.uint8).ravel()
        len_bits = int(bits.size)
        return cls(len_bits, _blocks_from_bytes(np.packbits(bits).tobytes(), len_bits))

    @classmethod
    def from_string(cls, text: str) -> "BitLayer":
        """Builds a layer from a string such as "10110010"; other characters are rejected."""
        if any(ch not in "01" for ch in text):
            raise ParameterError(f"Invalid bit string: {text!r}")
        return cls.from_bits(int(ch) for ch in text)

    @classmethod
    def from_bytes(cls, data: bytes, len_bits: int) -> "BitLayer":
        return cls(len_bits, _blocks_from_bytes(data, len_bits))

    def to_bytes(self) -> bytes:
        """Returns the blocks as big-endian words, i.e. the bits MSB-first."""
        return self.blocks.astype(">u8").tobytes()

    def to_bits(self) -> np.ndarray:
        return np.unpackbits(self.blocks.astype(">u8").view(np.uint8))[: self.len_bits]

    @property
    def frozen(self) -> bool:
        return not self.blocks.flags.writeable

    def freeze(self) -> "BitLayer":
        self.blocks.flags.writeable = False
        return self

    def _check_index(self, i: int):
        if not 0 <= i < self.len_bits:
            raise RangeError(f"Bit index {i} outside layer of {self.len_bits} bits.")

    def _word(self, k: int) -> int:
        if k >= len(self.blocks):
            return 0
        return int(self.blocks[k])

    def write_bit(self, i: int, b: int):
        self._check_index(i)
        if self.frozen:
            raise ParameterError("Cannot write to a frozen layer.")
        k, s = divmod(i, WORD_SIZE)
        mask = 1 << (WORD_SIZE - 1 - s)
        word = int(self.blocks[k])
        self.blocks[k] = (word | mask) if b else (word & ~mask & _WORD_MASK)

    def read_bit(self, i: int) -> int:
        self._check_index(i)
        k, s = divmod(i, WORD_SIZE)
        return (int(self.blocks[k]) >> (WORD_SIZE - 1 - s)) & 1

    def get_rblock(self, i: int, q: int) -> int:
        """
        Reads bits i..i+q-1 right-aligned in a word.

        Args:
            i (int): First bit index; reads past len_bits yield zeros.
            q (int): Block width, 1 <= q <= 64.

        Returns:
            int: The block value, bit i being the most significant of the q bits.

        Raises:
            ParameterError: If q is outside [1, 64].
            RangeError: If i is negative.
        """
        if not 1 <= q <= WORD_SIZE:
            raise ParameterError(f"Block width must be in [1, {WORD_SIZE}], got {q}.")
        if i < 0:
            raise RangeError(f"Bit index {i} is negative.")

        mask = (1 << q) - 1
        k, s = divmod(i, WORD_SIZE)
        high = self._word(k)
        if s <= WORD_SIZE - q:
            return (high >> (WORD_SIZE - q - s)) & mask

        # Block straddles two words
        low = self._word(k + 1)
        return ((high << (s + q - WORD_SIZE)) | (low >> (2 * WORD_SIZE - q - s))) & mask

    def get_lblock(self, i: int, q: int) -> int:
        """Reads bits i..i+q-1 left-aligned in a word (trailing zeros)."""
        return self.get_rblock(i, q) << (WORD_SIZE - q)

    def count_ones(self) -> int:
        return int(self.to_bits().sum())

    def __len__(self) -> int:
        return self.len_bits

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitLayer):
            return NotImplemented
        return self.len_bits == other.len_bits and np.array_equal(
            self.blocks, other.blocks
        )

    __hash__ = None

    def __str__(self) -> str:
        return "".join(str(bit) for bit in self.to_bits().tolist())

    def __repr__(self) -> str:
        return f"BitLayer(len_bits={self.len_bits})"


class LayerReader:
    """Random-access bit reader over a layer that unpacks one page of blocks at a time."""

    PAGE_WORDS = 64
    PAGE_BITS = PAGE_WORDS * WORD_SIZE

    __slots__ = ("_layer", "_page", "_bits")

    def __init__(self, layer: BitLayer):
        self._layer = layer
        self._page = -1
        self._bits: List[int] = []

    def __getitem__(self, i: int) -> int:
        page, offset = divmod(i, self.PAGE_BITS)
        if page != self._page:
            self._load(page)
        return self._bits[offset]

    def _load(self, page: int):
        start = page * self.PAGE_WORDS
        chunk = self._layer.blocks[start : start + self.PAGE_WORDS]
        bits = np.unpackbits(chunk.astype(">u8").view(np.uint8)).tolist()
        if len(bits) < self.PAGE_BITS:
            bits.extend([0] * (self.PAGE_BITS - len(bits)))
        logging.debug(f"Unpacked page {page} of a {self._layer.len_bits}-bit layer")
        self._bits = bits
        self._page = page
