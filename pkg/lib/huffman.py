import heapq
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import DecodeError, MissingSymbolError, ParameterError, PrefixError

Symbol = Hashable

MAX_CODE_LENGTH = 64


@dataclass(frozen=True)
class FrequencyTable:
    counts: Dict[Symbol, int]

    @property
    def n(self) -> int:
        return sum(self.counts.values())

    @property
    def sigma(self) -> int:
        return len(self.counts)

    def ordered(self) -> List[Symbol]:
        """Symbols from least to most frequent, ties broken by symbol."""
        return sorted(self.counts, key=lambda c: (self.counts[c], c))


@dataclass(frozen=True)
class TextProfile:
    sigma: int
    max_value: int
    mean_value: float
    max_code_length: int
    mean_code_length: float


@dataclass(frozen=True)
class CodeTable:
    """
    Per-symbol binary code-words.

    `order` is the canonical order (non-decreasing code length); it is also the
    row order of `bit_matrix` and `length_array`, and the record order of the
    container file.
    """

    codes: Dict[Symbol, str]
    order: Tuple[Symbol, ...]

    @classmethod
    def from_lengths(cls, records: Sequence[Tuple[Symbol, int]]) -> "CodeTable":
        """
        Assigns canonical code-words to (symbol, length) records.

        Args:
            records (Sequence[Tuple[Symbol, int]]): Records sorted by non-decreasing length.

        Returns:
            CodeTable: Consecutive code values within each length.

        Raises:
            ParameterError: If the lengths are unsorted, out of range or violate Kraft.
        """
        if not records:
            raise ParameterError("Code table is empty.")

        codes: Dict[Symbol, str] = {}
        code = 0
        prev_length = records[0][1]
        for symbol, length in records:
            if not 1 <= length <= MAX_CODE_LENGTH:
                raise ParameterError(
                    f"Code length {length} for {symbol!r} outside [1, {MAX_CODE_LENGTH}]."
                )
            if length < prev_length:
                raise ParameterError("Code lengths must be non-decreasing in canonical order.")
            if symbol in codes:
                raise ParameterError(f"Duplicate symbol {symbol!r} in code table.")
            code <<= length - prev_length
            if code >= 1 << length:
                raise ParameterError("Code lengths violate the Kraft inequality.")
            codes[symbol] = format(code, f"0{length}b")
            code += 1
            prev_length = length

        return cls(codes, tuple(symbol for symbol, _ in records))

    @classmethod
    def from_codewords(cls, mapping: Mapping[Symbol, str]) -> "CodeTable":
        """Wraps an externally supplied table; prefix-freeness is checked only when a decode tree is built."""
        if not mapping:
            raise ParameterError("Code table is empty.")
        for symbol, code in mapping.items():
            if not code or any(bit not in "01" for bit in code):
                raise ParameterError(f"Invalid code-word {code!r} for {symbol!r}.")
            if len(code) > MAX_CODE_LENGTH:
                raise ParameterError(f"Code-word for {symbol!r} exceeds {MAX_CODE_LENGTH} bits.")
        order = sorted(mapping, key=lambda c: (len(mapping[c]), mapping[c]))
        return cls(dict(mapping), tuple(order))

    @property
    def sigma(self) -> int:
        return len(self.codes)

    @cached_property
    def lengths(self) -> Dict[Symbol, int]:
        return {symbol: len(code) for symbol, code in self.codes.items()}

    @property
    def max_len(self) -> int:
        return max(self.lengths.values())

    def __contains__(self, symbol: Symbol) -> bool:
        return symbol in self.codes

    def code(self, symbol: Symbol) -> str:
        try:
            return self.codes[symbol]
        except (KeyError, TypeError):
            raise MissingSymbolError(symbol) from None

    def average_length(self, freq: FrequencyTable) -> Fraction:
        total = sum(freq.counts[c] * self.lengths[c] for c in freq.counts)
        return Fraction(total, freq.n)

    def kraft_sum(self) -> Fraction:
        return sum((Fraction(1, 2**length) for length in self.lengths.values()), Fraction(0))

    def is_prefix_free(self) -> bool:
        words = sorted(self.codes.values())
        return all(not b.startswith(a) for a, b in zip(words, words[1:]))

    @cached_property
    def rows(self) -> Dict[Symbol, int]:
        return {symbol: row for row, symbol in enumerate(self.order)}

    @cached_property
    def bit_matrix(self) -> np.ndarray:
        """sigma x max_len matrix of code bits, zero past each code's end."""
        matrix = np.zeros((self.sigma, self.max_len), dtype=np.uint8)
        for row, symbol in enumerate(self.order):
            code = self.codes[symbol]
            matrix[row, : len(code)] = [int(bit) for bit in code]
        return matrix

    @cached_property
    def length_array(self) -> np.ndarray:
        return np.array([len(self.codes[symbol]) for symbol in self.order], dtype=np.int64)

    def index_text(self, text: Sequence[Symbol]) -> np.ndarray:
        """
        Maps a text to code-table rows.

        Raises:
            ParameterError: If the text is empty.
            MissingSymbolError: For the first symbol absent from the table.
        """
        if len(text) == 0:
            raise ParameterError("Text must be nonempty.")
        rows = self.rows
        try:
            return np.fromiter((rows[c] for c in text), dtype=np.int64, count=len(text))
        except (KeyError, TypeError):
            missing = next(c for c in text if c not in rows)
            raise MissingSymbolError(missing) from None


class DecodeNode:
    __slots__ = ("children", "symbol", "leaf")

    def __init__(self):
        self.children: List[Optional["DecodeNode"]] = [None, None]
        self.symbol: Optional[Symbol] = None
        self.leaf = False

    def step(self, bit: int) -> "DecodeNode":
        child = self.children[bit]
        if child is None:
            raise DecodeError("Bit sequence leaves the code tree.")
        return child


class DecodeTree:
    """Binary code tree; the path from the root to a leaf spells the leaf's code-word."""

    def __init__(self, root: DecodeNode):
        self.root = root

    @classmethod
    def from_codes(cls, codes: CodeTable) -> "DecodeTree":
        root = DecodeNode()
        for symbol in codes.order:
            code = codes.codes[symbol]
            node = root
            for bit in code:
                if node.leaf:
                    raise PrefixError(
                        f"Code-word of {node.symbol!r} is a prefix of {code!r} ({symbol!r})."
                    )
                index = int(bit)
                if node.children[index] is None:
                    node.children[index] = DecodeNode()
                node = node.children[index]
            if node.leaf or node.children != [None, None]:
                raise PrefixError(f"Code-word {code!r} of {symbol!r} is a prefix of another.")
            node.leaf = True
            node.symbol = symbol
        return cls(root)

    def walk(self, bits: Iterable[int]) -> Symbol:
        node = self.root
        for bit in bits:
            node = node.step(int(bit))
            if node.leaf:
                return node.symbol
        raise DecodeError("Bit sequence ends inside the code tree.")


class HuffmanCoder:
    @staticmethod
    def count_frequencies(text: Iterable[Symbol]) -> FrequencyTable:
        counts = Counter(text)
        if not counts:
            raise ParameterError("Text must be nonempty.")
        return FrequencyTable(dict(counts))

    @staticmethod
    def build_code_table(freq: FrequencyTable) -> CodeTable:
        """
        Builds a canonical Huffman code.

        Among equal weights, composite nodes are merged before leaves and the most
        recently created composite first, which yields the degenerate tree on
        Fibonacci-like frequencies.

        Args:
            freq (FrequencyTable): Symbol counts.

        Returns:
            CodeTable: Canonical code sorted by (length, -count, symbol).

        Raises:
            ParameterError: If the table is empty or a code would exceed 64 bits.
        """
        if freq.sigma == 0:
            raise ParameterError("Frequency table is empty.")

        logging.info(f"Building Huffman code for {freq.sigma} symbols...")
        if freq.sigma == 1:
            lengths = {next(iter(freq.counts)): 1}
        else:
            lengths = HuffmanCoder._code_lengths(freq)

        longest = max(lengths.values())
        if longest > MAX_CODE_LENGTH:
            raise ParameterError(
                f"Huffman code length {longest} exceeds the {MAX_CODE_LENGTH}-bit limit."
            )

        order = sorted(lengths, key=lambda c: (lengths[c], -freq.counts[c], c))
        return CodeTable.from_lengths([(c, lengths[c]) for c in order])

    @staticmethod
    def _code_lengths(freq: FrequencyTable) -> Dict[Symbol, int]:
        # Heap entries: (weight, kind, order, node); kind 0 = composite, 1 = leaf
        heap = [(freq.counts[c], 1, rank, c) for rank, c in enumerate(freq.ordered())]
        heapq.heapify(heap)
        serial = 0
        while len(heap) > 1:
            w1, _, _, left = heapq.heappop(heap)
            w2, _, _, right = heapq.heappop(heap)
            serial += 1
            heapq.heappush(heap, (w1 + w2, 0, -serial, _Composite(left, right)))

        lengths: Dict[Symbol, int] = {}
        stack = [(heap[0][3], 0)]
        while stack:
            node, depth = stack.pop()
            if isinstance(node, _Composite):
                stack.append((node.left, depth + 1))
                stack.append((node.right, depth + 1))
            else:
                lengths[node] = depth
        return lengths

    @staticmethod
    def build_decode_tree(codes: CodeTable) -> DecodeTree:
        return DecodeTree.from_codes(codes)

    @staticmethod
    def encode_symbol(codes: CodeTable, c: Symbol) -> str:
        return codes.code(c)

    @staticmethod
    def profile(text: Sequence[Symbol], codes: CodeTable) -> TextProfile:
        """Summarises a text: alphabet size, symbol values and code lengths."""
        values = np.array([ord(c) if isinstance(c, str) else int(c) for c in text])
        lengths = codes.length_array[codes.index_text(text)]
        return TextProfile(
            sigma=len(set(text)),
            max_value=int(values.max()),
            mean_value=float(values.mean()),
            max_code_length=int(lengths.max()),
            mean_code_length=float(lengths.mean()),
        )


class _Composite:
    __slots__ = ("left", "right")

    def __init__(self, left, right):
        self.left = left
        self.right = right
