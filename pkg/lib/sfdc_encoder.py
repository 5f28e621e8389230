import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import ClassVar, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .bit_layer import BitLayer, LayerReader
from .errors import DecodeError, ParameterError, RangeError
from .huffman import CodeTable, DecodeTree, Symbol


@dataclass
class DelayStats:
    mean_delay: float
    idle_bits_per_char: float
    bits_per_char: float
    n: int
    layer_bits: int
    code_bits: int
    delays: Optional[np.ndarray] = field(default=None, repr=False)

    @classmethod
    def from_accounting(
        cls, delays: Sequence[int], layer_bits: int, code_bits: int, keep_delays: bool = True
    ) -> "DelayStats":
        delays = np.asarray(delays, dtype=np.int64)
        n = len(delays)
        bits_per_char = layer_bits / n
        return cls(
            mean_delay=float(delays.mean()),
            idle_bits_per_char=bits_per_char - code_bits / n,
            bits_per_char=bits_per_char,
            n=n,
            layer_bits=layer_bits,
            code_bits=code_bits,
            delays=delays if keep_delays else None,
        )


class Placement(NamedTuple):
    position: int
    char_index: int
    bit_index: int


@dataclass
class SfdcContainer:
    num_layers: int
    n: int
    fixed_layers: List[BitLayer]
    dynamic_layer: BitLayer
    codes: CodeTable

    variant: ClassVar[str] = "standard"

    @cached_property
    def tree(self) -> DecodeTree:
        return DecodeTree.from_codes(self.codes)

    @property
    def n_dyn(self) -> int:
        return self.dynamic_layer.len_bits

    @property
    def layers(self) -> List[BitLayer]:
        return self.fixed_layers + [self.dynamic_layer]

    @property
    def layer_bits(self) -> int:
        return (self.num_layers - 1) * self.n + self.n_dyn


def check_layer_count(num_layers: int):
    if num_layers < 2:
        raise ParameterError(f"Layer count must be at least 2, got {num_layers}.")


def check_window(n: int, i: int, j: int):
    if not 0 <= i <= j < n:
        raise RangeError(f"Window [{i}, {j}] outside text of length {n}.")


def _place_pending(lengths: Sequence[int], num_layers: int) -> Iterator[Placement]:
    """Replays the dynamic-layer stack, yielding one placement per pending bit."""
    first_pending = num_layers - 1
    n = len(lengths)
    stack: List[Tuple[int, int]] = []
    i = 0
    while i < n or stack:
        if i < n and lengths[i] > first_pending:
            stack.append((i, first_pending))
        if stack:
            p, h = stack.pop()
            yield Placement(i, p, h)
            if h + 1 < lengths[p]:
                stack.append((p, h + 1))
        i += 1


class SfdcEncoder:
    @staticmethod
    def encode(y: Sequence[Symbol], codes: CodeTable, num_layers: int) -> SfdcContainer:
        """
        Builds the standard layered representation of a text.

        Args:
            y (Sequence[Symbol]): The text.
            codes (CodeTable): Code-words for every symbol of y.
            num_layers (int): Layer count, at least 2.

        Returns:
            SfdcContainer: Frozen container with num_layers - 1 fixed layers and a dynamic layer.

        Raises:
            ParameterError: If num_layers < 2 or y is empty.
            MissingSymbolError: If a symbol of y has no code.
        """
        check_layer_count(num_layers)
        rows = codes.index_text(y)
        n = len(rows)
        logging.info(f"Encoding {n} symbols into {num_layers} layers...")

        matrix = codes.bit_matrix
        fixed_layers = []
        for h in range(num_layers - 1):
            if h < matrix.shape[1]:
                fixed_layers.append(BitLayer.from_bits(matrix[rows, h]))
            else:
                fixed_layers.append(BitLayer(n))

        row_list = rows.tolist()
        words = [codes.codes[symbol] for symbol in codes.order]
        lengths = codes.length_array[rows].tolist()
        ones = []
        n_dyn = n
        for position, p, h in _place_pending(lengths, num_layers):
            if words[row_list[p]][h] == "1":
                ones.append(position)
            n_dyn = max(n_dyn, position + 1)

        dynamic_bits = np.zeros(n_dyn, dtype=np.uint8)
        dynamic_bits[ones] = 1
        dynamic_layer = BitLayer.from_bits(dynamic_bits)

        for layer in fixed_layers:
            layer.freeze()
        dynamic_layer.freeze()
        logging.info(f"Dynamic layer holds {len(ones)} set bits over {n_dyn} positions")
        return SfdcContainer(num_layers, n, fixed_layers, dynamic_layer, codes)

    @staticmethod
    def placement_log(y: Sequence[Symbol], codes: CodeTable, num_layers: int) -> List[Placement]:
        """Lists where every pending bit lands in the dynamic layer."""
        check_layer_count(num_layers)
        lengths = codes.length_array[codes.index_text(y)].tolist()
        return list(_place_pending(lengths, num_layers))

    @staticmethod
    def _decode_span(cont: SfdcContainer, i: int, j: int) -> Tuple[list, List[int]]:
        """Decodes y[i..j], returning the symbols and the position where each was completed."""
        root = cont.tree.root
        fixed = [LayerReader(layer) for layer in cont.fixed_layers]
        dynamic = LayerReader(cont.dynamic_layer)
        depth = cont.num_layers - 1
        n = cont.n
        symbols: list = [None] * (j - i + 1)
        completed = [0] * (j - i + 1)

        stack = []
        k = i
        while True:
            if k < n:
                node = root
                h = 0
                while h < depth and not node.leaf:
                    node = node.step(fixed[h][k])
                    h += 1
                if node.leaf:
                    if k <= j:
                        symbols[k - i] = node.symbol
                        completed[k - i] = k
                else:
                    stack.append((node, k))

            if stack:
                if k >= cont.n_dyn:
                    raise DecodeError("Dynamic layer ends before all pending bits are read.")
                node, p = stack.pop()
                node = node.step(dynamic[k])
                if node.leaf:
                    if p <= j:
                        symbols[p - i] = node.symbol
                        completed[p - i] = k
                else:
                    stack.append((node, p))

            if k >= j and not stack:
                return symbols, completed
            k += 1

    @staticmethod
    def access(cont: SfdcContainer, i: int) -> Tuple[Symbol, int]:
        """
        Decodes y[i] directly.

        Returns:
            Tuple[Symbol, int]: The symbol and its decoding delay in characters.
        """
        check_window(cont.n, i, i)
        symbols, completed = SfdcEncoder._decode_span(cont, i, i)
        return symbols[0], completed[0] - i

    @staticmethod
    def decode_window(cont: SfdcContainer, i: int, j: int) -> list:
        check_window(cont.n, i, j)
        symbols, _ = SfdcEncoder._decode_span(cont, i, j)
        return symbols

    @staticmethod
    def compute_delay(y: Sequence[Symbol], codes: CodeTable, num_layers: int) -> DelayStats:
        """Simulates the dynamic layer without building it and reports delays and space."""
        check_layer_count(num_layers)
        lengths = codes.length_array[codes.index_text(y)].tolist()
        n = len(lengths)
        logging.info(f"Simulating decoding delay for {n} symbols with {num_layers} layers...")

        delays = [0] * n
        n_dyn = n
        for position, p, h in _place_pending(lengths, num_layers):
            if h == lengths[p] - 1:
                delays[p] = position - p
            if position >= n_dyn:
                n_dyn = position + 1

        layer_bits = (num_layers - 1) * n + n_dyn
        return DelayStats.from_accounting(delays, layer_bits, sum(lengths))

    @staticmethod
    def stats(cont: SfdcContainer) -> DelayStats:
        """Decodes the whole container once to account for code bits and delays."""
        symbols, completed = SfdcEncoder._decode_span(cont, 0, cont.n - 1)
        code_bits = sum(cont.codes.lengths[c] for c in symbols)
        delays = [k - p for p, k in enumerate(completed)]
        return DelayStats.from_accounting(delays, cont.layer_bits, code_bits)
