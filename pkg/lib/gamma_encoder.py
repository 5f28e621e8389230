import logging
from dataclasses import dataclass
from functools import cached_property
from typing import ClassVar, Iterator, List, NamedTuple, Sequence, Tuple

import numpy as np

from .bit_layer import BitLayer, LayerReader
from .errors import DecodeError
from .huffman import CodeTable, DecodeTree, Symbol
from .sfdc_encoder import DelayStats, check_layer_count, check_window


class ColumnPlacement(NamedTuple):
    column: int
    layer: int
    char_index: int
    bit_index: int
    run: int


@dataclass
class GammaContainer:
    num_layers: int
    n: int
    layers: List[BitLayer]
    codes: CodeTable

    variant: ClassVar[str] = "gamma"

    @cached_property
    def tree(self) -> DecodeTree:
        return DecodeTree.from_codes(self.codes)

    @property
    def n_gamma(self) -> int:
        return self.layers[0].len_bits

    @property
    def layer_bits(self) -> int:
        return self.num_layers * self.n_gamma


def _fill_columns(lengths: Sequence[int], num_layers: int) -> Iterator[ColumnPlacement]:
    """
    Replays the column-major fill.

    Every code enters the stack whole; each column pops into layers 0..num_layers-1
    until the stack runs dry. Yields runs of consecutive bits of one code placed
    in consecutive layers of one column.
    """
    n = len(lengths)
    stack: List[Tuple[int, int]] = []
    i = 0
    while i < n or stack:
        if i < n:
            stack.append((i, 0))
        h = 0
        while h < num_layers and stack:
            p, b = stack.pop()
            run = min(num_layers - h, lengths[p] - b)
            yield ColumnPlacement(i, h, p, b, run)
            if b + run < lengths[p]:
                stack.append((p, b + run))
            h += run
        i += 1


class GammaEncoder:
    @staticmethod
    def gamma_encode(y: Sequence[Symbol], codes: CodeTable, num_layers: int) -> GammaContainer:
        """
        Builds the uniform-layer representation where pending bits take any idle slot.

        Args:
            y (Sequence[Symbol]): The text.
            codes (CodeTable): Code-words for every symbol of y.
            num_layers (int): Layer count, at least 2.

        Returns:
            GammaContainer: Frozen container whose layers share the length n_gamma >= n.
        """
        check_layer_count(num_layers)
        rows = codes.index_text(y)
        n = len(rows)
        logging.info(f"Encoding {n} symbols into {num_layers} uniform layers...")

        row_list = rows.tolist()
        words = [codes.codes[symbol] for symbol in codes.order]
        lengths = codes.length_array[rows].tolist()
        ones: List[List[int]] = [[] for _ in range(num_layers)]
        n_gamma = n
        for column, layer, p, b, run in _fill_columns(lengths, num_layers):
            word = words[row_list[p]]
            for t in range(run):
                if word[b + t] == "1":
                    ones[layer + t].append(column)
            n_gamma = max(n_gamma, column + 1)

        layers = []
        for positions in ones:
            bits = np.zeros(n_gamma, dtype=np.uint8)
            bits[positions] = 1
            layers.append(BitLayer.from_bits(bits).freeze())
        return GammaContainer(num_layers, n, layers, codes)

    @staticmethod
    def gamma_placement_log(
        y: Sequence[Symbol], codes: CodeTable, num_layers: int
    ) -> List[Tuple[int, int, int, int]]:
        """Lists (column, layer, char index, bit index) for every code bit."""
        check_layer_count(num_layers)
        lengths = codes.length_array[codes.index_text(y)].tolist()
        return [
            (column, layer + t, p, b + t)
            for column, layer, p, b, run in _fill_columns(lengths, num_layers)
            for t in range(run)
        ]

    @staticmethod
    def _decode_span(cont: GammaContainer, i: int, j: int) -> Tuple[list, List[int]]:
        root = cont.tree.root
        readers = [LayerReader(layer) for layer in cont.layers]
        num_layers = cont.num_layers
        n = cont.n
        symbols: list = [None] * (j - i + 1)
        completed = [0] * (j - i + 1)

        stack = []
        k = i
        while True:
            if k < n:
                stack.append((root, k))
            elif k >= cont.n_gamma:
                raise DecodeError("Layers end before all pending bits are read.")

            h = 0
            while h < num_layers and stack:
                node, p = stack.pop()
                node = node.step(readers[h][k])
                if node.leaf:
                    if p <= j:
                        symbols[p - i] = node.symbol
                        completed[p - i] = k
                else:
                    stack.append((node, p))
                h += 1

            if k >= j and not stack:
                return symbols, completed
            k += 1

    @staticmethod
    def gamma_access(cont: GammaContainer, i: int) -> Tuple[Symbol, int]:
        check_window(cont.n, i, i)
        symbols, completed = GammaEncoder._decode_span(cont, i, i)
        return symbols[0], completed[0] - i

    @staticmethod
    def gamma_decode_window(cont: GammaContainer, i: int, j: int) -> list:
        check_window(cont.n, i, j)
        symbols, _ = GammaEncoder._decode_span(cont, i, j)
        return symbols

    @staticmethod
    def gamma_compute_delay(y: Sequence[Symbol], codes: CodeTable, num_layers: int) -> DelayStats:
        check_layer_count(num_layers)
        lengths = codes.length_array[codes.index_text(y)].tolist()
        n = len(lengths)
        logging.info(f"Simulating uniform-layer delay for {n} symbols with {num_layers} layers...")

        delays = [0] * n
        n_gamma = n
        for column, _, p, b, run in _fill_columns(lengths, num_layers):
            if b + run == lengths[p]:
                delays[p] = column - p
            if column >= n_gamma:
                n_gamma = column + 1

        return DelayStats.from_accounting(delays, num_layers * n_gamma, sum(lengths))

    @staticmethod
    def gamma_stats(cont: GammaContainer) -> DelayStats:
        symbols, completed = GammaEncoder._decode_span(cont, 0, cont.n - 1)
        code_bits = sum(cont.codes.lengths[c] for c in symbols)
        delays = [k - p for p, k in enumerate(completed)]
        return DelayStats.from_accounting(delays, cont.layer_bits, code_bits)
