import logging
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Sequence, Set, Tuple

import numpy as np

from .bit_layer import WORD_SIZE, BitLayer, LayerReader
from .errors import ParameterError, RangeError, VariantError
from .huffman import CodeTable, Symbol
from .sfdc_encoder import SfdcContainer, SfdcEncoder

DEFAULT_Q = 8
MAX_Q = 16


@dataclass(frozen=True)
class BlindPattern:
    """
    A pattern encoded standalone, plus the mask of its non-idle dynamic slots.

    `blind_mask` is 1 wherever the pattern's own encoding placed a pending bit;
    text bits under a 0 may belong to characters before the window.
    """

    m: int
    num_layers: int
    fixed_layers: Tuple[BitLayer, ...]
    dynamic_layer: BitLayer
    blind_mask: BitLayer
    symbols: Tuple[Symbol, ...]

    @property
    def m_prime(self) -> int:
        return self.dynamic_layer.len_bits

    @cached_property
    def tail_bits(self) -> List[int]:
        """Pending bits the standalone pattern flushes after its last character."""
        return self.dynamic_layer.to_bits()[self.m :].tolist()


@dataclass(frozen=True)
class BucketTable:
    q: int
    buckets: List[List[int]]


_TAIL = object()


class SkipSearch:
    @staticmethod
    def compile_pattern(
        x: Sequence[Symbol], codes: CodeTable, num_layers: int
    ) -> Optional[BlindPattern]:
        """
        Encodes a pattern with the text's code for blind matching.

        Args:
            x (Sequence[Symbol]): The pattern, nonempty.
            codes (CodeTable): The text's code table.
            num_layers (int): The text's layer count.

        Returns:
            Optional[BlindPattern]: The compiled pattern, or None when a symbol of x
            has no code (the pattern cannot occur in the text).
        """
        if len(x) == 0:
            raise ParameterError("Pattern must be nonempty.")
        missing = [c for c in x if c not in codes]
        if missing:
            logging.info(f"Pattern symbol {missing[0]!r} is not in the text alphabet")
            return None

        cont = SfdcEncoder.encode(x, codes, num_layers)
        mask_bits = np.zeros(cont.n_dyn, dtype=np.uint8)
        mask_bits[[placement.position for placement in SfdcEncoder.placement_log(x, codes, num_layers)]] = 1
        return BlindPattern(
            m=cont.n,
            num_layers=num_layers,
            fixed_layers=tuple(cont.fixed_layers),
            dynamic_layer=cont.dynamic_layer,
            blind_mask=BitLayer.from_bits(mask_bits).freeze(),
            symbols=tuple(x),
        )

    @staticmethod
    def _check_text(text: SfdcContainer, pat: BlindPattern):
        if not isinstance(text, SfdcContainer):
            raise VariantError(
                f"Blind search needs a standard container, got {getattr(text, 'variant', type(text).__name__)}."
            )
        if pat.num_layers != text.num_layers:
            raise ParameterError(
                f"Pattern has {pat.num_layers} layers but the text has {text.num_layers}."
            )

    @staticmethod
    def _blocks_match(
        text_layer: BitLayer,
        pat_layer: BitLayer,
        i: int,
        length: int,
        mask: Optional[BitLayer] = None,
    ) -> bool:
        for start in range(0, length, WORD_SIZE):
            q = min(WORD_SIZE, length - start)
            value = text_layer.get_lblock(i + start, q)
            if mask is not None:
                value &= mask.get_lblock(start, q)
            if value != pat_layer.get_lblock(start, q):
                return False
        return True

    @staticmethod
    def _tail_matches(text: SfdcContainer, pat: BlindPattern, i: int) -> bool:
        """
        Follows the text's dynamic stack past the window.

        Characters after the window push pending bits above the pattern's
        unflushed tail, so each tail bit is compared where it actually surfaces.
        """
        expected = pat.tail_bits
        root = text.tree.root
        fixed = [LayerReader(layer) for layer in text.fixed_layers]
        dynamic = LayerReader(text.dynamic_layer)
        depth = text.num_layers - 1

        stack = [_TAIL]
        matched = 0
        k = i + pat.m
        while True:
            if k < text.n:
                node = root
                h = 0
                while h < depth and not node.leaf:
                    node = node.step(fixed[h][k])
                    h += 1
                if not node.leaf:
                    stack.append(node)

            top = stack.pop()
            bit = dynamic[k]
            if top is _TAIL:
                if bit != expected[matched]:
                    return False
                matched += 1
                if matched == len(expected):
                    return True
                stack.append(_TAIL)
            else:
                node = top.step(bit)
                if not node.leaf:
                    stack.append(node)
            k += 1

    @staticmethod
    def _verify(text: SfdcContainer, pat: BlindPattern, i: int) -> bool:
        for text_layer, pat_layer in zip(text.fixed_layers, pat.fixed_layers):
            if not SkipSearch._blocks_match(text_layer, pat_layer, i, pat.m):
                return False
        if not SkipSearch._blocks_match(
            text.dynamic_layer, pat.dynamic_layer, i, pat.m, pat.blind_mask
        ):
            return False
        if pat.m_prime > pat.m:
            return SkipSearch._tail_matches(text, pat, i)
        return True

    @staticmethod
    def verify(text: SfdcContainer, pat: BlindPattern, i: int) -> bool:
        """
        Checks whether the pattern occurs at position i without decoding the window.

        Raises:
            VariantError: If text is not a standard container.
            RangeError: If i is outside [0, n - m].
        """
        SkipSearch._check_text(text, pat)
        if not 0 <= i <= text.n - pat.m:
            raise RangeError(f"Position {i} outside [0, {text.n - pat.m}].")
        return SkipSearch._verify(text, pat, i)

    @staticmethod
    def verify_blind(text: SfdcContainer, pat: BlindPattern, i: int) -> bool:
        """Masked block comparison over all m' dynamic positions, without following the stack."""
        SkipSearch._check_text(text, pat)
        if not 0 <= i <= text.n - pat.m:
            raise RangeError(f"Position {i} outside [0, {text.n - pat.m}].")
        for text_layer, pat_layer in zip(text.fixed_layers, pat.fixed_layers):
            if not SkipSearch._blocks_match(text_layer, pat_layer, i, pat.m):
                return False
        return SkipSearch._blocks_match(
            text.dynamic_layer, pat.dynamic_layer, i, pat.m_prime, pat.blind_mask
        )

    @staticmethod
    def build_buckets(pat: BlindPattern, q: int) -> BucketTable:
        if not 1 <= q <= min(pat.m, MAX_Q):
            raise ParameterError(f"Block width must be in [1, {min(pat.m, MAX_Q)}], got {q}.")
        buckets: List[List[int]] = [[] for _ in range(1 << q)]
        first_layer = pat.fixed_layers[0]
        for i in range(pat.m - q + 1):
            buckets[first_layer.get_rblock(i, q)].append(pat.m - q - i)
        return BucketTable(q, buckets)

    @staticmethod
    def _probe(
        text: SfdcContainer, pat: BlindPattern, table: BucketTable, probes: range
    ) -> Set[int]:
        first_layer = text.fixed_layers[0]
        shift = pat.m - table.q
        last = text.n - pat.m
        tried: Set[int] = set()
        found: Set[int] = set()
        for j in probes:
            for k in table.buckets[first_layer.get_rblock(j, table.q)]:
                h = j - shift + k
                if 0 <= h <= last and h not in tried:
                    tried.add(h)
                    if SkipSearch._verify(text, pat, h):
                        found.add(h)
        return found

    @staticmethod
    def skip_search(
        text: SfdcContainer,
        pat: BlindPattern,
        q: Optional[int] = None,
        num_threads: int = 1,
    ) -> List[int]:
        """
        Finds every occurrence of a compiled pattern in a standard container.

        Blocks of the first layer are probed every m - q + 1 positions; each bucket
        hit proposes a start that is then verified on the layers.

        Args:
            text (SfdcContainer): The encoded text.
            pat (BlindPattern): Pattern compiled with the text's code.
            q (Optional[int]): Block width; defaults to min(8, m).
            num_threads (int): Workers sharing the probe positions.

        Returns:
            List[int]: Sorted occurrence positions.
        """
        SkipSearch._check_text(text, pat)
        if num_threads <= 0:
            raise ParameterError("Number of threads must be a positive integer.")
        if pat.m > text.n:
            return []

        q = min(DEFAULT_Q, pat.m) if q is None else q
        table = SkipSearch.build_buckets(pat, q)
        probes = range(pat.m - q, text.n, pat.m - q + 1)
        logging.info(f"Searching {len(probes)} probe blocks of {q} bits...")

        if num_threads == 1:
            found = SkipSearch._probe(text, pat, table, probes)
        else:
            per_thread = -(-len(probes) // num_threads)
            found = set()
            with ThreadPoolExecutor(max_workers=num_threads) as executor:
                futures = [
                    executor.submit(
                        SkipSearch._probe, text, pat, table, probes[start : start + per_thread]
                    )
                    for start in range(0, len(probes), per_thread)
                ]
                for future in as_completed(futures):
                    found |= future.result()

        logging.info(f"Found {len(found)} occurrences")
        return sorted(found)

    @staticmethod
    def plain_skip_search(y: Sequence[Symbol], x: Sequence[Symbol]) -> List[int]:
        """Character-bucket skip search on an unencoded text."""
        if len(x) == 0:
            raise ParameterError("Pattern must be nonempty.")
        y, x = list(y), list(x)
        m, n = len(x), len(y)
        if m > n:
            return []

        buckets = defaultdict(list)
        for i, c in enumerate(x):
            buckets[c].append(i)

        found = []
        for j in range(m - 1, n, m):
            for k in buckets.get(y[j], ()):
                h = j - k
                if 0 <= h <= n - m and y[h : h + m] == x:
                    found.append(h)
        return sorted(found)

    @staticmethod
    def find_symbol(text: SfdcContainer, c: Symbol) -> List[int]:
        """
        Lists the positions of one symbol by filtering whole words of the fixed layers.

        Codes that fit in the fixed layers are resolved by the filter alone;
        longer codes are confirmed by direct access.
        """
        if not isinstance(text, SfdcContainer):
            raise VariantError("Symbol search needs a standard container.")
        if c not in text.codes:
            return []

        code = text.codes.code(c)
        depth = text.num_layers - 1
        mask = np.full(len(text.fixed_layers[0].blocks), np.iinfo(np.uint64).max, dtype=np.uint64)
        for h, layer in enumerate(text.fixed_layers):
            if h < len(code) and code[h] == "1":
                mask &= layer.blocks
            else:
                mask &= ~layer.blocks

        bits = np.unpackbits(mask.astype(">u8").view(np.uint8))[: text.n]
        candidates = np.flatnonzero(bits).tolist()
        if len(code) <= depth:
            return candidates
        return [p for p in candidates if SfdcEncoder.access(text, p)[0] == c]
