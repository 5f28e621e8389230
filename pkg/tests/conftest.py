import random
from collections import defaultdict

import numpy as np
import pytest

from lib.gamma_encoder import GammaEncoder
from lib.huffman import CodeTable, HuffmanCoder
from lib.sfdc_encoder import SfdcEncoder

COMPRESSION = "Compression"

# Code list printed beside the "Compression" layout; e is a prefix of n and p
FIG_CODES = {
    "s": "001",
    "e": "01",
    "n": "010",
    "p": "0110101",
    "m": "101",
    "C": "1100011010",
    "o": "1100111",
    "i": "11010",
    "r": "11101",
}

# Same table with e lengthened so that it decodes; dynamic bits are unchanged
DECODABLE_CODES = dict(FIG_CODES, e="000")


@pytest.fixture
def fig_table():
    return CodeTable.from_codewords(FIG_CODES)


@pytest.fixture
def decodable_table():
    return CodeTable.from_codewords(DECODABLE_CODES)


def random_text(rng: random.Random, n: int, sigma: int):
    """Skewed random text over 0..sigma-1 so that code lengths vary."""
    weights = [1.0 / (i + 1) ** 1.5 for i in range(sigma)]
    return rng.choices(range(sigma), weights=weights, k=n)


def huffman_table(text):
    return HuffmanCoder.build_code_table(HuffmanCoder.count_frequencies(text))


def check_placement_rules(y, codes, num_layers, cont):
    """Checks the dynamic layer against the stack placement rules."""
    lengths = [len(codes.code(c)) for c in y]
    log = SfdcEncoder.placement_log(y, codes, num_layers)
    dynamic = cont.dynamic_layer.to_bits().tolist()

    positions = [placement.position for placement in log]
    assert len(positions) == len(set(positions))
    assert len(log) == sum(max(0, length - num_layers + 1) for length in lengths)

    next_bit = {}
    last = [-1] * len(y)
    for position, p, h in log:
        # A pending bit never lands before its character, and bits keep their order
        assert position >= p
        assert position > last[p]
        assert h == next_bit.get(p, num_layers - 1)
        assert dynamic[position] == int(codes.code(y[p])[h])
        next_bit[p] = h + 1
        last[p] = position

    for p, length in enumerate(lengths):
        assert next_bit.get(p, num_layers - 1) >= length

    # A position is idle only when every earlier character is complete
    reach = np.maximum.accumulate(np.array(last))
    for k in set(range(cont.n_dyn)) - set(positions):
        assert k < len(y) and reach[k] < k
        assert dynamic[k] == 0


def check_column_rules(y, codes, num_layers, cont=None):
    """Checks the uniform-layer fill: each slot used once, codes in order, idle slots only when nothing is pending."""
    used = defaultdict(set)
    last_column = [0] * len(y)
    next_bit = [0] * len(y)
    log = GammaEncoder.gamma_placement_log(y, codes, num_layers)
    for column, layer, p, b in log:
        assert column >= p
        assert layer not in used[column]
        assert b == next_bit[p]
        if cont is not None:
            assert cont.layers[layer].read_bit(column) == int(codes.code(y[p])[b])
        used[column].add(layer)
        last_column[p] = max(last_column[p], column)
        next_bit[p] = b + 1

    assert len(log) == sum(len(codes.code(c)) for c in y)
    assert next_bit == [len(codes.code(c)) for c in y]
    for column, layers in used.items():
        assert layers == set(range(len(layers)))
        # A partly idle column leaves nothing pending behind it
        if len(layers) < num_layers:
            assert max(last_column[: column + 1]) <= column
    if cont is not None:
        assert set(used) == set(range(cont.n_gamma))
