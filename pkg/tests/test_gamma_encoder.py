import random

import pytest

from lib.errors import ParameterError, RangeError
from lib.fibonacci_model import FibonacciModel
from lib.gamma_encoder import GammaEncoder
from lib.sfdc_encoder import SfdcEncoder
from tests.conftest import COMPRESSION, check_column_rules, huffman_table, random_text

LAYERS = [
    "11101000110",
    "11011100111",
    "00111111000",
    "00100000101",
    "01111000010",
    "11001000010",
]


@pytest.fixture(scope="module")
def fibonacci_text():
    y = FibonacciModel.gen_fibonacci_text(10, 200, seed=1)
    return y, huffman_table(y)


def test_layout_of_compression(fig_table):
    cont = GammaEncoder.gamma_encode(COMPRESSION, fig_table, 6)
    assert [str(layer) for layer in cont.layers] == LAYERS
    assert cont.n_gamma == 11
    assert cont.layer_bits == 66
    assert all(layer.frozen for layer in cont.layers)


def test_placements_with_five_layers(fig_table):
    log = GammaEncoder.gamma_placement_log(COMPRESSION, fig_table, 5)
    c_bits = [(column, layer, p, b) for column, layer, p, b in log if p == 0]
    assert c_bits == [(0, h, 0, h) for h in range(5)] + [
        (5, 4, 0, 5),
        (6, 3, 0, 6),
        (6, 4, 0, 7),
        (7, 3, 0, 8),
        (7, 4, 0, 9),
    ]
    assert GammaEncoder.gamma_compute_delay(COMPRESSION, fig_table, 5).delays[0] == 7


def test_access_of_compression(decodable_table):
    cont = GammaEncoder.gamma_encode(COMPRESSION, decodable_table, 6)
    assert GammaEncoder.gamma_access(cont, 0) == ("C", 5)
    assert GammaEncoder.gamma_decode_window(cont, 0, 10) == list(COMPRESSION)
    assert GammaEncoder.gamma_decode_window(cont, 8, 10) == list("ion")


@pytest.mark.parametrize("num_layers", range(2, 13))
def test_roundtrip(num_layers):
    rng = random.Random(num_layers)
    y = random_text(rng, 300, 40)
    codes = huffman_table(y)
    cont = GammaEncoder.gamma_encode(y, codes, num_layers)
    assert cont.n_gamma >= len(y)
    assert GammaEncoder.gamma_decode_window(cont, 0, len(y) - 1) == y


@pytest.mark.parametrize("seed", range(4))
def test_access_matches_simulated_delay(seed):
    rng = random.Random(200 + seed)
    y = random_text(rng, 120, 30)
    codes = huffman_table(y)
    num_layers = rng.randint(2, 5)
    cont = GammaEncoder.gamma_encode(y, codes, num_layers)
    stats = GammaEncoder.gamma_compute_delay(y, codes, num_layers)

    accessed = [GammaEncoder.gamma_access(cont, i) for i in range(len(y))]
    assert [symbol for symbol, _ in accessed] == y
    assert [delay for _, delay in accessed] == stats.delays.tolist()

    measured = GammaEncoder.gamma_stats(cont)
    assert measured.mean_delay == pytest.approx(stats.mean_delay)
    assert measured.layer_bits == stats.layer_bits == cont.layer_bits


def test_set_bits_equal_code_ones():
    rng = random.Random(17)
    y = random_text(rng, 250, 35)
    codes = huffman_table(y)
    ones = sum(codes.code(c).count("1") for c in y)
    cont = GammaEncoder.gamma_encode(y, codes, 3)
    assert sum(layer.count_ones() for layer in cont.layers) == ones

    standard = SfdcEncoder.encode(y, codes, 3)
    assert sum(layer.count_ones() for layer in standard.layers) == ones


def test_idle_slots_close_each_column():
    rng = random.Random(23)
    y = random_text(rng, 200, 30)
    codes = huffman_table(y)
    check_column_rules(y, codes, 4, GammaEncoder.gamma_encode(y, codes, 4))


def test_every_code_starts_in_its_own_column():
    rng = random.Random(29)
    y = random_text(rng, 200, 30)
    codes = huffman_table(y)
    first = {}
    for column, _, p, b in GammaEncoder.gamma_placement_log(y, codes, 3):
        if b == 0:
            first[p] = column
    assert first == {p: p for p in range(len(y))}


@pytest.mark.parametrize("num_layers", [5, 6, 7, 8])
def test_uniform_layers_never_delay_more(fibonacci_text, num_layers):
    y, codes = fibonacci_text
    gamma = GammaEncoder.gamma_compute_delay(y, codes, num_layers)
    standard = SfdcEncoder.compute_delay(y, codes, num_layers)
    assert gamma.mean_delay <= standard.mean_delay + 1e-9


def test_fibonacci_delay_is_small_with_eight_layers(fibonacci_text):
    y, codes = fibonacci_text
    assert 0.0 <= GammaEncoder.gamma_compute_delay(y, codes, 8).mean_delay <= 0.12


def test_no_delay_once_every_code_fits():
    rng = random.Random(31)
    y = random_text(rng, 300, 20)
    codes = huffman_table(y)
    stats = GammaEncoder.gamma_compute_delay(y, codes, codes.max_len)
    assert stats.mean_delay == 0
    assert stats.layer_bits == codes.max_len * len(y)


def test_invalid_arguments(decodable_table):
    with pytest.raises(ParameterError, match="at least 2"):
        GammaEncoder.gamma_encode(COMPRESSION, decodable_table, 1)
    cont = GammaEncoder.gamma_encode(COMPRESSION, decodable_table, 4)
    with pytest.raises(RangeError):
        GammaEncoder.gamma_access(cont, -1)
    with pytest.raises(RangeError):
        GammaEncoder.gamma_decode_window(cont, 3, 11)
