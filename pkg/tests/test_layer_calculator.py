import random

import pytest

from lib.errors import ParameterError
from lib.gamma_encoder import GammaEncoder
from lib.huffman import HuffmanCoder
from lib.layer_calculator import LayerCalculator
from lib.sfdc_encoder import SfdcEncoder
from tests.conftest import COMPRESSION, random_text


@pytest.fixture
def skewed_text():
    rng = random.Random(4)
    y = random_text(rng, 600, 30)
    freq = HuffmanCoder.count_frequencies(y)
    return y, freq, HuffmanCoder.build_code_table(freq)


def test_calculate():
    freq = HuffmanCoder.count_frequencies(COMPRESSION)
    codes = HuffmanCoder.build_code_table(freq)
    # Mean code length is 35/11
    assert LayerCalculator.calculate(codes, freq) == 4


def test_calculate_has_floor_of_two():
    freq = HuffmanCoder.count_frequencies("aaaa")
    assert LayerCalculator.calculate(HuffmanCoder.build_code_table(freq), freq) == 2


def test_compute_delay_dispatch(skewed_text):
    y, _, codes = skewed_text
    standard = LayerCalculator.compute_delay("standard", y, codes, 3)
    gamma = LayerCalculator.compute_delay("gamma", y, codes, 3)
    assert standard.mean_delay == SfdcEncoder.compute_delay(y, codes, 3).mean_delay
    assert gamma.mean_delay == GammaEncoder.gamma_compute_delay(y, codes, 3).mean_delay

    with pytest.raises(ParameterError, match="Unknown variant"):
        LayerCalculator.compute_delay("sparse", y, codes, 3)


def test_delay_sweep(skewed_text):
    y, _, codes = skewed_text
    rows = LayerCalculator.delay_sweep(y, codes, [2, 3, 4])
    assert [(variant, num_layers) for variant, num_layers, _ in rows] == [
        ("standard", 2), ("gamma", 2),
        ("standard", 3), ("gamma", 3),
        ("standard", 4), ("gamma", 4),
    ]
    for variant, num_layers, stats in rows:
        assert stats.n == len(y)
        assert stats.mean_delay >= 0


@pytest.mark.parametrize("variant", ["standard", "gamma"])
@pytest.mark.parametrize("bound", [2.0, 0.5, 0.05])
def test_calculate_for_bound_is_minimal(skewed_text, variant, bound):
    y, _, codes = skewed_text
    num_layers = LayerCalculator.calculate_for_bound(y, codes, bound, variant)
    assert LayerCalculator.compute_delay(variant, y, codes, num_layers).mean_delay < bound
    if num_layers > 2:
        assert LayerCalculator.compute_delay(variant, y, codes, num_layers - 1).mean_delay >= bound


@pytest.mark.parametrize("variant, limit", [("standard", 1), ("gamma", 0)])
def test_tiny_bound_reaches_zero_delay(skewed_text, variant, limit):
    y, _, codes = skewed_text
    num_layers = LayerCalculator.calculate_for_bound(y, codes, 1e-12, variant)
    assert num_layers <= codes.max_len + limit
    assert LayerCalculator.compute_delay(variant, y, codes, num_layers).mean_delay == 0


def test_non_positive_bound(skewed_text):
    y, _, codes = skewed_text
    assert LayerCalculator.calculate_for_bound(y, codes, 0) is None
    assert LayerCalculator.calculate_for_bound(y, codes, -1.0, "gamma") is None
