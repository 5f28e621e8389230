import logging
import math
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from .errors import ParameterError

MAX_FIB_INDEX = 92
MAX_GENERATED_LENGTH = 1 << 32
GOLDEN_RATIO_SQUARED = (3 + math.sqrt(5)) / 2


class FibonacciModel:
    """Closed forms for texts whose symbol counts follow the Fibonacci sequence."""

    @staticmethod
    def fib(k: int) -> int:
        if not 0 <= k <= MAX_FIB_INDEX:
            raise ParameterError(f"Fibonacci index must be in [0, {MAX_FIB_INDEX}], got {k}.")
        a, b = 0, 1
        for _ in range(k):
            a, b = b, a + b
        return a

    @staticmethod
    def fib_sum(n: int) -> int:
        return sum(FibonacciModel.fib(i) for i in range(n + 1))

    @staticmethod
    def fib_weighted_sum(n: int) -> int:
        return sum(i * FibonacciModel.fib(i) for i in range(n + 1))

    @staticmethod
    def fibonacci_frequencies(sigma: int) -> List[int]:
        """Counts (1, F_1, ..., F_{sigma-1}) of symbols c_0..c_{sigma-1}."""
        if sigma < 2:
            raise ParameterError(f"Alphabet size must be at least 2, got {sigma}.")
        return [1] + [FibonacciModel.fib(i) for i in range(1, sigma)]

    @staticmethod
    def expected_code_length(sigma: int) -> Fraction:
        """
        Mean Huffman code length on Fibonacci frequencies, (F_{s+3} - 3) / F_{s+1}.

        Raises:
            ParameterError: If sigma < 2 or the indices leave the exact range.
        """
        if sigma < 2:
            raise ParameterError(f"Alphabet size must be at least 2, got {sigma}.")
        fib = FibonacciModel.fib
        return Fraction(fib(sigma + 3) - 3, fib(sigma + 1))

    @staticmethod
    def expected_idle_bits(sigma: int, num_layers: int) -> Fraction:
        if num_layers < 2:
            raise ParameterError(f"Layer count must be at least 2, got {num_layers}.")
        return num_layers - FibonacciModel.expected_code_length(sigma)

    @staticmethod
    def _check_regime(sigma: int, num_layers: int):
        if not 4 <= num_layers <= sigma - 1:
            raise ParameterError(
                f"Delay formulas need 4 <= layers <= sigma - 1, got sigma={sigma}, layers={num_layers}."
            )

    @staticmethod
    def expected_delay_standard(sigma: int, num_layers: int) -> Fraction:
        FibonacciModel._check_regime(sigma, num_layers)
        fib = FibonacciModel.fib
        numerator = max(0, fib(sigma - num_layers + 3) - 3)
        return Fraction(numerator, fib(sigma + 1))

    @staticmethod
    def gamma_delay_bounds(sigma: int, num_layers: int) -> Tuple[Fraction, Fraction]:
        """
        Bounds on the uniform-layer delay.

        Returns:
            Tuple[Fraction, Fraction]: (lower, upper), where lower drops the ceilings
            of the per-symbol sum and upper adds one per term.
        """
        FibonacciModel._check_regime(sigma, num_layers)
        fib = FibonacciModel.fib
        numerator = max(0, fib(sigma - num_layers + 3) - 3)
        lower = Fraction(numerator, num_layers * fib(sigma + 1) - fib(sigma + 3) + 3)
        upper = lower + Fraction(fib(sigma - num_layers + 1), fib(sigma + 1))
        return lower, upper

    @staticmethod
    def gamma_delay_ceil(sigma: int, num_layers: int) -> Fraction:
        """Sum over c_i, i < sigma - layers, of f(c_i) * ceil((|code| - layers) / (layers - e))."""
        if num_layers >= sigma - 1 and num_layers >= 4:
            return Fraction(0)
        FibonacciModel._check_regime(sigma, num_layers)
        fib = FibonacciModel.fib
        slack = num_layers - FibonacciModel.expected_code_length(sigma)
        total = Fraction(0)
        frequencies = FibonacciModel.fibonacci_frequencies(sigma)
        for i in range(sigma - num_layers):
            length = sigma - 1 if i == 0 else sigma - i
            total += frequencies[i] * math.ceil(Fraction(length - num_layers) / slack)
        return total / fib(sigma + 1)

    @staticmethod
    def gen_fibonacci_text(sigma: int, scale: int = 1, seed: Optional[int] = None) -> List[int]:
        """
        Generates a shuffled text over symbols 0..sigma-1 with Fibonacci counts.

        Args:
            sigma (int): Alphabet size, at least 2.
            scale (int): Multiplier applied to every count.
            seed (Optional[int]): Seed of the shuffle.

        Returns:
            List[int]: Text of length scale * F_{sigma+1}.

        Raises:
            ParameterError: If sigma < 2, scale < 1 or the text would be too long.
        """
        if scale < 1:
            raise ParameterError(f"Scale must be a positive integer, got {scale}.")
        counts = np.array(FibonacciModel.fibonacci_frequencies(sigma), dtype=np.int64) * scale
        length = scale * FibonacciModel.fib(sigma + 1)
        if length > MAX_GENERATED_LENGTH:
            raise ParameterError(f"Generated text of {length} symbols exceeds {MAX_GENERATED_LENGTH}.")

        logging.info(f"Generating Fibonacci text with sigma={sigma}, length {length}...")
        text = np.repeat(np.arange(sigma), counts)
        np.random.default_rng(seed).shuffle(text)
        return text.tolist()
