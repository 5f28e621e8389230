import logging
import math
from typing import Iterable, List, Optional, Sequence, Tuple

from .errors import ParameterError
from .gamma_encoder import GammaEncoder
from .huffman import CodeTable, FrequencyTable, Symbol
from .sfdc_encoder import DelayStats, SfdcEncoder

DEFAULT_DELAY_BOUND = 1.0
VARIANTS = ("standard", "gamma")


class LayerCalculator:
    @staticmethod
    def calculate(codes: CodeTable, freq: FrequencyTable) -> int:
        """
        Calculates the default layer count from the mean code length.

        Args:
            codes (CodeTable): The code used for the text.
            freq (FrequencyTable): Symbol counts of the text.

        Returns:
            int: ceil(mean code length), at least 2; the count with the fewest idle bits.
        """
        logging.info("Calculating default layer count...")
        mean_length = codes.average_length(freq)
        num_layers = max(2, math.ceil(mean_length))
        logging.info(f"Mean code length {float(mean_length):.4f}, using {num_layers} layers")
        return num_layers

    @staticmethod
    def compute_delay(
        variant: str, y: Sequence[Symbol], codes: CodeTable, num_layers: int
    ) -> DelayStats:
        if variant == "standard":
            return SfdcEncoder.compute_delay(y, codes, num_layers)
        if variant == "gamma":
            return GammaEncoder.gamma_compute_delay(y, codes, num_layers)
        raise ParameterError(f"Unknown variant {variant!r}; expected one of {VARIANTS}.")

    @staticmethod
    def delay_sweep(
        y: Sequence[Symbol],
        codes: CodeTable,
        lambdas: Iterable[int],
        variants: Iterable[str] = VARIANTS,
    ) -> List[Tuple[str, int, DelayStats]]:
        rows = []
        for num_layers in lambdas:
            for variant in variants:
                stats = LayerCalculator.compute_delay(variant, y, codes, num_layers)
                rows.append((variant, num_layers, stats))
        return rows

    @staticmethod
    def calculate_for_bound(
        y: Sequence[Symbol],
        codes: CodeTable,
        bound: float = DEFAULT_DELAY_BOUND,
        variant: str = "standard",
    ) -> Optional[int]:
        """
        Finds the fewest layers whose mean decoding delay stays below a bound.

        The search raises the layer count one at a time and stops at the count
        where no code overflows (delay 0), so it always terminates.

        Returns:
            Optional[int]: The minimal layer count, or None if bound <= 0.
        """
        if bound <= 0:
            return None

        # Standard keeps one slot per column for overflow, gamma keeps all of them
        last = codes.max_len + 1 if variant == "standard" else codes.max_len
        for num_layers in range(2, max(2, last) + 1):
            stats = LayerCalculator.compute_delay(variant, y, codes, num_layers)
            if stats.mean_delay < bound:
                logging.info(
                    f"{variant} delay {stats.mean_delay:.4f} below {bound} with {num_layers} layers"
                )
                return num_layers
        return max(2, last)
