import csv
import logging
import os
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable, List, Optional, Sequence, TextIO, Tuple, TypeVar, Union

import numpy as np

from .container_io import ContainerIO
from .errors import MismatchError, ParameterError
from .gamma_encoder import GammaEncoder
from .huffman import CodeTable, HuffmanCoder, Symbol
from .layer_calculator import LayerCalculator
from .sfdc_encoder import SfdcEncoder
from .skip_search import SkipSearch

T = TypeVar("T")

DEFAULT_ACCESSES = 1000
TIMING_FIELDS = ("seconds", "throughput_bytes_per_sec", "speedup")


def timer(fn: Callable[[], T]) -> Tuple[T, float]:
    """Runs fn() once and returns its result with the elapsed wall time."""
    start = time.perf_counter()
    result = fn()
    return result, max(time.perf_counter() - start, 1e-9)


@dataclass
class BenchRow:
    operation: str
    corpus: str
    variant: str
    num_layers: int
    pattern_length: int = 0
    n: int = 0
    bits_per_symbol: float = 0.0
    mean_delay: float = 0.0
    occurrences: Optional[int] = None
    seed: int = 0
    seconds: float = 0.0
    throughput_bytes_per_sec: float = 0.0
    speedup: Optional[float] = None


@dataclass
class BenchReport:
    rows: List[BenchRow] = field(default_factory=list)

    @staticmethod
    def columns() -> List[str]:
        return [f.name for f in fields(BenchRow)]

    def write_csv(self, sink: TextIO):
        writer = csv.DictWriter(sink, fieldnames=self.columns())
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: ("" if v is None else v) for k, v in asdict(row).items()})

    def save(self, path: Union[str, os.PathLike]):
        with open(path, "w", newline="", encoding="utf-8") as sink:
            self.write_csv(sink)
        logging.info(f"Bench report with {len(self.rows)} rows saved to {path}")

    def without_timings(self) -> List[dict]:
        """Rows minus wall-clock columns; equal across reruns with the same seed."""
        return [
            {k: v for k, v in asdict(row).items() if k not in TIMING_FIELDS}
            for row in self.rows
        ]


class BenchRunner:
    def __init__(
        self,
        corpus_dir: Union[str, os.PathLike],
        lambdas: Sequence[int],
        pattern_lengths: Sequence[int] = (),
        seed: int = 0,
        mode: str = "bytes",
        accesses: int = DEFAULT_ACCESSES,
        num_threads: int = 1,
    ):
        if not lambdas:
            raise ParameterError("At least one layer count is required.")
        if any(m < 1 for m in pattern_lengths):
            raise ParameterError("Pattern lengths must be positive.")
        self.corpus_dir = Path(corpus_dir)
        self.lambdas = list(lambdas)
        self.pattern_lengths = list(pattern_lengths)
        self.seed = seed
        self.mode = mode
        self.accesses = accesses
        self.num_threads = num_threads
        self.report = BenchReport()

    def corpus_files(self) -> List[Path]:
        if not self.corpus_dir.is_dir():
            raise ParameterError(f"Corpus directory {self.corpus_dir} does not exist.")
        return sorted(p for p in self.corpus_dir.iterdir() if p.is_file())

    def run(self) -> BenchReport:
        files = self.corpus_files()
        logging.info(f"Benchmarking {len(files)} corpus files with layers {self.lambdas}...")
        for path in files:
            y = ContainerIO.ingest_text(path, self.mode)
            if not y:
                logging.warning(f"Skipping empty corpus file {path.name}")
                continue
            codes = HuffmanCoder.build_code_table(HuffmanCoder.count_frequencies(y))
            for num_layers in self.lambdas:
                self._bench_layers(path.name, y, codes, num_layers)
        logging.info("Benchmark complete.")
        return self.report

    def _rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def _bench_layers(self, name: str, y: List[Symbol], codes: CodeTable, num_layers: int):
        n = len(y)
        positions = self._rng().permutation(n)[: self.accesses].tolist()
        procedures = {
            "standard": (SfdcEncoder.encode, SfdcEncoder.decode_window, SfdcEncoder.access),
            "gamma": (GammaEncoder.gamma_encode, GammaEncoder.gamma_decode_window, GammaEncoder.gamma_access),
        }

        standard = None
        for variant, (encode, decode_window, access) in procedures.items():
            stats = LayerCalculator.compute_delay(variant, y, codes, num_layers)
            base = dict(
                corpus=name,
                variant=variant,
                num_layers=num_layers,
                n=n,
                bits_per_symbol=stats.bits_per_char,
                mean_delay=stats.mean_delay,
                seed=self.seed,
            )

            cont, seconds = timer(lambda: encode(y, codes, num_layers))
            self._add("encode", base, seconds, n)

            decoded, seconds = timer(lambda: decode_window(cont, 0, n - 1))
            if decoded != y:
                raise MismatchError(f"{variant} decode of {name} differs from the source.")
            self._add("decode", base, seconds, n)

            _, seconds = timer(lambda: [access(cont, i) for i in positions])
            self._add("access", base, seconds, len(positions))

            if variant == "standard":
                standard = (cont, base)

        cont, base = standard
        for m in self.pattern_lengths:
            self._bench_search(y, codes, cont, base, m)

    def _bench_search(self, y, codes, cont, base, m: int):
        n = len(y)
        if m > n:
            logging.warning(f"Pattern length {m} exceeds text length {n}, skipped")
            return

        start = int(self._rng().integers(0, n - m + 1))
        x = y[start : start + m]
        pattern = SkipSearch.compile_pattern(x, codes, cont.num_layers)
        encoded, encoded_seconds = timer(
            lambda: SkipSearch.skip_search(cont, pattern, num_threads=self.num_threads)
        )
        plain, plain_seconds = timer(lambda: SkipSearch.plain_skip_search(y, x))
        if encoded != plain:
            raise MismatchError(
                f"Encoded search found {len(encoded)} occurrences, plain search {len(plain)}."
            )

        row = dict(base, pattern_length=m, occurrences=len(encoded))
        self._add("search", row, encoded_seconds, n, speedup=plain_seconds / encoded_seconds)
        self._add("plain-search", dict(row, variant="plain"), plain_seconds, n)

    def _add(self, operation: str, base: dict, seconds: float, volume: int, speedup=None):
        self.report.rows.append(
            BenchRow(
                operation=operation,
                seconds=seconds,
                throughput_bytes_per_sec=volume / seconds,
                speedup=speedup,
                **base,
            )
        )
