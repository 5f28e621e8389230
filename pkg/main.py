#! /usr/bin/env python3
import argparse
import io
import logging
import sys
from typing import List, Optional, Sequence

import numpy as np

from lib.bench_runner import BenchRunner, timer
from lib.container_io import MODES, ContainerIO
from lib.errors import MismatchError, ParameterError, SfdcError, VariantError
from lib.fibonacci_model import FibonacciModel
from lib.gamma_encoder import GammaEncoder
from lib.huffman import HuffmanCoder
from lib.layer_calculator import DEFAULT_DELAY_BOUND, VARIANTS, LayerCalculator
from lib.sfdc_encoder import SfdcEncoder
from lib.skip_search import MAX_Q, SkipSearch


def setup_logging():
    """Configures logging for the application."""
    logging.basicConfig(
        format="%(asctime)s - %(levelname)s - %(message)s", level=logging.INFO
    )


def validate_layers(value):
    ivalue = int(value)
    if ivalue < 2:
        raise argparse.ArgumentTypeError(
            f"{value} is an invalid layer count. Must be at least 2."
        )
    return ivalue


def parse_int_list(value) -> List[int]:
    """Parses "5,6,8" or an inclusive range "5..8"."""
    try:
        if ".." in value:
            low, high = value.split("..", 1)
            return list(range(int(low), int(high) + 1))
        return [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{value} is not a list (5,6,8) or range (5..8).")


def parse_arguments(argv: Optional[Sequence[str]] = None):
    """Parses command-line arguments."""
    parser = argparse.ArgumentParser(
        description="Layered variable-length encodings with direct access and blind search."
    )
    parser.add_argument("--seed", type=int, default=0, help="Seed for every random choice. Default: 0.")
    parser.add_argument(
        "--threads", type=int, default=1, help="Workers for partitioned search probing. Default: 1."
    )
    parser.add_argument("--quiet", action="store_true", help="Only log warnings and errors.")
    commands = parser.add_subparsers(dest="command", required=True)

    encode = commands.add_parser("encode", help="Encode a text file into a container.")
    encode.add_argument("input", type=str, help="Path to the input text.")
    encode.add_argument("output", type=str, help="Path to write the container.")
    encode.add_argument(
        "--lambda",
        dest="num_layers",
        type=validate_layers,
        default=None,
        help="Layer count. Default: ceil(mean code length).",
    )
    encode.add_argument("--variant", choices=VARIANTS, default="standard")
    encode.add_argument("--mode", choices=MODES, default="bytes", help="How the input is read.")

    decode = commands.add_parser("decode", help="Decode a whole container.")
    decode.add_argument("container", type=str)
    decode.add_argument("output", type=str)
    decode.add_argument(
        "--mode",
        choices=MODES,
        default="bytes",
        help="Output form; pass the mode the text was encoded with. Default: bytes.",
    )

    access = commands.add_parser("access", help="Decode one symbol and report its delay.")
    access.add_argument("container", type=str)
    access.add_argument("index", type=int)
    access.add_argument("--mode", choices=MODES, default="bytes", help="How the symbol is printed.")

    window = commands.add_parser("window", help="Decode symbols i..j.")
    window.add_argument("container", type=str)
    window.add_argument("first", type=int)
    window.add_argument("last", type=int)
    window.add_argument("--mode", choices=MODES, default="bytes", help="How the symbols are printed.")

    delay = commands.add_parser("delay", help="Simulate mean decoding delay over layer counts.")
    delay.add_argument("input", type=str)
    delay.add_argument("--lambda-range", dest="lambdas", type=parse_int_list, default=parse_int_list("2..8"))
    delay.add_argument("--variant", choices=VARIANTS + ("both",), default="both")
    delay.add_argument(
        "--bound",
        type=float,
        default=DEFAULT_DELAY_BOUND,
        help=f"Delay bound for the minimal layer count. Default: {DEFAULT_DELAY_BOUND}.",
    )
    delay.add_argument("--mode", choices=MODES, default="bytes")

    fibgen = commands.add_parser("fibgen", help="Generate a text with Fibonacci symbol counts.")
    fibgen.add_argument("output", type=str)
    fibgen.add_argument("--sigma", type=int, required=True)
    fibgen.add_argument("--scale", type=int, default=1)
    fibgen.add_argument("--mode", choices=("bytes", "ints"), default="bytes")

    search = commands.add_parser("search", help="Find a pattern in a standard container.")
    search.add_argument("container", type=str)
    pattern = search.add_mutually_exclusive_group(required=True)
    pattern.add_argument("--pattern", type=str, help="Literal pattern.")
    pattern.add_argument("--pattern-file", type=str, help="File holding the pattern.")
    search.add_argument("--q", type=int, default=None, help="Probe block width. Default: min(8, m).")
    search.add_argument("--baseline", action="store_true", help="Cross-check with plain skip search.")
    search.add_argument("--mode", choices=MODES, default="bytes", help="How the pattern is read.")

    theory = commands.add_parser("theory", help="Print closed-form Fibonacci predictions.")
    theory.add_argument("--sigma", type=int, nargs="+", required=True)
    theory.add_argument("--lambda", dest="lambdas", type=int, nargs="+", required=True)

    bench = commands.add_parser("bench", help="Run encode, access and search sweeps over a corpus.")
    bench.add_argument("corpus", type=str, help="Directory of corpus files.")
    bench.add_argument("--lambdas", type=parse_int_list, default=parse_int_list("4,6,8"))
    bench.add_argument("--pattern-lengths", type=parse_int_list, default=parse_int_list("16,64"))
    bench.add_argument("--accesses", type=int, default=1000)
    bench.add_argument("--csv", type=str, default=None, help="Path of the CSV report. Default: stdout.")
    bench.add_argument("--mode", choices=MODES, default="bytes")

    return parser.parse_args(argv)


def validate_arguments(args):
    """Validates the parsed arguments."""
    if args.threads < 1:
        raise ParameterError("Number of threads must be at least 1.")
    if args.command == "delay":
        if not args.lambdas or min(args.lambdas) < 2:
            raise ParameterError("Layer counts must be at least 2.")
        if args.bound <= 0:
            raise ParameterError("Delay bound must be positive.")
    if args.command == "fibgen":
        if args.sigma < 2:
            raise ParameterError("Alphabet size must be at least 2.")
        if args.mode == "bytes" and args.sigma > 256:
            raise ParameterError("Bytes output holds at most 256 symbols; use --mode ints.")
    if args.command == "search" and args.q is not None and not 1 <= args.q <= MAX_Q:
        raise ParameterError(f"Block width must be in [1, {MAX_Q}].")
    if args.command == "bench":
        if not args.lambdas or min(args.lambdas) < 2:
            raise ParameterError("Layer counts must be at least 2.")
        if args.accesses < 0:
            raise ParameterError("Access count must be non-negative.")


def format_symbols(symbols: Sequence, mode: str = "bytes") -> str:
    """Containers hold code points; utf8 prints them as characters, other modes as integers."""
    if mode == "utf8":
        try:
            return "".join(chr(c) for c in symbols)
        except ValueError:
            raise ParameterError("Symbols beyond U+10FFFF cannot be printed as characters.") from None
    return " ".join(str(c) for c in symbols)


def pattern_symbols(args) -> List[int]:
    if args.pattern_file is not None:
        x = ContainerIO.ingest_text(args.pattern_file, args.mode)
    elif args.mode == "utf8":
        x = list(args.pattern)
    elif args.mode == "bytes":
        x = list(args.pattern.encode("utf-8"))
    else:
        lines = "\n".join(args.pattern.split()).encode("utf-8")
        x = ContainerIO.ingest_text(io.BytesIO(lines), "ints")
    return [ord(c) if isinstance(c, str) else c for c in x]


def _is_standard(cont) -> bool:
    return cont.variant == "standard"


def cmd_encode(args) -> int:
    y = ContainerIO.ingest_text(args.input, args.mode)
    freq = HuffmanCoder.count_frequencies(y)
    codes = HuffmanCoder.build_code_table(freq)
    num_layers = args.num_layers or LayerCalculator.calculate(codes, freq)

    if args.variant == "standard":
        cont = SfdcEncoder.encode(y, codes, num_layers)
    else:
        cont = GammaEncoder.gamma_encode(y, codes, num_layers)
    stats = LayerCalculator.compute_delay(args.variant, y, codes, num_layers)
    size = ContainerIO.save(cont, args.output)
    profile = HuffmanCoder.profile(y, codes)

    print(f"n: {cont.n}")
    print(f"lambda: {num_layers}")
    print(f"variant: {args.variant}")
    print(f"sigma: {profile.sigma}")
    print(f"max code length: {profile.max_code_length}")
    print(f"mean code length: {profile.mean_code_length:.4f}")
    print(f"layer bits: {stats.layer_bits}")
    print(f"bits/symbol: {stats.bits_per_char:.4f}")
    print(f"idle bits/symbol: {stats.idle_bits_per_char:.4f}")
    print(f"mean delay: {stats.mean_delay:.4f}")
    print(f"file bytes: {size}")
    return 0


def cmd_decode(args) -> int:
    cont = ContainerIO.load(args.container)
    if _is_standard(cont):
        symbols = SfdcEncoder.decode_window(cont, 0, cont.n - 1)
    else:
        symbols = GammaEncoder.gamma_decode_window(cont, 0, cont.n - 1)
    written = ContainerIO.write_text(symbols, args.output, args.mode)
    logging.info(f"Decoded {cont.n} symbols ({written} bytes) to {args.output}")
    return 0


def cmd_access(args) -> int:
    cont = ContainerIO.load(args.container)
    if _is_standard(cont):
        symbol, delay = SfdcEncoder.access(cont, args.index)
    else:
        symbol, delay = GammaEncoder.gamma_access(cont, args.index)
    print(f"{format_symbols([symbol], args.mode)} {delay}")
    return 0


def cmd_window(args) -> int:
    cont = ContainerIO.load(args.container)
    if _is_standard(cont):
        symbols = SfdcEncoder.decode_window(cont, args.first, args.last)
    else:
        symbols = GammaEncoder.gamma_decode_window(cont, args.first, args.last)
    print(format_symbols(symbols, args.mode))
    return 0


def cmd_delay(args) -> int:
    y = ContainerIO.ingest_text(args.input, args.mode)
    codes = HuffmanCoder.build_code_table(HuffmanCoder.count_frequencies(y))
    variants = VARIANTS if args.variant == "both" else (args.variant,)

    print("variant\tlambda\tmean_delay\tbits_per_symbol")
    for variant, num_layers, stats in LayerCalculator.delay_sweep(y, codes, args.lambdas, variants):
        print(f"{variant}\t{num_layers}\t{stats.mean_delay:.4f}\t{stats.bits_per_char:.4f}")
    for variant in variants:
        minimal = LayerCalculator.calculate_for_bound(y, codes, args.bound, variant)
        print(f"minimal {variant} lambda for delay < {args.bound}: {minimal}")
    return 0


def cmd_fibgen(args) -> int:
    y = FibonacciModel.gen_fibonacci_text(args.sigma, args.scale, args.seed)
    ContainerIO.write_text(y, args.output, args.mode)
    counts = np.bincount(y, minlength=args.sigma)
    print(f"length: {len(y)}")
    print(f"counts: {','.join(str(c) for c in counts.tolist())}")
    return 0


def cmd_search(args) -> int:
    cont = ContainerIO.load(args.container)
    x = pattern_symbols(args)

    if not _is_standard(cont):
        raise VariantError("Blind search needs a standard container, got gamma.")
    pattern = SkipSearch.compile_pattern(x, cont.codes, cont.num_layers)
    if pattern is None:
        positions, seconds = [], 0.0
    else:
        positions, seconds = timer(
            lambda: SkipSearch.skip_search(cont, pattern, args.q, args.threads)
        )

    print(f"positions: {' '.join(str(p) for p in positions)}")
    print(f"occurrences: {len(positions)}")

    if args.baseline:
        y = SfdcEncoder.decode_window(cont, 0, cont.n - 1)
        plain, plain_seconds = timer(lambda: SkipSearch.plain_skip_search(y, x))
        if plain != positions:
            raise MismatchError(
                f"Plain skip search found {len(plain)} occurrences, encoded search {len(positions)}."
            )
        if seconds:
            print(f"encoded throughput: {cont.n / seconds:.0f} bytes/sec")
        print(f"plain throughput: {cont.n / plain_seconds:.0f} bytes/sec")
    return 0


def _theory_cell(fn, *params) -> str:
    try:
        value = fn(*params)
    except ParameterError:
        return "-"
    return f"{float(value):.2f}"


def cmd_theory(args) -> int:
    print("sigma\tlambda\tcode_length\tidle_bits\tdelay\tgamma_lower\tgamma_upper\tgamma_ceil")
    for sigma in args.sigma:
        for num_layers in args.lambdas:
            try:
                low, high = FibonacciModel.gamma_delay_bounds(sigma, num_layers)
                lower, upper = f"{float(low):.2f}", f"{float(high):.2f}"
            except ParameterError:
                lower = upper = "-"
            cells = [
                _theory_cell(FibonacciModel.expected_code_length, sigma),
                _theory_cell(FibonacciModel.expected_idle_bits, sigma, num_layers),
                _theory_cell(FibonacciModel.expected_delay_standard, sigma, num_layers),
                lower,
                upper,
                _theory_cell(FibonacciModel.gamma_delay_ceil, sigma, num_layers),
            ]
            print("\t".join([str(sigma), str(num_layers)] + cells))
    return 0


def cmd_bench(args) -> int:
    runner = BenchRunner(
        args.corpus,
        args.lambdas,
        args.pattern_lengths,
        seed=args.seed,
        mode=args.mode,
        accesses=args.accesses,
        num_threads=args.threads,
    )
    report = runner.run()
    if args.csv:
        report.save(args.csv)
    else:
        report.write_csv(sys.stdout)
    return 0


COMMANDS = {
    "encode": cmd_encode,
    "decode": cmd_decode,
    "access": cmd_access,
    "window": cmd_window,
    "delay": cmd_delay,
    "fibgen": cmd_fibgen,
    "search": cmd_search,
    "theory": cmd_theory,
    "bench": cmd_bench,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Runs one subcommand and returns its exit status."""
    setup_logging()
    args = parse_arguments(argv)
    if args.quiet:
        logging.getLogger().setLevel(logging.WARNING)

    try:
        validate_arguments(args)
        return COMMANDS[args.command](args)
    except (SfdcError, OSError) as e:
        print(f"sfdc-error[{getattr(e, 'kind', 'io')}]: {e}", file=sys.stderr)
        return 1


def run_tests():
    """Run all unit tests."""
    import pytest

    return pytest.main(["-v", "tests"])


if __name__ == "__main__":
    if len(sys.argv) > 1 and sys.argv[1] == "--test":
        sys.exit(run_tests())
    else:
        sys.exit(main())
