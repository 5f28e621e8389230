import logging
import os
import struct
from contextlib import contextmanager
from dataclasses import dataclass
from typing import BinaryIO, Iterator, List, Sequence, Union

from .bit_layer import WORD_SIZE, BitLayer
from .errors import FormatError, ParameterError, ParseError
from .gamma_encoder import GammaContainer
from .huffman import CodeTable, Symbol
from .sfdc_encoder import SfdcContainer

MAGIC = b"SFDC"
FORMAT_VERSION = 1
VARIANT_CODES = {"standard": 0, "gamma": 1}
MODES = ("bytes", "utf8", "ints")
DEFAULT_CHUNK_SIZE = 1 << 20

HEADER = struct.Struct("<4sBBBQQI")
RECORD = struct.Struct("<IB")

Container = Union[SfdcContainer, GammaContainer]
Source = Union[str, os.PathLike, BinaryIO]


def _padded_bytes(len_bits: int) -> int:
    return (len_bits + WORD_SIZE - 1) // WORD_SIZE * 8


def _code_point(symbol: Symbol) -> int:
    """Characters are stored as their code points; integers as themselves."""
    point = ord(symbol) if isinstance(symbol, str) and len(symbol) == 1 else symbol
    if isinstance(point, bool) or not isinstance(point, int) or not 0 <= point < 1 << 32:
        raise ParameterError(f"Symbol {symbol!r} cannot be stored as a 32-bit code point.")
    return point


@contextmanager
def _opened(target: Source, mode: str) -> Iterator[BinaryIO]:
    """Opens a path for the duration of the block; streams pass through untouched."""
    if isinstance(target, (str, os.PathLike)):
        with open(target, mode) as stream:
            yield stream
    else:
        yield target


@dataclass(frozen=True)
class ContainerHeader:
    variant: str
    num_layers: int
    n: int
    n_second: int
    sigma: int

    @property
    def layer_lengths(self) -> List[int]:
        if self.variant == "standard":
            return [self.n] * (self.num_layers - 1) + [self.n_second]
        return [self.n_second] * self.num_layers

    @property
    def layer_names(self) -> List[str]:
        if self.variant == "standard":
            return [f"fixed {h}" for h in range(self.num_layers - 1)] + ["dynamic"]
        return [f"layer {h}" for h in range(self.num_layers)]

    @property
    def payload_bytes(self) -> int:
        return sum(_padded_bytes(bits) for bits in self.layer_lengths)

    @property
    def predicted_size(self) -> int:
        return HEADER.size + RECORD.size * self.sigma + self.payload_bytes

    @property
    def bits_per_symbol(self) -> float:
        return sum(self.layer_lengths) / self.n


class ContainerIO:
    @staticmethod
    def serialize(cont: Container, sink: BinaryIO) -> int:
        """
        Writes a container in the SFDC file layout.

        Args:
            cont (Container): Standard or gamma container.
            sink (BinaryIO): Writable binary stream.

        Returns:
            int: Number of bytes written.

        Raises:
            ParameterError: If a symbol is not a 32-bit code point, or the code table
                is not the canonical code its lengths rebuild on load.
        """
        symbols = cont.codes.order
        points = [_code_point(c) for c in symbols]
        lengths = [cont.codes.lengths[c] for c in symbols]
        try:
            rebuilt = CodeTable.from_lengths(list(zip(points, lengths)))
        except ParameterError as e:
            raise ParameterError(f"Code table cannot be stored: {e}") from None
        for point, c in zip(points, symbols):
            if rebuilt.codes[point] != cont.codes.codes[c]:
                raise ParameterError(
                    f"Code table is not canonical: {c!r} has {cont.codes.codes[c]!r}, "
                    f"the stored lengths rebuild {rebuilt.codes[point]!r}."
                )

        n_second = cont.n_dyn if cont.variant == "standard" else cont.n_gamma
        variant_byte = VARIANT_CODES[cont.variant]
        chunks = [
            HEADER.pack(MAGIC, FORMAT_VERSION, variant_byte, cont.num_layers, cont.n, n_second, len(symbols))
        ]
        chunks.extend(RECORD.pack(point, length) for point, length in zip(points, lengths))
        chunks.extend(layer.to_bytes() for layer in cont.layers)

        written = 0
        for chunk in chunks:
            sink.write(chunk)
            written += len(chunk)
        logging.info(f"Serialized {cont.variant} container: {written} bytes")
        return written

    @staticmethod
    def _read_exact(source: BinaryIO, size: int, offset: int, what: str) -> bytes:
        data = source.read(size)
        if len(data) != size:
            raise FormatError(f"Truncated {what}: expected {size} bytes, got {len(data)}", offset)
        return data

    @staticmethod
    def read_header(source: BinaryIO) -> ContainerHeader:
        raw = ContainerIO._read_exact(source, HEADER.size, 0, "header")
        magic, version, variant_byte, num_layers, n, n_second, sigma = HEADER.unpack(raw)

        if magic != MAGIC:
            raise FormatError(f"Bad magic {magic!r}", 0)
        if version != FORMAT_VERSION:
            raise FormatError(f"Unsupported format version {version}", 4)
        variants = {code: name for name, code in VARIANT_CODES.items()}
        if variant_byte not in variants:
            raise FormatError(f"Unknown variant {variant_byte}", 5)
        if num_layers < 2:
            raise FormatError(f"Layer count {num_layers} below 2", 6)
        if n < 1:
            raise FormatError("Empty text", 7)
        if n_second < n:
            raise FormatError(f"Layer length {n_second} shorter than text length {n}", 15)
        if sigma < 1:
            raise FormatError("Empty code table", 23)

        return ContainerHeader(
            variant=variants[variant_byte],
            num_layers=num_layers,
            n=n,
            n_second=n_second,
            sigma=sigma,
        )

    @staticmethod
    def deserialize(source: BinaryIO) -> Container:
        """
        Reads a container written by serialize.

        Raises:
            FormatError: On bad magic, version or variant, on an invalid code table,
            or on truncation; the message names the offset and, for payloads, the layer.
        """
        header = ContainerIO.read_header(source)
        offset = HEADER.size

        raw = ContainerIO._read_exact(source, RECORD.size * header.sigma, offset, "code table")
        records = list(RECORD.iter_unpack(raw))
        try:
            codes = CodeTable.from_lengths(records)
        except (ParameterError, ValueError) as e:
            raise FormatError(f"Invalid code table: {e}", offset) from None
        offset += len(raw)

        layers = []
        for name, bits in zip(header.layer_names, header.layer_lengths):
            size = _padded_bytes(bits)
            data = ContainerIO._read_exact(source, size, offset, f"payload of {name} layer")
            layers.append(BitLayer.from_bytes(data, bits).freeze())
            offset += size

        logging.info(
            f"Loaded {header.variant} container: n={header.n}, layers={header.num_layers}, sigma={header.sigma}"
        )
        if header.variant == "standard":
            return SfdcContainer(header.num_layers, header.n, layers[:-1], layers[-1], codes)
        return GammaContainer(header.num_layers, header.n, layers, codes)

    @staticmethod
    def save(cont: Container, path: Union[str, os.PathLike]) -> int:
        with _opened(path, "wb") as sink:
            return ContainerIO.serialize(cont, sink)

    @staticmethod
    def load(path: Union[str, os.PathLike]) -> Container:
        with _opened(path, "rb") as source:
            return ContainerIO.deserialize(source)

    @staticmethod
    def stream_chunks(source: BinaryIO, chunk_size: int = DEFAULT_CHUNK_SIZE) -> Iterator[bytes]:
        """Stream the input in chunks to reduce memory usage."""
        while True:
            chunk = source.read(chunk_size)
            if not chunk:
                return
            yield chunk

    @staticmethod
    def ingest_text(
        source: Source, mode: str = "bytes", chunk_size: int = DEFAULT_CHUNK_SIZE
    ) -> List[Symbol]:
        """
        Reads a text as a symbol sequence.

        Args:
            source (Source): Path or binary stream.
            mode (str): "bytes" (one symbol per byte), "utf8" (one character per
                code point) or "ints" (one non-negative integer per line).
            chunk_size (int): Read size for streamed input.

        Returns:
            List[Symbol]: The symbols.

        Raises:
            ParseError: On invalid UTF-8 or a malformed integer line.
        """
        if mode not in MODES:
            raise ParameterError(f"Unknown input mode {mode!r}; expected one of {MODES}.")

        with _opened(source, "rb") as stream:
            if mode == "bytes":
                symbols: List[Symbol] = []
                for chunk in ContainerIO.stream_chunks(stream, chunk_size):
                    symbols.extend(chunk)
            elif mode == "utf8":
                data = b"".join(ContainerIO.stream_chunks(stream, chunk_size))
                try:
                    symbols = list(data.decode("utf-8"))
                except UnicodeDecodeError as e:
                    raise ParseError(f"Invalid UTF-8 at byte {e.start}") from None
            else:
                symbols = ContainerIO._parse_int_lines(stream)

        logging.info(f"Ingested {len(symbols)} symbols ({mode} mode)")
        return symbols

    @staticmethod
    def _parse_int_lines(stream: BinaryIO) -> List[int]:
        values = []
        for number, line in enumerate(stream, start=1):
            token = line.strip()
            if not token.isdigit():
                raise ParseError(f"Expected a non-negative integer, got {token[:32]!r}", number)
            value = int(token)
            if value >= 1 << 32:
                raise ParseError(f"Integer {value} does not fit in 32 bits", number)
            values.append(value)
        return values

    @staticmethod
    def write_text(symbols: Sequence[Symbol], sink: Source, mode: str = "bytes") -> int:
        """Writes symbols back in an ingestion mode; returns the byte count."""
        if mode not in MODES:
            raise ParameterError(f"Unknown output mode {mode!r}; expected one of {MODES}.")
        if mode == "bytes":
            try:
                data = bytes(symbols)
            except (TypeError, ValueError):
                raise ParameterError("Bytes output needs integer symbols below 256.") from None
        elif mode == "utf8":
            try:
                data = "".join(c if isinstance(c, str) else chr(c) for c in symbols).encode("utf-8")
            except ValueError:
                raise ParameterError("UTF-8 output needs code points up to U+10FFFF.") from None
        else:
            data = "".join(f"{c}\n" for c in symbols).encode("ascii")

        with _opened(sink, "wb") as stream:
            stream.write(data)
        return len(data)
