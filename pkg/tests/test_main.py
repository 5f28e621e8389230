import pytest

from lib.container_io import ContainerIO
from lib.sfdc_encoder import SfdcEncoder
from main import main, parse_int_list
from tests.conftest import COMPRESSION


@pytest.fixture
def compression_file(tmp_path):
    path = tmp_path / "compression.txt"
    path.write_text(COMPRESSION, encoding="utf-8")
    return path


@pytest.fixture
def compression_container(tmp_path, compression_file):
    path = tmp_path / "compression.sfdc"
    assert main(["encode", str(compression_file), str(path), "--mode", "utf8", "--lambda", "6"]) == 0
    return path


def output_lines(capsys):
    return capsys.readouterr().out.splitlines()


def test_parse_int_list():
    assert parse_int_list("5..8") == [5, 6, 7, 8]
    assert parse_int_list("5,6,8") == [5, 6, 8]


def test_encode(tmp_path, compression_file, capsys):
    output = tmp_path / "out.sfdc"
    assert main(["encode", str(compression_file), str(output), "--mode", "utf8", "--lambda", "6"]) == 0
    lines = output_lines(capsys)
    assert "n: 11" in lines
    assert "lambda: 6" in lines
    assert "variant: standard" in lines
    assert "sigma: 9" in lines
    assert f"file bytes: {output.stat().st_size}" in lines


def test_encode_picks_default_layers(tmp_path, compression_file, capsys):
    output = tmp_path / "out.sfdc"
    assert main(["encode", str(compression_file), str(output), "--mode", "utf8", "--variant", "gamma"]) == 0
    lines = output_lines(capsys)
    assert "lambda: 4" in lines
    assert "variant: gamma" in lines


def test_encode_rejects_one_layer(tmp_path, compression_file):
    with pytest.raises(SystemExit) as exc_info:
        main(["encode", str(compression_file), str(tmp_path / "out.sfdc"), "--lambda", "1"])
    assert exc_info.value.code == 2


def test_decode_roundtrip(tmp_path):
    source = tmp_path / "source.bin"
    source.write_bytes(bytes(range(256)) * 3 + b"layers")
    container = tmp_path / "source.sfdc"
    restored = tmp_path / "restored.bin"
    assert main(["encode", str(source), str(container), "--lambda", "3"]) == 0
    assert main(["decode", str(container), str(restored)]) == 0
    assert restored.read_bytes() == source.read_bytes()


def test_decode_characters(tmp_path, compression_container):
    restored = tmp_path / "restored.txt"
    assert main(["decode", str(compression_container), str(restored), "--mode", "utf8"]) == 0
    assert restored.read_text(encoding="utf-8") == COMPRESSION


def test_access(compression_container, capsys):
    capsys.readouterr()
    symbol, delay = SfdcEncoder.access(ContainerIO.load(compression_container), 0)
    assert main(["access", str(compression_container), "0", "--mode", "utf8"]) == 0
    assert output_lines(capsys) == [f"C {delay}"]
    assert symbol == ord("C")

    assert main(["access", str(compression_container), "0"]) == 0
    assert output_lines(capsys) == [f"67 {delay}"]


def test_access_out_of_range(compression_container, capsys):
    assert main(["access", str(compression_container), "11"]) == 1
    assert "sfdc-error[range]" in capsys.readouterr().err


def test_window(compression_container, capsys):
    capsys.readouterr()
    assert main(["window", str(compression_container), "8", "10", "--mode", "utf8"]) == 0
    assert output_lines(capsys) == ["ion"]
    assert main(["window", str(compression_container), "8", "10"]) == 0
    assert output_lines(capsys) == ["105 111 110"]


def test_search(compression_container, capsys):
    capsys.readouterr()
    assert main(["search", str(compression_container), "--pattern", "s", "--mode", "utf8", "--baseline"]) == 0
    lines = output_lines(capsys)
    assert "positions: 6 7" in lines
    assert "occurrences: 2" in lines


def test_search_absent_pattern(compression_container, capsys):
    capsys.readouterr()
    assert main(["search", str(compression_container), "--pattern", "xyz"]) == 0
    assert "occurrences: 0" in output_lines(capsys)


def test_search_gamma_container(tmp_path, compression_file, capsys):
    container = tmp_path / "gamma.sfdc"
    main(["encode", str(compression_file), str(container), "--mode", "utf8", "--variant", "gamma"])
    assert main(["search", str(container), "--pattern", "s"]) == 1
    assert "sfdc-error[variant]" in capsys.readouterr().err


def test_missing_container(tmp_path, capsys):
    assert main(["access", str(tmp_path / "missing.sfdc"), "0"]) == 1
    assert "sfdc-error[io]" in capsys.readouterr().err


def test_corrupt_container(tmp_path, capsys):
    path = tmp_path / "corrupt.sfdc"
    path.write_bytes(b"NOPE" + bytes(40))
    assert main(["window", str(path), "0", "1"]) == 1
    assert "sfdc-error[format]: Bad magic" in capsys.readouterr().err


def test_theory(capsys):
    assert main(["theory", "--sigma", "10", "--lambda", "5", "3"]) == 0
    lines = output_lines(capsys)
    assert lines[0].split("\t")[:3] == ["sigma", "lambda", "code_length"]
    assert lines[1] == "10\t5\t2.58\t2.42\t0.20\t0.08\t0.17\t0.12"
    assert lines[2] == "10\t3\t2.58\t0.42\t-\t-\t-\t-"


def test_fibgen(tmp_path, capsys):
    output = tmp_path / "fib.txt"
    assert main(["--seed", "3", "fibgen", str(output), "--sigma", "10"]) == 0
    lines = output_lines(capsys)
    assert lines == ["length: 89", "counts: 1,1,1,2,3,5,8,13,21,34"]
    assert len(output.read_bytes()) == 89


def test_fibgen_rejects_small_alphabet(tmp_path, capsys):
    assert main(["fibgen", str(tmp_path / "fib.txt"), "--sigma", "1"]) == 1
    assert "sfdc-error[parameter]" in capsys.readouterr().err


def test_delay(compression_file, capsys):
    assert main(["delay", str(compression_file), "--mode", "utf8", "--lambda-range", "2..4"]) == 0
    lines = output_lines(capsys)
    assert lines[0] == "variant\tlambda\tmean_delay\tbits_per_symbol"
    assert len(lines) == 1 + 6 + 2
    assert lines[-2].startswith("minimal standard lambda for delay < 1.0: ")
    assert lines[-1].startswith("minimal gamma lambda for delay < 1.0: ")


def test_bench(tmp_path, capsys):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    (corpus / "text.txt").write_bytes(b"abracadabra arbadacarba " * 8)
    assert main(["bench", str(corpus), "--lambdas", "3", "--pattern-lengths", "4", "--accesses", "10"]) == 0
    lines = output_lines(capsys)
    assert lines[0].startswith("operation,corpus,variant,num_layers")
    assert len(lines) == 1 + 8


def test_decode_needs_utf8_mode_for_wide_characters(tmp_path, capsys):
    source = tmp_path / "greek.txt"
    source.write_text("λόγος λέξη", encoding="utf-8")
    container = tmp_path / "greek.sfdc"
    assert main(["encode", str(source), str(container), "--mode", "utf8"]) == 0
    capsys.readouterr()

    assert main(["decode", str(container), str(tmp_path / "raw.bin")]) == 1
    assert "sfdc-error[parameter]" in capsys.readouterr().err
    restored = tmp_path / "greek.out"
    assert main(["decode", str(container), str(restored), "--mode", "utf8"]) == 0
    assert restored.read_text(encoding="utf-8") == "λόγος λέξη"


def test_ints_container(tmp_path, capsys):
    source = tmp_path / "values.txt"
    source.write_text("".join(f"{value}\n" for value in [5, 300, 5, 7, 300, 5, 7, 70000]), encoding="ascii")
    container = tmp_path / "values.sfdc"
    assert main(["encode", str(source), str(container), "--mode", "ints", "--lambda", "2"]) == 0

    restored = tmp_path / "values.out"
    assert main(["decode", str(container), str(restored), "--mode", "ints"]) == 0
    assert restored.read_bytes() == source.read_bytes()

    capsys.readouterr()
    assert main(["search", str(container), "--pattern", "300 5", "--mode", "ints", "--baseline"]) == 0
    assert "positions: 1 4" in output_lines(capsys)


def test_failure_prints_one_line(tmp_path, capsys):
    assert main(["--quiet", "access", str(tmp_path / "missing.sfdc"), "0"]) == 1
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1
    assert err[0].startswith("sfdc-error[io]: ")
