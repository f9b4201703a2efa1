"""CLI: subcommand behavior, exit codes, reports, determinism."""

import json
import random

import pytest

from gastego import bitplane
from gastego.cli import main
from gastego.wav_io import AudioBuffer, parse_wav, write_wav


@pytest.fixture
def workspace(tmp_path):
    rnd = random.Random(1)
    cover = AudioBuffer(
        [rnd.randint(-32768, 32767) for _ in range(20000)], 16, 44100, 1
    )
    cover_path = tmp_path / "cover.wav"
    cover_path.write_bytes(write_wav(cover))
    msg_path = tmp_path / "msg.bin"
    msg_path.write_bytes(b"meet me where the river bends\x00\x01\x02")
    return tmp_path, cover_path, msg_path


def run_embed(tmp_path, cover_path, msg_path, *extra):
    out = tmp_path / "stego.wav"
    key = tmp_path / "key.txt"
    code = main(
        [
            "embed",
            "--cover", str(cover_path),
            "--message", str(msg_path),
            "--out", str(out),
            "--key-out", str(key),
            *extra,
        ]
    )
    return code, out, key


class TestEmbedExtract:
    def test_round_trip(self, workspace, tmp_path):
        ws, cover_path, msg_path = workspace
        code, out, key = run_embed(ws, cover_path, msg_path, "--seed", "0xBEEF")
        assert code == 0
        recovered = tmp_path / "rec.bin"
        assert main(["extract", "--stego", str(out), "--key", str(key),
                     "--out", str(recovered)]) == 0
        assert recovered.read_bytes() == msg_path.read_bytes()

    def test_zero_length_message(self, workspace, capsys):
        ws, cover_path, msg_path = workspace
        empty = ws / "empty.bin"
        empty.write_bytes(b"")
        code, out, key = run_embed(ws, cover_path, empty)
        assert code == 0
        assert out.read_bytes() == cover_path.read_bytes()
        assert "samples_used: 0" in capsys.readouterr().out
        rec = ws / "rec.bin"
        assert main(["extract", "--stego", str(out), "--key", str(key),
                     "--out", str(rec)]) == 0
        assert rec.read_bytes() == b""

    def test_deterministic_given_flags(self, workspace):
        ws, cover_path, msg_path = workspace
        _, out1, key1 = run_embed(ws, cover_path, msg_path, "--seed", "7")
        stego1, keytext1 = out1.read_bytes(), key1.read_text()
        _, out2, key2 = run_embed(ws, cover_path, msg_path, "--seed", "7")
        assert out2.read_bytes() == stego1
        assert key2.read_text() == keytext1

    def test_snr_ordering_between_modes_via_report(self, workspace):
        ws, cover_path, msg_path = workspace
        reports = {}
        for mode in ("plain", "nearest"):
            rep = ws / f"report-{mode}.json"
            code, _, _ = run_embed(
                ws, cover_path, msg_path,
                "--mode", mode, "--layers", "3,5", "--seed", "5",
                "--report", str(rep),
            )
            assert code == 0
            reports[mode] = json.loads(rep.read_text())
        assert set(reports["plain"]) == {
            "samples_used", "samples_skipped", "max_deviation", "snr_db",
            "capacity_bits",
        }
        assert reports["nearest"]["snr_db"] >= reports["plain"]["snr_db"]

    def test_seed_from_message_ga(self, workspace):
        ws, cover_path, msg_path = workspace
        code, out, key = run_embed(ws, cover_path, msg_path, "--seed-from-message-ga")
        assert code == 0
        rec = ws / "rec.bin"
        assert main(["extract", "--stego", str(out), "--key", str(key),
                     "--out", str(rec)]) == 0
        assert rec.read_bytes() == msg_path.read_bytes()

    def test_random_seed_round_trips(self, workspace):
        ws, cover_path, msg_path = workspace
        code, out, key = run_embed(ws, cover_path, msg_path, "--random-seed")
        assert code == 0
        rec = ws / "rec.bin"
        assert main(["extract", "--stego", str(out), "--key", str(key),
                     "--out", str(rec)]) == 0
        assert rec.read_bytes() == msg_path.read_bytes()


class TestExitCodes:
    def test_missing_cover_file_is_io_error(self, workspace):
        ws, _cover, msg_path = workspace
        code, _, _ = run_embed(ws, ws / "nope.wav", msg_path)
        assert code == 1

    def test_capacity_error_is_2(self, workspace):
        ws, _cover, msg_path = workspace
        tiny = ws / "tiny.wav"
        tiny.write_bytes(write_wav(AudioBuffer([0] * 8, 16, 8000, 1)))
        code, _, _ = run_embed(ws, tiny, msg_path)
        assert code == 2

    def test_threshold_exhaustion_is_2(self, workspace):
        ws, _cover, msg_path = workspace
        flat = ws / "flat.wav"
        flat.write_bytes(write_wav(AudioBuffer([47] * 4000, 8, 8000, 1)))
        code, _, _ = run_embed(
            ws, flat, msg_path, "--layers", "5", "--mode", "nearest",
            "--threshold", "0",
        )
        assert code == 2

    def test_truncated_stego_is_key_mismatch_3(self, workspace):
        ws, cover_path, msg_path = workspace
        code, out, key = run_embed(ws, cover_path, msg_path)
        assert code == 0
        stego = parse_wav(out.read_bytes())
        short = AudioBuffer(stego.samples[:64], 16, stego.sample_rate, 1)
        out.write_bytes(write_wav(short))
        assert main(["extract", "--stego", str(out), "--key", str(key),
                     "--out", str(ws / "rec.bin")]) == 3

    def test_malformed_key_is_1(self, workspace):
        ws, cover_path, msg_path = workspace
        code, out, key = run_embed(ws, cover_path, msg_path)
        key.write_text(key.read_text() + "intruder = 1\n")
        assert main(["extract", "--stego", str(out), "--key", str(key),
                     "--out", str(ws / "rec.bin")]) == 1

    def test_malformed_wav_is_1(self, workspace):
        ws, cover_path, msg_path = workspace
        code, out, key = run_embed(ws, cover_path, msg_path)
        out.write_bytes(b"not a wav at all")
        assert main(["extract", "--stego", str(out), "--key", str(key),
                     "--out", str(ws / "rec.bin")]) == 1


class TestInspect:
    def test_prints_format_and_capacity(self, workspace, capsys):
        ws, cover_path, _ = workspace
        assert main(["inspect", "--wav", str(cover_path), "--layers", "1,2"]) == 0
        out = capsys.readouterr().out
        assert "bit_depth: 16" in out
        assert "samples: 20000" in out
        assert "capacity_bits: 40000" in out
        assert "capacity_bytes: 5000" in out


class TestKeygenGa:
    def test_uniform_message(self, tmp_path, capsys):
        msg = tmp_path / "m.bin"
        msg.write_bytes(b"AAAA")
        assert main(["keygen-ga", "--message", str(msg)]) == 0
        out = capsys.readouterr().out
        assert "fitness: 1" in out
        assert "generations: 0" in out

    def test_two_values_reach_optimum(self, tmp_path, capsys):
        msg = tmp_path / "m.bin"
        msg.write_bytes(b"AB")
        assert main(["keygen-ga", "--message", str(msg), "--emit-master-key"]) == 0
        out = capsys.readouterr().out
        assert "fitness: 2" in out
        assert "master_key: " in out
        key_line = [l for l in out.splitlines() if l.startswith("master_key")][0]
        assert len(key_line.split(": ")[1]) == 16

    def test_unreachable_optimum_is_2(self, tmp_path):
        msg = tmp_path / "m.bin"
        msg.write_bytes(b"AB")
        assert main(["keygen-ga", "--message", str(msg), "--genes", "1"]) == 2

    def test_empty_message_is_2(self, tmp_path):
        msg = tmp_path / "m.bin"
        msg.write_bytes(b"")
        assert main(["keygen-ga", "--message", str(msg)]) == 2


class TestOracleCheck:
    def test_default_sections_pass(self, capsys):
        # the >= 99% gate is noisy below a few hundred GA cases, so the test
        # pins a sample count and seed that represent a healthy build
        assert main(["oracle-check", "--samples", "200", "--seed", "1"]) == 0
        out = capsys.readouterr().out
        assert "nearest 8-bit: 32768/32768 (100.00% match)" in out
        assert "nearest 16-bit: 2000/2000 (100.00% match)" in out
        assert "never worse than plain: True" in out

    def test_samples_zero_skips_ga_section(self, capsys):
        assert main(["oracle-check", "--samples", "0"]) == 0
        assert "ga: skipped" in capsys.readouterr().out

    def test_fault_injection_exits_4(self, monkeypatch, capsys):
        # a corrupted adjuster must be caught as a contract violation
        monkeypatch.setattr(
            bitplane, "adjust_nearest",
            lambda sample, mask, pattern: bitplane.alter(sample, mask, pattern),
        )
        assert main(["oracle-check", "--samples", "0"]) == 4


class TestBench:
    def test_smoke(self, capsys):
        assert main(["bench", "--samples", "600", "--message-bytes", "16"]) == 0
        out = capsys.readouterr().out
        for mode in ("plain", "nearest", "ga"):
            assert f"{mode}:" in out
