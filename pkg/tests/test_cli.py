from liftcodec import cli
from liftcodec.core import read_sequence


def run(*args):
    return cli.main(list(args))


class TestSynth:
    def test_writes_sequence(self, tmp_path):
        out = tmp_path / "seq.bin"
        code = run("--mode", "synth", "--out", str(out), "--width", "32", "--height", "24",
                   "--frames", "6", "--sigma", "5", "--seed", "3")
        assert code == 0
        seq = read_sequence(out)
        assert (seq.width, seq.height, seq.T) == (32, 24, 6)

    def test_deterministic(self, tmp_path):
        a = tmp_path / "a.bin"
        b = tmp_path / "b.bin"
        for out in (a, b):
            assert run("--mode", "synth", "--out", str(out), "--sigma", "7", "--seed", "11",
                       "--width", "24", "--height", "24", "--frames", "4") == 0
        assert a.read_bytes() == b.read_bytes()

    def test_default_dimensions(self, tmp_path):
        out = tmp_path / "seq.bin"
        assert run("--mode", "synth", "--out", str(out)) == 0
        seq = read_sequence(out)
        assert (seq.width, seq.height, seq.T) == (64, 64, 16)


class TestEncodeDecode:
    def _synth(self, tmp_path, **kw):
        out = tmp_path / "in.bin"
        args = ["--mode", "synth", "--out", str(out), "--width", "32", "--height", "32",
                "--frames", "6", "--sigma", "6", "--seed", "2"]
        assert run(*args) == 0
        return out

    def test_mctf_round_trip(self, tmp_path, capsys):
        src = self._synth(tmp_path)
        stream = tmp_path / "out.wldp"
        assert run("--mode", "encode", "--in", str(src), "--out", str(stream), "--mctf") == 0
        printed = capsys.readouterr().out
        assert "decode self-check: ok" in printed
        decoded = tmp_path / "dec.bin"
        assert run("--mode", "decode", "--in", str(stream), "--out", str(decoded)) == 0
        assert read_sequence(decoded) == read_sequence(src)

    def test_fixed_xi_round_trip(self, tmp_path):
        src = self._synth(tmp_path)
        stream = tmp_path / "out.wldp"
        assert run("--mode", "encode", "--in", str(src), "--out", str(stream),
                   "--fixed-xi", "25", "--denoiser", "nlm") == 0
        decoded = tmp_path / "dec.bin"
        assert run("--mode", "decode", "--in", str(stream), "--out", str(decoded)) == 0
        assert read_sequence(decoded) == read_sequence(src)

    def test_rdo_round_trip_writes_cost_tables(self, tmp_path):
        src = self._synth(tmp_path)
        stream = tmp_path / "out.wldp"
        assert run("--mode", "encode", "--in", str(src), "--out", str(stream),
                   "--lambda-index", "2", "--xi-max", "3") == 0
        assert (tmp_path / "out.wldp.rdo.csv").exists()
        decoded = tmp_path / "dec.bin"
        assert run("--mode", "decode", "--in", str(stream), "--out", str(decoded)) == 0
        assert read_sequence(decoded) == read_sequence(src)

    def test_conflicting_modes_rejected(self, tmp_path):
        src = self._synth(tmp_path)
        code = run("--mode", "encode", "--in", str(src), "--out", str(tmp_path / "x"),
                   "--mctf", "--fixed-xi", "3")
        assert code == 1

    def test_corrupted_stream_fails_decode(self, tmp_path):
        src = self._synth(tmp_path)
        stream = tmp_path / "out.wldp"
        assert run("--mode", "encode", "--in", str(src), "--out", str(stream), "--mctf") == 0
        data = bytearray(stream.read_bytes())
        data[60] ^= 0xFF
        stream.write_bytes(bytes(data))
        assert run("--mode", "decode", "--in", str(stream), "--out", str(tmp_path / "d.bin")) == 1

    def test_missing_input_fails(self, tmp_path):
        assert run("--mode", "encode", "--in", str(tmp_path / "nope.bin"),
                   "--out", str(tmp_path / "x"), "--mctf") == 1


class TestSweep:
    def test_sweep_outputs(self, tmp_path, capsys):
        src = tmp_path / "in.bin"
        assert run("--mode", "synth", "--out", str(src), "--width", "24", "--height", "24",
                   "--frames", "4", "--sigma", "8", "--corr-radius", "1",
                   "--texture-amp", "120", "--seed", "5") == 0
        prefix = str(tmp_path / "sweep")
        assert run("--mode", "sweep", "--in", str(src), "--out", prefix,
                   "--xi-stride", "25", "--xi-max", "2") == 0
        rd = (tmp_path / "sweep_rd.csv").read_text().strip().splitlines()
        labels = [line.split(",")[-1] for line in rd[1:]]
        assert labels.count("mctf") == 1
        assert sum(1 for s in labels if s.startswith("rdo_lambda")) == 8
        assert sum(1 for s in labels if s.startswith("ref_xi")) == 4
        xi_rows = (tmp_path / "sweep_xi.csv").read_text().strip().splitlines()
        mctf_row = next(line for line in xi_rows[1:] if line.startswith("mctf,"))
        stats = mctf_row.split(",")[2:10]
        assert all(float(v) == 0.0 for v in stats)  # baseline never filters
        assert (tmp_path / "sweep_bd.csv").exists()
