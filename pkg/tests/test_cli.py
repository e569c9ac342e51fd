import json
from fractions import Fraction

import pytest

from erasure_sources import cli, formats
from erasure_sources.source_model import ErasureAlphabet

BITS = ErasureAlphabet(("0", "1"))

CANONICAL = {
    "uniform_n1.channels.json": (formats.parse_channel_family, formats.dump_channel_family),
    "uniform_n2.channels.json": (formats.parse_channel_family, formats.dump_channel_family),
    "fixture_n1.extractor.json": (formats.parse_extractor, formats.dump_extractor),
    "constant_n1.extractor.json": (formats.parse_extractor, formats.dump_extractor),
    "xtilde_n1.source.json": (formats.parse_source, formats.dump_source),
    "xtilde_n2.source.json": (formats.parse_source, formats.dump_source),
    "v_n1.source.json": (formats.parse_source, formats.dump_source),
    "w_n1.source.json": (formats.parse_source, formats.dump_source),
    "sv_exact_n2.source.json": (formats.parse_source, formats.dump_source),
    "hadamard_n1.canonical.strategy.json": (formats.parse_strategy, formats.dump_strategy),
    "lambda0_02.canonical.schedule.json": (
        lambda t: formats.parse_schedule(t, BITS, "0.2"),
        lambda s: formats.dump_schedule(s, 1),
    ),
}


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out else None), err


@pytest.mark.parametrize("name", sorted(CANONICAL))
def test_canonical_round_trip(fixtures_dir, name):
    parse, dump = CANONICAL[name]
    text = (fixtures_dir / name).read_text()
    assert dump(parse(text)) == text


class TestFormats:
    def test_fmt_scalar(self):
        assert formats.fmt_scalar(Fraction(3)) == "3/1"
        assert formats.fmt_scalar(Fraction(2, 4)) == "1/2"
        assert formats.fmt_scalar(0.1) == "0.1"

    def test_decimal_strings_stay_exact(self):
        fam = formats.parse_channel_family(
            '{"n": 1, "base_alphabet": ["0", "1"], "channels": [{"": {"0": 0.1, "1": 0.9}}]}')
        assert fam.entry(())["0"] == Fraction(1, 10)

    def test_bad_row_message(self, fixtures_dir):
        with pytest.raises(formats.FormatError, match=r"channels\[0\]\[''\]: probabilities sum to 9/10"):
            formats.parse_channel_family((fixtures_dir / "bad_row.channels.json").read_text())

    def test_wildcard_expansion(self, fixtures_dir):
        src = formats.parse_source((fixtures_dir / "max_erasure_n2.source.json").read_text())
        assert all(d["_"] == Fraction(1, 5) for _, d in src.items())

    def test_bottom_default(self):
        f = formats.parse_extractor(
            '{"n": 1, "base_alphabet": ["0", "1"], "bottom_default": "1", "table": {"0": 0, "1": 1}}')
        assert f.table[("_",)] == 1


class TestAttack:
    def test_fixture(self, capsys, fixtures_dir):
        code, rep, _ = run(capsys, "attack", fixtures_dir / "fixture_n1.extractor.json",
                           fixtures_dir / "uniform_n1.channels.json", "--delta", "1/5")
        assert code == 0
        res = rep["results"]
        assert res["witness"] == "W" and res["bias"]["exact"] == "29/200"
        assert res["tilt"] == {"tau": {"exact": "1/20", "decimal": "0.05"},
                               "ratio_alpha": {"exact": "9/11", "decimal": "0.818181818182"},
                               "swapped": True}
        expected = json.loads((fixtures_dir / "w_n1.source.json").read_text())["conditionals"]
        assert res["winning_source"] == expected
        assert set(rep) == {"command", "inputs", "backend", "results", "duration_seconds"}
        assert all(len(h) == 64 for h in rep["inputs"].values())

    def test_constant_extractor(self, capsys, fixtures_dir):
        code, rep, _ = run(capsys, "attack", fixtures_dir / "constant_n1.extractor.json",
                           fixtures_dir / "uniform_n1.channels.json", "--delta", "1/5")
        assert code == 0 and rep["results"]["bias"]["exact"] == "1/1"

    def test_float_backend_refused(self, capsys, fixtures_dir):
        code, _, err = run(capsys, "attack", fixtures_dir / "fixture_n1.extractor.json",
                           fixtures_dir / "uniform_n1.channels.json", "--delta", "1/5", "--backend", "float")
        assert code == 2 and "exact" in err

    def test_outcome_cap(self, capsys, fixtures_dir):
        code, _, err = run(capsys, "attack", fixtures_dir / "fixture_n1.extractor.json",
                           fixtures_dir / "uniform_n1.channels.json", "--delta", "1/5", "--max-outcomes", "2")
        assert code == 2 and "3 outcomes" in err

    def test_out_file(self, capsys, fixtures_dir, tmp_path):
        out = tmp_path / "r.json"
        code, printed, _ = run(capsys, "attack", fixtures_dir / "fixture_n1.extractor.json",
                               fixtures_dir / "uniform_n1.channels.json", "--delta", "1/5", "--out", out)
        assert code == 0 and printed is None
        assert json.loads(out.read_text())["results"]["certified"] is True


class TestVerifySource:
    def test_member(self, capsys, fixtures_dir):
        code, rep, _ = run(capsys, "verify-source", fixtures_dir / "xtilde_n2.source.json",
                           fixtures_dir / "uniform_n2.channels.json", "--delta", "1/5")
        assert code == 0 and rep["results"]["member"] is True

    def test_heavy_erasure(self, capsys, fixtures_dir):
        code, rep, _ = run(capsys, "verify-source", fixtures_dir / "heavy_erasure_n1.source.json",
                           fixtures_dir / "uniform_n1.channels.json", "--delta", "1/5")
        assert code == 1
        assert rep["results"]["violation"] == {"history": "", "symbol": "0"}

    def test_bad_row(self, capsys, fixtures_dir):
        code, rep, err = run(capsys, "verify-source", fixtures_dir / "xtilde_n1.source.json",
                             fixtures_dir / "bad_row.channels.json", "--delta", "1/5")
        assert code == 2 and rep is None and "9/10" in err

    def test_missing_file(self, capsys, tmp_path, fixtures_dir):
        code, _, err = run(capsys, "verify-source", tmp_path / "nope.json",
                           fixtures_dir / "uniform_n1.channels.json", "--delta", "1/5")
        assert code == 2 and "cannot read" in err


class TestQuantum:
    def test_hadamard(self, capsys, fixtures_dir):
        code, rep, _ = run(capsys, "quantum", fixtures_dir / "hadamard_n1.strategy.json",
                           fixtures_dir / "lambda0_02.schedule.json", "--delta", "0.2")
        assert code == 0 and rep["backend"] == "float"
        row = rep["results"]["source"][0][""]
        assert [float(row[x]) for x in "01_"] == pytest.approx([0.4, 0.5, 0.1], abs=1e-12)

    def test_schedule_over_delta(self, capsys, fixtures_dir):
        code, _, err = run(capsys, "quantum", fixtures_dir / "hadamard_n1.strategy.json",
                           fixtures_dir / "lambda0_03.schedule.json", "--delta", "0.2")
        assert code == 2 and "outside" in err


class TestSv:
    def test_max_erasure(self, capsys, fixtures_dir):
        code, rep, _ = run(capsys, "sv", fixtures_dir / "max_erasure_n2.source.json", "--delta", "1/5")
        assert code == 0
        res = rep["results"]
        assert res["alpha"]["exact"] == "2/5" and res["min_p0"]["exact"] == "12/25"

    def test_not_a_source(self, capsys, fixtures_dir):
        code, rep, _ = run(capsys, "sv", fixtures_dir / "heavy_erasure_n1.source.json", "--delta", "1/5")
        assert code == 1 and rep["results"]["valid_source"] is False


class TestSample:
    def test_reproducible(self, capsys, fixtures_dir):
        args = ("sample", fixtures_dir / "xtilde_n2.source.json", "--seed", "7", "--count", "5")
        _, a, _ = run(capsys, *args)
        _, b, _ = run(capsys, *args)
        assert a["results"] == b["results"]
        assert all(len(s) == 2 for s in a["results"]["samples"])
