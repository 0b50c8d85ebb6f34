import itertools

import pytest
from click.testing import CliRunner

from ffsymbol.cli import main
from ffsymbol.ingest import read_dataset, read_quad, write_instances, write_predictions, write_symbol
from ffsymbol.keys import dihedral_images
from ffsymbol.relations import get_relation, instantiate
from ffsymbol.symbol import Symbol, builtin_symbol


@pytest.fixture
def runner():
    return CliRunner()


class TestCount:
    def test_table_column(self, runner):
        result = runner.invoke(main, ["count", "--loop", "4"])
        assert result.exit_code == 0
        assert result.output.strip() == "32838"

    def test_bad_loop(self, runner):
        result = runner.invoke(main, ["count", "--loop", "0"])
        assert result.exit_code != 0
        assert "ValueError:" in result.output


class TestBuiltin:
    def test_emits_canonical_text(self, runner, tmp_path):
        out = tmp_path / "l1.txt"
        result = runner.invoke(main, ["builtin", "--loop", "1", "--out", str(out)])
        assert result.exit_code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 6
        assert all(line.split("\t")[1] == "-2" for line in lines)

    def test_self_score_round_trip(self, runner, tmp_path):
        pred = tmp_path / "pred.tsv"
        result = runner.invoke(main, ["builtin", "--loop", "1", "--out", str(pred)])
        assert result.exit_code == 0
        result = runner.invoke(
            main, ["score", "--truth", "builtin:1", "--pred", str(pred)]
        )
        assert result.exit_code == 0
        assert "element_accuracy\t1.000000" in result.output


class TestVerifyRelations:
    def test_exhaustive_l2_all_zero(self, runner):
        result = runner.invoke(main, ["verify-relations", "--loop", "2", "--n", "all"])
        assert result.exit_code == 0, result.output
        for line in result.output.splitlines()[1:]:
            name, count, bad = line.rsplit("\t", 2)
            assert bad in ("0", "no-support")

    def test_sampled_deterministic(self, runner):
        args = ["verify-relations", "--loop", "2", "--n", "20", "--seed", "5"]
        a = runner.invoke(main, args)
        b = runner.invoke(main, args)
        assert a.exit_code == 0
        assert a.output == b.output

    def test_seed_required_when_sampling(self, runner):
        result = runner.invoke(main, ["verify-relations", "--loop", "2", "--n", "20"])
        assert result.exit_code != 0
        assert "ValueError:" in result.output

    def test_violation_detected(self, runner, tmp_path):
        # perturb one coefficient of the built-in symbol
        sym = builtin_symbol(2)
        elems = dict(sym.items())
        elems["bddd"] += 1
        bad = tmp_path / "bad.txt"
        write_symbol(Symbol(2, elems.items()), bad)
        result = runner.invoke(
            main,
            ["verify-relations", "--loop", "2", "--n", "all", "--truth", str(bad)],
        )
        assert result.exit_code != 0
        assert "RelationViolation:" in result.output


class TestQuad:
    @staticmethod
    def _orbit_symbol(tmp_path):
        elems = {}
        for key, coeff in (("bbdddd", 5), ("ccbbdd", 3)):
            for img in dihedral_images(key):
                elems[img] = coeff
        path = tmp_path / "sym.txt"
        write_symbol(Symbol(3, elems.items()), path)
        return path

    def test_compress_then_expand(self, runner, tmp_path):
        sym_path = self._orbit_symbol(tmp_path)
        quad_path = tmp_path / "quad.tsv"
        result = runner.invoke(
            main, ["quad", "--in", str(sym_path), "--out", str(quad_path)]
        )
        assert result.exit_code == 0, result.output
        qsym = read_quad(quad_path)
        assert len(qsym) > 0
        ids = tmp_path / "keys.txt"
        ids.write_text("bbdddd\nddaaaa\n")
        expanded = tmp_path / "values.tsv"
        result = runner.invoke(
            main,
            ["quad", "--in", str(quad_path), "--out", str(expanded),
             "--expand", str(ids)],
        )
        assert result.exit_code == 0, result.output
        assert expanded.read_text() == "bbdddd\t5\nddaaaa\t0\n"


class TestDataset:
    def test_zero_nonzero_reproducible(self, runner, tmp_path):
        args = [
            "dataset", "--task", "zero-nonzero", "--truth", "builtin:2",
            "--seed", "3", "--train-size", "16", "--test-size", "4",
            "--out", str(tmp_path / "zn"),
        ]
        assert runner.invoke(main, args).exit_code == 0
        first = (tmp_path / "zn.train.tsv").read_bytes()
        assert runner.invoke(main, args).exit_code == 0
        assert (tmp_path / "zn.train.tsv").read_bytes() == first
        header, examples = read_dataset(tmp_path / "zn.train.tsv")
        assert header["task"] == "zero-nonzero"
        assert len(examples) == 16

    def test_coeff_task(self, runner, tmp_path):
        args = [
            "dataset", "--task", "coeff", "--truth", "builtin:2",
            "--seed", "3", "--train-size", "10", "--test-size", "2",
            "--out", str(tmp_path / "coeff"),
        ]
        result = runner.invoke(main, args)
        assert result.exit_code == 0, result.output
        _, examples = read_dataset(tmp_path / "coeff.test.tsv")
        assert len(examples) == 2

    def test_mixed_task_writes_four_datasets(self, runner, tmp_path):
        args = [
            "dataset", "--task", "mixed", "--truth", "builtin:1",
            "--second-truth", "builtin:2", "--seed", "3",
            "--train-size", "10", "--test-size", "2",
            "--out", str(tmp_path / "mix"),
        ]
        result = runner.invoke(main, args)
        assert result.exit_code == 0, result.output
        for name in ("mixed", "l5", "l6", "control"):
            assert (tmp_path / f"mix.{name}.train.tsv").exists()

    def test_strikeout_requires_second_truth(self, runner, tmp_path):
        args = [
            "dataset", "--task", "strikeout", "--truth", "builtin:2",
            "--seed", "3", "--train-size", "2", "--test-size", "0",
            "--out", str(tmp_path / "so"),
        ]
        result = runner.invoke(main, args)
        assert result.exit_code != 0
        assert "ValueError:" in result.output
        result = runner.invoke(main, args + ["--second-truth", "builtin:1"])
        assert result.exit_code == 0, result.output


class TestScore:
    def test_invalid_marker_counted(self, runner, tmp_path):
        sym = builtin_symbol(1)
        pred = tmp_path / "pred.tsv"
        lines = [f"{k}\t{c}" for k, c in sym.items()]
        lines[0] = lines[0].split("\t")[0] + "\t+++"
        pred.write_text("\n".join(lines) + "\n")
        result = runner.invoke(main, ["score", "--truth", "builtin:1", "--pred", str(pred)])
        assert result.exit_code == 0
        assert "n_invalid\t1" in result.output
        assert "element_accuracy\t0.833333" in result.output


class TestCurvesAndFigures:
    def test_curves_tsv_and_png(self, runner, tmp_path):
        rel = get_relation("final 16")
        truth_elems = {}
        instances = []
        contexts = itertools.product("abc", "abcdef", "bd")
        for value, ctx in enumerate(contexts, start=1):
            inst = instantiate(rel, 3, 5, "".join(ctx) + "b")
            instances.append(inst)
            for key, _ in inst.members:
                truth_elems[key] = value
        truth_path = tmp_path / "truth.txt"
        write_symbol(Symbol(3, truth_elems.items()), truth_path)
        inst_path = tmp_path / "instances.tsv"
        write_instances(instances, inst_path)
        epochs = tmp_path / "epochs"
        epochs.mkdir()
        for epoch in (1, 2):
            write_predictions(truth_elems, epochs / f"epoch{epoch}.tsv")
        out = tmp_path / "curves.tsv"
        result = runner.invoke(
            main,
            ["curves", "--dir", str(epochs), "--instances", str(inst_path),
             "--truth", str(truth_path), "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        rows = out.read_text().splitlines()
        assert rows[0] == "epoch\trate1\trate2\trate3\trate4"
        assert rows[1].startswith("1\t1.000000")
        assert (tmp_path / "curves.png").stat().st_size > 0

    def test_hist_tsv_and_png(self, runner, tmp_path):
        out = tmp_path / "hist.tsv"
        result = runner.invoke(
            main, ["hist", "--in", "builtin:2", "--out", str(out), "--bins", "10"]
        )
        assert result.exit_code == 0, result.output
        rows = out.read_text().splitlines()[1:]
        assert sum(int(r.split("\t")[2]) for r in rows) == 12
        assert (tmp_path / "hist.png").stat().st_size > 0


class TestAngles:
    def test_report(self, runner, tmp_path):
        emb = tmp_path / "emb.txt"
        rows = []
        for i, letter in enumerate("abcdef"):
            v = [0.0] * 6
            v[i] = 1.0
            rows.append(letter + " " + " ".join(str(x) for x in v))
        emb.write_text("\n".join(rows) + "\n")
        result = runner.invoke(main, ["angles", "--in", str(emb)])
        assert result.exit_code == 0
        assert "ab\t90.0" in result.output
        assert "abc\t30.0" in result.output
