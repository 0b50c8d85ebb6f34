from click.testing import CliRunner

from conftest import classification_rows, write_dataset
from fftrainer.cli import main


class TestCli:
    def test_train_predict_export(self, tmp_path):
        rows = classification_rows(40, seed=4)
        train_file = tmp_path / "train.tsv"
        test_file = tmp_path / "test.tsv"
        write_dataset(train_file, rows[:32])
        write_dataset(test_file, rows[32:])
        runner = CliRunner()
        result = runner.invoke(main, [
            "train", "--train-file", str(train_file), "--test-file", str(test_file),
            "--out", str(tmp_path / "run"), "--epochs", "1",
            "--epoch-size", "64", "--batch-size", "32", "--seed", "1",
        ])
        assert result.exit_code == 0, result.output
        assert result.output.splitlines()[0].startswith("epoch\tloss")
        checkpoint = tmp_path / "run" / "checkpoint.pt"
        result = runner.invoke(main, [
            "predict", "--checkpoint", str(checkpoint),
            "--dataset", str(test_file), "--out", str(tmp_path / "pred.tsv"),
        ])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "pred.tsv").exists()
        result = runner.invoke(main, [
            "export-embeddings", "--checkpoint", str(checkpoint),
            "--out", str(tmp_path / "emb.txt"),
            "--pca-out", str(tmp_path / "pca.txt"),
        ])
        assert result.exit_code == 0, result.output
        assert len((tmp_path / "emb.txt").read_text().splitlines()) == 6

    def test_config_file_with_override(self, tmp_path):
        (tmp_path / "config.txt").write_text("epochs=1\nepoch_size=32\nbatch_size=16\n")
        rows = classification_rows(20, seed=5)
        train_file = tmp_path / "train.tsv"
        write_dataset(train_file, rows)
        runner = CliRunner()
        result = runner.invoke(main, [
            "train", "--config", str(tmp_path / "config.txt"),
            "--train-file", str(train_file), "--test-file", str(train_file),
            "--out", str(tmp_path / "run"), "--seed", "2",
        ])
        assert result.exit_code == 0, result.output
        assert "\t32" in result.output

    def test_bad_config_reported(self, tmp_path):
        (tmp_path / "config.txt").write_text("nonsense=1\n")
        runner = CliRunner()
        result = runner.invoke(main, [
            "train", "--config", str(tmp_path / "config.txt"),
            "--train-file", str(tmp_path / "config.txt"),
            "--test-file", str(tmp_path / "config.txt"),
            "--out", str(tmp_path / "run"),
        ])
        assert result.exit_code != 0
        assert "ValueError:" in result.output
