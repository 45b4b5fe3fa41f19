import subprocess
import sys

import pytest

from causalex.cli import run
from causalex.corpus import Corpus, read_corpus, write_corpus
from causalex.train import dump_config

from test_train import SMOKE_CONFIG, template_corpus


@pytest.fixture
def tagged_file(tmp_path, embedded_chain):
    path = tmp_path / "tagged.tsv"
    path.write_bytes(write_corpus(Corpus([(embedded_chain.sentence,
                                           embedded_chain.tags)])))
    return path


def test_decode_triplets_fixture(tagged_file, capsys, embedded_chain):
    assert run(["decode-triplets", "--input", str(tagged_file)]) == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert len(lines) == 2
    parsed = {tuple(line.split("\t")) for line in lines}
    sid = str(embedded_chain.sentence.id)
    assert (sid, "5", "8", "22", "26",
            "the chronic inflammation", "an increased acid production") in parsed
    assert (sid, "17", "20", "5", "8",
            "Helicobacter pylori infection", "the chronic inflammation") in parsed


def test_eval_identical_files(tagged_file, capsys):
    code = run(["eval", "--gold", str(tagged_file), "--pred", str(tagged_file)])
    assert code == 0
    out = capsys.readouterr().out
    assert "P 1.0000 R 1.0000 F 1.0000" in out


def test_eval_with_ratios(tagged_file, capsys):
    run(["eval", "--gold", str(tagged_file), "--pred", str(tagged_file),
         "--ratios"])
    out = capsys.readouterr().out
    assert "RS-C 0.0000 RS-E 0.0000" in out


def test_stats_output(tmp_path, capsys):
    corpus = template_corpus(12)
    path = tmp_path / "c.tsv"
    path.write_bytes(write_corpus(corpus))
    assert run(["stats", "--corpus", str(path)]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("B-C\t")
    assert lines[-1].startswith("Sum\t")
    total = sum(int(line.split("\t")[1]) for line in lines[:-1])
    assert lines[-1] == f"Sum\t{total}"


def test_train_tag_eval_workflow(tmp_path, capsys):
    corpus = template_corpus(40, seed=3)
    corpus_path = tmp_path / "train.tsv"
    corpus_path.write_bytes(write_corpus(corpus))
    config_path = tmp_path / "train.cfg"
    config_path.write_text(dump_config(SMOKE_CONFIG))
    model_path = tmp_path / "model.bin"
    log_path = tmp_path / "train.log"

    code = run([
        "train", "--config", str(config_path), "--corpus", str(corpus_path),
        "--out", str(model_path), "--log", str(log_path),
    ])
    assert code == 0
    assert model_path.exists()
    log_lines = log_path.read_text().splitlines()
    assert len(log_lines) == SMOKE_CONFIG.max_epochs

    tagged_path = tmp_path / "pred.tsv"
    code = run([
        "tag", "--model", str(model_path), "--corpus", str(corpus_path),
        "--out", str(tagged_path),
    ])
    assert code == 0
    pred = read_corpus(tagged_path.read_bytes())
    assert pred.ids() == corpus.ids()

    code = run(["eval", "--gold", str(corpus_path), "--pred", str(tagged_path)])
    assert code == 0
    assert capsys.readouterr().out.startswith("P ")


def test_inputs_never_mutated(tmp_path):
    corpus = template_corpus(12)
    path = tmp_path / "c.tsv"
    blob = write_corpus(corpus)
    path.write_bytes(blob)
    run(["stats", "--corpus", str(path)])
    run(["decode-triplets", "--input", str(path), "--out",
         str(tmp_path / "t.tsv")])
    assert path.read_bytes() == blob


def test_usage_error_exit_code():
    assert run(["no-such-command"]) == 2
    assert run(["train", "--corpus", "x"]) == 2  # missing --out


def test_data_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.tsv"
    bad.write_text("token-without-tag\n")
    assert run(["stats", "--corpus", str(bad)]) == 1
    assert "error:" in capsys.readouterr().err


def test_missing_file_exit_code(tmp_path, capsys):
    assert run(["stats", "--corpus", str(tmp_path / "nope.tsv")]) == 1


def test_runs_aggregation(tmp_path, capsys):
    corpus = template_corpus(24, seed=5)
    corpus_path = tmp_path / "train.tsv"
    corpus_path.write_bytes(write_corpus(corpus))
    config_path = tmp_path / "c.cfg"
    fast = {**SMOKE_CONFIG.__dict__, "max_epochs": 2}
    from causalex.train import TrainConfig
    config_path.write_text(dump_config(TrainConfig(**fast)))
    code = run([
        "runs", "--config", str(config_path), "--corpus", str(corpus_path),
        "--runs", "2", "--name", "smoke",
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert out.startswith("smoke\t")
    assert out.count("±") == 3


def test_runs_with_held_out_corpus(tmp_path, capsys):
    corpus_path = tmp_path / "train.tsv"
    corpus_path.write_bytes(write_corpus(template_corpus(24, seed=6)))
    test_path = tmp_path / "test.tsv"
    test_path.write_bytes(write_corpus(template_corpus(8, seed=7, sid_base=100)))
    config_path = tmp_path / "c.cfg"
    from causalex.train import TrainConfig
    config_path.write_text(dump_config(
        TrainConfig(**{**SMOKE_CONFIG.__dict__, "max_epochs": 2})))
    code = run([
        "runs", "--config", str(config_path), "--corpus", str(corpus_path),
        "--test", str(test_path), "--runs", "2", "--name", "heldout",
    ])
    assert code == 0
    assert capsys.readouterr().out.startswith("heldout\t")


def test_seed_flag_fixes_all_randomness(tmp_path):
    corpus_path = tmp_path / "train.tsv"
    corpus_path.write_bytes(write_corpus(template_corpus(20, seed=2)))
    config_path = tmp_path / "c.cfg"
    from causalex.train import TrainConfig
    config_path.write_text(dump_config(
        TrainConfig(**{**SMOKE_CONFIG.__dict__, "max_epochs": 2})))
    logs = []
    for name in ("a", "b"):
        run(["train", "--config", str(config_path), "--corpus",
             str(corpus_path), "--out", str(tmp_path / f"{name}.bin"),
             "--log", str(tmp_path / f"{name}.log"), "--seed", "77"])
        logs.append((tmp_path / f"{name}.log").read_text())
    assert logs[0] == logs[1]
    assert (tmp_path / "a.bin").read_bytes() == (tmp_path / "b.bin").read_bytes()


def test_console_entry_point(tmp_path):
    corpus_path = tmp_path / "c.tsv"
    corpus_path.write_bytes(write_corpus(template_corpus(4)))
    proc = subprocess.run(
        [sys.executable, "-c",
         "from causalex.cli import main; main()",
         "stats", "--corpus", str(corpus_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("B-C\t")
