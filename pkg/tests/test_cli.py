"""CLI contract: exit codes, output formats, and parity with the service."""
from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from conftest import SAMPLE_SENTENCES
from cryptext.cli import main
from cryptext.service import ApiConfig, create_app, load_state


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    corpus = root / "corpus.txt"
    corpus.write_text("\n".join(SAMPLE_SENTENCES) + "\n", encoding="utf-8")
    (root / "words.txt").write_text("the\ndirty\nrepublicans\n", encoding="utf-8")
    lm_corpus = root / "clean.txt"
    lm_corpus.write_text("the dirty republicans\n" * 5, encoding="utf-8")
    index_dir = root / "index"
    assert main(["build-index", "--corpus", str(corpus), "--levels", "0,1,2", "--out", str(index_dir)]) == 0
    assert main(["train-lm", "--corpus", str(lm_corpus), "--order", "3", "--out", str(root / "model.lm")]) == 0
    timed = root / "timed.jsonl"
    rows = [
        {"id": f"t{i}", "text": "the dirty republicans", "timestamp": f"2021-11-0{i + 1}T09:00:00Z"}
        for i in range(3)
    ]
    timed.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")
    return root


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_build_index_writes_level_files(workspace):
    for k in (0, 1, 2):
        assert (workspace / "index" / f"k{k}.idx").is_file()


def test_lookup_tsv_two_rows(workspace, capsys):
    code, out, _ = run(
        capsys,
        ["lookup", "republicans", "--index", str(workspace / "index"), "--k", "1", "--d", "1"],
    )
    assert code == 0
    rows = [line.split("\t") for line in out.strip().splitlines()]
    assert len(rows) == 2
    assert rows[0][0] == "republicans"
    assert rows[1][0] == "repubLIEcans"


def test_lookup_json_matches_service_body(workspace, capsys):
    code, out, _ = run(
        capsys,
        [
            "lookup",
            "republicans",
            "--index",
            str(workspace / "index"),
            "--k",
            "1",
            "--d",
            "1",
            "--format",
            "json",
        ],
    )
    assert code == 0
    cli_payload = json.loads(out)

    state = load_state(ApiConfig(index_dir=str(workspace / "index")))
    with TestClient(create_app(state)) as client:
        service_payload = client.get("/api/v1/lookup?token=republicans&k=1&d=1").json()
    assert cli_payload == service_payload


def test_perturb_json_matches_service_body(workspace, capsys):
    argv = [
        "perturb",
        "--text",
        "the dirty republicans",
        "--index",
        str(workspace / "index"),
        "--ratio",
        "1.0",
        "--seed",
        "77",
        "--format",
        "json",
    ]
    code, out, _ = run(capsys, argv)
    assert code == 0
    cli_payload = json.loads(out)
    state = load_state(ApiConfig(index_dir=str(workspace / "index")))
    with TestClient(create_app(state)) as client:
        service_payload = client.post(
            "/api/v1/perturb",
            json={"text": "the dirty republicans", "ratio": 1.0, "seed": 77, "k": 1, "d": 3},
        ).json()
    assert cli_payload == service_payload


def test_normalize_json_matches_service_body(workspace, capsys):
    argv = [
        "normalize",
        "--text",
        "thee dirty repubLIEcans",
        "--dict",
        str(workspace / "words.txt"),
        "--model",
        str(workspace / "model.lm"),
        "--format",
        "json",
    ]
    code, out, _ = run(capsys, argv)
    assert code == 0
    cli_payload = json.loads(out)
    assert cli_payload["output_text"] == "the dirty republicans"

    state = load_state(
        ApiConfig(
            index_dir=str(workspace / "index"),
            dictionary_path=str(workspace / "words.txt"),
            model_path=str(workspace / "model.lm"),
        )
    )
    with TestClient(create_app(state)) as client:
        service_payload = client.post(
            "/api/v1/normalize", json={"text": "thee dirty repubLIEcans", "k": 1, "d": 3, "top_n": 5}
        ).json()
    assert cli_payload == service_payload


def test_normalize_tsv_prints_output_text(workspace, capsys):
    code, out, _ = run(
        capsys,
        [
            "normalize",
            "--text",
            "thee dirty repubLIEcans",
            "--dict",
            str(workspace / "words.txt"),
            "--model",
            str(workspace / "model.lm"),
        ],
    )
    assert code == 0
    assert out.strip() == "the dirty republicans"


def test_perturb_ratio_zero_echoes_input(workspace, capsys):
    code, out, _ = run(
        capsys,
        [
            "perturb",
            "--text",
            "the dirty republicans",
            "--index",
            str(workspace / "index"),
            "--ratio",
            "0",
            "--seed",
            "1",
        ],
    )
    assert code == 0
    assert out.strip() == "the dirty republicans"


def test_perturb_json_requires_seed(workspace, capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(
            [
                "perturb",
                "--text",
                "the",
                "--index",
                str(workspace / "index"),
                "--ratio",
                "0.5",
                "--format",
                "json",
            ]
        )
    assert excinfo.value.code == 2


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as excinfo:
        main(["lookup"])  # missing token and --index
    assert excinfo.value.code == 2


def test_operational_error_exit_code(tmp_path, capsys):
    code, _, err = run(capsys, ["lookup", "word", "--index", str(tmp_path / "missing")])
    assert code == 1
    assert "CorruptFile" in err or "FileNotFound" in err


def test_json_output_is_deterministic(workspace, capsys):
    argv = [
        "perturb",
        "--text",
        "the dirty republicans and the rest",
        "--index",
        str(workspace / "index"),
        "--ratio",
        "0.5",
        "--seed",
        "31",
        "--format",
        "json",
    ]
    code1, out1, _ = run(capsys, argv)
    code2, out2, _ = run(capsys, argv)
    assert code1 == code2 == 0
    assert out1 == out2


def test_perturb_corpus_files_deterministic(workspace, capsys, tmp_path):
    corpus = workspace / "corpus.txt"
    argv = [
        "perturb-corpus",
        "--in",
        str(corpus),
        "--out",
        str(tmp_path / "out.jsonl"),
        "--manifest",
        str(tmp_path / "manifest.jsonl"),
        "--index",
        str(workspace / "index"),
        "--ratio",
        "0.5",
        "--seed",
        "11",
    ]
    assert main(argv) == 0
    first_out = (tmp_path / "out.jsonl").read_bytes()
    first_manifest = (tmp_path / "manifest.jsonl").read_bytes()
    assert main(argv) == 0
    assert (tmp_path / "out.jsonl").read_bytes() == first_out
    assert (tmp_path / "manifest.jsonl").read_bytes() == first_manifest
    rows = [json.loads(line) for line in first_manifest.decode().splitlines()]
    assert len(rows) == 3
    assert all(row["generator"] == "splitmix64" for row in rows)


def test_timeline_tsv(workspace, capsys):
    code, out, _ = run(
        capsys,
        [
            "timeline",
            "--word",
            "the",
            "--corpus",
            str(workspace / "timed.jsonl"),
            "--index",
            str(workspace / "index"),
            "--from",
            "2021-11-01T00:00:00Z",
            "--to",
            "2021-11-04T00:00:00Z",
            "--granularity",
            "day",
            "--d",
            "1",
        ],
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 3
    assert all(line.split("\t")[1] == "1" for line in lines)


def test_help_available_everywhere(capsys):
    for argv in (["--help"], ["lookup", "--help"], ["build-index", "--help"]):
        with pytest.raises(SystemExit) as excinfo:
            main(argv)
        assert excinfo.value.code == 0
