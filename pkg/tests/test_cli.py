import json
import os
import socket
import subprocess
import sys
import time
from pathlib import Path

import pytest
import requests
from click.testing import CliRunner
from fastapi.testclient import TestClient

from marginalia.cli import WatchState, main
from marginalia.config import build_engine, load_config, ServerConfig
from marginalia.docstate import SummaryLevel
from marginalia.server import create_app

DATA = Path(__file__).parent / "data"
GLOVE = str(DATA / "mini_glove.txt")

DOC = "Cats chase mice. Dogs chase cats. Mice fear cats.\n\nPlanets orbit stars. Stars shine bright.\n"


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def doc_file(tmp_path):
    path = tmp_path / "doc.txt"
    path.write_text(DOC, encoding="utf-8")
    return str(path)


class TestOutline:
    def test_central_two_lines(self, runner, doc_file):
        result = runner.invoke(main, ["outline", doc_file, "--level", "central", "--embeddings", GLOVE])
        assert result.exit_code == 0, result.output
        lines = result.output.strip().split("\n")
        assert len(lines) == 2
        assert lines[0].startswith("¶0\t")
        assert lines[1].startswith("¶1\t")

    def test_empty_file(self, runner, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("", encoding="utf-8")
        result = runner.invoke(main, ["outline", str(path), "--level", "original"])
        assert result.exit_code == 0
        assert result.output == ""

    def test_original_needs_no_embeddings(self, runner, doc_file):
        result = runner.invoke(main, ["outline", doc_file, "--level", "original"])
        assert result.exit_code == 0
        assert len(result.output.strip().split("\n")) == 2

    def test_missing_file_nonzero(self, runner):
        result = runner.invoke(main, ["outline", "/nonexistent/file.txt"])
        assert result.exit_code != 0
        assert "file.txt" in result.output

    def test_unknown_level_usage_error(self, runner, doc_file):
        result = runner.invoke(main, ["outline", doc_file, "--level", "zoom"])
        assert result.exit_code == 2

    def test_missing_embeddings_usage_error(self, runner, doc_file, monkeypatch):
        monkeypatch.delenv("EMBEDDINGS_PATH", raising=False)
        result = runner.invoke(main, ["outline", doc_file, "--level", "central"])
        assert result.exit_code != 0
        assert "EMBEDDINGS_PATH" in result.output

    def test_env_var_supplies_embeddings(self, runner, doc_file, monkeypatch):
        monkeypatch.setenv("EMBEDDINGS_PATH", GLOVE)
        result = runner.invoke(main, ["outline", doc_file, "--level", "keywords"])
        assert result.exit_code == 0

    def test_extractive_requires_k(self, runner, doc_file):
        result = runner.invoke(
            main, ["outline", doc_file, "--level", "extractive", "--embeddings", GLOVE]
        )
        assert result.exit_code == 2
        result = runner.invoke(
            main,
            ["outline", doc_file, "--level", "extractive", "--k", "2", "--embeddings", GLOVE],
        )
        assert result.exit_code == 0

    def test_k_rejected_for_other_levels(self, runner, doc_file):
        result = runner.invoke(
            main, ["outline", doc_file, "--level", "central", "--k", "2", "--embeddings", GLOVE]
        )
        assert result.exit_code == 2

    @pytest.mark.parametrize("level", ["central", "keywords", "summary", "original"])
    def test_json_matches_server_bytes(self, runner, doc_file, level):
        """CLI JSON output is byte-identical to the server response body."""
        result = runner.invoke(
            main,
            ["outline", doc_file, "--level", level, "--format", "json", "--embeddings", GLOVE],
        )
        assert result.exit_code == 0, result.output
        cli_bytes = result.output.strip().encode("utf-8")

        engine = build_engine(ServerConfig(embeddings_path=GLOVE))
        client = TestClient(create_app(engine))
        paragraphs = [p for p in DOC.split("\n\n")]
        paragraphs = [p.strip("\n") for p in paragraphs if p.strip()]
        if level == "original":
            # No server route for original; the envelope is still the CLI contract.
            expected = json.dumps(
                {str(i): {"text": p} for i, p in enumerate(paragraphs)},
                ensure_ascii=False,
                separators=(",", ":"),
            ).encode("utf-8")
            assert cli_bytes == expected
        else:
            route = {"central": "central", "keywords": "keywords", "summary": "abstractive"}[level]
            response = client.post(f"/api/{route}", json={"paragraphs": paragraphs})
            assert cli_bytes == response.content

    def test_keywords_text_format(self, runner, doc_file):
        result = runner.invoke(
            main, ["outline", doc_file, "--level", "keywords", "--embeddings", GLOVE]
        )
        assert result.exit_code == 0
        for line in result.output.strip().split("\n"):
            index, content = line.split("\t", 1)
            assert index.startswith("¶")
            assert content  # at least one keyword per non-empty paragraph here


class TestEval:
    def corpus(self, tmp_path, records):
        path = tmp_path / "corpus.jsonl"
        path.write_text("\n".join(json.dumps(r) for r in records), encoding="utf-8")
        return str(path)

    def test_three_pair_fixture(self, runner, tmp_path):
        path = self.corpus(
            tmp_path,
            [
                {"candidate": "the cat", "reference": "the cat sat"},
                {"candidate": "same here", "reference": "same here"},
                {"candidate": "disjoint words", "reference": "other tokens"},
            ],
        )
        result = runner.invoke(main, ["eval", "--pairs", path, "--format", "json"])
        assert result.exit_code == 0, result.output
        report = json.loads(result.output)
        assert report["pairs"] == 3
        assert report["scores"]["rouge-1"]["f"] == pytest.approx((0.8 + 1.0 + 0.0) / 3, abs=1e-9)

    def test_identical_pairs_all_ones(self, runner, tmp_path):
        path = self.corpus(tmp_path, [{"candidate": "a b", "reference": "a b"}] * 2)
        result = runner.invoke(main, ["eval", "--pairs", path, "--format", "json"])
        report = json.loads(result.output)
        for variant in ("rouge-1", "rouge-2", "rouge-l"):
            assert report["scores"][variant]["f"] == 1.0

    def test_empty_corpus_usage_error(self, runner, tmp_path):
        path = self.corpus(tmp_path, [])
        result = runner.invoke(main, ["eval", "--pairs", path])
        assert result.exit_code == 2

    def test_text_table(self, runner, tmp_path):
        path = self.corpus(tmp_path, [{"candidate": "a", "reference": "a"}])
        result = runner.invoke(main, ["eval", "--pairs", path])
        assert result.exit_code == 0
        assert "rouge-1" in result.output and "rouge-l" in result.output


class TestWatch:
    def make_state(self, level="central"):
        engine = build_engine(ServerConfig(embeddings_path=GLOVE))
        return WatchState(engine, SummaryLevel.parse(level)), engine

    def test_first_pass_prints_all(self):
        state, _ = self.make_state()
        changed, computations = state.process(DOC)
        assert [i for i, _ in changed] == [0, 1]
        assert computations == 2

    def test_unchanged_pass_prints_nothing(self):
        state, _ = self.make_state()
        state.process(DOC)
        changed, computations = state.process(DOC)
        assert changed == []
        assert computations == 0

    def test_edited_paragraph_reprinted(self):
        state, _ = self.make_state()
        state.process(DOC)
        edited = DOC.replace("Dogs chase cats.", "Dogs fear mice.")
        changed, computations = state.process(edited)
        assert [i for i, _ in changed] == [0]
        assert computations == 1

    def test_appended_paragraph(self):
        state, _ = self.make_state()
        state.process(DOC)
        changed, computations = state.process(DOC + "\nCats shine bright.\n")
        assert [i for i, _ in changed] == [2]
        assert computations == 1

    def test_watch_command_iterations(self, runner, doc_file):
        result = runner.invoke(
            main,
            [
                "watch", doc_file, "--level", "central", "--embeddings", GLOVE,
                "--interval", "0.01", "--iterations", "2",
            ],
        )
        assert result.exit_code == 0, result.output
        assert "# computations: 2" in result.output


class TestServe:
    def test_bad_config_path_nonzero(self, runner):
        result = runner.invoke(main, ["serve", "--config", "/nonexistent/conf.json"])
        assert result.exit_code != 0

    def test_missing_embeddings_config_fails(self, runner, tmp_path, monkeypatch):
        monkeypatch.delenv("EMBEDDINGS_PATH", raising=False)
        config = tmp_path / "conf.json"
        config.write_text("{}", encoding="utf-8")
        result = runner.invoke(main, ["serve", "--config", str(config)])
        assert result.exit_code != 0
        assert "embeddings" in result.output.lower()

    def test_smoke_health_endpoint(self, tmp_path):
        with socket.socket() as sock:
            sock.bind(("127.0.0.1", 0))
            port = sock.getsockname()[1]
        env = dict(os.environ, EMBEDDINGS_PATH=GLOVE)
        process = subprocess.Popen(
            [sys.executable, "-m", "marginalia.cli", "serve", "--bind", f"127.0.0.1:{port}"],
            env=env,
            stdout=subprocess.PIPE,
            stderr=subprocess.STDOUT,
        )
        try:
            deadline = time.time() + 15
            last_error = None
            while time.time() < deadline:
                try:
                    response = requests.get(f"http://127.0.0.1:{port}/api/health", timeout=1)
                    assert response.status_code == 200
                    assert response.json() == {"status": "ok"}
                    break
                except requests.RequestException as exc:
                    last_error = exc
                    time.sleep(0.2)
            else:
                pytest.fail(f"server never answered: {last_error}")
        finally:
            process.terminate()
            process.wait(timeout=10)


class TestConfig:
    def test_defaults(self):
        config = load_config(env={})
        assert config.bind == "127.0.0.1:8787"
        assert config.cache_capacity == 10_000
        assert config.request_timeout_s == 5.0

    def test_file_values(self, tmp_path):
        path = tmp_path / "conf.json"
        path.write_text(
            json.dumps({"embeddings_path": "/x", "cache_capacity": 42, "bind": "0.0.0.0:9000"}),
            encoding="utf-8",
        )
        config = load_config(str(path), env={})
        assert config.embeddings_path == "/x"
        assert config.cache_capacity == 42
        assert config.host == "0.0.0.0"
        assert config.port == 9000

    def test_env_overrides_file(self, tmp_path):
        path = tmp_path / "conf.json"
        path.write_text(json.dumps({"embeddings_path": "/file"}), encoding="utf-8")
        config = load_config(str(path), env={"EMBEDDINGS_PATH": "/env"})
        assert config.embeddings_path == "/env"

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "conf.json"
        path.write_text(json.dumps({"nonsense": 1}), encoding="utf-8")
        with pytest.raises(ValueError):
            load_config(str(path), env={})

    def test_numeric_env_parsing(self):
        config = load_config(env={"CACHE_CAPACITY": "77", "REQUEST_TIMEOUT_S": "1.5"})
        assert config.cache_capacity == 77
        assert config.request_timeout_s == 1.5
