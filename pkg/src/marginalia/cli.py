"""Command line entry point: outline, serve, eval, watch.

JSON output of ``outline`` is byte-identical to the corresponding server
response body, so scripted consumers can treat both interchangeably.
"""

from __future__ import annotations

import json
import os
import time

import click

from .config import DEFAULT_BIND, ServerConfig, build_engine, load_config
from .docstate import Engine, LevelKind, SummaryLevel
from .rougeval import evaluate_corpus, parse_pairs_jsonl
from .textseg import content_hash, split_paragraphs

LEVEL_CHOICES = ["original", "central", "summary", "keywords", "extractive"]


def _dump_envelope(envelope: dict) -> str:
    # Same serialization settings FastAPI uses for response bodies.
    return json.dumps(envelope, ensure_ascii=False, allow_nan=False, separators=(",", ":"))


def _parse_level(level: str, k: int | None) -> SummaryLevel:
    if level == "extractive":
        if k is None:
            raise click.UsageError("--level extractive requires --k")
        return SummaryLevel.extractive(k)
    if k is not None:
        raise click.UsageError("--k applies only to --level extractive")
    return SummaryLevel.parse(level)


def _engine_for(level: SummaryLevel, embeddings: str | None, env: dict) -> Engine | None:
    """Engine for the given level; ORIGINAL needs no embeddings at all."""
    if level.kind is LevelKind.ORIGINAL:
        return None
    path = embeddings or env.get("EMBEDDINGS_PATH")
    if not path:
        raise click.UsageError(
            "embeddings required: pass --embeddings or set EMBEDDINGS_PATH"
        )
    config = ServerConfig(
        embeddings_path=path, abstractive_endpoint=env.get("ABSTRACTIVE_ENDPOINT") or None
    )
    return build_engine(config)


def _cells(engine: Engine | None, texts: list[str], level: SummaryLevel) -> list[dict]:
    if engine is None:
        return [{"text": t} for t in texts]
    return engine.annotate_texts(texts, level)


def _card_line(index: int, cell: dict) -> str:
    if "text" in cell:
        content = cell["text"].replace("\n", " ")
    elif "keywords" in cell:
        content = ", ".join(cell["keywords"])
    else:
        content = cell["summary"]
    return f"¶{index}\t{content}"


@click.group()
def main():
    """Paragraph-wise summarization cards, server and evaluation tools."""


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--level", type=click.Choice(LEVEL_CHOICES), default="central", show_default=True)
@click.option("--k", type=int, default=None, help="Sentence count for --level extractive.")
@click.option(
    "--format", "output_format", type=click.Choice(["text", "json"]), default="text",
    show_default=True,
)
@click.option("--embeddings", type=click.Path(exists=True, dir_okay=False), default=None)
def outline(file, level, k, output_format, embeddings):
    """Print one card per paragraph of FILE at the requested level."""
    parsed = _parse_level(level, k)
    engine = _engine_for(parsed, embeddings, dict(os.environ))
    with open(file, encoding="utf-8") as fh:
        text = fh.read()
    texts = [p.text for p in split_paragraphs(text)]
    cells = _cells(engine, texts, parsed)
    if output_format == "json":
        click.echo(_dump_envelope({str(i): cell for i, cell in enumerate(cells)}))
    else:
        for i, cell in enumerate(cells):
            click.echo(_card_line(i, cell))


@main.command()
@click.option("--bind", default=None, help=f"host:port (default {DEFAULT_BIND}).")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
def serve(bind, config_path):
    """Start the annotation server."""
    import uvicorn

    from .server import create_app

    try:
        config = load_config(config_path)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        raise click.ClickException(f"cannot load config: {exc}")
    if bind:
        config.bind = bind
    try:
        engine = build_engine(config)
    except (OSError, ValueError) as exc:
        raise click.ClickException(str(exc))
    app = create_app(engine, cors_origins=config.cors_origins)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")


@main.command("eval")
@click.option(
    "--pairs", "pairs_path", type=click.Path(exists=True, dir_okay=False), required=True,
    help="JSONL corpus: one {candidate, reference} object per line.",
)
@click.option(
    "--format", "output_format", type=click.Choice(["text", "json"]), default="text",
    show_default=True,
)
def eval_command(pairs_path, output_format):
    """Mean ROUGE-1/2/L precision/recall/F over a candidate/reference corpus."""
    with open(pairs_path, encoding="utf-8") as fh:
        try:
            pairs = parse_pairs_jsonl(fh)
        except ValueError as exc:
            raise click.ClickException(str(exc))
    if not pairs:
        raise click.UsageError("corpus is empty")
    report = evaluate_corpus(pairs)
    if output_format == "json":
        click.echo(json.dumps(report.to_json_dict(), ensure_ascii=False, indent=2))
    else:
        click.echo(report.to_text())


class WatchState:
    """Incremental re-outline driver: annotates a document snapshot and
    reports only the cards whose paragraph hash is new since last pass."""

    def __init__(self, engine: Engine | None, level: SummaryLevel):
        self.engine = engine
        self.level = level
        self._seen_hashes: set[int] | None = None

    def process(self, text: str) -> tuple[list[tuple[int, dict]], int]:
        """Returns (changed cards as (index, cell), computation count)."""
        paragraphs = split_paragraphs(text)
        before = self.engine.computations if self.engine else 0
        cells = _cells(self.engine, [p.text for p in paragraphs], self.level)
        computations = (self.engine.computations if self.engine else 0) - before

        hashes = [p.content_hash for p in paragraphs]
        if self._seen_hashes is None:
            changed = list(range(len(paragraphs)))
        else:
            changed = [i for i, h in enumerate(hashes) if h not in self._seen_hashes]
        self._seen_hashes = set(hashes)
        return [(i, cells[i]) for i in changed], computations


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--level", type=click.Choice(LEVEL_CHOICES), default="central", show_default=True)
@click.option("--k", type=int, default=None)
@click.option("--embeddings", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--interval", type=float, default=0.5, show_default=True, help="Poll seconds.")
@click.option("--iterations", type=int, default=None, help="Stop after N polls (for scripting).")
def watch(file, level, k, embeddings, interval, iterations):
    """Re-outline FILE on change, printing changed cards and a computation count."""
    parsed = _parse_level(level, k)
    engine = _engine_for(parsed, embeddings, dict(os.environ))
    state = WatchState(engine, parsed)
    last_hash = None
    polls = 0
    while True:
        with open(file, encoding="utf-8") as fh:
            text = fh.read()
        current = content_hash(text)
        if current != last_hash:
            last_hash = current
            changed, computations = state.process(text)
            for index, cell in changed:
                click.echo(_card_line(index, cell))
            click.echo(f"# computations: {computations}")
        polls += 1
        if iterations is not None and polls >= iterations:
            break
        time.sleep(interval)


if __name__ == "__main__":
    main()
