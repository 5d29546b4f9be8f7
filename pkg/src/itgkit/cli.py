"""Command-line pipeline: ingest, extract, suggest, align, agreement, stats.

Every stage reads and writes plain files (graph JSON, label JSONL,
alignment JSON), so stages are independently re-runnable and diffable.
Outputs are written atomically (temp file + rename).  A JSON config file
pointed to by ITGKIT_CONFIG supplies defaults; flags win over config.
"""

from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import click

from .align import METRICS, canonical_metric
from .anchors import extract_explicit_links, links_tsv, load_patterns
from .graph import deserialize, merge, serialize
from .ingest import IngestError, IngestOptions, ingest_review, parse_jats
from .metrics import krippendorff_alpha, reliability_from_labels
from .pragmatics import LabelStore
from .project import (
    LinkLabelStore,
    Project,
    atomic_write,
    canonical_json_bytes,
    stats_bytes,
)
from .suggest import Bm25Index, EmbeddingTable, SuggestConfig, suggest

CONFIG_ENV = "ITGKIT_CONFIG"


@dataclass
class Config:
    metric: str = "levenshtein-ratio"
    threshold: float = 0.3
    m: int = 5
    methods: list[str] | None = None
    patterns: str | None = None
    section_map: str | None = None
    jobs: int = 1
    out: str = "."

    @classmethod
    def from_env(cls) -> "Config":
        path = os.environ.get(CONFIG_ENV)
        if not path:
            return cls()
        try:
            raw = json.loads(Path(path).read_text("utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise click.ClickException(f"cannot read config {path}: {exc}")
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise click.ClickException(f"unknown config keys in {path}: {sorted(unknown)}")
        config = cls(**raw)
        config.validate()
        return config

    def validate(self) -> None:
        try:
            self.metric = canonical_metric(self.metric)
        except Exception as exc:
            raise click.ClickException(str(exc))
        if not 0.0 <= self.threshold <= 1.0:
            raise click.ClickException("threshold must lie in [0, 1]")
        if self.m < 1:
            raise click.ClickException("m must be at least 1")
        if self.jobs < 1:
            raise click.ClickException("jobs must be at least 1")


def _resolve(flag, config_value, default):
    if flag is not None:
        return flag
    if config_value is not None:
        return config_value
    return default


@click.group()
@click.pass_context
def main(ctx: click.Context) -> None:
    """Intertextual-graph toolkit for peer review analysis."""
    ctx.obj = Config.from_env()


@main.command()
@click.argument("inputs", nargs=-1, type=click.Path(exists=True, path_type=Path))
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.option("--kind", type=click.Choice(["auto", "jats", "review"]), default="auto")
@click.option("--jobs", type=int, default=None)
@click.pass_obj
def ingest(config: Config, inputs: tuple[Path, ...], out: Path | None,
           kind: str, jobs: int | None) -> None:
    """Convert JATS XML articles or free-text reviews into graph JSON."""
    if not inputs:
        raise click.UsageError("no input files given")
    out_dir = Path(_resolve(out, config.out, "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    n_jobs = _resolve(jobs, config.jobs, 1)

    def run_one(path: Path) -> str | None:
        data = path.read_bytes()
        doc_id = path.stem
        is_jats = kind == "jats" or (kind == "auto" and data.lstrip().startswith(b"<"))
        try:
            if is_jats:
                graph, report = parse_jats(data, IngestOptions(doc_id=doc_id))
            else:
                graph, report = ingest_review(data.decode("utf-8"), doc_id)
        except IngestError as exc:
            return f"{path}: {exc}"
        atomic_write(out_dir / f"{doc_id}.json", serialize(graph))
        atomic_write(out_dir / f"{doc_id}.report.json",
                     canonical_json_bytes(report.to_obj()))
        return None

    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        errors = [e for e in pool.map(run_one, inputs) if e]
    for err in errors:
        click.echo(err, err=True)
    if errors:
        sys.exit(1)
    click.echo(f"wrote {len(inputs)} graph(s) to {out_dir}")


@main.command()
@click.argument("old_graph", type=click.Path(exists=True, path_type=Path))
@click.argument("new_graph", type=click.Path(exists=True, path_type=Path))
@click.option("--metric", type=click.Choice(["levenshtein", "overlap", *METRICS]), default=None)
@click.option("--threshold", type=float, default=None)
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.pass_obj
def align(config: Config, old_graph: Path, new_graph: Path,
          metric: str | None, threshold: float | None, out: Path | None) -> None:
    """Align two revisions of one document; writes alignment JSON + diff text."""
    from .align import AlignmentProblem, AlignmentError, align_versions, diff_report

    metric = canonical_metric(_resolve(metric, config.metric, "levenshtein-ratio"))
    threshold = _resolve(threshold, config.threshold, 0.3)
    old = deserialize(old_graph.read_bytes())
    new = deserialize(new_graph.read_bytes())
    try:
        problem = AlignmentProblem.from_graphs(new, old, metric, threshold)
    except AlignmentError as exc:
        raise click.ClickException(str(exc))
    result = align_versions(problem)
    report = diff_report(result, old, new)
    out_dir = Path(_resolve(out, config.out, "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{result.document}_v{result.old_version}_v{result.new_version}"
    atomic_write(out_dir / f"{stem}.alignment.json", canonical_json_bytes(result.to_obj()))
    atomic_write(out_dir / f"{stem}.diff.txt", report.text.encode("utf-8"))
    click.echo(f"objective {result.objective:.6f}; "
               f"unchanged {len(result.unchanged)}, modified {len(result.modified)}, "
               f"added {len(result.added)}, deleted {len(result.deleted)}")


@main.command()
@click.option("--paper", "paper_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--review", "review_paths", required=True, multiple=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--patterns", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.pass_obj
def extract(config: Config, paper_path: Path, review_paths: tuple[Path, ...],
            patterns: Path | None, out: Path | None) -> None:
    """Detect explicit anchors in reviews and link them into a joint graph."""
    patterns_path = _resolve(patterns, config.patterns, None)
    pset = load_patterns(patterns_path) if patterns_path else None
    paper = deserialize(paper_path.read_bytes())
    paper_doc = paper.documents[0].id
    joint = merge(paper, *[deserialize(p.read_bytes()) for p in review_paths])
    all_links = []
    for review in joint.documents:
        if review.id == paper_doc:
            continue
        links, _ = extract_explicit_links(joint, review.id, paper_doc, patterns=pset)
        all_links.extend(links)
    out_dir = Path(_resolve(out, config.out, "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    atomic_write(out_dir / "joint.json", serialize(joint))
    atomic_write(out_dir / "explicit_links.tsv", links_tsv(all_links).encode("utf-8"))
    resolved = sum(1 for l in all_links if l.resolved)
    click.echo(f"{len(all_links)} anchors, {resolved} resolved")


@main.command()
@click.option("--paper", "paper_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--review", "review_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--m", "m_flag", type=int, default=None)
@click.option("--methods", type=str, default=None, help="comma-separated, e.g. bm25,sbert")
@click.option("--embeddings", "embedding_specs", multiple=True,
              help="NAME=PATH of a precomputed vector table")
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.pass_obj
def suggest_cmd(config: Config, paper_path: Path, review_path: Path,
                m_flag: int | None, methods: str | None,
                embedding_specs: tuple[str, ...], out: Path | None) -> None:
    """Write the suggestion set for every review sentence."""
    method_list = (methods.split(",") if methods
                   else (config.methods or ["bm25"]))
    tables = {}
    for spec in embedding_specs:
        name, _, path = spec.partition("=")
        if not path:
            raise click.UsageError("--embeddings expects NAME=PATH")
        tables[name] = EmbeddingTable.load(path)
    sconfig = SuggestConfig(methods=method_list,
                            m=_resolve(m_flag, config.m, 5), embeddings=tables)
    try:
        sconfig.validate()
    except Exception as exc:
        raise click.ClickException(str(exc))
    paper = deserialize(paper_path.read_bytes())
    review = deserialize(review_path.read_bytes())
    joint = merge(paper, review)
    paper_doc, review_doc = paper.documents[0].id, review.documents[0].id
    index = Bm25Index(joint, paper_doc) if "bm25" in method_list else None
    results = []
    for nid in joint.reading_order(review_doc):
        if joint.node(nid).kind.value != "sentence":
            continue
        results.append(suggest(joint, nid, paper_doc, sconfig, bm25_index=index).to_obj())
    out_dir = Path(_resolve(out, config.out, "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    atomic_write(out_dir / f"{review_doc}.suggestions.json",
                 canonical_json_bytes({"paper": paper_doc, "review": review_doc,
                                       "suggestions": results}))
    click.echo(f"{len(results)} suggestion sets written")


main.add_command(suggest_cmd, name="suggest")


@main.command()
@click.argument("labels", type=click.Path(exists=True, path_type=Path))
@click.option("--layer", type=click.Choice(["pragmatics", "linking"]), default="pragmatics")
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.pass_obj
def agreement(config: Config, labels: Path, layer: str, out: Path | None) -> None:
    """Krippendorff's alpha over a dual-annotated label log."""
    if layer == "pragmatics":
        store = LabelStore.load(labels, append_to=False)
        triples = [(r.node, r.annotator, r.label.value) for r in store.records()]
    else:
        store = LinkLabelStore.load(labels, append_to=False)
        triples = [(f"{r.review}|{r.paper}", r.annotator, r.verdict)
                   for r in store.records()]
    if not triples:
        raise click.ClickException(f"no records in {labels}")
    try:
        data = reliability_from_labels(triples)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    alpha = krippendorff_alpha(data)
    payload = {"alpha": alpha, "layer": layer, "items": "labeled-pairs-only",
               "annotators": data.annotators, "n_items": len(data.values)}
    out_dir = Path(_resolve(out, config.out, "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    atomic_write(out_dir / f"agreement_{layer}.json", canonical_json_bytes(payload))
    click.echo(f"alpha[{layer}] = {alpha:.4f}")


@main.command()
@click.option("--project", "project_dir", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--metric", type=click.Choice(["levenshtein", "overlap", *METRICS]), default=None)
@click.option("--threshold", type=float, default=None)
@click.option("--section-map", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.pass_obj
def stats(config: Config, project_dir: Path, metric: str | None,
          threshold: float | None, section_map: Path | None, out: Path | None) -> None:
    """Joint pragmatics/linking/alignment statistics for one project."""
    from .analysis import MissingLayerError

    project = Project.load(project_dir)
    try:
        payload = stats_bytes(
            project,
            metric=canonical_metric(_resolve(metric, config.metric, "levenshtein-ratio")),
            threshold=_resolve(threshold, config.threshold, 0.3),
            section_map_path=_resolve(section_map, config.section_map, None))
    except MissingLayerError as exc:
        raise click.ClickException(str(exc))
    out_dir = Path(_resolve(out, config.out, "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    atomic_write(out_dir / f"{project.id}.stats.json", payload)
    # plot-ready CSV alongside the JSON
    from .analysis import stats_csv_rows
    rows = stats_csv_rows(json.loads(payload))
    csv_lines = ["statistic,key,channel,value"] + \
        [f"{a},{b},{c},{v}" for a, b, c, v in rows]
    atomic_write(out_dir / f"{project.id}.stats.csv",
                 ("\n".join(csv_lines) + "\n").encode("utf-8"))
    click.echo(f"stats written for project {project.id}")


@main.command()
@click.option("--data-dir", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--port", type=int, default=8040)
@click.option("--host", type=str, default="127.0.0.1")
@click.option("--token", type=str, default=None)
@click.option("--cors-origin", type=str, default="*")
def serve(data_dir: Path, port: int, host: str, token: str | None,
          cors_origin: str) -> None:
    """Run the annotation service over a directory of projects."""
    import uvicorn

    from .service import create_app

    app = create_app(data_dir, token=token, cors_origin=cors_origin)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
