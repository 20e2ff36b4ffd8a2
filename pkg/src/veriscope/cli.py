"""Command-line surface: index, negate, verify, evaluate, analyze.

Human-readable output goes to stdout, logs to stderr, machine artifacts
to files.  --mock switches every provider to the bundled offline
fixtures and is guaranteed not to open a network socket; option flags
take precedence over the config file, and provider credentials come
from the environment variables documented per provider.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from .analysis import (
    kde_by_group,
    read_confidences_csv,
    render_kde_svg,
    write_kde_csv,
)
from .assets import load_prompt, load_scheme
from .datasets import DatasetDescriptor
from .errors import ConfigurationError, EmptyCorpus, VeriscopeError
from .experiment import CONFIDENCES_FILE, ExperimentPlan, run_experiment
from .index import build_local_index
from .mock import MOCK_CONFIG, mock_claims_path, mock_provider_set
from .negation import RemoteNegationProvider, RuleBasedNegator, negate_claim
from .pipeline import ClaimCondition, ProviderSet, verify_claim
from .selection import RemoteEmbedder
from .sources import LocalCorpusSource, WebSearchSource
from .types import (
    CANONICAL_SOURCES,
    MERGED,
    PUBMED,
    WEB,
    ClaimPair,
    PipelineConfig,
    SourceKind,
    source_order_key,
)
from .verdict import RemoteVerdictProvider

log = logging.getLogger("veriscope")

EXIT_USAGE = 2
EXIT_PROVIDER_CONFIG = 3

_SOURCE_BY_NAME = {kind.name: kind for kind in CANONICAL_SOURCES}


def _setup_logging(level: str) -> None:
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, level.upper(), logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    config_path = Path(path)
    if not config_path.exists():
        raise click.UsageError(f"config file not found: {config_path}")
    try:
        return json.loads(config_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise click.UsageError(f"config file {config_path} is not valid JSON: {exc}")


def _pipeline_config(config: dict, mock: bool) -> PipelineConfig:
    fields = {
        key: config[key]
        for key in ("retrieval_depth", "selection_docs", "sentences_per_doc", "final_top_p", "seed")
        if key in config
    }
    if "merge_heuristic" in config:
        fields["merge_heuristic"] = bool(config["merge_heuristic"])
    if not fields:
        return MOCK_CONFIG if mock else PipelineConfig()
    if "retrieval_depth" in fields and "selection_docs" not in fields:
        fields["selection_docs"] = min(PipelineConfig().selection_docs, fields["retrieval_depth"])
    try:
        return PipelineConfig(**fields)
    except (TypeError, ValueError) as exc:
        raise click.UsageError(f"invalid pipeline config: {exc}")


def _parse_sources(spec: str | None) -> list[SourceKind]:
    if not spec:
        return list(CANONICAL_SOURCES)
    kinds = []
    for name in spec.split(","):
        name = name.strip().lower()
        if name not in _SOURCE_BY_NAME:
            raise click.UsageError(
                f"unknown source {name!r}; choose from {', '.join(_SOURCE_BY_NAME)}"
            )
        kinds.append(_SOURCE_BY_NAME[name])
    return kinds


def _live_provider_set(config: dict, sources: list[SourceKind]) -> ProviderSet:
    from .index import LocalIndex
    from .selection import HashedBowEmbedder
    from .sources import BiomedicalSource

    if config.get("remote_embedder"):
        embedder = RemoteEmbedder()
    else:
        embedder = HashedBowEmbedder()
    source_map = {}
    for kind in sources:
        if kind == WEB:
            source_map[kind] = WebSearchSource()
            continue
        index_key = f"{kind.name}_index"
        index_dir = config.get(index_key)
        if not index_dir:
            raise ConfigurationError(
                f"live mode needs config key {index_key!r} pointing at a built index "
                f"(run: veriscope index <corpus> --out <dir>)"
            )
        index = LocalIndex.load(Path(index_dir))
        if kind == PUBMED and config.get("pubmed_dense_fusion"):
            source_map[kind] = BiomedicalSource(kind, index, embedder=embedder)
        else:
            source_map[kind] = LocalCorpusSource(kind, index)
    return ProviderSet(
        sources=source_map,
        embedder=embedder,
        verdicts=RemoteVerdictProvider(),
        negator=RemoteNegationProvider(),
    )


def _provider_set(mock: bool, config: dict, sources: list[SourceKind]) -> ProviderSet:
    if mock:
        requested_remotes = [key for key in ("remote_embedder",) if config.get(key)]
        if requested_remotes:
            raise ConfigurationError(
                f"mock mode forbids remote providers; drop {', '.join(requested_remotes)} "
                "from the config or run without --mock"
            )
        full = mock_provider_set()
        return ProviderSet(
            sources={kind: full.sources[kind] for kind in sources},
            embedder=full.embedder,
            verdicts=full.verdicts,
            negator=full.negator,
        )
    return _live_provider_set(config, sources)


@click.group()
@click.option("--log-level", default="warning", show_default=True,
              type=click.Choice(["debug", "info", "warning", "error"]))
def main(log_level: str) -> None:
    """Dual-perspective multi-source claim verification."""
    _setup_logging(log_level)


@main.command("index")
@click.argument("corpus", type=click.Path(exists=True, path_type=Path))
@click.option("--out", required=True, type=click.Path(path_type=Path), help="Index directory.")
def cmd_index(corpus: Path, out: Path) -> None:
    """Build the local BM25 index from a JSONL corpus."""
    try:
        index = build_local_index(corpus, out)
    except EmptyCorpus as exc:
        raise click.ClickException(str(exc))
    suffix = f" ({index.skipped} lines skipped)" if index.skipped else ""
    click.echo(f"indexed {index.doc_count} documents, {index.term_count} terms{suffix}")


@main.command("negate")
@click.argument("claim_text")
@click.option("--mock", is_flag=True, help="Use offline fixture/rule-based negation.")
@click.option("--json", "as_json", is_flag=True, help="Emit a JSON object.")
def cmd_negate(claim_text: str, mock: bool, as_json: bool) -> None:
    """Generate the negated counterpart of one claim."""
    try:
        if mock:
            provider = mock_provider_set().negator
        else:
            provider = RemoteNegationProvider()
        claim = negate_claim(
            ClaimPair(id="cli", text=claim_text), provider, fallback=RuleBasedNegator()
        )
    except ConfigurationError as exc:
        click.echo(f"provider configuration error: {exc}", err=True)
        sys.exit(EXIT_PROVIDER_CONFIG)
    except VeriscopeError as exc:
        raise click.ClickException(str(exc))
    if as_json:
        click.echo(json.dumps({"claim": claim.text, "negation": claim.negated_text}))
    else:
        click.echo(claim.negated_text)


def _render_verification(result) -> str:
    lines = [f"Claim: {result.claim.text}"]
    if result.claim.negated_text:
        lines.append(f"Negation: {result.claim.negated_text}")
    lines.append("Evidence:")
    if result.aggregated.sentences:
        for i, sentence in enumerate(result.aggregated.sentences, start=1):
            lines.append(
                f"  {i}. [{sentence.source.name}/{sentence.doc_id}] "
                f"{sentence.text} (sim {sentence.similarity:.3f})"
            )
    else:
        lines.append("  (none)")
    lines.append("Per-source verdicts:")
    for kind in sorted(result.verdicts, key=source_order_key):
        if kind == MERGED:
            continue
        verdict = result.verdicts[kind]
        lines.append(f"  {kind.name:<12} {verdict.label:<24} conf {verdict.confidence:.4f}")
    profile = result.profile
    regime = profile.regime.value if profile.regime else "n/a"
    spread = f"{profile.dispersion:.4f}" if profile.dispersion is not None else "n/a"
    lines.append(f"Agreement: {regime}   dispersion: {spread}")
    merged = result.verdicts.get(MERGED)
    if merged is not None:
        lines.append(f"Merged verdict: {merged.label} (conf {merged.confidence:.4f})")
    for kind, message in sorted(result.source_errors.items(), key=lambda kv: source_order_key(kv[0])):
        lines.append(f"warning: {kind.name}: {message}")
    return "\n".join(lines)


@main.command("verify")
@click.argument("claim_text")
@click.option("--mock", is_flag=True, help="Run fully offline on bundled fixtures.")
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None)
@click.option("--sources", "sources_spec", default=None,
              help="Comma-separated subset of wikipedia,pubmed,web.")
@click.option("--condition", type=click.Choice([c.value for c in ClaimCondition]),
              default=ClaimCondition.ORIGINAL_PLUS_NEGATED.value, show_default=True)
@click.option("--scheme", "scheme_name", default="scifact", show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Emit one JSON object on stdout.")
def cmd_verify(claim_text, mock, config_path, sources_spec, condition, scheme_name, as_json):
    """Verify a single claim end to end."""
    config = _load_config_file(config_path)
    sources = _parse_sources(sources_spec)
    scheme = load_scheme(scheme_name)
    try:
        providers = _provider_set(mock, config, sources)
        result = verify_claim(
            ClaimPair(id="cli", text=claim_text),
            providers,
            scheme,
            load_prompt("verdict"),
            cfg=_pipeline_config(config, mock),
            condition=ClaimCondition(condition),
        )
    except ConfigurationError as exc:
        click.echo(f"provider configuration error: {exc}", err=True)
        sys.exit(EXIT_PROVIDER_CONFIG)
    except VeriscopeError as exc:
        raise click.ClickException(str(exc))
    if as_json:
        click.echo(json.dumps(result.to_dict(), sort_keys=True))
    else:
        click.echo(_render_verification(result))


@main.command("evaluate")
@click.option("--claims", "claims_path", type=click.Path(path_type=Path), default=None,
              help="JSONL claims file (defaults to the bundled fixture set in mock mode).")
@click.option("--dataset", "dataset_name", default="fixture", show_default=True)
@click.option("--scheme", "scheme_name", default="scifact", show_default=True)
@click.option("--mock", is_flag=True, help="Run fully offline on bundled fixtures.")
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None)
@click.option("--sources", "sources_spec", default=None)
@click.option("--condition", type=click.Choice([c.value for c in ClaimCondition]),
              default=ClaimCondition.ORIGINAL_PLUS_NEGATED.value, show_default=True)
@click.option("--limit", type=int, default=None, help="Evaluate only N claims (seeded shuffle).")
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), default=None,
              help="Run directory [default: runs/<dataset>-<condition>].")
@click.option("--max-workers", type=int, default=4, show_default=True)
def cmd_evaluate(claims_path, dataset_name, scheme_name, mock, config_path, sources_spec,
                 condition, limit, seed, out_dir, max_workers):
    """Run the experiment grid over a claims file and report metrics."""
    config = _load_config_file(config_path)
    sources = _parse_sources(sources_spec)
    scheme = load_scheme(scheme_name)
    if claims_path is None:
        if not mock:
            raise click.UsageError("--claims is required outside mock mode")
        claims_path = mock_claims_path()
    cfg = _pipeline_config(config, mock)
    if seed is not None:
        import dataclasses

        cfg = dataclasses.replace(cfg, seed=seed)
    if out_dir is None:
        out_dir = Path("runs") / f"{dataset_name}-{condition.replace('+', '-')}"
    plan = ExperimentPlan(
        dataset=DatasetDescriptor(name=dataset_name, scheme=scheme, path=Path(claims_path)),
        sources=tuple(sources),
        condition=ClaimCondition(condition),
        cfg=cfg,
        limit=limit,
    )
    try:
        providers = _provider_set(mock, config, sources)
        run_dir = run_experiment(plan, providers, Path(out_dir), max_workers=max_workers)
    except ConfigurationError as exc:
        click.echo(f"provider configuration error: {exc}", err=True)
        sys.exit(EXIT_PROVIDER_CONFIG)
    except VeriscopeError as exc:
        raise click.ClickException(str(exc))
    metrics = json.loads((run_dir / "metrics.json").read_text(encoding="utf-8"))
    click.echo(f"run artifacts: {run_dir}")
    click.echo(f"{'source':<12} {'A':>7} {'P':>7} {'R':>7} {'F1':>7} {'abstain':>8}")
    for source_name, report in metrics["per_source"].items():
        click.echo(
            f"{source_name:<12} {report['accuracy']:>7.3f} {report['macro_precision']:>7.3f} "
            f"{report['macro_recall']:>7.3f} {report['macro_f1']:>7.3f} "
            f"{metrics['abstentions'][source_name]:>8d}"
        )


@main.command("analyze")
@click.argument("run_dir", type=click.Path(path_type=Path))
@click.option("--grid-points", type=int, default=512, show_default=True)
@click.option("--svg", "with_svg", is_flag=True, help="Also render kde.svg.")
def cmd_analyze(run_dir: Path, grid_points: int, with_svg: bool) -> None:
    """Compute confidence-density curves per (regime, source) from a run."""
    run_dir = Path(run_dir)
    confidences = run_dir / CONFIDENCES_FILE
    if not confidences.exists():
        raise click.UsageError(f"{confidences} not found; run evaluate first")
    rows = read_confidences_csv(confidences)
    curves, skipped = kde_by_group(rows, grid_points=grid_points)
    write_kde_csv(curves, run_dir / "kde.csv")
    for regime, source, reason in skipped:
        click.echo(f"skipped regime={regime} source={source}: {reason}", err=True)
    click.echo(f"wrote {run_dir / 'kde.csv'} ({len(curves)} curves)")
    if with_svg:
        render_kde_svg(curves, run_dir / "kde.svg")
        click.echo(f"wrote {run_dir / 'kde.svg'}")


if __name__ == "__main__":
    main()
