"""Command-line front end.

Subcommands: digraph build|load, distance gen|check, evaluate, optimize,
oracle solve|check, compare, export, pipeline. Instances are JSON files or
the literal 'builtin:turkish'.
"""

import concurrent.futures
import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .assets import canonical_turkish_instance
from .corpus import build_flow_matrix, load_flow_matrix, save_flow_matrix
from .errors import ConfigError, InvalidLayoutError, ToolkitError
from .ga import GaConfig, ga_optimize
from .geometry import canonical_geometry, load_distance_matrix, load_geometry, save_distance_matrix, zone_distance_matrices
from .model import (
    evaluate,
    export_instance,
    load_instance,
    load_layout,
    save_layout,
    validate_layout,
)
from .oracle import brute_force_optimal, oracle_evaluate
from .pipeline import (
    BUILTIN_FLOW,
    PipelineConfig,
    compare_layouts,
    history_csv,
    load_pipeline_config,
    parse_seeds,
    pick_best,
    resolve_alphabet,
    run_pipeline,
)

_EVAL_AGREEMENT_TOL = 1e-9


def resolve_instance(spec: str):
    if spec == BUILTIN_FLOW:
        return canonical_turkish_instance()
    return load_instance(spec)


def toolkit_command(f):
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except InvalidLayoutError as exc:
            click.echo("error: invalid layout", err=True)
            for violation in exc.violations:
                click.echo(f"  - {violation}", err=True)
            sys.exit(1)
        except (ToolkitError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


@click.group()
@click.version_option(__version__, prog_name="twofinger")
def main():
    """Split-zone keyboard layout toolkit."""


# --- digraph ------------------------------------------------------------------

@main.group()
def digraph():
    """Character-transition flow matrices."""


@digraph.command("build")
@click.option("--alphabet", default="tr29", show_default=True,
              help="'tr29' or a file listing the alphabet symbols.")
@click.option("--in", "inputs", multiple=True, required=True, type=click.Path(exists=True),
              help="UTF-8 corpus file (repeatable).")
@click.option("--bridge-ignored", is_flag=True,
              help="Let pairs span ignored characters instead of breaking on them.")
@click.option("--out", "out_path", required=True, type=click.Path(), help="Flow CSV to write.")
@toolkit_command
def digraph_build(alphabet, inputs, bridge_ignored, out_path):
    """Count digraphs in text corpora and write the flow CSV."""
    alpha = resolve_alphabet(alphabet)
    total = None
    for path in inputs:
        data = Path(path).read_bytes()
        matrix = build_flow_matrix(data, alpha, bridge_ignored)
        total = matrix if total is None else total + matrix
    save_flow_matrix(total, out_path)
    click.echo(json.dumps({"out": str(out_path), "files": len(inputs), "transitions": total.total}))


@digraph.command("load")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@toolkit_command
def digraph_load(in_path):
    """Validate a flow CSV and print a summary."""
    matrix = load_flow_matrix(in_path)
    counts = matrix.counts
    top = np.dstack(np.unravel_index(np.argsort(counts, axis=None)[::-1][:5], counts.shape))[0]
    click.echo(json.dumps({
        "symbols": matrix.n,
        "transitions": matrix.total,
        "top_pairs": [
            {"pair": matrix.alphabet.symbols[i] + matrix.alphabet.symbols[k],
             "count": int(counts[i, k])}
            for i, k in top
        ],
    }, ensure_ascii=False))


# --- distance -----------------------------------------------------------------

def _resolve_geometry(spec: str):
    return canonical_geometry() if spec == "canonical" else load_geometry(spec)


@main.group()
def distance():
    """Zone distance matrices."""


@distance.command("gen")
@click.option("--geometry", default="canonical", show_default=True,
              help="'canonical' or a geometry JSON file.")
@click.option("--out", "out_paths", nargs=2, required=True, type=click.Path(),
              help="Two CSV paths: left zone, right zone.")
@toolkit_command
def distance_gen(geometry, out_paths):
    """Compute per-zone Euclidean distance matrices."""
    geo = _resolve_geometry(geometry)
    mats = zone_distance_matrices(geo)
    if len(mats) != len(out_paths):
        raise ConfigError(f"geometry has {len(mats)} zones but {len(out_paths)} output paths given")
    for mat, path in zip(mats, out_paths):
        save_distance_matrix(mat, path)
    click.echo(json.dumps({"out": list(out_paths), "zone_sizes": [m.shape[0] for m in mats]}))


@distance.command("check")
@click.option("--against", required=True, type=click.Path(exists=True),
              help="Reference distance CSV to compare with.")
@click.option("--tol", default=0.01, show_default=True, type=float)
@click.option("--zone", default="left", show_default=True, type=click.Choice(["left", "right"]))
@click.option("--geometry", default="canonical", show_default=True)
@toolkit_command
def distance_check(against, tol, zone, geometry):
    """Compare computed distances against a reference matrix."""
    geo = _resolve_geometry(geometry)
    computed = zone_distance_matrices(geo)[0 if zone == "left" else 1]
    reference = load_distance_matrix(against)
    k = min(computed.shape[0], reference.shape[0])
    diff = np.abs(computed[:k, :k] - reference[:k, :k])
    bad = np.argwhere(diff > tol)
    click.echo(f"zone {zone}: compared {k}x{k} block, max |computed - reference| = {diff.max():.6f}")
    for i, j in bad[:20]:
        click.echo(
            f"  ({i + 1},{j + 1}): computed {computed[i, j]:.6f}, reference {reference[i, j]:.6f}"
        )
    if len(bad) > 20:
        click.echo(f"  ... and {len(bad) - 20} more")
    if len(bad):
        click.echo(f"FAIL: {len(bad)} entries beyond tol {tol}")
        sys.exit(1)
    click.echo(f"OK: all entries within tol {tol}")


# --- evaluation ----------------------------------------------------------------

@main.command("evaluate")
@click.option("--instance", "instance_spec", required=True)
@click.option("--layout", "layout_path", required=True, type=click.Path(exists=True))
@toolkit_command
def evaluate_cmd(instance_spec, layout_path):
    """Objective of one layout: JSON {total, left, right, cross_mass}."""
    instance = resolve_instance(instance_spec)
    layout = load_layout(layout_path, instance.alphabet)
    value = evaluate(layout, instance)
    click.echo(json.dumps({
        "total": value.total,
        "left": value.left,
        "right": value.right,
        "cross_mass": value.cross_mass,
    }))


def _ga_config(seed, generations, pop, pool, pc, pm, tournament, offspring) -> GaConfig:
    return GaConfig(
        initial_pool=pool,
        population=pop,
        generations=generations,
        crossover_prob=pc,
        mutation_prob=pm,
        tournament_size=tournament,
        offspring=offspring,
        seed=seed,
    )


def _run_one_seed(args):
    instance, config = args
    return ga_optimize(instance, config)


@main.command("optimize")
@click.option("--instance", "instance_spec", required=True)
@click.option("--seeds", default="1..10", show_default=True, help="Range 'a..b' or comma list.")
@click.option("--generations", default=GaConfig.generations, show_default=True, type=int)
@click.option("--pop", default=GaConfig.population, show_default=True, type=int)
@click.option("--pool", default=GaConfig.initial_pool, show_default=True, type=int)
@click.option("--pc", default=GaConfig.crossover_prob, show_default=True, type=float)
@click.option("--pm", default=GaConfig.mutation_prob, show_default=True, type=float)
@click.option("--tournament", default=GaConfig.tournament_size, show_default=True, type=int)
@click.option("--offspring", default=None, type=int, help="Children per generation [default: --pop].")
@click.option("--out", "out_path", type=click.Path(), help="Write the best layout here.")
@click.option("--history", "history_path", type=click.Path(),
              help="Write the best run's per-generation history CSV here.")
@click.option("--workers", default=1, show_default=True, type=int,
              help="Parallel seed runs; results are merged in seed order either way.")
@toolkit_command
def optimize_cmd(instance_spec, seeds, generations, pop, pool, pc, pm, tournament,
                 offspring, out_path, history_path, workers):
    """Run the genetic algorithm across seeds and keep the best layout."""
    instance = resolve_instance(instance_spec)
    seed_list = parse_seeds(seeds)
    configs = [_ga_config(s, generations, pop, pool, pc, pm, tournament, offspring)
               for s in seed_list]
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool_exec:
            runs = list(pool_exec.map(_run_one_seed, [(instance, c) for c in configs]))
    else:
        runs = [ga_optimize(instance, c) for c in configs]
    best = pick_best(runs)
    if out_path:
        save_layout(best.best_layout, instance.alphabet, out_path)
    if history_path:
        Path(history_path).write_text(history_csv(best.history), encoding="utf-8")
    click.echo(json.dumps({
        "runs": [{"seed": r.seed, "best_objective": r.best_objective.total,
                  "evaluations": r.evaluations} for r in runs],
        "best": {"seed": best.seed, "objective": best.best_objective.total},
    }))


# --- oracle ---------------------------------------------------------------------

@main.group()
def oracle():
    """Exact brute-force reference (small instances)."""


@oracle.command("solve")
@click.option("--instance", "instance_spec", required=True)
@toolkit_command
def oracle_solve(instance_spec):
    """Enumerate every layout and print the optimum."""
    instance = resolve_instance(instance_spec)
    result = brute_force_optimal(instance)
    parts = result.optimal_layout.part_lists()
    click.echo(json.dumps({
        "objective": result.optimal_objective,
        "enumerated": result.enumerated,
        "layout": [" ".join(instance.alphabet.symbols[s] for s in part) for part in parts],
    }, ensure_ascii=False))


@oracle.command("check")
@click.option("--instance", "instance_spec", required=True)
@click.option("--layout", "layout_path", required=True, type=click.Path(exists=True))
@toolkit_command
def oracle_check(instance_spec, layout_path):
    """Print the pair-sum and five-index objective values and their difference."""
    instance = resolve_instance(instance_spec)
    layout = load_layout(layout_path, instance.alphabet)
    fast = evaluate(layout, instance).total
    slow = oracle_evaluate(layout, instance)
    diff = abs(fast - slow)
    click.echo(f"model.evaluate    = {fast:.9f}")
    click.echo(f"oracle_evaluate   = {slow:.9f}")
    click.echo(f"|difference|      = {diff:.3e}")
    if diff > _EVAL_AGREEMENT_TOL:
        click.echo(f"FAIL: evaluators disagree beyond {_EVAL_AGREEMENT_TOL}", err=True)
        sys.exit(1)


# --- compare / export -----------------------------------------------------------

@main.command("compare")
@click.option("--instance", "instance_spec", required=True)
@click.option("--json", "json_path", type=click.Path(), help="Also write the report as JSON.")
@click.option("--plot", "plot_path", type=click.Path(), help="Also render a bar chart.")
@click.argument("layouts", nargs=-1, required=True)
@toolkit_command
def compare_cmd(instance_spec, json_path, plot_path, layouts):
    """Evaluate named layouts (NAME=PATH ...) and rank them."""
    instance = resolve_instance(instance_spec)
    named = []
    for spec in layouts:
        name, sep, path = spec.partition("=")
        if not sep:
            name, path = Path(spec).stem, spec
        named.append((name, load_layout(path, instance.alphabet)))
    report = compare_layouts(instance, named)
    click.echo(report.to_text(), nl=False)
    if json_path:
        Path(json_path).write_text(
            json.dumps(report.to_json(), indent=2, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
    if plot_path:
        from .viz import plot_comparison

        plot_comparison(report.rows, plot_path)


@main.command("export")
@click.option("--instance", "instance_spec", required=True)
@click.option("--format", "fmt", default="qaplib", show_default=True,
              type=click.Choice(["qaplib", "json"]))
@click.option("--out", "out_path", type=click.Path(), help="File to write [default: stdout].")
@toolkit_command
def export_cmd(instance_spec, fmt, out_path):
    """Export an instance as qaplib-like text or JSON."""
    instance = resolve_instance(instance_spec)
    text = export_instance(instance, fmt)
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


# --- pipeline --------------------------------------------------------------------

@main.command("pipeline")
@click.option("--config", "config_path", type=click.Path(exists=True),
              help="Pipeline config JSON (a previously written manifest also works).")
@click.option("--out-dir", type=click.Path(), help="Output directory (overrides the config).")
@click.option("--seeds", default=None, help="Override the config's seeds.")
@click.option("--flow", default=None, help="Override: 'builtin:turkish' or a flow CSV path.")
@click.option("--geometry", default=None, help="Override: 'canonical' or a geometry JSON path.")
@click.option("--generations", default=None, type=int)
@click.option("--pop", default=None, type=int)
@click.option("--pool", default=None, type=int)
@click.option("--pc", default=None, type=float)
@click.option("--pm", default=None, type=float)
@click.option("--tournament", default=None, type=int)
@click.option("--offspring", default=None, type=int)
@click.option("--figures/--no-figures", "figures", default=None,
              help="Render PNG figures (overrides the config; default on).")
@toolkit_command
def pipeline_cmd(config_path, out_dir, seeds, flow, geometry, generations, pop, pool,
                 pc, pm, tournament, offspring, figures):
    """Build flow + distances, optimize, and write all run artifacts."""
    if config_path:
        config = load_pipeline_config(config_path)
        doc = config.resolved()
    else:
        doc = {}
    if seeds is not None:
        doc["seeds"] = seeds
    if flow is not None:
        doc["flow"] = flow
        doc.pop("corpus", None)
    if geometry is not None:
        doc["geometry"] = geometry
    ga_overrides = {
        "generations": generations,
        "population": pop,
        "initial_pool": pool,
        "crossover_prob": pc,
        "mutation_prob": pm,
        "tournament_size": tournament,
        "offspring": offspring,
    }
    for key, value in ga_overrides.items():
        if value is not None:
            doc.setdefault("ga", {})[key] = value
    if figures is not None:
        doc["figures"] = figures
    config = PipelineConfig.from_dict(doc)
    result = run_pipeline(config, out_dir=out_dir)
    click.echo(json.dumps({
        "out_dir": str(result.out_dir),
        "best_seed": result.best_run.seed,
        "best_objective": result.best_run.best_objective.total,
    }))


if __name__ == "__main__":
    main()
