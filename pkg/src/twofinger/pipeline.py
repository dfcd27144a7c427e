"""End-to-end pipeline and layout comparison.

A pipeline run resolves a config (JSON), builds the flow matrix and
geometry, optimizes across the configured seeds, and writes every artifact
plus a manifest that reproduces the run byte for byte. The comparison
report evaluates named layouts on one instance and ranks them.
"""

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .assets import builtin_turkish_flow
from .corpus import Alphabet, FlowMatrix, build_flow_matrix, load_flow_matrix, save_flow_matrix, turkish_alphabet
from .errors import ConfigError, FormatError, InvalidLayoutError
from .ga import GaConfig, GaRun, ga_optimize
from .geometry import canonical_geometry, load_geometry, save_distance_matrix
from .model import (
    Layout,
    QapInstance,
    evaluate,
    format_layout_text,
    save_instance,
    save_layout,
    validate_layout,
)

BUILTIN_FLOW = "builtin:turkish"

_GA_KEYS = (
    "initial_pool",
    "population",
    "generations",
    "crossover_prob",
    "mutation_prob",
    "tournament_size",
    "offspring",
)
_TOP_KEYS = {"flow", "corpus", "geometry", "ga", "seeds", "out_dir", "figures"}
_CORPUS_KEYS = {"files", "alphabet", "bridge_ignored"}


def parse_seeds(spec) -> list[int]:
    """Seed list from an int list, an 'a..b' range, or a comma list."""
    if isinstance(spec, list):
        return [int(s) for s in spec]
    if isinstance(spec, int):
        return [spec]
    text = str(spec).strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise ConfigError(f"empty seed range {text!r}")
        return list(range(lo, hi + 1))
    return [int(tok) for tok in text.split(",") if tok.strip()]


def resolve_alphabet(spec: str) -> Alphabet:
    """'tr29' or a path to a text file whose symbols form the alphabet."""
    if spec == "tr29":
        return turkish_alphabet()
    path = Path(spec)
    if not path.exists():
        raise ConfigError(f"unknown alphabet {spec!r} (expected 'tr29' or a file path)")
    symbols = tuple(ch for ch in path.read_text(encoding="utf-8") if not ch.isspace())
    return Alphabet(symbols)


def _reject_unknown(doc: dict, allowed, where: str) -> None:
    unknown = sorted(set(doc) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown {where} keys: {', '.join(unknown)}")


@dataclass(frozen=True)
class PipelineConfig:
    flow: str | None
    corpus: dict | None
    geometry: str
    ga: dict
    seeds: tuple[int, ...]
    out_dir: str | None
    figures: bool

    @classmethod
    def from_dict(cls, doc: dict) -> "PipelineConfig":
        if not isinstance(doc, dict):
            raise ConfigError("pipeline config must be a JSON object")
        _reject_unknown(doc, _TOP_KEYS, "config")
        flow = doc.get("flow")
        corpus_spec = doc.get("corpus")
        if flow is not None and corpus_spec is not None:
            raise ConfigError("config sets both 'flow' and 'corpus'; pick one")
        if flow is None and corpus_spec is None:
            flow = BUILTIN_FLOW
        if corpus_spec is not None:
            if not isinstance(corpus_spec, dict):
                raise ConfigError("'corpus' must be an object")
            _reject_unknown(corpus_spec, _CORPUS_KEYS, "corpus")
            if not corpus_spec.get("files"):
                raise ConfigError("'corpus.files' must list at least one text file")
            corpus_spec = {
                "files": [str(p) for p in corpus_spec["files"]],
                "alphabet": corpus_spec.get("alphabet", "tr29"),
                "bridge_ignored": bool(corpus_spec.get("bridge_ignored", False)),
            }
        ga_doc = doc.get("ga", {})
        if not isinstance(ga_doc, dict):
            raise ConfigError("'ga' must be an object")
        _reject_unknown(ga_doc, _GA_KEYS, "ga")
        ga = {k: ga_doc[k] for k in _GA_KEYS if k in ga_doc}
        GaConfig(**ga)  # raises ConfigError on bad values
        return cls(
            flow=flow,
            corpus=corpus_spec,
            geometry=str(doc.get("geometry", "canonical")),
            ga=ga,
            seeds=tuple(parse_seeds(doc.get("seeds", "1..10"))),
            out_dir=str(doc["out_dir"]) if doc.get("out_dir") is not None else None,
            figures=bool(doc.get("figures", True)),
        )

    def resolved(self) -> dict:
        """Plain-dict config with every default made explicit (manifest form)."""
        ga = dataclasses.asdict(GaConfig(**self.ga))
        ga.pop("seed")
        doc = {
            "geometry": self.geometry,
            "ga": ga,
            "seeds": list(self.seeds),
            "out_dir": self.out_dir,
            "figures": self.figures,
        }
        if self.corpus is not None:
            doc["corpus"] = dict(self.corpus)
        else:
            doc["flow"] = self.flow
        return doc


def load_pipeline_config(path) -> PipelineConfig:
    """Read a config file; a manifest (recognized by its 'config' key) works too."""
    with open(path, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: {exc}") from None
    if isinstance(doc, dict) and "config" in doc and "tool" in doc:
        doc = doc["config"]
    return PipelineConfig.from_dict(doc)


def build_flow_from_config(config: PipelineConfig) -> FlowMatrix:
    if config.corpus is not None:
        alphabet = resolve_alphabet(config.corpus["alphabet"])
        total = None
        for path in config.corpus["files"]:
            with open(path, "rb") as f:
                data = f.read()
            matrix = build_flow_matrix(data, alphabet, config.corpus["bridge_ignored"])
            total = matrix if total is None else total + matrix
        return total
    if config.flow == BUILTIN_FLOW:
        return builtin_turkish_flow()
    return load_flow_matrix(config.flow)


def build_instance_from_config(config: PipelineConfig) -> QapInstance:
    flow = build_flow_from_config(config)
    if config.geometry == "canonical":
        geometry = canonical_geometry()
    else:
        geometry = load_geometry(config.geometry)
    return QapInstance.build(flow, geometry)


def run_seeds(instance: QapInstance, ga: dict, seeds) -> list[GaRun]:
    return [ga_optimize(instance, GaConfig(seed=seed, **ga)) for seed in seeds]


def pick_best(runs) -> GaRun:
    """Lowest objective wins; ties go to the lexicographically smaller layout,
    then to the earlier run."""
    best = None
    best_key = None
    for run in runs:
        key = (run.best_objective.total, run.best_layout.slot_sequence())
        if best is None or key < best_key:
            best, best_key = run, key
    if best is None:
        raise ConfigError("no seeds configured")
    return best


def history_csv(history) -> str:
    lines = ["generation,best_objective,mean_objective"]
    for gen, (best, mean) in enumerate(history):
        lines.append(f"{gen},{best:.6f},{mean:.6f}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class PipelineResult:
    out_dir: Path
    report: dict
    best_run: GaRun
    instance: QapInstance


def run_pipeline(config: PipelineConfig, out_dir=None) -> PipelineResult:
    """Build -> optimize -> report. Writes all artifacts under `out_dir`."""
    resolved_out = out_dir if out_dir is not None else config.out_dir
    if resolved_out is None:
        raise ConfigError("no output directory: set 'out_dir' in the config or pass --out-dir")
    out = Path(resolved_out)
    out.mkdir(parents=True, exist_ok=True)

    instance = build_instance_from_config(config)
    alphabet = instance.alphabet

    save_flow_matrix(instance.flow, out / "flow.csv")
    distance_files = []
    for z, mat in enumerate(instance.distances):
        name = f"distances_{z}.csv" if len(instance.distances) > 2 else ("left.csv", "right.csv")[z]
        save_distance_matrix(mat, out / name)
        distance_files.append(name)
    save_instance(instance, out / "instance.json")

    runs = run_seeds(instance, config.ga, config.seeds)
    best = pick_best(runs)

    save_layout(best.best_layout, alphabet, out / "best_layout.txt")
    (out / "history.csv").write_text(history_csv(best.history), encoding="utf-8")

    parts = best.best_layout.part_lists()
    ga_doc = dataclasses.asdict(GaConfig(**config.ga))
    ga_doc.pop("seed")
    report = {
        "instance": {
            "alphabet_size": instance.n,
            "zone_sizes": list(instance.zone_sizes),
            "flow_total": instance.flow.total,
        },
        "ga": ga_doc,
        "seeds": list(config.seeds),
        "runs": [
            {
                "seed": run.seed,
                "best_objective": run.best_objective.total,
                "evaluations": run.evaluations,
            }
            for run in runs
        ],
        "best": {
            "seed": best.seed,
            "objective": {
                "total": best.best_objective.total,
                "left": best.best_objective.left,
                "right": best.best_objective.right,
                "cross_mass": best.best_objective.cross_mass,
            },
            "layout": {
                "left": " ".join(alphabet.symbols[s] for s in parts[0]),
                "right": " ".join(alphabet.symbols[s] for s in parts[1]) if len(parts) > 1 else "",
            },
        },
    }
    (out / "report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )

    outputs = {
        "flow": "flow.csv",
        "distances": distance_files,
        "instance": "instance.json",
        "best_layout": "best_layout.txt",
        "history": "history.csv",
        "report": "report.json",
    }
    if config.figures:
        from .viz import plot_history, plot_layout

        plot_history(best.history, out / "history.png", title=f"Best seed {best.seed}")
        plot_layout(best.best_layout, instance, out / "layout.png",
                    title=f"Best layout (objective {best.best_objective.total:,.0f})")
        outputs["figures"] = ["history.png", "layout.png"]

    manifest = {
        "tool": {"name": "twofinger", "version": __version__},
        "config": config.resolved() | {"out_dir": str(resolved_out)},
        "outputs": outputs,
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    return PipelineResult(out_dir=out, report=report, best_run=best, instance=instance)


# --- layout comparison --------------------------------------------------------

@dataclass(frozen=True)
class ComparisonRow:
    name: str
    total: float
    left: float
    right: float
    cross_mass: int
    cross_share: float
    ratio: float


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple[ComparisonRow, ...]

    def to_json(self) -> dict:
        return {
            "rows": [
                {
                    "name": r.name,
                    "total": r.total,
                    "left": r.left,
                    "right": r.right,
                    "cross_mass": r.cross_mass,
                    "cross_share": r.cross_share,
                    "ratio": r.ratio if math.isfinite(r.ratio) else "inf",
                }
                for r in self.rows
            ]
        }

    def to_text(self) -> str:
        width = max([len(r.name) for r in self.rows] + [6])
        lines = [
            f"{'layout':<{width}}  {'total':>14}  {'left':>14}  {'right':>14}  {'cross%':>7}  {'ratio':>8}"
        ]
        for r in self.rows:
            ratio = f"{r.ratio:.4f}" if math.isfinite(r.ratio) else "inf"
            lines.append(
                f"{r.name:<{width}}  {r.total:>14.3f}  {r.left:>14.3f}  {r.right:>14.3f}"
                f"  {100 * r.cross_share:>6.2f}%  {ratio:>8}"
            )
        return "\n".join(lines) + "\n"


def compare_layouts(instance: QapInstance, named_layouts) -> ComparisonReport:
    """Evaluate named layouts on one instance, sorted best first.

    Any invalid layout fails the whole comparison with a diagnostic naming it.
    """
    flow_total = instance.flow.total
    evaluated = []
    for name, layout in named_layouts:
        violations = validate_layout(layout, instance)
        if violations:
            raise InvalidLayoutError(
                [dataclasses.replace(v, message=f"[{name}] {v.message}") for v in violations]
            )
        value = evaluate(layout, instance)
        evaluated.append((name, layout, value))
    evaluated.sort(key=lambda item: (item[2].total, item[1].slot_sequence(), item[0]))
    best_total = evaluated[0][2].total
    rows = []
    for name, _, value in evaluated:
        if best_total > 0:
            ratio = value.total / best_total
        else:
            ratio = 1.0 if value.total == 0 else math.inf
        rows.append(
            ComparisonRow(
                name=name,
                total=value.total,
                left=value.left,
                right=value.right,
                cross_mass=value.cross_mass,
                cross_share=value.cross_mass / flow_total if flow_total else 0.0,
                ratio=ratio,
            )
        )
    return ComparisonReport(rows=tuple(rows))
