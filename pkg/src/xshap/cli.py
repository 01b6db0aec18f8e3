"""CSV-in / JSON-out command line: ``xshap explain|metrics|validate|synth``.

Exit codes: 0 ok, 2 configuration error, 3 data error, 4 model or protocol
error, 5 numerical error.  All diagnostic text goes to stderr; stdout carries
only the JSON (or flattened CSV) payload, byte-identical across runs with the
same seed and inputs, whatever ``--jobs`` says.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import plots
from .coalitions import CoalitionPlan, enumerate_coalitions
from .data import (
    EncodedTable,
    SplitPlan,
    TabularFile,
    encode_table,
    filter_mask,
    load_csv,
    parse_filter,
    split_and_sample,
    synthesize,
    write_csv,
)
from .errors import (
    ConfigError,
    ExplanationError,
    ExternalModelError,
    IngestionError,
    InvalidArgumentError,
    NonPositivePredictionError,
    NonPositiveValueError,
    RankDeficientError,
    TooManyFeaturesError,
    XShapError,
)
from .explain import ReferenceSet, explain_batch
from .metrics import (
    ExplanationBatch,
    GroupSpec,
    group_contribution,
    partial_dependence,
    summary_data,
)
from .models import ExternalModel, fit_gbt, fit_log_glm
from .validate import (
    convergence_curve,
    glm_reconciliation_check,
    local_accuracy_stats,
    oracle_equivalence_check,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_MODEL = 4
EXIT_NUMERICAL = 5

# Budget grid for the validate convergence check; capped at full enumeration.
CONVERGENCE_BUDGETS = (50, 100, 200, 500, 1000, 2000)
LOCAL_ACCURACY_LIMIT = 1e-10
CONVERGENCE_LIMIT = 1e-2
ORACLE_EQUIV_LIMIT = 1e-8
GLM_RECON_LIMIT = 1e-6


@dataclass
class RunConfig:
    """Mirror of the command-line flags shared by explain/metrics/validate."""

    data: str
    target: str
    seed: int
    model: str = "glm"
    extern_cmd: str | None = None
    mode: str = "multiplicative"
    ref_size: int = 100
    coalitions: int = 2000
    split: float = 0.7
    rows: str = "all"
    filters: list[str] = field(default_factory=list)
    pd_feature: str | None = None
    pd_bins: int = 25
    format: str = "json"
    jobs: int = 1
    plots_dir: str | None = None

    def __post_init__(self):
        if self.model not in ("glm", "gbt", "extern"):
            raise ConfigError(f"unknown model kind {self.model!r}")
        if self.model == "extern" and not self.extern_cmd:
            raise ConfigError("--model extern needs --extern-cmd")
        if self.mode not in ("multiplicative", "additive", "both"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if not 0.0 < self.split < 1.0:
            raise ConfigError(f"split fraction must be in (0, 1), got {self.split}")
        if self.ref_size < 1:
            raise ConfigError(f"reference size must be >= 1, got {self.ref_size}")
        if self.coalitions < 2:
            raise ConfigError(f"coalition budget must be >= 2, got {self.coalitions}")
        if self.pd_bins < 1:
            raise ConfigError(f"pd bins must be >= 1, got {self.pd_bins}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"unknown output format {self.format!r}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        if self.seed is None:
            raise ConfigError("a seed is mandatory; there is no wall-clock fallback")


def _parse_row_selector(spec: str, n: int) -> list[int]:
    """'all', 'a:b' (half-open), or comma-separated indices into the test set."""
    spec = spec.strip()
    if spec == "all":
        return list(range(n))
    if ":" in spec:
        start_s, stop_s = spec.split(":", 1)
        try:
            start = int(start_s) if start_s else 0
            stop = int(stop_s) if stop_s else n
        except ValueError:
            raise ConfigError(f"bad row selector {spec!r}") from None
        if not 0 <= start <= stop <= n:
            raise ConfigError(f"row range {spec!r} out of bounds for {n} test rows")
        return list(range(start, stop))
    try:
        indices = [int(tok) for tok in spec.split(",") if tok.strip() != ""]
    except ValueError:
        raise ConfigError(f"bad row selector {spec!r}") from None
    if not indices:
        raise ConfigError("empty row selector")
    for i in indices:
        if not 0 <= i < n:
            raise ConfigError(f"row index {i} out of bounds for {n} test rows")
    return indices


@dataclass
class PreparedRun:
    """Everything a command needs: data, fitted model, reference, plan."""

    raw: TabularFile
    encoded: EncodedTable
    split: SplitPlan
    model: object
    ref: ReferenceSet
    plan: CoalitionPlan
    selected: list[int]  # positions within the test set

    @property
    def names(self) -> tuple[str, ...]:
        return self.encoded.features.names

    @property
    def test_matrix(self) -> np.ndarray:
        return self.encoded.features.values[self.split.test]

    @property
    def selected_matrix(self) -> np.ndarray:
        return self.test_matrix[self.selected]


def _fit_model(cfg: RunConfig, X_train: np.ndarray, y_train: np.ndarray):
    if cfg.model == "glm":
        return fit_log_glm(X_train, y_train)
    if cfg.model == "gbt":
        return fit_gbt(X_train, y_train)
    mode = "additive" if cfg.mode == "additive" else "multiplicative"
    return ExternalModel(cfg.extern_cmd, mode=mode)


def prepare_run(cfg: RunConfig) -> PreparedRun:
    raw = load_csv(cfg.data)
    encoded = encode_table(raw, cfg.target)
    if cfg.mode in ("multiplicative", "both") and np.any(encoded.target <= 0.0):
        bad = int(np.flatnonzero(encoded.target <= 0.0)[0])
        raise NonPositiveValueError(
            f"target {cfg.target!r} must be strictly positive in multiplicative mode; "
            f"row {bad} has {encoded.target[bad]}",
            index=bad,
        )
    split = split_and_sample(encoded.features.n, cfg.split, cfg.ref_size, cfg.seed)
    X = encoded.features.values
    model = _fit_model(cfg, X[split.train], encoded.target[split.train])
    ref = ReferenceSet.build(model, X[split.reference])
    plan = enumerate_coalitions(encoded.features.m, cfg.coalitions)
    selected = _parse_row_selector(cfg.rows, len(split.test))
    return PreparedRun(
        raw=raw, encoded=encoded, split=split, model=model, ref=ref, plan=plan, selected=selected
    )


def _reference_baselines(ref: ReferenceSet) -> dict:
    try:
        geometric = ref.multiplicative_baseline
    except NonPositivePredictionError:
        geometric = None
    return {"arithmetic": ref.additive_baseline, "geometric": geometric}


def _feature_record(name: str, value: float, contribution: float, mode: str) -> dict:
    if mode == "multiplicative":
        importance = max(contribution, 1.0 / contribution)
    else:
        importance = abs(contribution)
    return {
        "name": name,
        "value": float(value),
        "contribution": float(contribution),
        "importance": float(importance),
    }


def _explain_block(run: PreparedRun, mode: str, jobs: int) -> dict:
    X_sel = run.selected_matrix
    explanations = explain_batch(run.model, X_sel, run.ref, run.plan, mode=mode, jobs=jobs)
    rows = []
    for pos, (sel, e) in enumerate(zip(run.selected, explanations)):
        features = [
            _feature_record(run.names[j], X_sel[pos, j], e.contributions[j], mode)
            for j in range(len(run.names))
        ]
        rows.append(
            {
                "index": int(sel),
                "source_row": int(run.split.test[sel]),
                "prediction": float(e.prediction),
                "features": features,
            }
        )
    baseline = explanations[0].baseline if explanations else None
    return {
        "baseline": baseline,
        "mode": mode,
        "reference_baselines": _reference_baselines(run.ref),
        "rows": rows,
    }


def _emit(text: str, out) -> None:
    out.write(text)
    if not text.endswith("\n"):
        out.write("\n")


def _explain_csv(blocks: list[dict]) -> str:
    buf = io.StringIO()
    buf.write("mode,index,source_row,prediction,baseline,feature,value,contribution,importance\n")
    for block in blocks:
        for row in block["rows"]:
            for feat in row["features"]:
                buf.write(
                    f"{block['mode']},{row['index']},{row['source_row']},"
                    f"{row['prediction']!r},{block['baseline']!r},{feat['name']},"
                    f"{feat['value']!r},{feat['contribution']!r},{feat['importance']!r}\n"
                )
    return buf.getvalue()


def cmd_explain(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    run = prepare_run(cfg)
    modes = ["multiplicative", "additive"] if cfg.mode == "both" else [cfg.mode]
    blocks = [_explain_block(run, mode, cfg.jobs) for mode in modes]
    if cfg.format == "json":
        payload = blocks[0] if len(blocks) == 1 else {b["mode"]: b for b in blocks}
        _emit(json.dumps(payload, indent=2), out)
    else:
        _emit(_explain_csv(blocks), out)
    if cfg.plots_dir:
        outdir = Path(cfg.plots_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        for block in blocks:
            if block["mode"] != "multiplicative":
                continue
            for row in block["rows"]:
                plots.plot_local_factors(
                    names=[f["name"] for f in row["features"]],
                    values=[f["value"] for f in row["features"]],
                    contributions=[f["contribution"] for f in row["features"]],
                    baseline=block["baseline"],
                    prediction=row["prediction"],
                    path=outdir / f"factors_row{row['source_row']}.png",
                )
    return EXIT_OK


def _build_batch(run: PreparedRun, jobs: int) -> ExplanationBatch:
    X_sel = run.selected_matrix
    explanations = explain_batch(run.model, X_sel, run.ref, run.plan, mode="multiplicative", jobs=jobs)
    return ExplanationBatch.from_explanations(explanations, X_sel, feature_names=run.names)


def _group_blocks(cfg: RunConfig, run: PreparedRun, batch: ExplanationBatch) -> list[dict]:
    blocks = [
        {
            "label": "all",
            "count": batch.n,
            "contributions": [float(v) for v in group_contribution(batch, GroupSpec(tuple(range(batch.n)), "all"))],
        }
    ]
    for text in cfg.filters:
        predicates = parse_filter(text)
        mask = filter_mask(run.raw, predicates)
        absolute = run.split.test[run.selected]
        members = tuple(i for i, src in enumerate(absolute) if mask[src])
        if members:
            contrib = [float(v) for v in group_contribution(batch, GroupSpec(members, text))]
        else:
            contrib = None
        blocks.append({"label": text, "count": len(members), "contributions": contrib})
    return blocks


def _metrics_payload(cfg: RunConfig, run: PreparedRun, batch: ExplanationBatch) -> dict:
    summary = summary_data(batch)
    importance_table = [
        {"name": run.names[j], "importance": float(summary.importance[k])}
        for k, j in enumerate(summary.order)
    ]
    summary_block = [
        {
            "name": run.names[j],
            "importance": float(summary.importance[k]),
            "points": [[float(v), float(c)] for v, c in summary.pairs[k]],
        }
        for k, j in enumerate(summary.order)
    ]
    pd_block = None
    if cfg.pd_feature is not None:
        try:
            feature = run.names.index(cfg.pd_feature)
        except ValueError:
            raise ConfigError(
                f"unknown PD feature {cfg.pd_feature!r}; encoded features are {list(run.names)}"
            ) from None
        curve = partial_dependence(batch, feature, bins=cfg.pd_bins)
        pd_block = {
            "feature": cfg.pd_feature,
            "edges": [float(e) for e in curve.edges],
            "values": [None if np.isnan(v) else float(v) for v in curve.values],
            "counts": [int(c) for c in curve.counts],
        }
    return {
        "mode": "multiplicative",
        "baseline": batch.baseline,
        "prediction_geomean": batch.prediction_geomean(),
        "importance": importance_table,
        "summary": summary_block,
        "partial_dependence": pd_block,
        "groups": _group_blocks(cfg, run, batch),
    }


def cmd_metrics(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    run = prepare_run(cfg)
    batch = _build_batch(run, cfg.jobs)
    payload = _metrics_payload(cfg, run, batch)
    if cfg.format == "json":
        _emit(json.dumps(payload, indent=2), out)
    else:
        buf = io.StringIO()
        buf.write("record,label,feature,value_a,value_b,value_c\n")
        for entry in payload["importance"]:
            buf.write(f"importance,,{entry['name']},{entry['importance']!r},,\n")
        for group in payload["groups"]:
            if group["contributions"] is None:
                continue
            for j, name in enumerate(run.names):
                buf.write(f"group,{group['label']},{name},{group['contributions'][j]!r},,\n")
        if payload["partial_dependence"] is not None:
            pd_block = payload["partial_dependence"]
            for b in range(len(pd_block["counts"])):
                value = pd_block["values"][b]
                buf.write(
                    f"pd,{pd_block['feature']},bin{b},{pd_block['edges'][b]!r},"
                    f"{pd_block['edges'][b + 1]!r},{'' if value is None else repr(value)}\n"
                )
        _emit(buf.getvalue(), out)
    if cfg.plots_dir:
        outdir = Path(cfg.plots_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        names_sorted = [e["name"] for e in payload["importance"]]
        imps_sorted = [e["importance"] for e in payload["importance"]]
        plots.plot_importance(names_sorted, imps_sorted, outdir / "importance.png")
        summary = summary_data(batch)
        plots.plot_summary(names_sorted, imps_sorted, summary.pairs, outdir / "summary.png")
        if payload["partial_dependence"] is not None:
            pd_block = payload["partial_dependence"]
            plots.plot_partial_dependence(
                pd_block["feature"],
                np.array(pd_block["edges"]),
                np.array([np.nan if v is None else v for v in pd_block["values"]]),
                np.array(pd_block["counts"]),
                outdir / "partial_dependence.png",
            )
        groups = [g for g in payload["groups"] if g["contributions"] is not None]
        if len(groups) > 1:
            plots.plot_group_contributions(
                [g["label"] for g in groups],
                run.names,
                np.array([g["contributions"] for g in groups]),
                outdir / "groups.png",
            )
    return EXIT_OK


def cmd_validate(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    run = prepare_run(cfg)
    checks: list[dict] = []
    X_sel = run.selected_matrix

    modes = ["multiplicative", "additive"] if cfg.mode == "both" else [cfg.mode]
    for mode in modes:
        explanations = explain_batch(run.model, X_sel, run.ref, run.plan, mode=mode, jobs=cfg.jobs)
        stats = local_accuracy_stats(explanations)
        passed = stats["mean_ape"] <= LOCAL_ACCURACY_LIMIT and stats["max_ape"] <= LOCAL_ACCURACY_LIMIT
        checks.append(
            {
                "name": f"local_accuracy_{mode}",
                "status": "passed" if passed else "failed",
                "limit": LOCAL_ACCURACY_LIMIT,
                **stats,
            }
        )

    conv_rows = X_sel[: min(10, X_sel.shape[0])]
    m = run.encoded.features.m
    grid = sorted({min(b, 2**m - 2) for b in CONVERGENCE_BUDGETS})
    if len(grid) < 2:
        # every grid point reaches full enumeration: estimates are exact there
        budgets, errors = grid, [0.0]
    else:
        budgets, errors = convergence_curve(
            run.model, conv_rows, run.ref, grid, mode=modes[0], jobs=cfg.jobs
        )
    binding = [e for b, e in zip(budgets, errors) if b >= 500]
    endpoint = binding[0] if binding else errors[-1]
    checks.append(
        {
            "name": "convergence",
            "status": "passed" if endpoint <= CONVERGENCE_LIMIT else "failed",
            "limit": CONVERGENCE_LIMIT,
            "rows": int(conv_rows.shape[0]),
            "budgets": budgets,
            "max_relative_change": errors,
            "endpoint_error": endpoint,
        }
    )

    if m <= 10:
        oracle = oracle_equivalence_check(
            run.model, X_sel[: min(3, X_sel.shape[0])], run.ref, rtol=ORACLE_EQUIV_LIMIT
        )
        checks.append(
            {
                "name": "oracle_equivalence",
                "status": "passed" if oracle.pop("passed") else "failed",
                **oracle,
            }
        )
    else:
        checks.append(
            {"name": "oracle_equivalence", "status": "skipped", "reason": f"m = {m} > 10"}
        )

    if cfg.model == "glm" and m <= 10:
        recon = glm_reconciliation_check(
            run.model, X_sel[: min(3, X_sel.shape[0])], run.ref, rtol=GLM_RECON_LIMIT
        )
        checks.append(
            {
                "name": "glm_closed_form",
                "status": "passed" if recon.pop("passed") else "failed",
                **recon,
            }
        )
    elif cfg.model == "glm":
        checks.append({"name": "glm_closed_form", "status": "skipped", "reason": f"m = {m} > 10"})

    all_passed = all(c["status"] != "failed" for c in checks)
    payload = {"passed": all_passed, "checks": checks}
    if cfg.format == "json":
        _emit(json.dumps(payload, indent=2), out)
    else:
        buf = io.StringIO()
        buf.write("check,status,detail\n")
        for c in checks:
            detail = {k: v for k, v in c.items() if k not in ("name", "status")}
            buf.write(f"{c['name']},{c['status']},\"{detail}\"\n")
        _emit(buf.getvalue(), out)
    if cfg.plots_dir:
        outdir = Path(cfg.plots_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        plots.plot_convergence(budgets, errors, outdir / "convergence.png")
    return EXIT_OK if all_passed else EXIT_NUMERICAL


def cmd_synth(args, out=None) -> int:
    out = out or sys.stdout
    table, target = synthesize(
        rows=args.rows,
        features=args.features,
        seed=args.seed,
        noise=args.noise,
        correlation=args.correlation,
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_csv(table, target, "target", fh)
    else:
        write_csv(table, target, "target", out)
    return EXIT_OK


def _load_config_file(path: str) -> dict[str, str]:
    """key = value lines; '#' starts a comment; keys match flag names."""
    overrides: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {line!r}")
        key, value = stripped.split("=", 1)
        key = key.strip().replace("-", "_")
        value = value.strip().strip("\"'")
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        overrides[key] = value
    return overrides


class _ConfigAwareParser:
    """Wraps a subparser so config-file values become (converted) defaults;
    explicit flags still win because argparse only applies defaults to
    unseen options."""

    def __init__(self, parser: argparse.ArgumentParser, overrides: dict[str, str]):
        self.parser = parser
        self.overrides = overrides

    def add(self, *names, **kwargs):
        dest = kwargs.get("dest") or names[0].lstrip("-").replace("-", "_")
        if dest in self.overrides:
            raw = self.overrides[dest]
            if kwargs.get("action") == "append":
                kwargs["default"] = [tok.strip() for tok in raw.split(";") if tok.strip()]
            else:
                typ = kwargs.get("type", str)
                try:
                    kwargs["default"] = typ(raw)
                except ValueError as exc:
                    raise ConfigError(f"config value {dest} = {raw!r}: {exc}") from exc
            kwargs.pop("required", None)
        self.parser.add_argument(*names, **kwargs)


def _add_run_flags(sub: _ConfigAwareParser) -> None:
    sub.add("--data", required=True, help="input CSV path")
    sub.add("--target", required=True, help="name of the target column")
    sub.add("--model", default="glm", choices=("glm", "gbt", "extern"), help="predictor to explain")
    sub.add("--extern-cmd", default=None, help="command line for --model extern")
    sub.add(
        "--mode",
        default="multiplicative",
        choices=("multiplicative", "additive", "both"),
        help="attribution mode",
    )
    sub.add("--ref-size", type=int, default=100, help="reference sample size")
    sub.add("--coalitions", type=int, default=2000, help="coalition budget K")
    sub.add("--split", type=float, default=0.7, help="train fraction")
    sub.add("--seed", type=int, required=True, help="seed for split/reference sampling")
    sub.add("--rows", default="all", help="test rows to explain: all, a:b, or i,j,k")
    sub.add(
        "--filter",
        action="append",
        dest="filters",
        default=[],
        help="group filter like 'age<30' (repeatable; & joins clauses)",
    )
    sub.add("--pd-feature", default=None, help="feature name for partial dependence")
    sub.add("--pd-bins", type=int, default=25, help="partial dependence bin count")
    sub.add("--format", default="json", choices=("json", "csv"), help="output format")
    sub.add("--jobs", type=int, default=os.cpu_count() or 1, help="parallel explanation workers")
    sub.add("--plots", dest="plots_dir", default=None, help="also render figures into this directory")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        data=args.data,
        target=args.target,
        seed=args.seed,
        model=args.model,
        extern_cmd=args.extern_cmd,
        mode=args.mode,
        ref_size=args.ref_size,
        coalitions=args.coalitions,
        split=args.split,
        rows=args.rows,
        filters=list(args.filters),
        pd_feature=args.pd_feature,
        pd_bins=args.pd_bins,
        format=args.format,
        jobs=args.jobs,
        plots_dir=args.plots_dir,
    )


def build_parser(overrides: dict[str, str] | None = None) -> argparse.ArgumentParser:
    overrides = overrides or {}
    parser = argparse.ArgumentParser(
        prog="xshap",
        description="Multiplicative (and additive) Shapley-value attributions over CSV data.",
    )
    parser.add_argument("--config", help="key = value file; explicit flags override it")
    commands = parser.add_subparsers(dest="command", required=True)

    for name, help_text, func in (
        ("explain", "per-row factor breakdowns", cmd_explain),
        ("metrics", "importance, summary, partial dependence, groups", cmd_metrics),
        ("validate", "run the numerical self-checks", cmd_validate),
    ):
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("--config", help=argparse.SUPPRESS)
        _add_run_flags(_ConfigAwareParser(sub, overrides))
        sub.set_defaults(func=lambda cfg_args, f=func: f(_config_from_args(cfg_args)))

    synth = commands.add_parser("synth", help="generate seeded exp-linear CSV data")
    synth.add_argument("--config", help=argparse.SUPPRESS)
    wrapper = _ConfigAwareParser(synth, overrides)
    wrapper.add("--rows", type=int, default=500, help="number of rows")
    wrapper.add("--features", type=int, default=8, help="number of features")
    wrapper.add("--seed", type=int, required=True, help="generator seed")
    wrapper.add("--noise", type=float, default=0.0, help="log-space noise std")
    wrapper.add("--correlation", type=float, default=0.0, help="equicorrelation in [0, 1)")
    wrapper.add("--out", default=None, help="output path (default: stdout)")
    synth.set_defaults(func=cmd_synth)

    return parser


# Most specific first: subclasses must appear before their parents.
_EXIT_BY_ERROR: tuple[tuple[type, int], ...] = (
    (NonPositivePredictionError, EXIT_MODEL),
    (ExternalModelError, EXIT_MODEL),
    (IngestionError, EXIT_DATA),
    (NonPositiveValueError, EXIT_DATA),
    (RankDeficientError, EXIT_NUMERICAL),
    (ExplanationError, EXIT_NUMERICAL),
    (TooManyFeaturesError, EXIT_NUMERICAL),
    (ConfigError, EXIT_CONFIG),
    (InvalidArgumentError, EXIT_CONFIG),
    (XShapError, EXIT_NUMERICAL),
)


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        peek = argparse.ArgumentParser(add_help=False)
        peek.add_argument("--config")
        known, _ = peek.parse_known_args(argv)
        overrides = _load_config_file(known.config) if known.config else {}
        parser = build_parser(overrides)
        args = parser.parse_args(argv)
        return args.func(args)
    except XShapError as exc:
        for err_type, code in _EXIT_BY_ERROR:
            if isinstance(exc, err_type):
                print(f"xshap: {type(exc).__name__}: {exc}", file=sys.stderr)
                return code
        print(f"xshap: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
