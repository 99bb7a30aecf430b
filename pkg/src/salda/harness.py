"""Experiment orchestration: cross-validated variant comparison.

``run_experiment`` drives the full pipeline per fold (standardize on the
training split, build per-class graphs and saliency where a variant needs
them, assemble scatters, solve, classify) and aggregates a ResultTable.
Everything is deterministic given the config seed; wall-times never enter
the primary CSV so repeated runs are byte-identical.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import _oracles
from .classify import fit_centroids, predict
from .dataset import (
    apply_standardizer,
    fit_standardizer,
    load_csv,
    make_folds,
    partition_by_class,
)
from .graph import build_full_graph, class_sigma
from .saliency import SaliencyPrior, SaliencyResult, all_class_saliency, solve_saliency
from .scatter import VARIANTS, ScatterPair, assemble, compute_class_stats, parse_variant
from .solver import solve_fisher

__all__ = [
    "ExperimentConfig",
    "ResultTable",
    "RowResult",
    "FoldCell",
    "cross_validate",
    "run_experiment",
    "compare_report",
    "self_test",
]


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment run depends on.

    ``standardize`` is "fold" (fit on each training split; default) or
    "global" (fit once on the full dataset, reproducing the literal
    standardize-everything protocol at the cost of test leakage).
    ``centroid`` picks the classification representation: "auto" follows
    each variant (weighted representations for the between forms that use
    them, plain means otherwise), "mean"/"weighted" force one choice.
    ``saliency_mode`` "uniform" replaces the per-class solve with uniform
    probabilities; a diagnostic knob.
    """

    dataset: str
    label_column: str | int = -1
    variants: tuple = VARIANTS
    graph: str = "full"
    kernel: str = "paper"
    folds: int = 5
    seed: int = 0
    epsilon: float = 0.0
    dims: int | None = None
    standardize: str = "fold"
    centroid: str = "auto"
    knn_k: int | None = None
    saliency_mode: str = "pse"
    output: str | None = None
    timings: str | None = None
    predictions: str | None = None
    dump_saliency: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "variants", tuple(self.variants))
        for v in self.variants:
            parse_variant(v)
        if self.graph not in ("full", "knn"):
            raise ValueError(f"graph must be 'full' or 'knn', got {self.graph!r}")
        if self.kernel not in ("paper", "squared"):
            raise ValueError(f"kernel must be 'paper' or 'squared', got {self.kernel!r}")
        if self.folds < 2:
            raise ValueError("folds must be at least 2")
        if self.standardize not in ("fold", "global"):
            raise ValueError(f"standardize must be 'fold' or 'global', got {self.standardize!r}")
        if self.centroid not in ("auto", "mean", "weighted"):
            raise ValueError(f"centroid must be auto/mean/weighted, got {self.centroid!r}")
        if self.saliency_mode not in ("pse", "uniform"):
            raise ValueError(f"saliency_mode must be 'pse' or 'uniform', got {self.saliency_mode!r}")

    def to_json(self):
        obj = asdict(self)
        obj["variants"] = list(self.variants)
        return json.dumps(obj, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        return cls(**obj)

    def with_overrides(self, **kwargs):
        obj = asdict(self)
        obj.update({k: v for k, v in kwargs.items() if v is not None})
        return ExperimentConfig(**obj)


@dataclass
class FoldCell:
    """Outcome of one (variant, fold) work item, predictions included."""

    variant: str
    graph: str
    fold: int
    accuracy: float | None
    seconds: float
    error: str | None
    test_indices: np.ndarray
    y_true: np.ndarray
    y_pred: np.ndarray | None
    projection: object = None


@dataclass
class RowResult:
    """Aggregated row of a ResultTable, keyed by (variant, graph)."""

    dataset: str
    variant: str
    graph: str
    n_folds: int
    fold_accuracies: list
    wall_times: list
    error: str | None

    @property
    def mean_accuracy(self):
        if self.error is not None:
            return None
        return sum(self.fold_accuracies) / len(self.fold_accuracies)


@dataclass
class ResultTable:
    """Mean and per-fold cross-validation accuracy per (variant, graph)."""

    dataset: str
    n_folds: int
    rows: list

    def row(self, variant, graph=None):
        for r in self.rows:
            if r.variant == variant and (graph is None or r.graph == graph):
                return r
        raise KeyError(f"no row for variant {variant!r}")

    def to_csv(self):
        lines = ["dataset,variant,graph,folds,mean_accuracy,fold_accuracies,error"]
        for r in self.rows:
            if r.error is None:
                mean = repr(r.mean_accuracy)
                folds = ";".join(repr(a) for a in r.fold_accuracies)
                err = ""
            else:
                mean = ""
                folds = ""
                err = r.error.replace(",", ";").replace("\n", " ")
            lines.append(f"{r.dataset},{r.variant},{r.graph},{r.n_folds},{mean},{folds},{err}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text):
        lines = [ln for ln in text.strip().splitlines() if ln]
        header = "dataset,variant,graph,folds,mean_accuracy,fold_accuracies,error"
        if not lines or lines[0] != header:
            raise ValueError("not a results CSV (unexpected header)")
        rows = []
        for ln in lines[1:]:
            ds, variant, graph, folds, _mean, fold_accs, err = ln.split(",")
            if err:
                rows.append(RowResult(ds, variant, graph, int(folds), [], [], err))
            else:
                accs = [float(a) for a in fold_accs.split(";")] if fold_accs else []
                rows.append(RowResult(ds, variant, graph, int(folds), accs, [], None))
        if not rows:
            raise ValueError("results CSV has no rows")
        return cls(rows[0].dataset, rows[0].n_folds, rows)

    def timings_csv(self):
        lines = ["variant,graph,fold,seconds"]
        for r in self.rows:
            for f, sec in enumerate(r.wall_times):
                lines.append(f"{r.variant},{r.graph},{f},{sec:.6f}")
        return "\n".join(lines) + "\n"

    def to_text(self):
        width = max(len(r.variant) for r in self.rows) + 2
        lines = [f"dataset: {self.dataset} ({self.n_folds}-fold CV)"]
        lines.append(f"{'variant'.ljust(width)}graph  mean_acc   folds")
        for r in self.rows:
            if r.error is not None:
                lines.append(f"{r.variant.ljust(width)}{r.graph:<6} --         error: {r.error}")
            else:
                folds = " ".join(f"{a:.4f}" for a in r.fold_accuracies)
                lines.append(
                    f"{r.variant.ljust(width)}{r.graph:<6} {r.mean_accuracy:.6f}   {folds}"
                )
        return "\n".join(lines) + "\n"


def _uniform_saliency(partition):
    out = []
    for m in partition.matrices:
        n = m.shape[1]
        p = np.full(n, 1.0 / n)
        out.append(SaliencyResult(p, m @ p, 1.0, False))
    return out


def _needs_saliency(cfg):
    if cfg.centroid == "weighted":
        return True
    return any(parse_variant(v)[0] == "swlda" for v in cfg.variants)


def _representations(variant, stats, saliency, centroid_mode):
    """Pick the classification representations a variant should use."""
    kind = parse_variant(variant)
    weighted = kind[0] == "swlda" and kind[1] in (2, 3, 4)
    if centroid_mode == "mean":
        weighted = False
    elif centroid_mode == "weighted":
        weighted = True
    if weighted:
        if saliency is None:
            raise ValueError("weighted centroids need saliency results")
        return np.vstack([s.representation for s in saliency]), "weighted"
    return stats.means, "mean"


def _run_fold(ds, plan, fold, cfg, global_std):
    train_idx, test_idx = plan.train_test_indices(fold)
    x_train = ds.features[train_idx]
    y_train = ds.labels[train_idx]
    x_test = ds.features[test_idx]
    y_test = ds.labels[test_idx]

    def failed_cells(reason):
        return [
            FoldCell(v, cfg.graph, fold, None, 0.0, reason, test_idx, y_test, None)
            for v in cfg.variants
        ], None

    try:
        std = global_std if global_std is not None else fit_standardizer(x_train)
        x_train = apply_standardizer(std, x_train)
        x_test = apply_standardizer(std, x_test)
        partition = partition_by_class(x_train, y_train, ds.n_classes)
        stats = compute_class_stats(partition)
        saliency = None
        if _needs_saliency(cfg):
            if cfg.saliency_mode == "uniform":
                saliency = _uniform_saliency(partition)
            else:
                saliency = all_class_saliency(
                    partition, cfg.graph, cfg.kernel, cfg.epsilon, cfg.knn_k
                )
    except Exception as exc:
        return failed_cells(str(exc))

    cells = []
    for variant in cfg.variants:
        start = time.perf_counter()
        try:
            pair = assemble(variant, partition, stats, saliency)
            proj = solve_fisher(pair, d=cfg.dims, epsilon=cfg.epsilon)
            reps, source = _representations(variant, stats, saliency, cfg.centroid)
            model = fit_centroids(proj, reps, source)
            y_pred = predict(model, x_test)
            acc = float(np.mean(y_pred == y_test))
            cells.append(
                FoldCell(
                    variant,
                    cfg.graph,
                    fold,
                    acc,
                    time.perf_counter() - start,
                    None,
                    test_idx,
                    y_test,
                    y_pred,
                    proj,
                )
            )
        except Exception as exc:
            cells.append(
                FoldCell(
                    variant,
                    cfg.graph,
                    fold,
                    None,
                    time.perf_counter() - start,
                    str(exc),
                    test_idx,
                    y_test,
                    None,
                )
            )
    return cells, saliency


def cross_validate(ds, cfg):
    """Run the per-fold pipeline; returns (cells, plan, saliency_per_fold).

    Cells come back ordered by (fold, variant).  Work items run in
    parallel when SALDA_THREADS > 1 but the reduction order is fixed.
    """
    plan = make_folds(ds.labels, cfg.folds, cfg.seed)
    global_std = fit_standardizer(ds.features) if cfg.standardize == "global" else None

    workers = int(os.environ.get("SALDA_THREADS", "1") or "1")
    folds = range(cfg.folds)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda f: _run_fold(ds, plan, f, cfg, global_std), folds))
    else:
        outcomes = [_run_fold(ds, plan, f, cfg, global_std) for f in folds]

    cells = [cell for fold_cells, _ in outcomes for cell in fold_cells]
    return cells, plan, [sal for _, sal in outcomes]


def _aggregate(dataset_name, cfg, cells):
    rows = []
    for variant in cfg.variants:
        vc = sorted((c for c in cells if c.variant == variant), key=lambda c: c.fold)
        error = next((c.error for c in vc if c.error is not None), None)
        if error is not None:
            first_bad = next(c for c in vc if c.error is not None)
            error = f"fold {first_bad.fold}: {error}"
            rows.append(RowResult(dataset_name, variant, cfg.graph, cfg.folds, [], [], error))
        else:
            rows.append(
                RowResult(
                    dataset_name,
                    variant,
                    cfg.graph,
                    cfg.folds,
                    [c.accuracy for c in vc],
                    [c.seconds for c in vc],
                    None,
                )
            )
    return ResultTable(dataset_name, cfg.folds, rows)


def _predictions_csv(ds, cells):
    lines = ["variant,graph,fold,sample_index,true_label,predicted_label"]
    names = ds.label_names or {}
    for c in cells:
        if c.y_pred is None:
            continue
        for idx, yt, yp in zip(c.test_indices, c.y_true, c.y_pred):
            t = names.get(int(yt), int(yt))
            p = names.get(int(yp), int(yp))
            lines.append(f"{c.variant},{c.graph},{c.fold},{idx},{t},{p}")
    return "\n".join(lines) + "\n"


def _saliency_dump(saliency_per_fold):
    dump = []
    for fold, sal in enumerate(saliency_per_fold):
        if sal is None:
            continue
        dump.append(
            {
                "fold": fold,
                "classes": [
                    {
                        "class": c + 1,
                        "p": s.p.tolist(),
                        "condition": float(s.h_condition),
                        "regularized": bool(s.regularized),
                    }
                    for c, s in enumerate(sal)
                ],
            }
        )
    return json.dumps(dump, indent=2)


def run_experiment(cfg, dataset=None):
    """Full experiment: load, cross-validate, aggregate, write outputs.

    ``dataset`` can pass a preloaded Dataset (the CSV at ``cfg.dataset`` is
    loaded otherwise).  Output files configured on ``cfg`` are written as a
    side effect; the ResultTable is returned either way.
    """
    ds = dataset if dataset is not None else load_csv(cfg.dataset, cfg.label_column)
    name = Path(cfg.dataset).stem if cfg.dataset else "dataset"
    cells, _plan, saliency_per_fold = cross_validate(ds, cfg)
    table = _aggregate(name, cfg, cells)

    if cfg.output:
        Path(cfg.output).write_text(table.to_csv(), encoding="utf-8")
    if cfg.timings:
        Path(cfg.timings).write_text(table.timings_csv(), encoding="utf-8")
    if cfg.predictions:
        Path(cfg.predictions).write_text(_predictions_csv(ds, cells), encoding="utf-8")
    if cfg.dump_saliency:
        Path(cfg.dump_saliency).write_text(_saliency_dump(saliency_per_fold), encoding="utf-8")
    return table


def compare_report(tables):
    """Merge per-dataset result tables into a comparison matrix.

    Rows are (variant, graph) methods, columns are datasets, each column's
    best mean accuracy is marked (ties share the mark).  Returns
    (csv_text, text_report).  Tables must agree on their method rows.
    """
    if not tables:
        raise ValueError("no tables to compare")
    keysets = [tuple((r.variant, r.graph) for r in t.rows) for t in tables]
    if len(set(keysets)) != 1:
        raise ValueError("mismatched dataset keys: tables list different method rows")
    datasets = [t.dataset for t in tables]
    if len(set(datasets)) != len(datasets):
        raise ValueError("mismatched dataset keys: duplicate dataset names")

    keys = keysets[0]
    grid = {}
    best = {}
    for t in tables:
        means = [r.mean_accuracy for r in t.rows]
        valid = [m for m in means if m is not None]
        top = max(valid) if valid else None
        for (key, m) in zip(keys, means):
            grid[(key, t.dataset)] = m
            best[(key, t.dataset)] = m is not None and top is not None and m == top

    csv_lines = ["variant,graph,dataset,mean_accuracy,best"]
    for key in keys:
        for ds in datasets:
            m = grid[(key, ds)]
            mark = "1" if best[(key, ds)] else "0"
            csv_lines.append(f"{key[0]},{key[1]},{ds},{'' if m is None else repr(m)},{mark}")

    width = max(len(f"{v} ({g})") for v, g in keys) + 2
    col = max(12, max(len(d) for d in datasets) + 2)
    head = "method".ljust(width) + "".join(d.rjust(col) for d in datasets)
    text_lines = [head]
    for key in keys:
        label = f"{key[0]} ({key[1]})".ljust(width)
        cells = []
        for ds in datasets:
            m = grid[(key, ds)]
            if m is None:
                cells.append("--".rjust(col))
            else:
                mark = "*" if best[(key, ds)] else " "
                cells.append(f"{m:.4f}{mark}".rjust(col))
        text_lines.append(label + "".join(cells))
    text_lines.append("")
    text_lines.append("* best per dataset (ties share the mark)")
    return "\n".join(csv_lines) + "\n", "\n".join(text_lines) + "\n"


def _selftest_scatter_instances(rng, n_instances):
    for _ in range(n_instances):
        c_n = int(rng.integers(2, 5))
        dim = int(rng.integers(2, 5))
        classes = [
            rng.normal(rng.normal(0, 2, dim), 1.0, (int(rng.integers(2, 8)), dim))
            for _ in range(c_n)
        ]
        ps = []
        for rows in classes:
            raw = rng.random(rows.shape[0]) + 0.05
            ps.append(raw / raw.sum())
        yield classes, ps


def _fake_partition(classes):
    feats = np.vstack(classes)
    labels = np.concatenate(
        [np.full(len(rows), c + 1, dtype=np.int64) for c, rows in enumerate(classes)]
    )
    return partition_by_class(feats, labels)


def self_test(seed=0, inject_fault=None, stream=None):
    """Built-in verification pass over generated data; returns an exit code.

    Checks the fast scatter paths against naive-loop references, the
    saliency solve against a dense inverse, eigensolver residuals, and the
    exact symmetry of assembled pairs.  ``inject_fault`` deliberately
    breaks a step so the failure path itself can be exercised.
    """
    import sys

    out = stream if stream is not None else sys.stdout
    rng = np.random.default_rng(seed)
    failures = 0

    def report(name, ok, detail=""):
        nonlocal failures
        status = "ok" if ok else "FAIL"
        line = f"[{status}] {name}"
        if detail and not ok:
            line += f" ({detail})"
        print(line, file=out)
        if not ok:
            failures += 1

    # scatter paths vs naive loops
    from .scatter import (
        classic_scatters,
        jarchi_delta,
        jarchi_scatters,
        loog_between,
        swlda_between,
        swlda_within,
        tang_within,
        inverse_distance_weight,
    )

    worst = 0.0
    bad_instance = None
    for idx, (classes, ps) in enumerate(_selftest_scatter_instances(rng, 20)):
        part = _fake_partition(classes)
        stats = compute_class_stats(part)
        sal = [SaliencyResult(p, rows.T @ p, 1.0, False) for rows, p in zip(classes, ps)]
        classic = classic_scatters(part, stats)
        checks = [
            (classic.s_w, _oracles.classic_sw(classes)),
            (classic.s_b, _oracles.classic_sb(classes)),
            (loog_between(stats), _oracles.pair_between(classes, inverse_distance_weight)),
            (tang_within(part, stats), _oracles.tang_sw(classes)),
        ]
        deltas = np.zeros((len(classes), len(classes)))
        for c in range(len(classes)):
            for j in range(len(classes)):
                if c != j:
                    deltas[c, j] = jarchi_delta(stats, classic, c + 1, j + 1)
        jp = jarchi_scatters(part, stats, deltas)
        ob, ow = _oracles.jarchi_pair(classes)
        checks += [(jp.s_b, ob), (jp.s_w, ow)]
        for j in (1, 2):
            checks.append((swlda_within(part, stats, sal, j), _oracles.saliency_sw(classes, ps, j)))
        for i in (1, 2, 3, 4):
            checks.append((swlda_between(part, stats, sal, i), _oracles.saliency_sb(classes, ps, i)))
        for got, want in checks:
            diff = float(np.abs(got - want).max())
            if diff > worst:
                worst = diff
                bad_instance = idx
    report(
        "scatter ops match naive-loop reference (max dev %.2e)" % worst,
        worst <= 1e-10,
        f"replay: seed={seed} instance={bad_instance}",
    )

    # saliency solve vs dense inverse
    worst = 0.0
    bad_instance = None
    for idx in range(20):
        n = int(rng.integers(2, 12))
        rows = rng.normal(0, 1, (n, 3))
        x_c = rows.T
        g = build_full_graph(x_c, class_sigma(x_c))
        v = np.where(rng.random(n) < 0.4, 0.0, rng.random(n) * 3)
        res = solve_saliency(g, SaliencyPrior(v), 0.0)
        want = _oracles.saliency_solve(g.weights, v, 0.0)
        diff = float(np.abs(res.p - want).max())
        if diff > worst:
            worst = diff
            bad_instance = idx
    report(
        "saliency solve matches dense inverse (max dev %.2e)" % worst,
        worst <= 1e-9,
        f"replay: seed={seed} instance={bad_instance}",
    )

    # eigensolver residuals and Rayleigh optimality
    ok = True
    detail = ""
    for idx in range(20):
        dim = int(rng.integers(2, 8))
        a = rng.normal(0, 1, (dim, dim))
        s_b = a @ a.T
        b2 = rng.normal(0, 1, (dim, dim))
        s_w = b2 @ b2.T
        pair = ScatterPair(s_b, s_w, s_b + s_w, "selftest", dim + 1, "total")
        proj = solve_fisher(pair, d=min(2, dim))
        eps = proj.regularization_used or 0.0
        bmat = pair.s_t + eps * np.eye(dim)
        for lam, vec in zip(proj.eigenvalues, proj.w.T):
            resid = np.linalg.norm(s_b @ vec - lam * (bmat @ vec))
            bound = 1e-8 * (np.linalg.norm(s_b, 2) + lam * np.linalg.norm(pair.s_t, 2))
            if resid > bound:
                ok = False
                detail = f"replay: seed={seed} instance={idx} residual={resid:.2e}"
        top = proj.w[:, 0]
        quot = (top @ s_b @ top) / (top @ bmat @ top)
        samples = rng.normal(0, 1, (200, dim))
        samples /= np.linalg.norm(samples, axis=1, keepdims=True)
        rand_best = max((s @ s_b @ s) / (s @ bmat @ s) for s in samples)
        if quot < rand_best - 1e-12:
            ok = False
            detail = f"replay: seed={seed} instance={idx} rayleigh"
    report("eigenpairs satisfy residual bound and Rayleigh optimality", ok, detail)

    # exact symmetry of assembled pairs
    ok = True
    detail = ""
    for idx, (classes, ps) in enumerate(_selftest_scatter_instances(rng, 10)):
        part = _fake_partition(classes)
        stats = compute_class_stats(part)
        sal = [SaliencyResult(p, rows.T @ p, 1.0, False) for rows, p in zip(classes, ps)]
        if inject_fault == "skip_symmetrization":
            s_b = swlda_between(part, stats, sal, 4)
            s_w = swlda_within(part, stats, sal, 1)
        else:
            pair = assemble("swlda_41", part, stats, sal)
            s_b, s_w = pair.s_b, pair.s_w
        if np.abs(s_b - s_b.T).max() != 0.0 or np.abs(s_w - s_w.T).max() != 0.0:
            ok = False
            detail = f"replay: seed={seed} instance={idx}"
            break
    report("assembled scatter pairs exactly symmetric", ok, detail)

    print(("self-test passed" if failures == 0 else f"self-test FAILED ({failures})"), file=out)
    return 0 if failures == 0 else 1
