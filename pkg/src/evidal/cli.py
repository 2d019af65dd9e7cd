"""Command-line experiment runner.

Subcommands: generate, pretrain, finetune, al-run, report,
export-embeddings, serve.  Options resolve as defaults < config file
(INI sections) < command-line flags.  Exit codes: 0 success, 1 usage,
2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .active import (
    ALConfig,
    CSV_HEADER,
    STRATEGIES,
    csv_rows,
    queried_sidecar_lines,
    run_experiment,
)
from .datagen import (
    DatasetFormatError,
    MixtureSpec,
    PRESETS,
    generate_gaussian_mixture,
    generate_outdomain_variant,
    load_dataset,
    preset_spec,
    save_dataset,
)
from .evidential import one_hot
from .metrics import (
    accuracy,
    save_histograms,
    uncertainty_histograms,
    uncertainty_separation,
    weighted_f1,
)
from .network import (
    NetworkConfig,
    NonFiniteLossError,
    TrainHyper,
    forward,
    init_model,
    load_checkpoint,
    predict_batch,
    save_checkpoint,
)
from .pipeline import (
    AugmentationConfig,
    DOMAIN_INDOMAIN,
    DOMAIN_OUTDOMAIN,
    PretrainConfig,
    STAGE_FINETUNED,
    STAGE_PRETRAINED,
    finetune_evidential,
    pretrain_contrastive,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

METADATA_SCHEMA_VERSION = 1
CSV_SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we use 1
        raise UsageError(message)


# ---------------------------------------------------------------- config


def _load_ini(path: str | None) -> configparser.ConfigParser:
    cp = configparser.ConfigParser()
    if path:
        if not Path(path).exists():
            raise UsageError(f"config file not found: {path}")
        cp.read(path)
    return cp


def _resolve(flag_value, cp, section, key, cast, default):
    """Flags win over config file; config file wins over defaults."""
    if flag_value is not None:
        return flag_value
    if cp.has_option(section, key):
        raw = cp.get(section, key)
        if cast is bool:
            return raw.strip().lower() in ("1", "true", "yes", "on")
        return cast(raw)
    return default


def _parse_int_list(text: str) -> list[int]:
    return [int(v) for v in text.replace(",", " ").split()]


def _parse_str_list(text: str) -> list[str]:
    return [v for v in text.replace(",", " ").split() if v]


def _network_from(args, cp, input_dim: int, num_classes: int, seed: int) -> NetworkConfig:
    hidden = _resolve(args.hidden_dims, cp, "model", "hidden_dims", str, "64,64")
    return NetworkConfig(
        input_dim=input_dim,
        hidden_dims=tuple(_parse_int_list(hidden)),
        embedding_dim=_resolve(args.embedding_dim, cp, "model", "embedding_dim", int, 32),
        num_classes=num_classes,
        evidence_activation=_resolve(args.activation, cp, "model", "evidence_activation", str, "relu"),
        seed=seed,
        projection_dim=_resolve(args.projection_dim, cp, "model", "projection_dim", int, 16),
    )


def _hyper_from(args, cp) -> TrainHyper:
    return TrainHyper(
        learning_rate=_resolve(args.learning_rate, cp, "train", "learning_rate", float, 1e-3),
        batch_size=_resolve(args.batch_size, cp, "train", "batch_size", int, 64),
    )


def _load_pool(path: str):
    p = Path(path)
    if not p.exists():
        raise DatasetFormatError(f"dataset file not found: {path}")
    return load_dataset(p)


# ---------------------------------------------------------------- generate


def cmd_generate(args) -> int:
    cp = _load_ini(args.config)
    if args.out is None:
        raise UsageError("--out is required")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    seed = args.seed if args.seed is not None else 0
    if args.preset:
        spec = preset_spec(args.preset, seed=seed)
        name = args.preset
    else:
        spec = MixtureSpec(
            num_classes=_resolve(args.classes, cp, "dataset", "classes", int, 5),
            n_samples=_resolve(args.samples, cp, "dataset", "samples", int, 10_000),
            dim=_resolve(args.dim, cp, "dataset", "dim", int, 16),
            sigma=_resolve(args.sigma, cp, "dataset", "sigma", float, 1.0),
            overlap_factor=_resolve(args.overlap, cp, "dataset", "overlap_factor", float, 4.5),
            seed=seed,
        )
        name = "custom"
    if args.outdomain:
        ds = generate_outdomain_variant(spec)
        name += "-outdomain"
    else:
        ds = generate_gaussian_mixture(spec)
    path = out_dir / f"{name}_seed{seed}.jsonl"
    save_dataset(ds, path)
    print(f"wrote {path} (K={ds.num_classes}, N={ds.n_samples}, dim={ds.dim})")
    return EXIT_OK


# ---------------------------------------------------------------- pretrain


def cmd_pretrain(args) -> int:
    cp = _load_ini(args.config)
    pool = _load_pool(args.dataset)
    seed = args.seed if args.seed is not None else 0
    net = _network_from(args, cp, pool.dim, pool.num_classes, seed)
    model = init_model(net)
    pretrain = PretrainConfig(
        temperature=_resolve(args.temperature, cp, "pretrain", "temperature", float, 0.5),
        epochs=_resolve(args.epochs, cp, "pretrain", "epochs", int, 20),
        batch_size=_resolve(args.batch_size, cp, "pretrain", "batch_size", int, 64),
        domain=DOMAIN_INDOMAIN,
    )
    aug = AugmentationConfig(
        noise_sigma=_resolve(args.noise_sigma, cp, "pretrain", "noise_sigma", float, 0.1),
        feature_dropout_prob=_resolve(args.dropout, cp, "pretrain", "feature_dropout_prob", float, 0.1),
        seed=seed,
    )
    train_ids = pool.train_pool_ids
    _, losses = pretrain_contrastive(model, pool.features[train_ids], pretrain, aug,
                                     hyper=_hyper_from(args, cp))
    out = Path(args.out if args.out else "pretrained.npz")
    out.parent.mkdir(parents=True, exist_ok=True)
    save_checkpoint(model, out, stage=STAGE_PRETRAINED,
                    extra={"contrastive_loss_first": losses[0], "contrastive_loss_last": losses[-1]})
    print(f"wrote {out} (loss {losses[0]:.4f} -> {losses[-1]:.4f})")
    return EXIT_OK


# ---------------------------------------------------------------- finetune


def cmd_finetune(args) -> int:
    cp = _load_ini(args.config)
    pool = _load_pool(args.dataset)
    seed = args.seed if args.seed is not None else 0
    if args.init_checkpoint:
        model, _ = load_checkpoint(args.init_checkpoint)
        if model.config.input_dim != pool.dim or model.config.num_classes != pool.num_classes:
            raise DatasetFormatError("checkpoint does not match the dataset's shape")
    else:
        model = init_model(_network_from(args, cp, pool.dim, pool.num_classes, seed))
    train_ids = pool.train_pool_ids
    if not np.all(pool.label_known[train_ids]):
        raise DatasetFormatError("full fine-tuning needs labels for every train_pool sample")
    epochs = _resolve(args.epochs, cp, "train", "finetune_epochs", int, 30)
    finetune_evidential(
        model,
        pool.features[train_ids],
        one_hot(pool.labels[train_ids], pool.num_classes),
        epochs=epochs,
        rng=np.random.default_rng([seed, 2]),
        hyper=_hyper_from(args, cp),
    )
    ev = pool.eval_ids
    preds = predict_batch(model, pool.features[ev], sample_ids=ev, true_labels=pool.labels[ev])
    mu_c, mu_i = uncertainty_separation(preds)
    out = Path(args.out if args.out else "finetuned.npz")
    out.parent.mkdir(parents=True, exist_ok=True)
    save_checkpoint(model, out, stage=STAGE_FINETUNED)
    print(f"wrote {out}")
    print(f"eval accuracy={accuracy(preds):.4f} weighted_f1={weighted_f1(preds):.4f} "
          f"mean_u_correct={mu_c:.4f} mean_u_incorrect={mu_i:.4f}")
    return EXIT_OK


# ---------------------------------------------------------------- al-run


def _al_run_metadata(args, cp, pool, seeds, strategies, hyper, q, max_budget,
                     epochs_per_round, warm_start, anneal_continue, activation,
                     pretrain_enabled, domain) -> dict:
    return {
        "metadata_schema_version": METADATA_SCHEMA_VERSION,
        "csv_schema_version": CSV_SCHEMA_VERSION,
        "package_version": __version__,
        "dataset": {"path": str(args.dataset), "generator": pool.meta,
                    "num_classes": pool.num_classes, "n_samples": pool.n_samples,
                    "dim": pool.dim},
        "strategies": strategies,
        "seeds": seeds,
        "budget_fraction_per_round": q,
        "max_budget_fraction": max_budget,
        "epochs_per_round": epochs_per_round,
        "warm_start": warm_start,
        "anneal_continue": anneal_continue,
        "evidence_activation": activation,
        "optimizer": {"kind": "adam", "learning_rate": hyper.learning_rate,
                      "beta1": hyper.beta1, "beta2": hyper.beta2, "eps": hyper.eps,
                      "batch_size": hyper.batch_size},
        "hidden_dims": _parse_int_list(_resolve(args.hidden_dims, cp, "model", "hidden_dims", str, "64,64")),
        "embedding_dim": _resolve(args.embedding_dim, cp, "model", "embedding_dim", int, 32),
        "projection_dim": _resolve(args.projection_dim, cp, "model", "projection_dim", int, 16),
        "pretrain": {"enabled": pretrain_enabled, "domain": domain},
    }


def cmd_al_run(args) -> int:
    cp = _load_ini(args.config)
    pool = _load_pool(args.dataset)
    if args.out is None:
        raise UsageError("--out is required")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    seeds = _parse_int_list(_resolve(args.seeds, cp, "al", "seeds", str, "0,1,2,3,4"))
    strategies = _parse_str_list(_resolve(args.strategies, cp, "al", "strategies", str,
                                          "uncertainty_topk,random"))
    for s in strategies:
        if s not in STRATEGIES:
            raise UsageError(f"unknown strategy {s!r}")
    if not seeds:
        raise UsageError("need at least one seed")
    q = _resolve(args.q, cp, "al", "q", float, 0.01)
    max_budget = _resolve(args.max_budget, cp, "al", "max_budget", float, 0.10)
    epochs_per_round = _resolve(args.epochs_per_round, cp, "al", "epochs_per_round", int, 15)
    warm_start = _resolve(args.warm_start, cp, "al", "warm_start", bool, True)
    anneal_continue = _resolve(args.anneal_continue, cp, "al", "anneal_continue", bool, False)
    activation = _resolve(args.activation, cp, "model", "evidence_activation", str, "relu")
    hyper = _hyper_from(args, cp)
    pretrain_enabled = bool(args.pretrain)
    domain = _resolve(args.domain, cp, "pretrain", "domain", str, DOMAIN_INDOMAIN)
    if domain not in (DOMAIN_INDOMAIN, DOMAIN_OUTDOMAIN):
        raise UsageError(f"unknown domain mode {domain!r}")

    pretrain_pool = None
    if pretrain_enabled:
        if domain == DOMAIN_OUTDOMAIN:
            if not args.pretrain_dataset:
                raise UsageError("outdomain pre-training needs --pretrain-dataset")
            pretrain_pool = _load_pool(args.pretrain_dataset)
            if pretrain_pool.dim != pool.dim:
                raise DatasetFormatError("pre-training pool must share the feature dimension")
        else:
            pretrain_pool = pool

    csv_lines = [CSV_HEADER]
    sidecar_lines: list[str] = []
    for strategy in strategies:
        for seed in seeds:
            net = _network_from(args, cp, pool.dim, pool.num_classes, seed)
            model = init_model(net)
            if pretrain_enabled:
                ids = pretrain_pool.train_pool_ids
                pretrain_contrastive(
                    model, pretrain_pool.features[ids],
                    PretrainConfig(
                        temperature=_resolve(args.temperature, cp, "pretrain", "temperature", float, 0.5),
                        epochs=_resolve(args.pretrain_epochs, cp, "pretrain", "epochs", int, 20),
                        batch_size=_resolve(args.pretrain_batch_size, cp, "pretrain", "batch_size", int, 64),
                        domain=domain,
                    ),
                    AugmentationConfig(seed=seed),
                    hyper=hyper,
                )
            config = ALConfig(
                strategy=strategy, seed=seed,
                budget_fraction_per_round=q, max_budget_fraction=max_budget,
                epochs_per_round=epochs_per_round, warm_start=warm_start,
                anneal_continue=anneal_continue, hyper=hyper,
            )
            records, final_model = run_experiment(pool, config, initial_model=model)
            csv_lines.extend(csv_rows(records, strategy, seed))
            sidecar_lines.extend(queried_sidecar_lines(records, strategy, seed))

            ev = pool.eval_ids
            preds = predict_batch(final_model, pool.features[ev], sample_ids=ev,
                                  true_labels=pool.labels[ev])
            save_histograms(uncertainty_histograms(preds),
                            out_dir / f"histograms_{strategy}_seed{seed}.json")
            save_checkpoint(final_model, out_dir / f"checkpoint_{strategy}_seed{seed}.npz",
                            stage=STAGE_FINETUNED,
                            extra={"strategy": strategy, "seed": seed})
            print(f"{strategy} seed {seed}: final accuracy {records[-1].accuracy:.4f}")

    (out_dir / "runs.csv").write_text("\n".join(csv_lines) + "\n", encoding="utf-8")
    (out_dir / "queried_ids.jsonl").write_text("\n".join(sidecar_lines) + "\n", encoding="utf-8")
    meta = _al_run_metadata(args, cp, pool, seeds, strategies, hyper, q, max_budget,
                            epochs_per_round, warm_start, anneal_continue, activation,
                            pretrain_enabled, domain)
    (out_dir / "metadata.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n",
                                           encoding="utf-8")
    print(f"wrote {out_dir / 'runs.csv'}")
    return EXIT_OK


# ---------------------------------------------------------------- report


def _read_runs_csv(path: Path) -> list[dict]:
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise DatasetFormatError(f"{path}: unexpected CSV header")
    rows = []
    for line in lines[1:]:
        f = line.split(",")
        rows.append({
            "round": int(f[0]), "labels_fraction": float(f[1]), "strategy": f[2],
            "seed": int(f[3]), "accuracy": float(f[4]), "weighted_f1": float(f[5]),
            "mean_u_correct": float(f[6]), "mean_u_incorrect": float(f[7]),
        })
    return rows


def cmd_report(args) -> int:
    run_dir = Path(args.run_dir)
    csv_path = run_dir / "runs.csv"
    if not csv_path.exists():
        raise DatasetFormatError(f"no runs.csv under {run_dir}")
    rows = _read_runs_csv(csv_path)
    strategies = sorted({r["strategy"] for r in rows})
    fractions = sorted({round(r["labels_fraction"], 12) for r in rows})

    expected_rounds = max(r["round"] for r in rows)
    for strategy in strategies:
        seeds = {r["seed"] for r in rows if r["strategy"] == strategy}
        for seed in sorted(seeds):
            have = [r for r in rows if r["strategy"] == strategy and r["seed"] == seed]
            if len(have) < expected_rounds:
                print(f"warning: incomplete run {strategy}/seed{seed}: "
                      f"{len(have)}/{expected_rounds} rounds")

    stats: dict[tuple[str, float], tuple[float, float]] = {}
    print(f"{'fraction':>9}  " + "  ".join(f"{s:>24}" for s in strategies))
    for frac in fractions:
        cells = []
        for strategy in strategies:
            accs = [r["accuracy"] for r in rows
                    if r["strategy"] == strategy and round(r["labels_fraction"], 12) == frac]
            if accs:
                mean = float(np.mean(accs))
                std = float(np.std(accs))
                stats[(strategy, frac)] = (mean, std)
                cells.append(f"{mean:.4f} ± {std:.4f} (n={len(accs)})")
            else:
                cells.append("—")
        print(f"{frac:>9.2%}  " + "  ".join(f"{c:>24}" for c in cells))

    if "uncertainty_topk" in strategies and "random" in strategies:
        compared = [f for f in fractions if f >= 0.02 - 1e-12]
        wins = [f for f in compared
                if stats.get(("uncertainty_topk", f), (0, 0))[0] >= stats.get(("random", f), (1, 0))[0]]
        print(f"\nuncertainty_topk mean >= random mean at {len(wins)}/{len(compared)} "
              f"fractions >= 2%")
        for f in compared:
            mark = "yes" if f in wins else "no"
            print(f"  {f:.0%}: {mark}")
    else:
        missing = {"uncertainty_topk", "random"} - set(strategies)
        print(f"\nwarning: comparison skipped, missing strategies: {sorted(missing)}")
    return EXIT_OK


# ---------------------------------------------------------------- export-embeddings


def cmd_export_embeddings(args) -> int:
    pool = _load_pool(args.dataset)
    model, _ = load_checkpoint(args.checkpoint)
    if model.config.input_dim != pool.dim:
        raise DatasetFormatError("checkpoint does not match the dataset's feature dimension")
    out = Path(args.out if args.out else "embeddings.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    emb, evidence = forward(model, pool.features)
    strength = evidence.sum(axis=1) + pool.num_classes
    u = pool.num_classes / strength
    predicted = np.argmax(evidence, axis=1)
    dim = emb.shape[1]
    header = "id,label,predicted,uncertainty," + ",".join(f"e{i}" for i in range(dim))
    lines = [header]
    for i in range(pool.n_samples):
        label = str(int(pool.labels[i])) if pool.label_known[i] else ""
        lines.append(
            f"{i},{label},{int(predicted[i])},{float(u[i])!r},"
            + ",".join(repr(float(v)) for v in emb[i])
        )
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {out} ({pool.n_samples} rows)")
    return EXIT_OK


# ---------------------------------------------------------------- serve


def cmd_serve(args) -> int:
    import uvicorn

    from .active import ALConfig as _ALConfig
    from .service import build_controller_app

    cp = _load_ini(args.config)
    pool = _load_pool(args.dataset)
    seed = args.seed if args.seed is not None else 0
    net = _network_from(args, cp, pool.dim, pool.num_classes, seed)
    config = _ALConfig(
        strategy=_resolve(args.strategy, cp, "al", "strategy", str, "uncertainty_topk"),
        seed=seed,
        budget_fraction_per_round=_resolve(args.q, cp, "al", "q", float, 0.01),
        max_budget_fraction=_resolve(args.max_budget, cp, "al", "max_budget", float, 0.10),
        epochs_per_round=_resolve(args.epochs_per_round, cp, "al", "epochs_per_round", int, 15),
        hyper=_hyper_from(args, cp),
    )
    app = build_controller_app(pool, init_model(net), config, ui_dir=args.ui_dir,
                               display_pca=args.display_pca)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _add_model_flags(p):
    p.add_argument("--hidden-dims", dest="hidden_dims", help="comma-separated, e.g. 64,64")
    p.add_argument("--embedding-dim", dest="embedding_dim", type=int)
    p.add_argument("--projection-dim", dest="projection_dim", type=int)
    p.add_argument("--activation", choices=["relu", "softplus"])
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--batch-size", dest="batch_size", type=int)


def build_parser() -> _Parser:
    parser = _Parser(prog="evidal", description=__doc__)
    parser.add_argument("--version", action="version", version=f"evidal {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic benchmark dataset")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--classes", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--dim", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--overlap", type=float)
    p.add_argument("--outdomain", action="store_true",
                   help="emit the out-domain companion of the spec instead")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--config")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("pretrain", help="contrastive pre-training on a dataset's pool")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.add_argument("--temperature", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--noise-sigma", dest="noise_sigma", type=float)
    p.add_argument("--dropout", type=float)
    p.add_argument("--config")
    _add_model_flags(p)
    p.set_defaults(func=cmd_pretrain)

    p = sub.add_parser("finetune", help="full-label supervised fine-tuning")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--init-checkpoint", dest="init_checkpoint")
    p.add_argument("--config")
    _add_model_flags(p)
    p.set_defaults(func=cmd_finetune)

    p = sub.add_parser("al-run", help="active-learning runs over seeds x strategies")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out")
    p.add_argument("--strategies")
    p.add_argument("--seeds")
    p.add_argument("--q", type=float)
    p.add_argument("--max-budget", dest="max_budget", type=float)
    p.add_argument("--epochs-per-round", dest="epochs_per_round", type=int)
    p.add_argument("--warm-start", dest="warm_start", action="store_const", const=True)
    p.add_argument("--no-warm-start", dest="warm_start", action="store_const", const=False)
    p.add_argument("--anneal-continue", dest="anneal_continue", action="store_const", const=True)
    p.add_argument("--pretrain", action="store_true", help="run contrastive pre-training first")
    p.add_argument("--pretrain-epochs", dest="pretrain_epochs", type=int)
    p.add_argument("--pretrain-batch-size", dest="pretrain_batch_size", type=int)
    p.add_argument("--temperature", type=float)
    p.add_argument("--domain", choices=[DOMAIN_INDOMAIN, DOMAIN_OUTDOMAIN])
    p.add_argument("--pretrain-dataset", dest="pretrain_dataset")
    p.add_argument("--config")
    _add_model_flags(p)
    p.set_defaults(func=cmd_al_run)

    p = sub.add_parser("report", help="summarize a finished al-run directory")
    p.add_argument("--run-dir", dest="run_dir", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("export-embeddings", help="per-sample embeddings + uncertainty")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_embeddings)

    p = sub.add_parser("serve", help="annotation service over a live AL run")
    p.add_argument("--dataset", required=True)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--strategy", choices=list(STRATEGIES))
    p.add_argument("--seed", type=int)
    p.add_argument("--q", type=float)
    p.add_argument("--max-budget", dest="max_budget", type=float)
    p.add_argument("--epochs-per-round", dest="epochs_per_round", type=int)
    p.add_argument("--ui-dir", dest="ui_dir")
    p.add_argument("--display-pca", dest="display_pca", action="store_true",
                   help="project queue items with 2-component PCA instead of raw features")
    p.add_argument("--config")
    _add_model_flags(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DatasetFormatError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NonFiniteLossError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
