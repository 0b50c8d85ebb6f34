"""Command-line entry point for the symbol pipeline.

Every randomized subcommand takes an explicit --seed and produces
byte-identical output for identical arguments.  Plot-producing
subcommands write tab-separated data plus a rendered PNG next to it.
"""

from __future__ import annotations

import os
import shutil
import sys
import tempfile
from pathlib import Path

import click

from ffsymbol import datasets as ds
from ffsymbol import evaluate, ingest
from ffsymbol.keys import count_valid_keys
from ffsymbol.quad import expand_quad, to_quad
from ffsymbol.relations import (
    InstanceGenerationError,
    catalog,
    enumerate_instances,
    generate_instances,
    get_relation,
    residual,
)
from ffsymbol.symbol import builtin_symbol

EXHAUSTIVE_LIMIT = 10**7


class CliError(click.ClickException):
    """One-line machine-parsable failure: `<class>: <message>`."""

    def __init__(self, error_class: str, message: str):
        super().__init__(f"{error_class}: {message}")


def _fail(exc: Exception) -> CliError:
    return CliError(type(exc).__name__, str(exc))


def _materialize(path: str) -> str:
    """Resolve '-' to a temp copy of stdin so parsers can reopen it."""
    if path != "-":
        return path
    tmp = tempfile.NamedTemporaryFile(
        mode="w", encoding="utf-8", suffix=".stdin", delete=False
    )
    shutil.copyfileobj(sys.stdin, tmp)
    tmp.close()
    return tmp.name


def _open_out(out: str | None):
    if out is None or out == "-":
        return sys.stdout
    return open(out, "w", encoding="utf-8")


def _load_symbol(path: str, fmt: str = "permissive"):
    if path in ("builtin:1", "builtin:2"):
        return builtin_symbol(int(path[-1]))
    try:
        return ingest.read_symbol(_materialize(path), fmt)
    except (OSError, ValueError) as exc:
        raise _fail(exc)


@click.group()
@click.option("--threads", type=int, default=None, help="Worker cap; results do not depend on it.")
@click.pass_context
def main(ctx, threads):
    """Symbol calculus and dataset pipeline for three-gluon form factors."""
    ctx.ensure_object(dict)
    ctx.obj["threads"] = threads or os.cpu_count()


@main.command()
@click.option("--loop", type=int, required=True)
def count(loop):
    """Number of keys that survive the trivial-zero rules."""
    if loop < 1:
        raise CliError("ValueError", f"loop must be positive, got {loop}")
    click.echo(count_valid_keys(loop))


@main.command()
@click.option("--loop", type=click.IntRange(1, 2), required=True)
@click.option("--out", default=None)
def builtin(loop, out):
    """Emit a built-in low-loop symbol in canonical text form."""
    sym = builtin_symbol(loop)
    with _open_out(out) as fh:
        for key, coeff in sym.items():
            fh.write(f"{key}\t{coeff}\n")


@main.command("ingest")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--data-dir", default=None, type=click.Path())
@click.option("--base-url", default=None)
def ingest_cmd(manifest_path, data_dir, base_url):
    """Fetch, checksum-verify, parse, and count-check archive files."""
    try:
        symbols = ingest.ingest_archive(manifest_path, data_dir, base_url)
    except (OSError, ValueError) as exc:
        raise _fail(exc)
    for loop in sorted(symbols):
        click.echo(f"loop={loop}\tnonzero={len(symbols[loop])}")


def _instances_for(rel, loop, n, truth, seed):
    if n != "all":
        return generate_instances(rel, loop, int(n), truth, seed)
    space = len(list(rel.slots(loop))) * 6 ** (2 * loop - rel.pattern_len)
    if space > EXHAUSTIVE_LIMIT:
        raise CliError(
            "ExhaustionRefused",
            f"{rel.name} at loop {loop} has ~{space} instances; "
            f"use --n <count> with --seed instead",
        )
    return list(enumerate_instances(rel, loop))


@main.command("verify-relations")
@click.option("--loop", type=int, required=True)
@click.option("--n", default="500", help="Instances per relation, or 'all'.")
@click.option("--seed", type=int, default=None)
@click.option("--relation", "relation_name", default=None)
@click.option("--truth", default=None, help="Symbol file; defaults to the built-in symbol.")
@click.option("--out", default=None)
def verify_relations(loop, n, seed, relation_name, truth, out):
    """Check that every sampled relation instance has residual zero."""
    if n != "all" and seed is None:
        raise CliError("ValueError", "--seed is required when sampling")
    if truth is None:
        if loop > 2:
            raise CliError("ValueError", "--truth is required for loop > 2")
        truth = f"builtin:{loop}"
    sym = _load_symbol(truth)
    relations = [get_relation(relation_name)] if relation_name else list(catalog())
    failures = 0
    with _open_out(out) as fh:
        fh.write("relation\tinstances\tviolations\n")
        for rel in relations:
            try:
                instances = _instances_for(rel, loop, n, sym, seed)
            except InstanceGenerationError:
                fh.write(f"{rel.name}\t0\tno-support\n")
                continue
            bad = sum(residual(inst, sym) != 0 for inst in instances)
            failures += bad
            fh.write(f"{rel.name}\t{len(instances)}\t{bad}\n")
    if failures:
        raise CliError("RelationViolation", f"{failures} instances with nonzero residual")


@main.command()
@click.option("--in", "in_path", required=True)
@click.option("--out", required=True, type=click.Path())
@click.option("--expand", "expand_keys", default=None, type=click.Path(exists=True),
              help="Instead of compressing, expand the listed keys from a quad file.")
def quad(in_path, out, expand_keys):
    """Compress a symbol to quad form, or expand keys from one."""
    try:
        if expand_keys is None:
            sym = _load_symbol(in_path)
            ingest.write_quad(to_quad(sym), out)
        else:
            qsym = ingest.read_quad(_materialize(in_path))
            keys = ingest.read_ids(expand_keys)
            with open(out, "w", encoding="utf-8") as fh:
                for res in expand_quad(qsym, keys):
                    value = res.value if res.status == "determined" else "?"
                    fh.write(f"{res.key}\t{value}\n")
    except (OSError, ValueError) as exc:
        raise _fail(exc)


@main.command()
@click.option("--task", type=click.Choice(["zero-nonzero", "coeff", "mixed", "strikeout"]),
              required=True)
@click.option("--truth", required=True, help="Symbol file or builtin:1/builtin:2.")
@click.option("--second-truth", default=None,
              help="Loop L-1 symbol for strikeout; loop L+1 symbol for mixed.")
@click.option("--seed", type=int, required=True)
@click.option("--train-size", type=int, required=True)
@click.option("--test-size", type=int, required=True)
@click.option("--zero-policy", type=click.Choice([ds.UNIFORM, ds.NONTRIVIAL_BIASED]),
              default=ds.UNIFORM)
@click.option("--variant", type=click.Choice(ds.STRIKEOUT_VARIANTS), default="plain")
@click.option("--k", default="full", help="Strike distance bound, or 'full'.")
@click.option("--magnitude-only", is_flag=True)
@click.option("--out", required=True, type=click.Path(),
              help="Output prefix; writes <out>.train.tsv and <out>.test.tsv.")
def dataset(task, truth, second_truth, seed, train_size, test_size, zero_policy,
            variant, k, magnitude_only, out):
    """Emit a seeded, bit-reproducible train/test dataset pair."""
    spec = ds.SplitSpec(train_size, test_size, seed, zero_policy)
    sym = _load_symbol(truth)
    try:
        if task == "zero-nonzero":
            built = {"": ds.make_zero_nonzero(sym, spec)}
        elif task == "coeff":
            built = {"": ds.make_coeff_from_key(sym, spec, magnitude_only=magnitude_only)}
        elif task == "mixed":
            if second_truth is None:
                raise CliError("ValueError", "--second-truth is required for mixed")
            higher = _load_symbol(second_truth)
            built = {
                f".{name}": d
                for name, d in ds.make_mixed_loop(sym, higher, spec).items()
            }
        else:
            if second_truth is None:
                raise CliError("ValueError", "--second-truth is required for strikeout")
            lower = _load_symbol(second_truth)
            k_arg = k if k == "full" else int(k)
            built = {"": ds.make_strikeout(sym, lower, k_arg, variant, spec)}
    except (ValueError, ds.TokenizationError) as exc:
        raise _fail(exc)
    for suffix, d in built.items():
        for split in ("train", "test"):
            ingest.write_dataset(d, f"{out}{suffix}.{split}.tsv", split)
            click.echo(f"{out}{suffix}.{split}.tsv\t{len(getattr(d, split))}")


@main.command()
@click.option("--truth", required=True)
@click.option("--pred", required=True)
@click.option("--test-ids", default=None, type=click.Path(exists=True),
              help="Ids to score; defaults to every predicted id.")
@click.option("--out", default=None)
def score(truth, pred, test_ids, out):
    """Element, magnitude, and sign accuracy of a prediction file."""
    sym = _load_symbol(truth)
    try:
        predictions = ingest.read_predictions(_materialize(pred))
        ids = ingest.read_ids(test_ids) if test_ids else sorted(predictions)
        metrics = evaluate.score_predictions(sym, predictions, ids)
    except (OSError, ValueError) as exc:
        raise _fail(exc)
    with _open_out(out) as fh:
        fh.write("metric\tvalue\n")
        fh.write(f"element_accuracy\t{metrics.element_accuracy:.6f}\n")
        fh.write(f"magnitude_accuracy\t{metrics.magnitude_accuracy:.6f}\n")
        fh.write(f"sign_accuracy\t{metrics.sign_accuracy:.6f}\n")
        fh.write(f"sign_balance\t{metrics.sign_balance:.6f}\n")
        fh.write(f"interval_95\t{metrics.interval:.6f}\n")
        fh.write(f"n_test\t{metrics.n_test}\n")
        fh.write(f"n_invalid\t{metrics.n_invalid}\n")


def _figure_path(out: str) -> Path:
    return Path(out).with_suffix(".png")


@main.command()
@click.option("--dir", "directory", required=True, type=click.Path(exists=True))
@click.option("--instances", "instances_path", required=True, type=click.Path(exists=True))
@click.option("--truth", required=True)
@click.option("--zero-trivial", is_flag=True,
              help="Force predictions on trivially zero members to 0.")
@click.option("--out", required=True, type=click.Path())
def curves(directory, instances_path, truth, zero_trivial, out):
    """Four relation metrics per epoch, as TSV plus a rendered figure."""
    sym = _load_symbol(truth)
    try:
        instances = ingest.read_instances(instances_path)
        rows = evaluate.relation_curves(directory, instances, sym, zero_trivial)
    except (OSError, ValueError) as exc:
        raise _fail(exc)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("epoch\trate1\trate2\trate3\trate4\n")
        for epoch, r1, r2, r3, r4 in rows:
            fh.write(f"{epoch}\t{r1:.6f}\t{r2:.6f}\t{r3:.6f}\t{r4:.6f}\n")
    _render_curves(rows, _figure_path(out))
    click.echo(f"{out}\n{_figure_path(out)}")


def _render_curves(rows, fig_path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    epochs = [r[0] for r in rows]
    labels = ("satisfied", "satisfied + magnitudes", "satisfied + signs", "exact")
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for i, label in enumerate(labels, start=1):
        ax.plot(epochs, [r[i] for r in rows], marker="o", label=label)
    ax.set_xlabel("epoch")
    ax.set_ylabel("rate")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(loc="lower right", fontsize="small")
    fig.tight_layout()
    fig.savefig(fig_path, dpi=150)
    plt.close(fig)


@main.command()
@click.option("--in", "in_path", required=True)
@click.option("--bins", type=int, default=40)
@click.option("--out", required=True, type=click.Path())
def hist(in_path, bins, out):
    """Coefficient-magnitude histogram, as TSV plus a rendered figure."""
    sym = _load_symbol(in_path)
    try:
        edges, counts = evaluate.magnitude_histogram(sym, bins)
    except ValueError as exc:
        raise _fail(exc)
    rows = evaluate.histogram_rows(edges, counts)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("log10_lo\tlog10_hi\tcount\n")
        for lo, hi, n in rows:
            fh.write(f"{lo:.6f}\t{hi:.6f}\t{n}\n")
    _render_hist(rows, _figure_path(out))
    click.echo(f"{out}\n{_figure_path(out)}")


def _render_hist(rows, fig_path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    widths = [hi - lo for lo, hi, _ in rows]
    ax.bar([lo for lo, _, _ in rows], [n for _, _, n in rows],
           width=widths, align="edge", edgecolor="black", linewidth=0.3)
    ax.set_xlabel("log10 |coefficient|")
    ax.set_ylabel("count")
    fig.tight_layout()
    fig.savefig(fig_path, dpi=150)
    plt.close(fig)


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", default=None)
def angles(in_path, out):
    """Pairwise letter-embedding angles and triangle deviations."""
    try:
        vectors = ingest.read_embeddings(in_path)
        report = evaluate.embedding_angles(vectors)
    except (OSError, ValueError) as exc:
        raise _fail(exc)
    with _open_out(out) as fh:
        fh.write("pair\tangle_deg\n")
        for pair, angle in report["pairs"].items():
            fh.write(f"{pair}\t{angle:.1f}\n")
        fh.write("triangle\tmax_dev_deg\n")
        for tri, dev in report["triangles"].items():
            fh.write(f"{tri}\t{dev:.1f}\n")


if __name__ == "__main__":
    main()
