"""Command-line entry point: ``htaction construct | verify | twist | faithful-index``."""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import engine, surface
from .permutation import OrbitExceedsCap, orbit_structure
from .verify import verify_spec
from .words import Word, WordSyntaxError

ORBIT_CAP = 10**4

_format_option = click.option(
    "--format", "fmt", type=click.Choice(["json", "text"]), default="text", show_default=True
)


def _dumps(data) -> str:
    return json.dumps(data, sort_keys=True, indent=1) + "\n"


def _sidecar(out: Path) -> Path:
    return out.with_name(out.stem + ".log.jsonl")


def _parse_word(text: str) -> Word:
    try:
        return Word.parse(text)
    except WordSyntaxError as exc:
        raise click.BadParameter(str(exc)) from exc


@click.group()
def cli() -> None:
    """Highly transitive permutation actions of free and surface groups."""


@cli.command()
@click.option("--genus", type=click.IntRange(min=2), required=True, help="Surface genus, at least 2.")
@click.option("--word-len", type=click.IntRange(min=0), default=2, show_default=True)
@click.option("--tuple-max", type=click.IntRange(min=0), default=1, show_default=True)
@click.option("--window", type=click.IntRange(min=0), default=1, show_default=True, help="Window radius.")
@click.option("--orbit-target", type=click.IntRange(min=0), default=2, show_default=True)
@click.option("--power", type=click.IntRange(min=1), default=2, show_default=True)
@click.option("--seed", type=int, default=None, help="Randomize fresh-point choice.")
@click.option("-o", "--out", type=click.Path(dir_okay=False, path_type=Path), required=True)
@_format_option
def construct(genus, word_len, tuple_max, window, orbit_target, power, seed, out, fmt) -> None:
    """Build the permutations and the surface-group map; write the JSON artifact."""
    n_free = engine.n_free_for_genus(genus)
    try:
        budget = engine.ConstructionBudget(
            n_free=n_free,
            word_len=word_len,
            tuple_max=tuple_max,
            window=window,
            orbit_target=orbit_target,
            designated=engine.designated_for_genus(genus),
            seed=seed,
        )
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    partial, log = engine.run_construction(budget)
    assign = engine.finalize(partial)
    spec = engine.surface_hom(assign, genus, power, budget=budget, log=log)
    out.write_text(_dumps(spec.to_json()))
    _sidecar(out).write_text(log.to_jsonl())

    orbits = []
    for w in budget.designated:
        rep = orbit_structure(w, assign, budget.window_set, ORBIT_CAP)
        orbits.append({"word": str(w), "all_finite": rep.all_finite, "max_length": rep.max_length})
    summary = {
        "out": str(out),
        "parity": spec.parity,
        "requirements": len(log),
        "table_sizes": {g: len(p.table) for g, p in assign.items() if hasattr(p, "table")},
        "orbits": orbits,
    }
    if fmt == "json":
        click.echo(_dumps(summary), nl=False)
        return
    click.echo(f"wrote {out} ({spec.parity} genus {genus}, power {power})")
    click.echo(f"requirements discharged: {summary['requirements']}")
    for g, size in summary["table_sizes"].items():
        click.echo(f"  {g}: {size} table pairs")
    for o in orbits:
        state = "finite" if o["all_finite"] else "truncated"
        click.echo(f"  orbits of {o['word']} on the window: {state}, longest {o['max_length']}")


@cli.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--report", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option("--cap", type=click.IntRange(min=1), default=ORBIT_CAP, show_default=True)
@_format_option
def verify(path, report, cap, fmt) -> None:
    """Re-check an artifact; exit status 1 iff a logged witness fails to replay."""
    spec = engine.EmbeddingSpec.from_json(json.loads(path.read_text()))
    try:
        result = verify_spec(spec, cap=cap)
    except OrbitExceedsCap as exc:
        raise click.ClickException(str(exc)) from exc
    if report is not None:
        report.write_text(_dumps(result))
    if fmt == "json":
        click.echo(_dumps(result), nl=False)
    else:
        _print_report(result)
    if result["replay_failures"]:
        sys.exit(1)


def _print_report(result: dict) -> None:
    rp = result["replay"]
    click.echo(f"replay: {rp['witnesses'] - len(rp['failures'])}/{rp['witnesses']} witnesses hold")
    if "freeness" in result:
        fr = result["freeness"]
        click.echo(f"freeness: {fr['checked']} words, {len(fr['flags'])} flagged")
        for tr in result["transitivity"]:
            click.echo(f"transitivity k={tr['k']}: {len(tr['unrealized'])}/{tr['total']} unrealized")
        for o in result["orbits"]:
            nd = o.get("nondiscrete")
            tail = f", q={nd['q']} moves {nd['moved']}" if nd else ""
            click.echo(f"orbits of {o['word']}: lengths {o['lengths']}{tail}")
    rel = result["relator"]
    click.echo(
        f"relator: symbolic identity {rel['symbolic_identity']}, "
        f"fixes radius {rel['radius']} {rel['fixes_window']}"
    )
    for item in result["embedding"]:
        click.echo(f"  {item['element']}: {item['status']}")


@cli.command()
@click.option("--genus", type=click.IntRange(min=2), required=True)
@click.option("--n", "n", type=click.IntRange(min=0), required=True)
@click.argument("element")
@_format_option
def twist(genus, n, element, fmt) -> None:
    """Image of ELEMENT under the n-th twist-and-fold map."""
    w = _parse_word(element)
    _check_surface_word(w, genus)
    img = surface.EventuallyFaithfulSequence(genus).image(w, n)
    if fmt == "json":
        click.echo(_dumps({"genus": genus, "n": n, "element": str(w), "image": str(img)}), nl=False)
    else:
        click.echo(str(img))


@cli.command("faithful-index")
@click.option("--genus", type=click.IntRange(min=2), required=True)
@click.option("--n-max", type=click.IntRange(min=0), default=10, show_default=True)
@click.argument("element")
@_format_option
def faithful_index(genus, n_max, element, fmt) -> None:
    """Least n0 such that ELEMENT survives every map from n0 up to n-max."""
    w = _parse_word(element)
    _check_surface_word(w, genus)
    n0 = surface.faithful_index(w, genus, n_max)
    if fmt == "json":
        click.echo(_dumps({"genus": genus, "n_max": n_max, "element": str(w), "index": n0}), nl=False)
    else:
        click.echo(str(n0) if n0 is not None else f"none <= {n_max}")


def _check_surface_word(w: Word, genus: int) -> None:
    extra = w.generators() - set(surface.surface_generators(genus))
    if extra:
        raise click.BadParameter(f"unknown generators {sorted(extra)} for genus {genus}")


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
