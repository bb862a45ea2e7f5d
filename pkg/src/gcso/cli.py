"""``gcso`` command line: faces, fibers, verification suites and drawings.

JSON goes to stdout, diagnostics to stderr.  Exit codes: 0 success,
1 verification mismatch, 2 usage or validation error, 3 point outside the
polytope, 4 oracle capacity exceeded.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction
from pathlib import Path

import click

from . import __version__
from .errors import GCError, UsageError
from .fibers import fiber_descriptor, fiber_descriptor_cut, is_lagrangian
from .ladder import LadderSpec, build_ladder, f_vector, to_fraction
from .polytope import (
    correspondence,
    diagram_faces,
    face_support,
    locate_face,
    oracle_cap,
    parse_point,
)
from .render import render_ascii, render_many_svg, render_svg
from .verify import CORPUS, corpus_specs, verify_numeric, verify_strings


def _num(x) -> int | str | float:
    """JSON-friendly rational: ints stay ints, other fractions become ``"p/q"``."""
    if isinstance(x, float):
        return x
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _emit(payload: dict) -> None:
    click.echo(json.dumps(payload, indent=2, sort_keys=False))


def _parse_lambda(text: str) -> list[Fraction]:
    try:
        return [to_fraction(part.strip()) for part in text.split(",") if part.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse lambda {text!r}: {exc}") from exc


def _spec(n: int, lam: str) -> LadderSpec:
    return LadderSpec(n, _parse_lambda(lam))


def _spec_json(spec: LadderSpec) -> dict:
    return {"n": spec.n, "lambda": [_num(x) for x in spec.lam]}


def face_json(face) -> dict:
    fiber = fiber_descriptor_cut(face)
    return {
        "id": face.id,
        "dim": face.dim,
        "isogram": [[list(p), list(q)] for p, q in sorted(face.isogram.edges)],
        "coastline": [sorted(c) for c in face.coastline.choices],
        "support": face_support(face).describe(),
        "fiber": {"stages": fiber.labels(), "total_dim": fiber.total_dim},
        "lagrangian": is_lagrangian(face),
    }


class _Group(click.Group):
    """Turns library errors into their exit codes."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except GCError as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(exc.exit_code)


n_option = click.option("-n", "n", type=int, required=True, help="Matrix size n.")
lambda_option = click.option(
    "-l", "--lambda", "lam", required=True, help="Comma-separated rationals, e.g. 3,0 or 5/2,1."
)


@click.group(cls=_Group)
@click.version_option(__version__, prog_name="gcso")
def main() -> None:
    """Gelfand-Cetlin systems on co-adjoint SO(n)-orbits."""


@main.command()
@n_option
@lambda_option
@click.option("--lagrangian-only", is_flag=True, help="List only Lagrangian faces.")
def faces(n: int, lam: str, lagrangian_only: bool) -> None:
    """List the faces of the ladder diagram with supports and fibers."""
    spec = _spec(n, lam)
    all_faces = diagram_faces(spec)
    listed = [f for f in all_faces if is_lagrangian(f)] if lagrangian_only else list(all_faces)
    _emit(
        {
            **_spec_json(spec),
            "area": build_ladder(spec).area,
            "f_vector": list(f_vector([f.dim for f in all_faces])),
            "lagrangian_only": lagrangian_only,
            "count": len(listed),
            "faces": [face_json(f) for f in listed],
        }
    )


@main.command()
@n_option
@lambda_option
@click.option("--point", required=True, help="Box coordinates in diagram order, comma-separated rationals.")
def fiber(n: int, lam: str, point: str) -> None:
    """Topology of the fiber over a point of the polytope."""
    spec = _spec(n, lam)
    try:
        u = parse_point(spec, point)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    face = locate_face(spec, u)
    fd = fiber_descriptor(u)
    area = build_ladder(spec).area
    _emit(
        {
            **_spec_json(spec),
            "point": [_num(u.values[b]) for b in build_ladder(spec).boxes],
            "face": {"id": face.id, "dim": face.dim},
            "stages": fd.labels(),
            "total_dim": fd.total_dim,
            "area": area,
            "lagrangian": fd.total_dim == area,
        }
    )


@main.group()
def verify() -> None:
    """Cross-check suites; exit code 1 on any mismatch."""


def _finish(payload: dict) -> None:
    _emit(payload)
    for line in payload.get("summaries", []):
        click.echo(line, err=True)
    if not payload["ok"]:
        sys.exit(1)


def _selected_specs(n: int | None, lam: str | None, corpus: bool, max_n: int = 7) -> list[LadderSpec]:
    if corpus:
        return corpus_specs(max_n)
    if n is None or lam is None:
        raise UsageError("give -n and -l, or --corpus")
    return [_spec(n, lam)]


@verify.command("correspondence")
@click.option("-n", "n", type=int)
@click.option("-l", "--lambda", "lam")
@click.option("--corpus", is_flag=True, help=f"Run every built-in spec ({len(CORPUS)} of them).")
def verify_correspondence_cmd(n: int | None, lam: str | None, corpus: bool) -> None:
    """Diagram faces against the exact polytope face lattice."""
    reports = []
    for spec in _selected_specs(n, lam, corpus):
        c = correspondence(spec)
        reports.append((spec, c.report))
    _finish(
        {
            "suite": "correspondence",
            "oracle_cap": oracle_cap(),
            "ok": all(r.ok for _, r in reports),
            "results": [
                {
                    **_spec_json(spec),
                    "ok": r.ok,
                    "matched": r.matched,
                    "diagram_faces": r.n_diagram_faces,
                    "polytope_faces": r.n_polytope_faces,
                    "dim_mismatches": len(r.dim_mismatches),
                    "order_mismatches": r.order_mismatches,
                }
                for spec, r in reports
            ],
            "summaries": [r.summary() for _, r in reports],
        }
    )


@verify.command("fibers")
@click.option(
    "--exhaustive-strings",
    nargs=2,
    type=int,
    default=(4, 3),
    show_default=True,
    metavar="MAX_LEN MAX_VALUE",
    help="Bounds for the exhaustive string sweep.",
)
@click.option("-n", "n", type=int, help="Also compare the face routes for this spec.")
@click.option("-l", "--lambda", "lam")
def verify_fibers_cmd(exhaustive_strings: tuple[int, int], n: int | None, lam: str | None) -> None:
    """Run rule, block cutting and sphere radii against each other."""
    max_len, max_value = exhaustive_strings
    strings = verify_strings(max_len, max_value)
    payload = {
        "suite": "fibers",
        "strings": {
            "max_len": max_len,
            "max_value": max_value,
            "checked": strings.checked,
            "mismatches": [
                {k: (list(v) if isinstance(v, tuple) else v) for k, v in m.items()} for m in strings.mismatches
            ],
        },
        "summaries": [strings.summary()],
    }
    ok = strings.ok
    if n is not None or lam is not None:
        spec = _spec(n, lam) if n is not None and lam is not None else None
        if spec is None:
            raise UsageError("-n and -l go together")
        c = correspondence(spec)
        bad = []
        for face in c.faces:
            by_point = fiber_descriptor(c.sample_point(face))
            by_cut = fiber_descriptor_cut(face)
            lag = is_lagrangian(face)
            if by_point != by_cut or lag != (by_cut.total_dim == c.diagram.area):
                bad.append(face.id)
        ok = ok and not bad
        payload["faces"] = {**_spec_json(spec), "checked": len(c.faces), "mismatches": bad}
        payload["summaries"].append(
            f"{'PASS' if not bad else 'FAIL'} {spec.label()}: {len(c.faces)} faces, {len(bad)} mismatches"
        )
    payload["ok"] = ok
    _finish(payload)


@verify.command("numeric")
@click.option("-n", "n", type=int)
@click.option("-l", "--lambda", "lam")
@click.option("--corpus", is_flag=True)
@click.option("--samples", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
def verify_numeric_cmd(n: int | None, lam: str | None, corpus: bool, samples: int, seed: int) -> None:
    """Orbit sampling, reconstruction round trips and exact Pfaffians."""
    reports = [verify_numeric(spec, samples, seed) for spec in _selected_specs(n, lam, corpus)]
    _finish(
        {
            "suite": "numeric",
            "samples": samples,
            "seed": seed,
            "ok": all(r.ok for r in reports),
            "results": [
                {
                    **_spec_json(r.spec),
                    "ok": r.ok,
                    "max_containment_violation": r.max_containment_violation,
                    "max_round_trip_error": r.max_round_trip_error,
                    "pfaffian_failures": r.pfaffian_failures,
                }
                for r in reports
            ],
            "summaries": [r.summary() for r in reports],
        }
    )


@main.command()
@n_option
@lambda_option
@click.option("--face", "face_id", help="Face id as printed by `gcso faces`.")
@click.option("--all-lagrangian", is_flag=True, help="Draw every Lagrangian face.")
@click.option("--format", "fmt", type=click.Choice(["ascii", "svg"]), default=None, help="Defaults to svg with --out.")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), help="Write to this file instead of stdout.")
def render(n: int, lam: str, face_id: str | None, all_lagrangian: bool, fmt: str | None, out: Path | None) -> None:
    """Draw the diagram, optionally with a face's isogram, coastline and filling."""
    if face_id and all_lagrangian:
        raise UsageError("--face and --all-lagrangian are exclusive")
    spec = _spec(n, lam)
    diagram = build_ladder(spec)
    all_faces = diagram_faces(spec)
    if face_id:
        chosen = [f for f in all_faces if f.id == face_id]
        if not chosen:
            raise UsageError(f"unknown face id {face_id!r} for {spec.label()}")
    elif all_lagrangian:
        chosen = [f for f in all_faces if is_lagrangian(f)]
    else:
        chosen = []
    fmt = fmt or ("svg" if out else "ascii")
    if fmt == "svg":
        text = render_many_svg(diagram, chosen) if len(chosen) > 1 else render_svg(diagram, chosen[0] if chosen else None)
    elif chosen:
        text = "\n".join(f"face {f.id} dim {f.dim}\n{render_ascii(diagram, f)}" for f in chosen)
    else:
        text = render_ascii(diagram)
    if out:
        out.write_text(text, encoding="utf-8")
        click.echo(f"wrote {out} ({len(chosen)} face drawing(s))", err=True)
    else:
        click.echo(text, nl=False)


if __name__ == "__main__":  # pragma: no cover
    main()
