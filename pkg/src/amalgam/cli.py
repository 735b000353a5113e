"""Command-line interface: ``amalgam <subcommand> ...``.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from . import __version__
from .classify import (
    cone_planar_nerve,
    is_3manifold_group,
    is_hyperbolic_C,
    obstruction_oracle,
    qi_class_C,
    qi_class_W,
    qi_cross,
    qi_equivalent_C,
    qi_equivalent_W,
)
from .commensurability import associated_racg_vector, commensurable_CW, euler_vector
from .core_model import Spec, SpecError, SurfaceAmalgamSpec, ThetaGraphSpec, load_spec
from .covers import CoverMap, build_tower_X, build_tower_Z, check_X5_iso_Z2, verify_cover, verify_tower
from .model_geometry import SizeLimit, model_space_type_of, run_distortion, standard_representative

SEED = 0


class InputError(Exception):
    pass


def provenance() -> dict:
    return {"tool": "amalgam", "version": __version__, "seed": SEED}


def read_spec(arg: str) -> Spec:
    text = arg
    if not arg.lstrip().startswith("{"):
        try:
            text = Path(arg).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {arg}: {exc}") from None
    try:
        return load_spec(text)
    except SpecError as exc:
        raise InputError("\n".join(f"{c}: {m}" for c, m in exc.violations)) from None


# -- report blocks ---------------------------------------------------------------------


def classification_block(spec: Spec) -> dict:
    mst = model_space_type_of(spec)
    out: dict[str, Any] = {"model_space_type": mst.to_json(), "standard_representative": standard_representative(mst).to_json()}
    if isinstance(spec, SurfaceAmalgamSpec):
        verdict = is_3manifold_group(spec)
        oracle = obstruction_oracle(spec)
        out.update(
            hyperbolic=is_hyperbolic_C(spec),
            three_manifold=verdict.to_json(),
            oracle_agrees=oracle.is_3manifold == verdict.is_3manifold and oracle.label == verdict.label,
            oracle=oracle.to_json(),
            qi_class=str(qi_class_C(spec)),
            coprime=spec.coprime,
        )
    else:
        sphere = cone_planar_nerve(spec)
        out.update(
            hyperbolic=spec.is_hyperbolic,
            linear_degree=spec.linear_degree,
            hyperbolic_degree=spec.hyperbolic_degree,
            qi_class=str(qi_class_W(spec)),
            coned_nerve=sphere.to_json(),
        )
    return out


def commensurability_block(spec: Spec) -> dict:
    if isinstance(spec, SurfaceAmalgamSpec):
        return {"associated_vector": associated_racg_vector(spec).to_json()}
    return {"euler_vector": euler_vector(spec).to_json()}


def tower_block(spec: SurfaceAmalgamSpec, full: bool = False) -> dict:
    tx, tz = build_tower_X(spec), build_tower_Z(spec)
    cx, cz = verify_tower(tx), verify_tower(tz)
    iso = check_X5_iso_Z2(spec)
    out = {
        "euler_chain_X": dict(zip(tx.names, tx.euler_chain())),
        "euler_chain_Z": dict(zip(tz.names, tz.euler_chain())),
        "links": {name: rep.to_json() for name, rep in cx.link_reports + cz.link_reports},
        "all_links_pass": cx.passed and cz.passed,
        "X5_iso_Z2": iso is not None,
        "N": tx.meta["N"],
    }
    if full:
        out["tower_X"] = tx.to_json()
        out["tower_Z"] = tz.to_json()
        if iso is not None:
            out["isomorphism"] = iso.to_json()
    return out


# -- output ------------------------------------------------------------------------------


def _flatten(obj: Any, prefix: str = "") -> list[tuple[str, str]]:
    rows = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            rows += _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and all(not isinstance(x, (dict, list)) for x in obj):
        rows.append((prefix, "(" + ", ".join(map(str, obj)) + ")"))
    elif isinstance(obj, list):
        for i, x in enumerate(obj):
            rows += _flatten(x, f"{prefix}[{i}]")
    else:
        rows.append((prefix, json.dumps(obj) if isinstance(obj, bool) or obj is None else str(obj)))
    return rows


def render_human(obj: Any) -> str:
    rows = _flatten(obj)
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def emit(obj: Any, human: bool, out=None) -> None:
    out = out or sys.stdout
    if human:
        out.write(render_human(obj) + "\n")
    else:
        out.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


# -- subcommands --------------------------------------------------------------------------


def cmd_classify(args) -> int:
    spec = read_spec(args.spec)
    report = {
        "spec": spec.to_json(),
        "classification": classification_block(spec),
        "commensurability": commensurability_block(spec),
        "provenance": provenance(),
    }
    emit(report, args.human)
    return 0


def _qi_class(spec: Spec) -> str:
    return str(qi_class_C(spec)) if isinstance(spec, SurfaceAmalgamSpec) else str(qi_class_W(spec))


def cmd_qi(args) -> int:
    a, b = read_spec(args.spec_a), read_spec(args.spec_b)
    if isinstance(a, SurfaceAmalgamSpec) and isinstance(b, SurfaceAmalgamSpec):
        eq, relation = qi_equivalent_C(a, b), "C-C"
    elif isinstance(a, ThetaGraphSpec) and isinstance(b, ThetaGraphSpec):
        eq, relation = qi_equivalent_W(a, b), "W-W"
    else:
        c, w = (a, b) if isinstance(a, SurfaceAmalgamSpec) else (b, a)
        eq, relation = qi_cross(c, w), "C-W"  # type: ignore[arg-type]
    emit(
        {"relation": relation, "class_a": _qi_class(a), "class_b": _qi_class(b), "quasi_isometric": eq, "provenance": provenance()},
        args.human,
    )
    return 0


def cmd_commensurate(args) -> int:
    c, w = read_spec(args.spec_c), read_spec(args.spec_w)
    if not isinstance(c, SurfaceAmalgamSpec) or not isinstance(w, ThetaGraphSpec):
        raise InputError("commensurate expects a family C spec followed by a family W spec")
    verdict = commensurable_CW(c, w)
    emit({"verdict": verdict.to_json(), "provenance": provenance()}, args.human)
    return 0


def cmd_tower(args) -> int:
    spec = read_spec(args.spec)
    if not isinstance(spec, SurfaceAmalgamSpec):
        raise InputError("tower expects a family C spec")
    block = tower_block(spec, full=args.full)
    if args.emit_covers:
        outdir = Path(args.emit_covers)
        outdir.mkdir(parents=True, exist_ok=True)
        for tower in (build_tower_X(spec), build_tower_Z(spec)):
            for i, ln in enumerate(tower.links):
                if ln.cover is not None:
                    path = outdir / f"{tower.names[i + 1]}_to_{tower.names[i]}.json"
                    path.write_text(json.dumps(ln.cover.to_json(), sort_keys=True, indent=1) + "\n")
    emit({"spec": spec.to_json(), "tower": block, "provenance": provenance()}, args.human)
    if args.verify and not (block["all_links_pass"] and block["X5_iso_Z2"]):
        return 1
    return 0


def cmd_verify_cover(args) -> int:
    try:
        obj = json.loads(Path(args.file).read_text())
        cm = CoverMap.from_json(obj)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"cannot load cover map from {args.file}: {exc}") from None
    rep = verify_cover(cm)
    emit(rep.to_json(), args.human)
    return 0 if rep.passed else 1


def cmd_geometry(args) -> int:
    kinds = {(2, 2): "line", (3, 3): "tree"}
    key = tuple(sorted((args.m, args.n)))
    if key not in kinds:
        raise InputError("geometry supports --m 2 --n 2 (line collapse) and --m 3 --n 3 (tree collapse)")
    s = args.collapse_s
    R = args.radius if args.radius is not None else 6 * s
    try:
        rep = run_distortion(kinds[key], s, R, sample_size=args.sample_size, ordering=args.ordering, seed=SEED)
    except (ValueError, SizeLimit) as exc:
        raise InputError(str(exc)) from None
    out = rep.to_json()
    out["provenance"] = provenance()
    emit(out, args.human)
    return 0 if rep.passed else 1


BATCH_COLUMNS = [
    "file",
    "family",
    "status",
    "spec",
    "hyperbolic",
    "three_manifold",
    "case",
    "qi_class",
    "model_space_type",
    "standard_representative",
    "vector",
    "error",
]


def batch_row(path: Path) -> dict:
    row = {k: "" for k in BATCH_COLUMNS}
    row["file"] = path.name
    try:
        spec = read_spec(str(path))
    except InputError as exc:
        row.update(status="error", error=str(exc).replace("\n", "; "))
        return row
    cls = classification_block(spec)
    mst, rep = cls["model_space_type"], cls["standard_representative"]
    row.update(
        family=spec.family,
        status="ok",
        spec=json.dumps(spec.to_json(), sort_keys=True),
        hyperbolic=cls["hyperbolic"],
        qi_class=cls["qi_class"],
        model_space_type=f"({mst['m']},{mst['n']},{mst['s']})",
        standard_representative=f"({rep['m']},{rep['n']},{rep['s']})",
    )
    if isinstance(spec, SurfaceAmalgamSpec):
        row.update(
            three_manifold=cls["three_manifold"]["is_3manifold"],
            case=cls["three_manifold"]["case"],
            vector=" ".join(associated_racg_vector(spec).w.to_json()),
        )
    else:
        row["vector"] = " ".join(euler_vector(spec).to_json())
    return row


def cmd_batch(args) -> int:
    d = Path(args.directory)
    if not d.is_dir():
        raise InputError(f"{d} is not a directory")
    rows = [batch_row(p) for p in sorted(d.glob("*.json"), key=lambda p: p.name)]
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=BATCH_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        sys.stdout.write(buf.getvalue())
    else:
        emit({"rows": rows, "provenance": provenance()}, args.human)
    return 2 if any(r["status"] == "error" for r in rows) else 0


# -- entry point --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="amalgam", description="Surface amalgams and theta-graph Coxeter groups.")
    p.add_argument("--version", action="version", version=f"amalgam {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--human", action="store_true", help="render a table instead of JSON")
        sp.set_defaults(func=func)
        return sp

    sp = add("classify", cmd_classify, "classify one spec (file path or inline JSON)")
    sp.add_argument("spec")
    sp = add("qi", cmd_qi, "decide quasi-isometry between two specs")
    sp.add_argument("spec_a")
    sp.add_argument("spec_b")
    sp = add("commensurate", cmd_commensurate, "vector criterion for a C spec and a W spec")
    sp.add_argument("spec_c")
    sp.add_argument("spec_w")
    sp = add("tower", cmd_tower, "build and check both covering towers for a C spec")
    sp.add_argument("spec")
    sp.add_argument("--verify", action="store_true", help="exit 1 unless every link passes and X5 is isomorphic to Z2")
    sp.add_argument("--full", action="store_true", help="include every stage complex")
    sp.add_argument("--emit-covers", metavar="DIR", help="write each cover link as a JSON file")
    sp = add("verify-cover", cmd_verify_cover, "verify a serialized cover map")
    sp.add_argument("file")
    sp = add("geometry", cmd_geometry, "measure collapse-map distortion")
    sp.add_argument("--m", type=int, default=3)
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--radius", type=int, default=None, help="default 6 * s")
    sp.add_argument("--collapse-s", type=int, default=2)
    sp.add_argument("--sample-size", type=int, default=None, help="random pairs instead of all interior pairs")
    sp.add_argument("--ordering", choices=("first", "last"), default="first")
    sp = add("batch", cmd_batch, "classify every *.json in a directory")
    sp.add_argument("directory")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
