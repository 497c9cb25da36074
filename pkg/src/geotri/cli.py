"""Command line interface: ``geotri <command> ...``.

Exit status is 0 on success, 1 when a validation or verification fails and
2 on usage errors. ``--seed`` fixes every random choice; ``--json`` prints
machine-readable reports.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import block as blk
from . import io
from . import stack as stk
from .curved import (EquatorOrBelow, OutsideDisk, gnomonic, gnomonic_inverse, klein_chart,
                     klein_inverse)
from .geometry import BoundaryFixing, MismatchedBoundary, verify_embedding
from .homotopy import contract, morph
from .mesh import validate_combinatorics
from .mvc import DegenerateFace, mean_value_weights
from .svg import Style, UnverifiedInput, render_svg, write_frames
from .tutte import NonConvexBoundary, NonPositiveWeight, random_weights, tutte_solve, uniform_weights


class UsageError(Exception):
    pass


def _report(args, ok: bool, doc: dict, text: str):
    if args.json:
        print(json.dumps(io._plain({"ok": ok, **doc}), sort_keys=True))
    else:
        print(text)
    return 0 if ok else 1


def _out_dir(path):
    p = Path(path)
    return p if p.suffix == "" else p.parent


def _finish(args, manifest: io.RunManifest, out):
    if out is not None:
        manifest.write(_out_dir(out))


def _load_embedding(mesh_path, boundary_path=None):
    doc = io.read_json(mesh_path)
    fix = io.doc_to_boundary(io.read_json(boundary_path)) if boundary_path else None
    return io.doc_to_embedding(doc, fix)


def _manifest(args, command, params, inputs=()):
    m = io.RunManifest(command, args.seed, params)
    for p in inputs:
        if p:
            m.add_input(p)
    return m


# ---------------------------------------------------------------------------
# commands

def cmd_validate(args):
    doc = io.read_json(args.mesh)
    tri, pos = io.doc_to_mesh(doc)
    rep = validate_combinatorics(tri)
    out = {"combinatorics": rep.to_dict()}
    ok = rep.ok
    if ok and pos is not None:
        fix = io.doc_to_boundary(io.read_json(args.boundary)) if args.boundary else None
        emb = io.doc_to_embedding(doc, fix)
        vr = verify_embedding(emb, paranoid=args.paranoid)
        out["embedding"] = vr.to_dict()
        ok = vr.passed
    lines = [f"combinatorics: {'ok' if rep.ok else 'INVALID'}"]
    lines += [f"  {v}" for v in rep.violations]
    if "embedding" in out:
        lines.append(f"embedding: {'verified' if out['embedding']['pass'] else 'FAILED'}")
        lines += [f"  {f}" for f in out["embedding"]["failures"][:20]]
    return _report(args, ok, out, "\n".join(lines))


def cmd_embed(args):
    doc = io.read_json(args.mesh)
    tri, pos = io.doc_to_mesh(doc)
    if args.boundary:
        fix = io.doc_to_boundary(io.read_json(args.boundary))
    elif pos is not None:
        fix = BoundaryFixing(tri.boundary, pos[list(tri.boundary)])
    else:
        raise UsageError("embed needs --boundary or a mesh with positions")
    if args.weights:
        w = io.doc_to_weights(tri, io.read_json(args.weights))
    elif args.random_weights:
        w = random_weights(tri, np.random.default_rng(args.seed))
    else:
        w = uniform_weights(tri)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NonConvexBoundary)
        emb = tutte_solve(tri, fix, w, method=args.method)
    vr = verify_embedding(emb)
    if args.out:
        io.write_json(args.out, io.embedding_to_doc(emb))
        m = _manifest(args, "embed", {"method": args.method, "random_weights": args.random_weights},
                      [args.mesh, args.boundary, args.weights])
        m.outputs.append(Path(args.out).name)
        _finish(args, m, args.out)
    convex = not any(issubclass(c.category, NonConvexBoundary) for c in caught)
    text = f"embedding: {'verified' if vr.passed else 'FAILED'}" + ("" if convex else
                                                                    " (boundary not convex)")
    return _report(args, vr.passed, {"verify": vr.to_dict(), "convex_boundary": convex}, text)


def cmd_weights(args):
    doc = io.read_json(args.mesh)
    tri, pos = io.doc_to_mesh(doc)
    if args.scheme == "mvc":
        w = mean_value_weights(io.doc_to_embedding(doc))
    elif args.scheme == "uniform":
        w = uniform_weights(tri)
    else:
        w = random_weights(tri, np.random.default_rng(args.seed))
    if args.out:
        io.write_json(args.out, io.weights_to_doc(w))
        m = _manifest(args, "weights", {"scheme": args.scheme}, [args.mesh])
        m.outputs.append(Path(args.out).name)
        _finish(args, m, args.out)
    else:
        print(io.dumps(io.weights_to_doc(w)), end="")
        return 0
    return _report(args, True, {"entries": len(w.to_triples())},
                   f"wrote {len(w.to_triples())} weights")


def _emit_path(args, path, command, params, inputs):
    """Write ``path.json`` to ``--out`` and SVG frames to ``--svg`` (both directories)."""
    bad = path.verify()
    if args.out:
        io.write_json(Path(args.out) / "path.json", path.to_dict())
        m = _manifest(args, command, params, inputs)
        m.outputs.append("path.json")
        m.write(args.out)
    if args.svg and not bad:
        m = _manifest(args, command, params, inputs)
        m.outputs += write_frames(path, args.svg)
        m.write(args.svg)
    doc = {"samples": len(path), "unverified": bad, "max_step": path.max_step()}
    text = (f"{command}: {len(path)} samples, "
            f"{'all verified' if not bad else f'{len(bad)} UNVERIFIED'}")
    return _report(args, not bad, doc, text)


def cmd_morph(args):
    a = _load_embedding(args.from_)
    b = _load_embedding(args.to)
    path = morph(a, b, args.samples)
    return _emit_path(args, path, "morph", {"samples": args.samples}, [args.from_, args.to])


def cmd_contract(args):
    tau = _load_embedding(args.mesh)
    path = contract(tau, samples=args.samples)
    return _emit_path(args, path, "contract", {"samples": args.samples}, [args.mesh])


def cmd_chart(args):
    doc = io.read_json(args.in_)
    pts = np.asarray(doc["positions"], dtype=float)
    if args.model == "klein":
        q = klein_inverse(pts) if args.inverse else klein_chart(pts)
    else:
        q = gnomonic_inverse(pts) if args.inverse else gnomonic(pts)
    out = dict(doc)
    out["positions"] = q.tolist()
    out["chart"] = {"model": args.model, "inverse": bool(args.inverse)}
    if args.out:
        io.write_json(args.out, out)
        m = _manifest(args, "chart", {"model": args.model, "inverse": args.inverse}, [args.in_])
        m.outputs.append(Path(args.out).name)
        _finish(args, m, args.out)
    return _report(args, True, {"points": len(q)}, f"mapped {len(q)} points ({args.model})")


def _block_params(args):
    return blk.BlockParams(k=args.k, eps=args.eps, delta=args.delta)


def cmd_block(args):
    params = _block_params(args)
    out = Path(args.out) if args.out else None
    if args.block_cmd == "scan":
        ts = np.linspace(-1, 1, args.samples + 2)[1:-1]
        feas = np.array([blk.feasible_t(params, float(t)) for t in ts])
        runs = _runs(ts, ~feas)
        doc = {"params": params.to_dict(), "classification": blk.classify_perturbation(
            params.eps, params.delta).value, "samples": len(ts),
            "infeasible_runs": runs, "feasible_fraction": float(feas.mean())}
        if out:
            io.write_json(out / "scan.json", doc)
            outputs = ["scan.json"]
            try:
                b = blk.build_block(params)
                (out / "block.svg").write_text(render_svg(b.reference, Style(labels=blk.NAMES)))
                outputs.append("block.svg")
            except (blk.ClearanceFailure, UnverifiedInput):
                pass
            m = _manifest(args, "block scan", {**params.to_dict(), "samples": args.samples})
            m.outputs += outputs
            m.write(out)
        text = f"{len(runs)} infeasible run(s)"
        if runs:
            text += ": " + ", ".join(f"[{a:.6f}, {b:.6f}]" for a, b in runs)
        return _report(args, True, doc, text)
    c = float(params.c)
    ts = np.linspace(-c, c, args.samples)
    path = blk.gamma_path(params, ts)
    return _emit_path(args, path, "block gamma", {**params.to_dict(), "samples": args.samples}, [])


def _runs(ts, mask):
    runs, start = [], None
    for t, m in zip(ts, mask):
        if m and start is None:
            start = t
        if not m and start is not None:
            runs.append([float(start), float(prev)])
            start = None
        prev = t
    if start is not None:
        runs.append([float(start), float(ts[-1])])
    return runs


def cmd_omega(args):
    st = stk.build_stack(args.n)
    out = Path(args.out) if args.out else None
    m = _manifest(args, f"omega {args.omega_cmd}", {"n": args.n, **st.spec.to_dict(),
                                                     "clearance": st.clearance, "eps": st.eps})
    if args.omega_cmd == "build":
        vr = st.reference.verify()
        doc = {"spec": st.spec.to_dict(), "verify": vr.to_dict(),
               "interior_vertices": st.tri.n_interior, "faces": st.tri.n_faces}
        if out:
            io.write_json(out / "mesh.json", io.embedding_to_doc(st.reference.embedding))
            (out / "reference.svg").write_text(render_svg(st.reference.embedding))
            m.outputs += ["mesh.json", "reference.svg"]
            m.write(out)
        return _report(args, vr.passed, doc,
                       f"stack n={args.n}: {st.tri.n_interior} interior vertices, reference "
                       f"{'verified' if vr.passed else 'FAILED'}")
    if args.omega_cmd == "loop":
        if args.n != 1:
            raise UsageError("loop is defined for --n 1")
        path = stk.build_loop_n1(st, args.samples)
        bad = path.verify()
        phi = np.array(path.meta["phi"])
        wn = stk.winding_number(phi, (blk.T0, blk.T0))
        doc = {"samples": len(path), "unverified": bad, "winding_number": wn}
        if out:
            io.write_json(out / "loop.json", path.to_dict())
            m.outputs.append("loop.json")
            if args.svg:
                m.outputs += write_frames(path, out / "frames")
            m.write(out)
        return _report(args, not bad and wn == 1, doc,
                       f"loop: {len(path)} samples, unverified={len(bad)}, winding={wn}")
    if args.omega_cmd == "sphere":
        samples = stk.build_sphere_map(st, args.resolution)
        bad = [i for i, s in enumerate(samples) if not s.config.verify().passed]
        agree = stk.facet_agreement(st, args.resolution)
        doc = {"samples": len(samples), "unverified": bad, "facet_agreement": agree}
        if out:
            io.write_json(out / "sphere.json", {
                "samples": [{"facet": list(s.facet), "x": s.x.tolist(), "kind": s.kind,
                             "phi": stk.Phi(s.config).tolist()} for s in samples]})
            m.outputs.append("sphere.json")
            m.write(out)
        return _report(args, not bad and agree <= 1e-10, doc,
                       f"sphere map: {len(samples)} samples, unverified={len(bad)}, "
                       f"facet agreement {agree:.3g}")
    cert = stk.certify_obstruction(st.spec)
    if args.fiber_samples:
        cert["fiber_search"] = stk.fiber_search(st, args.fiber_samples, rng=args.seed)
    ok = cert["certified"] and cert.get("fiber_search", {}).get("witnesses", 0) == 0
    if out:
        io.write_json(out / "certificate.json", cert)
        m.outputs.append("certificate.json")
        m.write(out)
    return _report(args, ok, cert, f"obstruction for n={args.n}: chain of {len(cert['chain'])}, "
                   f"contradiction at junction {cert['contradiction_at']}")


def cmd_render(args):
    emb = _load_embedding(args.mesh, args.boundary)
    labels = tuple(str(i) for i in range(emb.tri.vertex_count)) if args.labels else None
    svg = render_svg(emb, Style(labels=labels))
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(svg, encoding="utf-8")
    m = _manifest(args, "render", {"labels": args.labels}, [args.mesh, args.boundary])
    m.outputs.append(Path(args.out).name)
    _finish(args, m, args.out)
    return _report(args, True, {"out": str(args.out)}, f"wrote {args.out}")


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed for every random choice")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable report")

    ap = argparse.ArgumentParser(prog="geotri", description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", action="store_true", default=False)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a mesh (and its positions)")
    p.add_argument("--mesh", required=True)
    p.add_argument("--boundary")
    p.add_argument("--paranoid", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("embed", parents=[common], help="Tutte embedding")
    p.add_argument("--mesh", required=True)
    p.add_argument("--boundary")
    p.add_argument("--weights")
    p.add_argument("--random-weights", action="store_true")
    p.add_argument("--method", choices=("direct", "iterative"), default="direct")
    p.add_argument("--out")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("weights", parents=[common], help="weights of an embedding")
    p.add_argument("--mesh", required=True)
    p.add_argument("--scheme", choices=("mvc", "uniform", "random"), default="mvc")
    p.add_argument("--out")
    p.set_defaults(func=cmd_weights)

    for name, func in (("morph", cmd_morph), ("contract", cmd_contract)):
        p = sub.add_parser(name, parents=[common], help=f"{name} path in weight space")
        if name == "morph":
            p.add_argument("--from", dest="from_", required=True)
            p.add_argument("--to", required=True)
        else:
            p.add_argument("--mesh", required=True)
        p.add_argument("--samples", type=int, default=101)
        p.add_argument("--svg")
        p.add_argument("--out")
        p.set_defaults(func=func)

    p = sub.add_parser("chart", parents=[common], help="Klein or gnomonic chart")
    p.add_argument("--model", choices=("klein", "gnomonic"), required=True)
    p.add_argument("--in", dest="in_", required=True)
    p.add_argument("--out")
    p.add_argument("--inverse", action="store_true")
    p.set_defaults(func=cmd_chart)

    p = sub.add_parser("block", parents=[common], help="the building block polygon")
    p.add_argument("--k", type=float, default=0.5)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--delta", type=float, default=0.0)
    bsub = p.add_subparsers(dest="block_cmd", required=True)
    q = bsub.add_parser("scan", parents=[common])
    q.add_argument("--samples", type=int, default=10000)
    q.add_argument("--out")
    q = bsub.add_parser("gamma", parents=[common])
    q.add_argument("--samples", type=int, default=201)
    q.add_argument("--svg")
    q.add_argument("--out")
    p.set_defaults(func=cmd_block)

    p = sub.add_parser("omega", parents=[common], help="stacked polygons")
    p.add_argument("--n", type=int, default=1)
    osub = p.add_subparsers(dest="omega_cmd", required=True)
    for name in ("build", "loop", "sphere", "certify"):
        q = osub.add_parser(name, parents=[common])
        q.add_argument("--out")
        if name == "loop":
            q.add_argument("--samples", type=int, default=100)
            q.add_argument("--svg", action="store_true")
        if name == "sphere":
            q.add_argument("--resolution", type=int, default=9)
        if name == "certify":
            q.add_argument("--fiber-samples", type=int, default=0)
    p.set_defaults(func=cmd_omega)

    p = sub.add_parser("render", parents=[common], help="draw an embedding as SVG")
    p.add_argument("--mesh", required=True)
    p.add_argument("--boundary")
    p.add_argument("--labels", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except UsageError as e:
        ap.print_usage(sys.stderr)
        print(f"geotri: error: {e}", file=sys.stderr)
        return 2
    except (io.DocumentError, OSError) as e:
        print(f"geotri: error: {e}", file=sys.stderr)
        return 2
    except (MismatchedBoundary, NonPositiveWeight, DegenerateFace, UnverifiedInput,
            OutsideDisk, EquatorOrBelow, blk.ClearanceFailure, blk.InvalidParams,
            stk.NotStrictSubset) as e:
        if getattr(args, "json", False):
            print(json.dumps({"ok": False, "error": type(e).__name__, "detail": str(e)}))
        else:
            print(f"geotri: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
