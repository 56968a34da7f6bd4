"""Command-line batch surface.

Each subcommand runs one computation from the library and prints a
machine-readable report.  Output is deterministic for a fixed command
line: work cells are computed (possibly in parallel) into a keyed table
and assembled in sorted key order, JSON is serialized with sorted keys,
and randomized suites draw every sample from a seeded generator.

Exit status: 0 on success, 1 when a verification suite or class test
finds a violation, 2 on usage errors.
"""

import argparse
import csv
import io
import json
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from itertools import permutations

from .complexes import bar_complex, ce_complex, homology_ranks
from .dk import (FinSet, SetMap, PreconditionError, check_commutation,
                 dk_basis, direct_image, inverse_image, partial_pullback)
from .exactla import rank, rat
from .freelie import lyndon_words, shuffle_sums, witt_dimension
from .grt import (cohomology_class_test, condition_system, deformation_space,
                  deformation_differential, grt_basis, perm_sign, relabel_g,
                  solver_report)
from .operadkit import (assoc, axiom_check, comm, comm_shift, corolla,
                        free_operad, gerstenhaber_bracket, hoass_differential,
                        hocomm_reduce, shuffle_ideal_corollas, DKOperad)

SCHEMA_VERSION = 1
VERSION = "0.1.0"
DEFAULT_SEED = 1105


def _cells(jobs, keyed_tasks):
    """Run (key, thunk) pairs, possibly in parallel, and return the
    results as a list sorted by key.  Assembly order never depends on
    completion order."""
    if jobs <= 1:
        table = {k: fn() for k, fn in keyed_tasks}
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = {k: pool.submit(fn) for k, fn in keyed_tasks}
            table = {k: f.result() for k, f in futures.items()}
    return [table[k] for k in sorted(table)]


def _flatten(results):
    rows = []
    for chunk in results:
        rows.extend(chunk)
    return rows


# ---------------------------------------------------------------------------
# Commands.


def _require(cond, msg):
    if not cond:
        raise ValueError(msg)


def cmd_grt_dims(args):
    _require(args.weight is None or args.weight >= 1, "weight must be >= 1")
    _require(args.max_weight >= 1, "max weight must be >= 1")
    def cell(w):
        def run():
            r = solver_report(w) if args.class_test else None
            if r is None:
                sys_ = condition_system(w)
                r = {
                    "weight": w,
                    "dim_g3": dk_basis(FinSet.range(3), w).dim,
                    "dim_shuffle_kernel":
                        sys_.shuffle_block.ncols - rank(sys_.shuffle_block),
                    "dim_grt": len(grt_basis(w)),
                }
            return [r]
        return run

    weights = [args.weight] if args.weight else \
        list(range(1, args.max_weight + 1))
    rows = _flatten(_cells(args.jobs, [(w, cell(w)) for w in weights]))
    return 0, rows


def cmd_grt_class_test(args):
    _require(args.weight >= 1, "weight must be >= 1")
    rows = []
    failures = 0
    if args.control:
        basis3 = dk_basis(FinSet.range(3), 1)
        phi = basis3.element({0: rat(1)}) - basis3.element({2: rat(1)})
        elements = [("control", phi)]
    else:
        elements = [(str(i), phi)
                    for i, phi in enumerate(grt_basis(args.weight))]
    for name, phi in elements:
        t = cohomology_class_test(phi, args.window)
        witness = str(t["witness"]) if t["witness"] is not None else None
        rows.append({
            "weight": phi.weight,
            "element": name,
            "value": str(phi),
            "cocycle": t["cocycle"],
            "coboundary": t["coboundary"],
            "nonzero_class": t["nonzero_class"],
            "witness": witness,
        })
        # a basis element failing its own class test means the build is
        # inconsistent; the control is expected to fail
        if name != "control" and not t["nonzero_class"]:
            failures += 1
    return (1 if failures else 0), rows


def cmd_dk_basis(args):
    _require(args.points >= 1, "points must be >= 1")
    _require(args.weight >= 1, "weight must be >= 1")
    basis = dk_basis(FinSet.range(args.points), args.weight)
    rows = [{
        "points": args.points,
        "weight": args.weight,
        "dim": basis.dim,
        "basis": basis.rep_strings(),
    }]
    return 0, rows


def cmd_freelie_dims(args):
    _require(args.letters >= 1, "letters must be >= 1")
    _require(args.max_degree >= 1, "max degree must be >= 1")

    def cell(d):
        def run():
            count = len(lyndon_words(args.letters, d))
            witt = witt_dimension(args.letters, d)
            return [{
                "letters": args.letters,
                "degree": d,
                "lyndon_count": count,
                "witt_dim": witt,
                "match": count == witt,
            }]
        return run

    degrees = list(range(1, args.max_degree + 1))
    rows = _flatten(_cells(args.jobs, [(d, cell(d)) for d in degrees]))
    bad = sum(1 for r in rows if not r["match"])
    return (1 if bad else 0), rows


def cmd_homology(args):
    _require(args.points >= 1, "points must be >= 1")
    _require(args.max_weight >= 0, "max weight must be >= 0")
    _require(args.degree_floor <= -1, "degree floor must be <= -1")
    T = FinSet.range(args.points)

    def cell(w):
        def run():
            if args.complex == "ce":
                C = ce_complex(T, w)
            else:
                C = bar_complex(T, w, args.degree_floor)
            ranks = homology_ranks(C)
            return [{
                "complex": args.complex,
                "points": args.points,
                "weight": w,
                "degree": deg,
                "rank": ranks[(deg, ww)],
            } for (deg, ww) in sorted(ranks)]
        return run

    weights = list(range(0, args.max_weight + 1))
    rows = _flatten(_cells(args.jobs, [(w, cell(w)) for w in weights]))
    return 0, rows


def cmd_defcomplex(args):
    _require(args.arity_cap >= 2, "arity cap must be >= 2")
    _require(args.max_weight >= 0, "max weight must be >= 0")

    def cell(key):
        n, w = key

        def run():
            out = []
            for m in range(0, w + 1):
                degree = n - 2 - m
                if degree < args.degree_floor:
                    continue
                dim = len(deformation_space(n, w, -m))
                out.append({
                    "arity": n,
                    "weight": w,
                    "wedge": m,
                    "degree": degree,
                    "dim": dim,
                })
            return out
        return run

    keys = [(n, w) for n in range(2, args.arity_cap + 1)
            for w in range(0, args.max_weight + 1)]
    rows = _flatten(_cells(args.jobs, [(k, cell(k)) for k in keys]))
    return 0, rows


# ---------------------------------------------------------------------------
# Verification suites.


def _random_injection(rng, S, T):
    image = rng.sample(sorted(T.labels), len(S))
    return SetMap.total(S, T, dict(zip(sorted(S.labels), image)))


def _random_total_map(rng, S, T):
    return SetMap.total(S, T, {s: rng.choice(sorted(T.labels)) for s in S})


def _random_partial_map(rng, S, T):
    pairs = {}
    for s in sorted(S.labels):
        if rng.random() < 0.75:
            pairs[s] = rng.choice(sorted(T.labels))
    return SetMap(S, T, pairs)


def _suite_relations(args, rng):
    rows = []
    cap = args.arity_cap
    wmax = args.max_weight
    for trial in range(args.samples):
        ns = rng.randint(2, max(2, cap - 1))
        nt = rng.randint(ns, cap)
        nr = rng.randint(nt, cap + 1)
        S, T, R = FinSet.range(ns), FinSet.range(nt), FinSet.range(nr)
        fi = _random_injection(rng, S, T)
        gi = _random_injection(rng, T, R)
        ft = _random_total_map(rng, T, S)
        gt = _random_total_map(rng, R, T)
        w1 = rng.randint(1, wmax)
        w2 = rng.randint(1, max(1, wmax - w1))
        us = dk_basis(S, w1).basis_elements()
        ok = True
        # functoriality of both images on composable pairs
        for u in us:
            if direct_image(gi.compose(fi), u) != \
                    direct_image(gi, direct_image(fi, u)):
                ok = False
            if inverse_image(ft.compose(gt), u) != \
                    inverse_image(gt, inverse_image(ft, u)):
                ok = False
        # all three maps preserve brackets
        for u in us[:3]:
            for u2 in dk_basis(S, w2).basis_elements()[:3]:
                lhs = direct_image(fi, u.bracket(u2))
                rhs = direct_image(fi, u).bracket(direct_image(fi, u2))
                if lhs != rhs:
                    ok = False
        for v in dk_basis(S, w1).basis_elements()[:3]:
            for v2 in dk_basis(S, w2).basis_elements()[:3]:
                lhs = inverse_image(ft, v.bracket(v2))
                rhs = inverse_image(ft, v).bracket(inverse_image(ft, v2))
                if lhs != rhs:
                    ok = False
        p = _random_partial_map(rng, T, S)
        for v in dk_basis(S, w1).basis_elements()[:3]:
            for v2 in dk_basis(S, w2).basis_elements()[:3]:
                lhs = partial_pullback(p, v.bracket(v2))
                rhs = partial_pullback(p, v).bracket(partial_pullback(p, v2))
                if lhs != rhs:
                    ok = False
        rows.append({"suite": "relations", "name": "trial-%d" % trial,
                     "passed": ok, "detail": None})
    return rows


def _suite_operad(args, rows_cap):
    rows = []
    instances = [comm, assoc, comm_shift(1), comm_shift(-1),
                 DKOperad(2), free_operad(max(3, rows_cap))]
    for O in instances:
        rep = axiom_check(O, rows_cap)
        detail = None
        if not rep["passed"]:
            detail = "%s: %s" % (rep["violation"]["axiom"],
                                 rep["violation"]["detail"])
        rows.append({"suite": "operad", "name": rep["instance"],
                     "passed": rep["passed"], "detail": detail})
    return rows


def _suite_jacobi(args, rng):
    F = free_operad(args.arity_cap + 2)
    rows = []

    def rand_tree(n):
        X = FinSet.range(n)
        basis = F.basis_elements(X)
        return rng.choice(basis)

    for trial in range(args.samples):
        a = rand_tree(rng.randint(2, min(4, args.arity_cap)))
        b = rand_tree(rng.randint(2, min(4, args.arity_cap)))
        c = rand_tree(rng.randint(2, min(4, args.arity_cap)))
        da, db, dc = a.degree(), b.degree(), c.degree()
        j = gerstenhaber_bracket(gerstenhaber_bracket(a, b), c) \
            .scale(rat(-1) ** (da * dc)) \
            + gerstenhaber_bracket(gerstenhaber_bracket(b, c), a) \
            .scale(rat(-1) ** (db * da)) \
            + gerstenhaber_bracket(gerstenhaber_bracket(c, a), b) \
            .scale(rat(-1) ** (dc * db))
        rows.append({"suite": "jacobi", "name": "trial-%d" % trial,
                     "passed": not j, "detail": str(j) if j else None})
    return rows


def _suite_dsquared(args):
    rows = []
    cap = args.arity_cap
    F = free_operad(cap + 1)
    ok = True
    for n in range(2, cap + 1):
        t = F.element(FinSet.range(n), {corolla(n): 1})
        if hoass_differential(hoass_differential(t, cap + 1), cap + 1):
            ok = False
    rows.append({"suite": "dsquared", "name": "hoass", "passed": ok,
                 "detail": None})
    ok = True
    for n in range(2, cap + 1):
        t = F.element(FinSet.range(n), {corolla(n): 1})
        d1 = hocomm_reduce(hoass_differential(t, cap + 1))
        if hocomm_reduce(hoass_differential(d1, cap + 1)):
            ok = False
    rows.append({"suite": "dsquared", "name": "hocomm", "passed": ok,
                 "detail": None})
    ok = True
    detail = None
    for n in range(2, min(cap, 4) + 1):
        for w in range(0, min(args.max_weight, 3) + 1):
            for m in range(0, w + 1):
                for v in deformation_space(n, w, -m):
                    dv = deformation_differential(v, n + 2)
                    if dv and deformation_differential(dv, n + 3):
                        ok = False
                        detail = "sector (%d, %d, %d)" % (n, w, -m)
    rows.append({"suite": "dsquared", "name": "deformation", "passed": ok,
                 "detail": detail})
    ok = True
    for w in range(0, min(args.max_weight, 4) + 1):
        C = ce_complex(FinSet.range(min(cap, 3)), w)
        if C.check_dsquared() is not None:
            ok = False
    rows.append({"suite": "dsquared", "name": "ce-complex", "passed": ok,
                 "detail": None})
    return rows


def _suite_commutation(args):
    rows = []
    checked = 0
    failed = None
    for nt in range(2, args.arity_cap + 1):
        T = FinSet.range(nt)
        for ns in range(1, nt + 1):
            S = FinSet.range(ns)
            for image in permutations(T.labels, ns):
                f = SetMap.total(S, T, dict(zip(S.labels, image)))
                for nr in range(1, 4):
                    R = FinSet.range(nr)
                    for gvals in _all_total_maps(T, R):
                        g = SetMap.total(T, R, gvals)
                        if len({g(f(s)) for s in S}) > 1:
                            continue
                        checked += 1
                        good, witness = check_commutation(
                            f, g, weight_cap=args.max_weight)
                        if not good and failed is None:
                            failed = "f=%s g=%s witness=%s" % (f, g, witness)
    rows.append({"suite": "commutation",
                 "name": "pairs-size<=%d" % args.arity_cap,
                 "passed": failed is None,
                 "detail": failed or "checked %d pairs" % checked})
    return rows


def _all_total_maps(S, T):
    labels = sorted(S.labels)
    targets = sorted(T.labels)
    for combo in _cartesian(len(labels), targets):
        yield dict(zip(labels, combo))


def _cartesian(k, values):
    if k == 0:
        yield ()
        return
    for rest in _cartesian(k - 1, values):
        for v in values:
            yield rest + (v,)


def _suite_shuffles(args):
    rows = []
    for w in range(1, args.max_weight + 1):
        basis = grt_basis(w)
        ok = True
        for phi in basis:
            # every signed shuffle sum kills a solution element
            for vec in shuffle_sums(3):
                total = None
                for word, c in vec.terms.items():
                    img = relabel_g(word, phi).scale(rat(c) * perm_sign(word))
                    total = img if total is None else total + img
                if total:
                    ok = False
        rows.append({"suite": "shuffles", "name": "weight-%d" % w,
                     "passed": ok,
                     "detail": "basis size %d" % len(basis)})
    return rows


def cmd_check(args):
    _require(args.arity_cap >= 2, "arity cap must be >= 2")
    _require(args.max_weight >= 0, "max weight must be >= 0")
    _require(args.samples >= 1, "samples must be >= 1")
    rng = random.Random(args.seed)
    if args.suite == "relations":
        rows = _suite_relations(args, rng)
    elif args.suite == "operad":
        rows = _suite_operad(args, args.arity_cap)
    elif args.suite == "jacobi":
        rows = _suite_jacobi(args, rng)
    elif args.suite == "dsquared":
        rows = _suite_dsquared(args)
    elif args.suite == "commutation":
        rows = _suite_commutation(args)
    else:
        rows = _suite_shuffles(args)
    failures = sum(1 for r in rows if not r["passed"])
    return (1 if failures else 0), rows


# ---------------------------------------------------------------------------
# Output.

_COLUMNS = {
    "grt-dims": ["weight", "dim_g3", "dim_shuffle_kernel", "dim_grt"],
    "grt-class-test": ["weight", "element", "value", "cocycle",
                       "coboundary", "nonzero_class", "witness"],
    "dk-basis": ["points", "weight", "dim", "basis"],
    "freelie-dims": ["letters", "degree", "lyndon_count", "witt_dim",
                     "match"],
    "homology": ["complex", "points", "weight", "degree", "rank"],
    "defcomplex": ["arity", "weight", "wedge", "degree", "dim"],
    "check": ["suite", "name", "passed", "detail"],
}


def _config_dict(args):
    # jobs is an execution knob, not a computation parameter; echoing it
    # would break byte-identity across parallelism settings
    skip = {"func", "command", "format", "jobs"}
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in skip or callable(v):
            continue
        out[k] = v
    return out


def _emit(args, rows, stream):
    command = args.command
    if args.format == "json":
        doc = {
            "command": command,
            "version": VERSION,
            "schema_version": SCHEMA_VERSION,
            "config": _config_dict(args),
            "rows": rows,
        }
        stream.write(json.dumps(doc, sort_keys=True, indent=2))
        stream.write("\n")
    elif args.format == "csv":
        cols = _COLUMNS[command]
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(cols)
        for r in rows:
            out = []
            for c in cols:
                v = r.get(c)
                if isinstance(v, list):
                    v = ";".join(str(x) for x in v)
                elif v is None:
                    v = ""
                elif isinstance(v, bool):
                    v = "true" if v else "false"
                out.append(v)
            writer.writerow(out)
    else:
        cols = _COLUMNS[command]
        for r in rows:
            stream.write("  ".join("%s=%s" % (c, r.get(c)) for c in cols))
            stream.write("\n")


def build_parser():
    p = argparse.ArgumentParser(
        prog="dklie",
        description="Exact computations in braid Lie algebras, their "
                    "complexes, and the associated condition systems.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=["json", "csv", "text"],
                        default="text")
        sp.add_argument("--jobs", type=int, default=1,
                        help="parallel worker threads over independent "
                             "cells; output is identical for any value")

    sp = sub.add_parser("grt-dims", help="kernel dimensions per weight")
    common(sp)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--max-weight", type=int, default=3)
    g.add_argument("--weight", type=int)
    sp.add_argument("--class-test", action="store_true",
                    help="include basis strings and the class test")
    sp.set_defaults(func=cmd_grt_dims)

    sp = sub.add_parser("grt-class-test",
                        help="cocycle and coboundary verdicts")
    common(sp)
    sp.add_argument("--weight", type=int, required=True)
    sp.add_argument("--window", type=int, default=4)
    sp.add_argument("--control", action="store_true",
                    help="test the weight-1 shuffle-only element instead "
                         "of the kernel basis")
    sp.set_defaults(func=cmd_grt_class_test)

    sp = sub.add_parser("dk-basis", help="basis of one weight component")
    common(sp)
    sp.add_argument("--points", type=int, required=True)
    sp.add_argument("--weight", type=int, required=True)
    sp.set_defaults(func=cmd_dk_basis)

    sp = sub.add_parser("freelie-dims",
                        help="Lyndon counts against the dimension formula")
    common(sp)
    sp.add_argument("--letters", type=int, required=True)
    sp.add_argument("--max-degree", type=int, required=True)
    sp.set_defaults(func=cmd_freelie_dims)

    sp = sub.add_parser("homology", help="homology ranks of a complex")
    common(sp)
    sp.add_argument("--complex", choices=["ce", "bar"], required=True)
    sp.add_argument("--points", type=int, required=True)
    sp.add_argument("--max-weight", type=int, default=2)
    sp.add_argument("--degree-floor", type=int, default=-6,
                    help="lowest degree kept when truncating")
    sp.set_defaults(func=cmd_homology)

    sp = sub.add_parser("defcomplex",
                        help="dimensions of the invariant value spaces")
    common(sp)
    sp.add_argument("--arity-cap", type=int, default=3)
    sp.add_argument("--max-weight", type=int, default=2)
    sp.add_argument("--degree-floor", type=int, default=-4)
    sp.set_defaults(func=cmd_defcomplex)

    sp = sub.add_parser("check", help="verification suites")
    common(sp)
    sp.add_argument("--suite", required=True,
                    choices=["relations", "operad", "jacobi", "dsquared",
                             "commutation", "shuffles"])
    sp.add_argument("--arity-cap", type=int, default=4)
    sp.add_argument("--max-weight", type=int, default=3)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--samples", type=int, default=8)
    sp.set_defaults(func=cmd_check)

    return p


def run(argv, stream=None):
    """Parse argv, run the command, emit the report; returns the exit
    code.  Usage errors exit(2) via argparse."""
    stream = stream or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, rows = args.func(args)
    except (PreconditionError, ValueError) as exc:
        print("dklie: %s" % exc, file=sys.stderr)
        return 2
    _emit(args, rows, stream)
    return code


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
