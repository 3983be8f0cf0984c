"""``qpool`` command line.

Exit codes: 0 success, 1 hypothesis/validation failure (including a
falsified bound or refuted "fully" claim), 2 I/O or file-format failure,
3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import combinatorics as comb
from .design import DEFAULT_BUDGET_BITS, DesignParams, IncidenceSource, build, export, import_matrix
from .disjunct import DEFAULT_WORKLOAD, Status, check_fully, falsify_sampled, measure_exhaustive
from .errors import QpoolError
from .rng import parse_seed
from .simulate import simulate

DESIGNS = {
    "q-cont": "q-containment",
    "q-int": "q-intersection",
    "set-cont": "set-containment",
    "set-int": "set-intersection",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _seed(text):
    try:
        return parse_seed(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a 64-bit hex seed") from None


def _emit(args, data, lines=None):
    if args.json:
        print(json.dumps(data, indent=2))
    else:
        for line in lines if lines is not None else _table(data):
            print(line)


def _table(data: dict):
    width = max((len(k) for k in data), default=0)
    return [f"{k:<{width}}  {v}" for k, v in data.items()]


def _design_params(family, a) -> DesignParams:
    fam = DESIGNS[family]
    need = ["d", "k", "n"] + (["q"] if fam.startswith("q-") else []) + (
        ["i"] if fam.endswith("-intersection") else [])
    missing = [f"--{x}" for x in need if getattr(a, x) is None]
    if missing:
        raise UsageError(f"{family} requires {' '.join(missing)}")
    return DesignParams(fam, a.n, a.k, a.d,
                        q=a.q if fam.startswith("q-") else None,
                        i=a.i if fam.endswith("-intersection") else None)


def cmd_gauss(a):
    v = comb.gaussian(a.q, a.m2, a.m1)
    _emit(a, {"q": a.q, "m2": a.m2, "m1": a.m1, "value": v}, [str(v)])


def cmd_count(a):
    v = comb.count_fixed_intersection(a.q, a.j, a.r, a.n, a.m)
    _emit(a, {"q": a.q, "j": a.j, "r": a.r, "n": a.n, "m": a.m, "value": v}, [str(v)])


def cmd_bound(a):
    need = {"macula": ("d", "k", "n", "s"), "set-gw": ("i", "d", "k", "n", "s"),
            "ngo-du": ("q", "d", "k", "n", "s"), "guo-wang-q": ("q", "i", "d", "k", "n", "s")}
    missing = [f"--{x}" for x in need[a.which] if getattr(a, x) is None]
    if missing:
        raise UsageError(f"bound {a.which} requires {' '.join(missing)}")
    if a.which == "macula":
        br = comb.bound_macula(a.d, a.k, a.n, a.s)
    elif a.which == "set-gw":
        br = comb.bound_set_intersection(a.i, a.d, a.k, a.n, a.s)
    elif a.which == "ngo-du":
        br = comb.bound_ngo_du(a.q, a.d, a.k, a.n, a.s)
    else:
        br = comb.bound_guo_wang_q(a.q, a.i, a.d, a.k, a.n, a.s)
    d = br.to_dict()
    _emit(a, d, [str(br.bound)] + ["  " + line for line in _table(d)])


def cmd_table1(a):
    rows = comb.table1()
    if a.json:
        print(json.dumps(rows, indent=2))
        return
    for r in rows:
        print(f"(i,d)=({r['i']},{r['d']}) s_bar={r['s_bar']} rule={r['theorem']}")
        print(f"  e1 printed  {r['e1_printed']}")
        print(f"  e1 computed {r['e1_computed']}  match={r['e1_match']}")
        print(f"  e2 printed  {r['e2_printed']}")
        print(f"  e2 computed {r['e2_computed']}  match={r['e2_match']}")


def cmd_ratio(a):
    fr = comb.test_to_item_ratio(a.q, a.d, a.k, a.n)
    rows, cols = comb.gaussian(a.q, a.n, a.d), comb.gaussian(a.q, a.n, a.k)
    _emit(a, {"numerator": fr.numerator, "denominator": fr.denominator, "rows": rows, "cols": cols},
          [f"{fr.numerator}/{fr.denominator}", f"  rows {rows}", f"  cols {cols}"])


def _budget_bits(explicit=None):
    """--budget, else QPOOL_BUDGET_BITS, else the default."""
    if explicit is not None:
        return explicit
    env = os.environ.get("QPOOL_BUDGET_BITS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"QPOOL_BUDGET_BITS={env!r} is not an integer") from None
    return DEFAULT_BUDGET_BITS


def cmd_build(a):
    params = _design_params(a.family, a)
    m = build(params, _budget_bits(a.budget), a.workers)
    data = export(m, a.format)
    Path(a.out).write_bytes(data)
    _emit(a, {"family": params.family, **params.to_dict(), "row_count": m.row_count,
              "col_count": m.col_count, "out": a.out, "bytes": len(data)})


def _load(path):
    return import_matrix(Path(path).read_bytes())


def cmd_verify(a):
    if (a.matrix is None) == (a.design is None):
        raise UsageError("verify needs exactly one of --matrix or --design")
    if a.exhaustive == (a.samples is not None):
        raise UsageError("verify needs exactly one of --exhaustive or --samples N")
    if a.fully and (a.e is None or not a.exhaustive):
        raise UsageError("--fully requires --exhaustive and --e")
    if a.samples is not None and (a.threshold is None or a.seed is None):
        raise UsageError("--samples requires --threshold and --seed")
    budget = a.budget if a.budget is not None else DEFAULT_WORKLOAD
    if a.design is not None:
        params = _design_params(a.design, a)
        target = IncidenceSource(params) if a.samples is not None else build(
            params, _budget_bits(), a.workers)
    else:
        target = _load(a.matrix)
    failed = False
    if a.fully:
        res = check_fully(target, a.s, a.e, budget, a.workers)
        out = {"certified": res.certified, "reason": res.reason,
               "at_s": res.at_s.to_dict(),
               "at_s_plus_1": res.at_s_plus_1.to_dict() if res.at_s_plus_1 else None}
        failed = not res.certified
        lines = [f"{'certified' if res.certified else 'refuted'}: {res.reason}"]
    else:
        if a.exhaustive:
            rep = measure_exhaustive(target, a.s, budget, a.workers)
        else:
            rep = falsify_sampled(target, a.s, a.threshold, a.samples, a.seed, a.workers)
            failed = rep.status is Status.FALSIFIED
        out = rep.to_dict()
        lines = _table({k: v for k, v in out.items() if k != "witness"})
        lines += _table({f"witness.{k}": v for k, v in out["witness"].items()})
    _emit(a, out, lines)
    return 1 if failed else 0


def cmd_simulate(a):
    m = _load(a.matrix)
    rep = simulate(m, a.s, a.e, a.t, a.trials, a.seed, a.workers)
    out = rep.to_dict()
    lines = _table({k: v for k, v in out.items() if k != "failures"})
    for f in out["failures"]:
        lines.append(f"failure trial={f['trial']} positives={f['positives']} decoded={f['decoded']}")
    _emit(a, out, lines)


def _parser():
    p = _Parser(prog="qpool", description="Pooling designs over finite sets and vector spaces.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.set_defaults(func=func)
        return sp

    def ints(sp, *names, required=True):
        for nm in names:
            sp.add_argument(f"--{nm}", type=int, required=required)

    sp = add("gauss", cmd_gauss, "Gaussian coefficient [m2 choose m1]_q")
    ints(sp, "q", "m2", "m1")
    sp = add("count", cmd_count, "r-subspaces meeting a fixed m-subspace in a fixed j-subspace")
    ints(sp, "q", "j", "r", "n", "m")
    sp = add("bound", cmd_bound, "error-tolerance bound of a design")
    sp.add_argument("which", choices=["macula", "set-gw", "ngo-du", "guo-wang-q"])
    ints(sp, "q", "i", "d", "k", "n", "s", required=False)
    sp = add("build", cmd_build, "construct a design matrix and write it to a file")
    sp.add_argument("family", choices=sorted(DESIGNS))
    ints(sp, "q", "i", required=False)
    ints(sp, "d", "k", "n")
    sp.add_argument("--out", required=True)
    sp.add_argument("--budget", type=int, help="maximum matrix size in bits")
    sp.add_argument("--format", choices=["json-v1", "csv"], default="json-v1")
    sp.add_argument("--workers", type=int, default=1)
    sp = add("verify", cmd_verify, "measure disjunctness of a matrix")
    sp.add_argument("--matrix")
    sp.add_argument("--design", choices=sorted(DESIGNS), help="implicit design instead of a file")
    ints(sp, "q", "i", "d", "k", "n", required=False)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--exhaustive", action="store_true")
    sp.add_argument("--samples", type=int)
    sp.add_argument("--threshold", type=int)
    sp.add_argument("--seed", type=_seed)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--fully", action="store_true")
    sp.add_argument("--e", type=int)
    sp.add_argument("--budget", type=int, help="maximum exhaustive workload in tuples")
    sp = add("simulate", cmd_simulate, "group-testing decode simulation")
    sp.add_argument("--matrix", required=True)
    ints(sp, "s", "e", "t", "trials")
    sp.add_argument("--seed", type=_seed, required=True)
    sp.add_argument("--workers", type=int, default=1)
    add("table1", cmd_table1, "bounds for q=2, k=8, n=60, printed vs computed")
    sp = add("ratio", cmd_ratio, "test-to-item ratio [n choose d]_q / [n choose k]_q")
    ints(sp, "q", "d", "k", "n")
    return p


def run(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "workers", 1) < 1:
            raise UsageError("--workers must be >= 1")
        return args.func(args) or 0
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except QpoolError as exc:
        print(f"qpool: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"qpool: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
