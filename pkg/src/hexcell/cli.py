"""Command-line interface.

Exit codes: 0 check passed, 1 check failed, 2 usage or invalid input.
Every JSON report embeds a manifest (command, input digests, seed, tool
version, timing); apart from ``manifest.timing`` reports are byte-stable.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import __version__
from .cells import (CellSystem, build_c_system, build_d_family, correspondence_check, read_cells,
                    write_cells)
from .codes import (Code, ParamClass, dumps_code, extend_parity, extended_hamming, hamming,
                    loads_code, random_lambda, shorten, validate, vasilev)
from .equitable import (GOLDEN_KINDS, QuotientMatrix, check_equitable, check_pattern_table,
                        check_triple_count, golden_matrix, infer_quotient)
from .errors import (ConditionViolation, ExpansionError, StructuralError, UsageError,
                     ValidationError)
from .hypercube import Word, default_threads
from .regularity import (CenteredFunction, build_centered_embedding, check_completely_regular,
                         check_distance_invariant, check_semiregular, compare_with_prediction,
                         expected_oa_strength, oa_strength, verify_1_centered)
from .spectra import distance_distribution, expand_distance_distribution, weight_distribution

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class Run:
    """Collects manifest data for one invocation."""

    def __init__(self, argv: list[str], threads: int):
        self.command = _strip_threads(argv)
        self.threads = threads
        self.inputs: dict[str, str] = {}
        self.seed: int | None = None
        self.started = time.perf_counter()

    def read_text(self, path: str) -> str:
        if path == "-":
            data = sys.stdin.read()
            self.inputs["<stdin>"] = hashlib.sha256(data.encode()).hexdigest()
            return data
        data = Path(path).read_bytes()
        self.inputs[path] = hashlib.sha256(data).hexdigest()
        return data.decode()

    def manifest(self) -> dict:
        out = {"tool": "hexcell", "version": __version__, "command": self.command,
               "inputs": dict(sorted(self.inputs.items())),
               "timing": {"seconds": round(time.perf_counter() - self.started, 6),
                          "threads": self.threads}}
        if self.seed is not None:
            out["seed"] = self.seed
        return out


def _strip_threads(argv: list[str]) -> list[str]:
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
            continue
        if a == "--threads":
            skip = True
            continue
        if a.startswith("--threads="):
            continue
        out.append(a)
    return out


def _emit(run: Run, args, report: dict, ok: bool) -> int:
    report = dict(report)
    report["ok"] = ok
    report["manifest"] = run.manifest()
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if getattr(args, "report", None):
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_PASS if ok else EXIT_FAIL


def _write_code(args, code: Code) -> int:
    text = dumps_code(code)
    if args.output and args.output != "-":
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_PASS


def _load_code(run: Run, path: str) -> Code:
    return loads_code(run.read_text(path))


def _load_cells(run: Run, path: str) -> CellSystem:
    run.read_text(path)
    return read_cells(path)


# --------------------------------------------------------------------------
# gen / transform


def cmd_gen_hamming(run: Run, args) -> int:
    if not 2 <= args.m <= 6:
        raise UsageError("--m must be between 2 and 6")
    code = extended_hamming(args.m) if args.extended else hamming(args.m)
    code.meta["construction"] = ("extended-" if args.extended else "") + f"hamming(m={args.m})"
    return _write_code(args, code)


def cmd_gen_vasilev(run: Run, args) -> int:
    if not 3 <= args.m <= 5:
        raise UsageError("--m must be between 3 and 5")
    base = hamming(args.m - 1)
    code = vasilev(base, random_lambda(base, args.seed))
    code.meta["construction"] = f"vasilev(base=hamming(m={args.m - 1}))"
    code.meta["seed"] = str(args.seed)
    return _write_code(args, code)


def cmd_shorten(run: Run, args) -> int:
    code = _load_code(run, args.input)
    return _write_code(args, shorten(code, args.coord, args.value))


def cmd_extend_parity(run: Run, args) -> int:
    return _write_code(args, extend_parity(_load_code(run, args.input)))


# --------------------------------------------------------------------------
# cells


def cmd_build_c(run: Run, args) -> int:
    code = _load_code(run, args.code)
    system = build_c_system(code, check_params=not args.no_validate)
    return _write_cells(run, args, system)


def cmd_build_d(run: Run, args) -> int:
    code = _load_code(run, args.code)
    system = build_d_family(code, check_params=not args.no_validate)
    return _write_cells(run, args, system)


def _write_cells(run: Run, args, system: CellSystem) -> int:
    if args.output:
        write_cells(system, args.output, bitmap=args.bitmap)
        return EXIT_PASS
    json.dump(system.to_dict(), sys.stdout, indent=1, sort_keys=True)
    sys.stdout.write("\n")
    return EXIT_PASS


# --------------------------------------------------------------------------
# checks


def _quotient(run: Run, args, system: CellSystem) -> QuotientMatrix:
    if args.golden:
        return golden_matrix(args.golden, system.n)
    if not args.quotient:
        raise UsageError("give --quotient FILE or --golden KIND")
    return QuotientMatrix.from_dict(json.loads(run.read_text(args.quotient)))


def cmd_check_equitable(run: Run, args) -> int:
    system = _load_cells(run, args.cells)
    S = _quotient(run, args, system)
    verdict = check_equitable(system, S, threads=run.threads)
    return _emit(run, args, {"check": "equitable", "quotient": S.to_dict(), **verdict.to_dict()},
                 verdict.ok)


def cmd_check_table8(run: Run, args) -> int:
    system = _load_cells(run, args.cells)
    verdict = check_pattern_table(system, threads=run.threads)
    return _emit(run, args, {"check": "table8", **verdict.to_dict()}, verdict.ok)


def cmd_check_lemma3(run: Run, args) -> int:
    system = _load_cells(run, args.cells)
    verdict = check_triple_count(system, threads=run.threads)
    return _emit(run, args, {"check": "lemma3", **verdict.to_dict()}, verdict.ok)


def cmd_check_correspondence(run: Run, args) -> int:
    code = _load_code(run, args.code)
    c_system = build_c_system(extend_parity(code), check_params=False)
    verdict = correspondence_check(code, c_system)
    return _emit(run, args, {"check": "correspondence", **verdict.to_dict()}, verdict.ok)


def cmd_check_params(run: Run, args) -> int:
    code = _load_code(run, args.code)
    p = ParamClass.for_length(args.param_class, code.n)
    verdict = validate(code, p)
    return _emit(run, args, {"check": "params", "class": str(p), **verdict.to_dict()}, verdict.ok)


def cmd_infer_quotient(run: Run, args) -> int:
    system = _load_cells(run, args.cells)
    result = infer_quotient(system)
    return _emit(run, args, {"check": "infer-quotient", **result.to_dict()}, result.ok)


def cmd_spectra_dd(run: Run, args) -> int:
    system = _load_cells(run, args.cells)
    dd = distance_distribution(system)
    return _emit(run, args, {"check": "distance-distribution", **dd.to_dict()}, True)


def cmd_spectra_expand(run: Run, args) -> int:
    code = _load_code(run, args.code)
    system = build_c_system(code, check_params=not args.no_validate)
    dd = distance_distribution(system)
    try:
        expanded = expand_distance_distribution(dd.inner(0), code.n, dd.sizes)
    except ExpansionError as exc:
        return _emit(run, args, {"check": "expand", "identity": exc.identity, "detail": str(exc)}, False)
    ok = expanded.table == dd.table
    return _emit(run, args, {"check": "expand", "matches_direct": ok, **expanded.to_dict()}, ok)


def cmd_spectra_wd(run: Run, args) -> int:
    center = Word.parse(args.center)
    text = run.read_text(args.source)
    if text.lstrip().startswith("{"):
        system = CellSystem.from_dict(json.loads(text), base_dir=Path(args.source).parent)
        label = args.cell or system.labels[0]
        if label not in system.labels:
            raise UsageError(f"no cell {label!r}; cells are {', '.join(system.labels)}")
        cell = system.cell(system.labels.index(label))
    else:
        cell = loads_code(text)
        label = "code"
    if center.n != (cell.n if isinstance(cell, Code) else system.n):
        raise UsageError("centre length differs from the dimension")
    wd = weight_distribution(cell, center)
    return _emit(run, args, {"check": "weight-distribution", "cell": label,
                             "center": str(center), "counts": list(wd.counts)}, True)


def cmd_check_oa(run: Run, args) -> int:
    code = _load_code(run, args.code)
    expect = args.expect
    if expect is None and args.param_class:
        expect = ParamClass.for_length(args.param_class, code.n).oa_strength
    report = oa_strength(code, expect if expect is not None else expected_oa_strength(code))
    return _emit(run, args, {"check": "oa", **report.to_dict()}, report.ok)


def cmd_check_semiregular(run: Run, args) -> int:
    code = _load_code(run, args.code)
    report = check_semiregular(code, code_id=args.code)
    out = {"check": "semiregular", **report.to_dict()}
    ok = report.ok
    if args.predict:
        if code.n % 2:
            system = build_c_system(code, check_params=True)
            S = golden_matrix("c-system", code.n)
        else:
            system = build_d_family(code, check_params=True)
            S = golden_matrix("d-family", code.n)
        pred = compare_with_prediction(code, system, S)
        out["prediction"] = pred.to_dict()
        ok = ok and pred.ok
    return _emit(run, args, out, ok)


def cmd_check_regular(run: Run, args) -> int:
    code = _load_code(run, args.code)
    verdict = check_completely_regular(code)
    return _emit(run, args, {"check": "regular", **verdict.to_dict()}, verdict.ok)


def cmd_check_invariant(run: Run, args) -> int:
    code = _load_code(run, args.code)
    verdict = check_distance_invariant(code)
    return _emit(run, args, {"check": "invariant", **verdict.to_dict()}, verdict.ok)


def cmd_embed_centered(run: Run, args) -> int:
    code = _load_code(run, args.code)
    f = build_centered_embedding(build_d_family(code, check_params=not args.no_validate))
    text = json.dumps(f.to_dict(), indent=1, sort_keys=True) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_PASS


def cmd_verify_centered(run: Run, args) -> int:
    f = CenteredFunction.from_dict(json.loads(run.read_text(args.function)))
    verdict = verify_1_centered(f)
    return _emit(run, args, {"check": "centered", **verdict.to_dict()}, verdict.ok)


def cmd_quotient_golden(run: Run, args) -> int:
    S = golden_matrix(args.kind, args.n)
    text = json.dumps(S.to_dict(), sort_keys=True) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_PASS


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hexcell", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads for vertex sweeps (default: $HEXCELL_THREADS or 1)")
    p.add_argument("--version", action="version", version=f"hexcell {__version__}")
    groups = p.add_subparsers(dest="group", required=True)

    def sub(parent, name, func, help_text):
        sp = parent.add_parser(name, help=help_text)
        sp.set_defaults(func=func)
        return sp

    def with_report(sp):
        sp.add_argument("--report", help="write the JSON report here instead of stdout")
        return sp

    gen = groups.add_parser("gen", help="generate codes").add_subparsers(dest="what", required=True)
    sp = sub(gen, "hamming", cmd_gen_hamming, "Hamming code of length 2^m-1")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--extended", action="store_true", help="append the parity bit")
    sp.add_argument("-o", "--output")
    sp = sub(gen, "vasilev", cmd_gen_vasilev, "nonlinear 1-perfect code of length 2^m-1")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("-o", "--output")

    tr = groups.add_parser("transform", help="transform codes").add_subparsers(dest="what", required=True)
    sp = sub(tr, "shorten", cmd_shorten, "fix one coordinate and delete it")
    sp.add_argument("input", nargs="?", default="-")
    sp.add_argument("--coord", type=int, default=None, help="1-based coordinate (default: last)")
    sp.add_argument("--value", type=int, default=0, choices=(0, 1))
    sp.add_argument("-o", "--output")
    sp = sub(tr, "extend-parity", cmd_extend_parity, "append an overall parity bit")
    sp.add_argument("input", nargs="?", default="-")
    sp.add_argument("-o", "--output")

    cells = groups.add_parser("cells", help="build cell systems").add_subparsers(dest="what", required=True)
    for name, func, text in (("build-c", cmd_build_c, "six-cell partition of a distance-4 code"),
                             ("build-d", cmd_build_d, "six-cell family of a distance-3 code")):
        sp = sub(cells, name, func, text)
        sp.add_argument("code")
        sp.add_argument("-o", "--output")
        sp.add_argument("--bitmap", help="write cells as a packed bitmap sidecar")
        sp.add_argument("--no-validate", action="store_true", help="skip the parameter check")

    check = groups.add_parser("check", help="run checks").add_subparsers(dest="what", required=True)
    sp = with_report(sub(check, "equitable", cmd_check_equitable, "equitability against a quotient matrix"))
    sp.add_argument("cells")
    sp.add_argument("--quotient", help="quotient matrix JSON {r, entries}")
    sp.add_argument("--golden", choices=GOLDEN_KINDS, help="use a shipped matrix at the system's n")
    sp = with_report(sub(check, "table8", cmd_check_table8, "D-family per-pattern neighbour table"))
    sp.add_argument("cells")
    sp = with_report(sub(check, "lemma3", cmd_check_lemma3, "counting-triples equitability criterion"))
    sp.add_argument("cells")
    sp = with_report(sub(check, "correspondence", cmd_check_correspondence,
                         "D-patterns from the C-cells of x0 and x1"))
    sp.add_argument("code")
    sp = with_report(sub(check, "params", cmd_check_params, "length, size and minimum distance"))
    sp.add_argument("code")
    sp.add_argument("--class", dest="param_class", required=True, help="e.g. \"4'''\" or \"3''\"")
    sp = with_report(sub(check, "oa", cmd_check_oa, "orthogonal-array strength"))
    sp.add_argument("code")
    sp.add_argument("--expect", type=int, default=None)
    sp.add_argument("--class", dest="param_class", default=None,
                    help="take the expected strength from a parameter class")
    sp = with_report(sub(check, "semiregular", cmd_check_semiregular, "complete semiregularity"))
    sp.add_argument("code")
    sp.add_argument("--predict", action="store_true",
                    help="also compare with sphere sums from the golden quotient matrix")
    sp = with_report(sub(check, "regular", cmd_check_regular, "complete regularity"))
    sp.add_argument("code")
    sp = with_report(sub(check, "invariant", cmd_check_invariant, "distance invariance"))
    sp.add_argument("code")

    infer = groups.add_parser("infer", help="infer structure").add_subparsers(dest="what", required=True)
    sp = with_report(sub(infer, "quotient", cmd_infer_quotient, "quotient matrix of a partition"))
    sp.add_argument("cells")

    spectra = groups.add_parser("spectra", help="distributions").add_subparsers(dest="what", required=True)
    sp = with_report(sub(spectra, "dd", cmd_spectra_dd, "exact distance distribution"))
    sp.add_argument("cells")
    sp = with_report(sub(spectra, "wd", cmd_spectra_wd, "weight distribution w.r.t. a word"))
    sp.add_argument("source", help="code file or cells JSON")
    sp.add_argument("--center", required=True)
    sp.add_argument("--cell", help="cell label when the source is a cells file")
    sp = with_report(sub(spectra, "expand", cmd_spectra_expand,
                         "expand the inner distribution of a distance-4 code and compare"))
    sp.add_argument("code")
    sp.add_argument("--no-validate", action="store_true")

    embed = groups.add_parser("embed", help="embeddings").add_subparsers(dest="what", required=True)
    sp = sub(embed, "centered", cmd_embed_centered, "{0,1/3,1}-valued function on H^(n+3)")
    sp.add_argument("code")
    sp.add_argument("-o", "--output")
    sp.add_argument("--no-validate", action="store_true")

    verify = groups.add_parser("verify", help="verify functions").add_subparsers(dest="what", required=True)
    sp = with_report(sub(verify, "centered", cmd_verify_centered, "radius-1 ball sums equal 1"))
    sp.add_argument("function")

    quot = groups.add_parser("quotient", help="quotient matrices").add_subparsers(dest="what", required=True)
    sp = sub(quot, "golden", cmd_quotient_golden, "emit a shipped quotient matrix")
    sp.add_argument("kind", choices=GOLDEN_KINDS)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("-o", "--output")
    return p


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_PASS
    threads = args.threads if args.threads is not None else default_threads()
    if threads < 1:
        print("hexcell: --threads must be positive", file=sys.stderr)
        return EXIT_USAGE
    run = Run(argv, threads)
    if hasattr(args, "seed"):
        run.seed = args.seed
    try:
        return args.func(run, args)
    except (UsageError, ValidationError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"hexcell: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StructuralError, ExpansionError, ConditionViolation) as exc:
        report = {"error": type(exc).__name__, "detail": str(exc)}
        if getattr(exc, "witness", None):
            report["witness"] = exc.witness
        return _emit(run, args, report, False)


if __name__ == "__main__":
    sys.exit(main())
