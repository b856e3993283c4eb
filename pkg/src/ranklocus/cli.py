"""Command-line entry point: build, verify and export constant-rank matrices.

Exit status is 0 when every requested check passes, 1 when a build or a
verification fails its check, and 2 for usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import secrets
import sys
from dataclasses import asdict, dataclass, field as dc_field
from pathlib import Path

from . import chern, construct, verify
from .errors import RankLocusError
from .field import DEFAULT_PRIME, FieldSpec
from .io import load_document, load_matrix, matrix_to_json, to_cas
from .multilinear import maximal_rank_profile

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    field: str = str(DEFAULT_PRIME)
    seed: int | None = None
    out: str | None = None
    args: dict = dc_field(default_factory=dict)


class UsageError(Exception):
    pass


def _write(doc: dict, out: str | None, default_name: str) -> str:
    path = Path(out or default_name)
    path.write_text(json.dumps(doc, indent=1) + "\n")
    return str(path)


def _report_doc(report, cfg: RunConfig) -> dict:
    doc = report.to_json()
    doc["run_config"] = asdict(cfg)
    return doc


def _summarise(report, path):
    r, c = report.shape
    status = "ok" if report.ok else "MISMATCH"
    print(f"{r}x{c} matrix of linear forms, generic rank {report.measured_generic_rank} "
          f"(predicted {report.predicted_shape[0]}x{report.predicted_shape[1]}, rank "
          f"{report.predicted_rank}) [{status}] -> {path}")


def _build(args, cfg: RunConfig, fld: FieldSpec):
    seed = cfg.seed
    cmd = args.command
    if cmd == "koszul":
        return construct.build_koszul(args.n, args.i, fld)
    if cmd == "koszul-pair":
        return construct.build_koszul_pair(args.n, args.i, args.j, seed=seed, field_=fld)
    if cmd == "drezet":
        return construct.build_drezet_family(args.n, args.d, args.s, args.i, seed, fld)
    if cmd == "appendix-a":
        return construct.build_appendix_a(seed, fld)
    if cmd == "import":
        return construct.import_and_extract(args.file, copies=args.copies, seed=seed)
    if cmd == "pairing":
        if args.steiner:
            n, m, k = args.steiner
            return construct.build_steiner_pairing(n, m, k, seed, fld)
        if args.drezet_forms:
            n, d, r = args.drezet_forms
            return construct.build_drezet_pairing(n, d, r, seed, fld)
        if args.forms:
            return _pairing_from_file(args.forms, seed)
        raise UsageError("pairing needs --forms, --steiner or --drezet-forms")
    raise UsageError(f"unknown command {cmd}")


def _pairing_from_file(path, seed):
    """Forms file: {"n", "field", "columns": [[[[coeff, exps], ...] per form] per column]}."""
    from .linform import HomogPoly
    doc = load_document(path)
    fld = FieldSpec.from_json(doc["field"])
    n = int(doc["n"])
    cols = [[HomogPoly.from_terms(fld, n + 1, [(fld.element(c), e) for c, e in form]) for form in col]
            for col in doc["columns"]]
    report = construct.build_pairing_matrix(n, cols, seed, fld)
    report.config = {"builder": "pairing_file", "args": {"path": str(path)},
                     "field": fld.to_json(), "seed": seed}
    return report


def _cmd_verify(args, cfg: RunConfig) -> int:
    m, doc = load_matrix(args.file)
    if args.exhaustive is not None:
        p, mode, trials = args.exhaustive, "exhaustive", None
    else:
        trials, p = args.sample
        mode = "sampled"
    note = None
    if m.field.is_prime and m.field.p != p:
        recipe = doc.get("config")
        if not recipe or recipe.get("builder") not in construct.BUILDERS:
            raise UsageError(f"matrix is over GF({m.field.p}) and carries no recipe to rebuild over GF({p})")
        m = construct.rebuild(recipe, FieldSpec(p)).matrix
        note = f"rebuilt over GF({p}) from the recorded recipe"
    if mode == "exhaustive":
        cert = verify.verify_exhaustive(m, p, seed=cfg.seed or 0)
    else:
        cert = verify.verify_sampled(m, p, trials, seed=cfg.seed or 0)
    prof = verify.kernel_cokernel_profile(m, cert)
    out = {"format": 1, "kind": "rank_certificate", "certificate": cert.to_json(),
           "profile": prof.to_json(), "run_config": asdict(cfg)}
    if note:
        out["note"] = note
    path = _write(out, cfg.out, Path(args.file).stem + ".cert.json")
    print(f"{cert.mode} over GF({p}): {cert.points_checked} points, claimed rank "
          f"{cert.claimed_rank}, {cert.failure_count} failures, verdict {cert.verdict} -> {path}")
    print(cert.caveat)
    return EXIT_OK if cert.passed else EXIT_FAIL


def _cmd_scan(args, cfg: RunConfig, fld: FieldSpec) -> int:
    prof = maximal_rank_profile(args.n, args.q, trials=args.trials, seed=cfg.seed, field=fld)
    doc = {"format": 1, "kind": "contraction_profile", "profile": prof.to_json(),
           "run_config": asdict(cfg)}
    path = _write(doc, cfg.out, f"scan-{args.n}-{args.q}.json")
    for row in prof.rows:
        print(f"p={row.p}: {row.rows}x{row.cols} rank {row.rank} deficiency {row.deficiency}")
    print(f"maximal: {prof.maximal} -> {path}")
    return EXIT_OK


def _parse_terms(text: str):
    terms = []
    for part in text.split(","):
        t, m = part.split(":")
        terms.append((int(t), int(m)))
    return terms


def _cmd_chern(args, cfg: RunConfig) -> int:
    if args.what == "kernel":
        c = chern.chern_of_complex_kernel(_parse_terms(args.terms), args.position, args.n)
        doc = {"kind": "chern_kernel", "coefficients": list(c.coeffs), "text": str(c)}
        print(c.coeffs)
    else:
        dim = chern.moduli_dimension(args.dim_spl, args.b, args.h0)
        doc = {"kind": "moduli_dimension", "dimension": dim}
        print(dim)
    doc["run_config"] = asdict(cfg)
    if cfg.out:
        _write(doc, cfg.out, "chern.json")
    return EXIT_OK


def _cmd_export(args, cfg: RunConfig) -> int:
    m, _ = load_matrix(args.file)
    if args.format == "cas":
        text = to_cas(m)
    else:
        text = json.dumps(matrix_to_json(m)) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
        print(f"wrote {cfg.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", default=str(DEFAULT_PRIME),
                        help="odd prime below 2^31, or QQ (default %(default)s)")
    common.add_argument("--seed", type=int, default=None, help="seed; random and printed if omitted")
    common.add_argument("--out", "-o", default=None, help="output path")

    parser = argparse.ArgumentParser(prog="ranklocus", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("koszul", parents=[common], help="Koszul differential wedge^{i+1} -> wedge^i")
    p.add_argument("n", type=int)
    p.add_argument("i", type=int)

    p = sub.add_parser("koszul-pair", parents=[common], help="Koszul complex against its j-shift")
    p.add_argument("n", type=int)
    p.add_argument("i", type=int)
    p.add_argument("j", type=int)

    p = sub.add_parser("drezet", parents=[common], help="linear strand against s Koszul complexes")
    for name in ("n", "d", "s", "i"):
        p.add_argument(name, type=int)

    p = sub.add_parser("pairing", parents=[common], help="linear syzygies of a presentation")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--forms", help="JSON file with presentation columns")
    g.add_argument("--steiner", nargs=3, type=int, metavar=("N", "M", "K"))
    g.add_argument("--drezet-forms", nargs=3, type=int, metavar=("N", "D", "R"))

    sub.add_parser("appendix-a", parents=[common], help="five 3-forms on k^6 over P^3")

    p = sub.add_parser("import", parents=[common], help="extract from an exported resolution")
    p.add_argument("file")
    p.add_argument("--copies", type=int, default=None)

    p = sub.add_parser("verify", parents=[common], help="certify constant rank")
    p.add_argument("file")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--exhaustive", type=int, metavar="P")
    g.add_argument("--sample", nargs=2, type=int, metavar=("T", "P"))

    p = sub.add_parser("scan-contractions", parents=[common], help="rank profile of generic q-forms")
    p.add_argument("n", type=int)
    p.add_argument("q", type=int)
    p.add_argument("--trials", type=int, default=5)

    p = sub.add_parser("chern", parents=[common], help="Chern classes and moduli dimension")
    csub = p.add_subparsers(dest="what", required=True)
    k = csub.add_parser("kernel", parents=[common])
    k.add_argument("--terms", required=True, help="twist:multiplicity,... left to right")
    k.add_argument("--position", type=int, default=0)
    k.add_argument("--n", type=int, required=True)
    md = csub.add_parser("moduli", parents=[common])
    md.add_argument("dim_spl", type=int)
    md.add_argument("b", type=int)
    md.add_argument("h0", type=int)

    p = sub.add_parser("export", parents=[common], help="write a matrix as JSON or CAS text")
    p.add_argument("file")
    p.add_argument("--format", choices=("json", "cas"), default="json")
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    seed = args.seed
    if seed is None:
        seed = secrets.randbelow(2**32)
        if args.command not in ("export", "chern"):
            print(f"seed {seed}", file=sys.stderr)
    extra = {k: v for k, v in vars(args).items() if k not in ("field", "seed", "out", "command")}
    cfg = RunConfig(args.command, args.field, seed, args.out, extra)
    try:
        fld = FieldSpec.parse(args.field)
        if args.command == "verify":
            return _cmd_verify(args, cfg)
        if args.command == "scan-contractions":
            return _cmd_scan(args, cfg, fld)
        if args.command == "chern":
            return _cmd_chern(args, cfg)
        if args.command == "export":
            return _cmd_export(args, cfg)
        report = _build(args, cfg, fld)
        path = _write(_report_doc(report, cfg), cfg.out, f"{args.command}.json")
        _summarise(report, path)
        return EXIT_OK if report.ok else EXIT_FAIL
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RankLocusError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL if not isinstance(exc, ValueError) else EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
