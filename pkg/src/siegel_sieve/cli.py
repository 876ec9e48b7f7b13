"""Command-line interface: class groups, sieve reports and least-prime scans.

Single-object commands print JSON and scans print TSV (or JSON with --json).
Floats are rounded to 12 significant digits so outputs diff cleanly.
Exit codes: 0 success, 1 contract or strict-mode violation, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

from . import __version__
from .characters import DEFAULT_EULER_CUTOFF, DEFAULT_L1_CUTOFF, real_characters
from .errors import InvalidDiscriminant, NonResidueClass, SiegelSieveError
from .exceptional import (DEFAULT_DELTA, DEFAULT_ETA, DEFAULT_ETA_DELTA, DEFAULT_M_DELTA,
                          REFERENCE_LINES, ExceptionalSetup, density_model, build_sequence,
                          scan, sieve_primes, theorem1_report)
from .ideals import IdealOrdering
from .qfield import (ClassGroup, QuadForm, _assemble, check_discriminant, class_group, compose, group_axioms_hold,
                     table_axioms_hold)
from .sieve import SieveParams, buchstab_check

CACHE_VERSION = f"classgroup-v1/{__version__}"
CACHE_ENV = "SIEGEL_SIEVE_CACHE"
SIG_DIGITS = 12

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2


@dataclass
class Config:
    delta: float = DEFAULT_DELTA
    eta: float = DEFAULT_ETA
    eta_delta: float = DEFAULT_ETA_DELTA
    M_delta: float = DEFAULT_M_DELTA
    l1_cutoff: int = DEFAULT_L1_CUTOFF
    euler_cutoff: int = DEFAULT_EULER_CUTOFF
    enumeration_cutoff: Optional[int] = None
    cache_dir: str = field(default_factory=lambda: os.environ.get(
        CACHE_ENV, str(Path.home() / ".cache" / "siegel_sieve")))
    ramified_included: bool = True
    tie_break: str = "by_p_then_root"

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# Output formatting
# ---------------------------------------------------------------------------

def round_floats(obj):
    """Recursively round floats to 12 significant digits; non-finite floats become strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return str(obj)
        return float(f"{obj:.{SIG_DIGITS}g}")
    if isinstance(obj, dict):
        return {str(k): round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalars
        return round_floats(obj.item())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(round_floats(obj), indent=2, sort_keys=False)


def fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.{SIG_DIGITS}g}"
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(fmt(u) for u in v) + "]"
    return str(v)


# ---------------------------------------------------------------------------
# Class-group cache
# ---------------------------------------------------------------------------

def _cache_path(cache_dir: str, D: int) -> Path:
    return Path(cache_dir) / f"classgroup_{-D}.json"


def _entry(G: ClassGroup) -> dict:
    return {
        "version": CACHE_VERSION,
        "D": G.D,
        "reduced_forms": [f.as_list() for f in G.reduced_forms],
        "composition_table": [list(r) for r in G.composition_table],
        "structure": list(G.structure),
    }


def _validated(entry: dict, D: int) -> Optional[ClassGroup]:
    """A class group from a cache entry, or None if anything looks off."""
    try:
        if entry.get("version") != CACHE_VERSION or entry.get("D") != D:
            return None
        forms = [QuadForm(*map(int, f)) for f in entry["reduced_forms"]]
        table = [[int(v) for v in r] for r in entry["composition_table"]]
        h = len(forms)
        if h == 0 or len(table) != h or any(len(r) != h for r in table):
            return None
        if any(f.discriminant != D or not f.is_reduced() or not f.is_primitive() for f in forms):
            return None
        if any(forms[k] >= forms[k + 1] for k in range(h - 1)):  # class indices follow sorted forms
            return None
        if any(not 0 <= v < h for r in table for v in r):
            return None
        if not table_axioms_hold(table, random_triples=200):
            return None
        rng = random.Random(D)
        for _ in range(min(50, h * h)):
            i, j = rng.randrange(h), rng.randrange(h)
            if compose(forms[i], forms[j]) != forms[table[i][j]]:
                return None
        G = _assemble(D, forms, table)
        if list(G.structure) != list(entry["structure"]) or not group_axioms_hold(G, random_triples=200):
            return None
        return G
    except (KeyError, TypeError, ValueError):
        return None


def cached_class_group(D: int, cache_dir: Optional[str]) -> ClassGroup:
    """Class group through the on-disk cache; corrupt or stale entries are recomputed."""
    check_discriminant(D)
    if not cache_dir:
        return class_group(D)
    path = _cache_path(cache_dir, D)
    if path.exists():
        try:
            G = _validated(json.loads(path.read_text()), D)
        except (OSError, json.JSONDecodeError):
            G = None
        if G is not None:
            return G
    G = class_group(D)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(_entry(G), fh)
        os.replace(tmp, path)
    except OSError:
        pass  # an unwritable cache only costs recomputation
    return G


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def classgroup_record(G: ClassGroup) -> dict:
    return {
        "D": G.D,
        "h": G.h,
        "structure": list(G.structure),
        "generators": list(G.generators),
        "w": G.w,
        "reduced_forms": [f.as_list() for f in G.reduced_forms],
    }


def cmd_classgroup(args, cfg: Config) -> int:
    G = cached_class_group(args.disc, cfg.cache_dir)
    out = classgroup_record(G)
    out["config"] = cfg.to_dict()
    print(dumps(out))
    return EXIT_OK


def _setup_from(args, cfg: Config, G: ClassGroup) -> ExceptionalSetup:
    chars = real_characters(G)
    if not 0 <= args.char < len(chars):
        raise ValueError(f"character index {args.char} out of range (0..{len(chars) - 1})")
    if not 0 <= args.cls < G.h:
        raise ValueError(f"class index {args.cls} out of range (0..{G.h - 1})")
    return ExceptionalSetup(
        D=G.D, psi=chars[args.char], C=args.cls, x=args.x, y=args.y, z=args.z,
        delta=cfg.delta, eta=cfg.eta, eta_delta=cfg.eta_delta, M_delta=cfg.M_delta,
        enumeration_cutoff=cfg.enumeration_cutoff, ramified_included=cfg.ramified_included,
        ordering=IdealOrdering(cfg.tie_break), l1_cutoff=cfg.l1_cutoff, euler_cutoff=cfg.euler_cutoff)


def cmd_sieve(args, cfg: Config) -> int:
    G = cached_class_group(args.disc, cfg.cache_dir)
    setup = _setup_from(args, cfg, G)
    if args.theorem1 and not setup.residue_ok:
        raise NonResidueClass(f"psi(C) = -1 for character {args.char} and class {args.cls}")
    z = args.z
    A = build_sequence(setup)
    P = sieve_primes(setup, z)
    params = SieveParams(z=z, level=args.level, ordering=setup.ordering)
    rep = buchstab_check(A, P, params, density_model(setup, z))
    out = {
        "config": cfg.to_dict(),
        "setup": {"D": setup.D, "char_index": args.char, "char_kind": setup.psi.kind,
                  "char_values": list(setup.psi.values), "class_index": setup.C,
                  "class_form": G.reduced_forms[setup.C].as_list(), "x": setup.x, "y": setup.y,
                  "z": z, "level": args.level, "sequence_size": len(A),
                  "enumeration_cutoff": setup.cutoff()},
        "fl_report": rep.to_dict(),
    }
    violated = not (rep.sandwich_ok and rep.buchstab_ok and rep.mobius_ok)
    if args.theorem1:
        t1 = theorem1_report(setup.with_(z=None), with_oracle=args.oracle)
        out["theorem1"] = t1.to_dict()
        violated = violated or not t1.hypothesis.all_hold
    print(dumps(out))
    return EXIT_VIOLATION if (args.strict and violated) else EXIT_OK


SCAN_COLUMNS = ("D", "h", "structure", "char_index", "char_kind", "class", "form",
                "least_prime_all", "least_prime_split", "least_ideal_norm",
                "ratio_all", "ratio_split", "verified")


def _row_values(r) -> List:
    return [r.D, r.h, list(r.structure), r.char_index, r.char_kind, r.class_index, list(r.form),
            r.least_prime_all, r.least_prime_split, r.least_ideal_norm,
            r.ratio_all, r.ratio_split, r.verified]


def cmd_scan(args, cfg: Config) -> int:
    if args.dmin > args.dmax:
        raise ValueError("need dmin <= dmax")
    table = scan(args.dmin, args.dmax, verify=not args.no_verify, workers=args.workers)
    total_failure = bool(table.discriminants) and len(table.failures) == len(table.discriminants)
    if args.json:
        out = {
            "config": cfg.to_dict(),
            "columns": list(SCAN_COLUMNS),
            "rows": [dict(zip(SCAN_COLUMNS, _row_values(r))) for r in table.rows],
            "failures": [{"D": f.D, "error": f.error} for f in table.failures],
            "max_ratio": table.max_ratio,
            "reference": dict(REFERENCE_LINES),
        }
        print(dumps(out))
    else:
        lines = ["\t".join(SCAN_COLUMNS)]
        for r in table.rows:
            lines.append("\t".join(fmt(v) for v in _row_values(r)))
        for f in table.failures:
            lines.append(f"# failure\t{f.D}\t{f.error}")
        if table.rows:
            for kind, v in table.max_ratio.items():
                lines.append(f"# max_ratio_{kind}\t{fmt(v)}")
        if table.discriminants:
            for name, v in REFERENCE_LINES:
                lines.append(f"# reference_{name}\t{v}")
            lines.append("# config\t" + json.dumps(round_floats(cfg.to_dict()), sort_keys=True))
        print("\n".join(lines))
    return EXIT_VIOLATION if total_failure else EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("configuration")
    g.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    g.add_argument("--eta", type=float, default=DEFAULT_ETA)
    g.add_argument("--eta-delta", type=float, default=DEFAULT_ETA_DELTA)
    g.add_argument("--m-delta", type=float, default=DEFAULT_M_DELTA)
    g.add_argument("--l1-cutoff", type=int, default=DEFAULT_L1_CUTOFF)
    g.add_argument("--euler-cutoff", type=int, default=DEFAULT_EULER_CUTOFF)
    g.add_argument("--enumeration-cutoff", type=int, default=None)
    g.add_argument("--cache-dir", default=None, help=f"overrides ${CACHE_ENV}")
    g.add_argument("--no-cache", action="store_true")
    g.add_argument("--exclude-ramified", action="store_true")
    g.add_argument("--tie-break", choices=("by_p_then_root", "by_root_then_p"), default="by_p_then_root")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="siegel-sieve", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("classgroup", help="class group of a negative discriminant")
    c.add_argument("--disc", type=int, required=True)
    _config_flags(c)

    s = sub.add_parser("sieve", help="beta-sieve report on the rho-weighted sequence of a class")
    s.add_argument("--disc", type=int, default=-20)
    s.add_argument("--char", type=int, default=0, help="index into the real characters (0 = principal)")
    s.add_argument("--class", dest="cls", type=int, default=0, help="index into the reduced forms")
    s.add_argument("--x", type=float, default=1e4)
    s.add_argument("--y", type=float, default=1.0)
    s.add_argument("--z", type=float, default=30.0)
    s.add_argument("--level", type=float, default=1e3)
    s.add_argument("--theorem1", action="store_true", help="add the lower-bound report for prime ideals in the class")
    s.add_argument("--oracle", action="store_true", help="cross-check the prime count with lattice points")
    s.add_argument("--strict", action="store_true", help="exit 1 when any identity or hypothesis fails")
    _config_flags(s)

    sc = sub.add_parser("scan", help="least primes represented by each class")
    sc.add_argument("--dmin", type=int, required=True)
    sc.add_argument("--dmax", type=int, required=True)
    sc.add_argument("--json", action="store_true")
    sc.add_argument("--workers", type=int, default=1)
    sc.add_argument("--no-verify", action="store_true", help="skip the lattice-point confirmation")
    _config_flags(sc)
    return p


def _config_from(args) -> Config:
    cfg = Config(delta=args.delta, eta=args.eta, eta_delta=args.eta_delta, M_delta=args.m_delta,
                 l1_cutoff=args.l1_cutoff, euler_cutoff=args.euler_cutoff,
                 enumeration_cutoff=args.enumeration_cutoff,
                 ramified_included=not args.exclude_ramified, tie_break=args.tie_break)
    if args.cache_dir is not None:
        cfg.cache_dir = args.cache_dir
    if args.no_cache:
        cfg.cache_dir = ""
    return cfg


COMMANDS = {"classgroup": cmd_classgroup, "sieve": cmd_sieve, "scan": cmd_scan}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = _config_from(args)
    try:
        return COMMANDS[args.command](args, cfg)
    except NonResidueClass as exc:
        print(f"error: NonResidueClass: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except (InvalidDiscriminant, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SiegelSieveError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
