"""Command-line front end.

Every subcommand writes one deterministic JSON document (``--format json``)
or a CSV table (``--format csv``) to ``--out`` or stdout.  Exit status is 0 on
success, 1 when a certificate or classification fails, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .birkhoff import Observable, birkhoff_bounds, irregular_witness, level_entropy
from .densities import density_profile, index_set_from_json
from .entropy import katok_entropy_estimate, sft_entropy, word_count_entropy
from .errors import BoundaryValue, OmegaError, PreconditionError
from .limitsets import classify_case, omega_limit, vf_limits
from .measures import MarkovMeasure, measure_from_json
from .schedule import BlockSchedule, schedule_prefix
from .shadowing import ShiftPseudoOrbit, doubling_coding, shadow_doubling, shadow_shift
from .synthesis import (MODES, SynthesisConfig, build_saturated_schedule, certify,
                        realize_case, verify_certificate)
from .words import SftDescr, sft_from_json

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class CertificateFailure(Exception):
    def __init__(self, message: str, document: dict):
        super().__init__(message)
        self.document = document


# ---------------------------------------------------------------- serialization

def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _flat_rows(doc) -> list[tuple]:
    """(name, n, value) rows for every series-like entry of a result document."""
    rows = []

    def walk(prefix, node):
        if isinstance(node, dict):
            for k in sorted(node):
                if k in ("series", "rates") and isinstance(node[k], list):
                    for n, v in node[k]:
                        rows.append((f"{prefix}{k}", n, v))
                else:
                    walk(f"{prefix}{k}.", node[k])
        elif isinstance(node, list):
            for i, item in enumerate(node):
                if isinstance(item, (dict, list)):
                    walk(f"{prefix}{i}.", item)
    walk("", doc)
    return rows


def to_csv(doc) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    rows = _flat_rows(doc)
    if rows:
        w.writerow(("series", "n", "value"))
        w.writerows(rows)
    else:
        w.writerow(("key", "value"))
        for k in sorted(doc):
            if not isinstance(doc[k], (dict, list)):
                w.writerow((k, doc[k]))
    return buf.getvalue()


def emit_report(results: dict, out: str | Path) -> tuple[Path, Path]:
    """Write ``<out>.json`` (all results) and ``<out>.csv`` (series and entropy slopes)."""
    base = Path(out)
    if base.suffix in (".json", ".csv"):
        base = base.with_suffix("")
    doc = {"format": 1, "kind": "report", "results": {k: results[k] for k in sorted(results)}}
    jpath, cpath = base.with_suffix(".json"), base.with_suffix(".csv")
    jpath.write_text(dumps(doc), encoding="utf-8")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("result", "series", "n", "value"))
    for name in sorted(results):
        for series, n, v in _flat_rows(results[name]):
            w.writerow((name, series, n, v))
    cpath.write_text(buf.getvalue(), encoding="utf-8")
    return jpath, cpath


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise UsageError(f"no such file: {path}") from e
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: invalid JSON ({e})") from e


def _schedule_from(doc: dict) -> BlockSchedule:
    if doc.get("kind") == "certificate" or "schedule" in doc:
        doc = doc["schedule"]
    return BlockSchedule.from_json(doc)


def _measure(args) -> object:
    if args.measure:
        return measure_from_json(_read_json(args.measure))
    p = Fraction(args.bernoulli)
    return MarkovMeasure.bernoulli([1 - p, p], args.m)


def _sft(args) -> SftDescr:
    if args.sft:
        return sft_from_json(_read_json(args.sft))
    if args.golden_mean:
        return SftDescr.golden_mean()
    return SftDescr.full(args.full)


def _observable(args) -> Observable:
    if args.phi:
        return Observable.from_json(_read_json(args.phi))
    return Observable.indicator(args.indicator, args.m)


# ---------------------------------------------------------------- subcommands

def cmd_realize(args) -> dict:
    s, cert = realize_case(args.case, m=args.m, mode=args.mode, seed=args.seed,
                           eta=args.eta, zeta=args.zeta)
    doc = cert.to_json()
    if args.out:
        base = Path(args.out)
        cpath = base.with_name(base.stem + ".cert.json")
        cpath.write_text(dumps(doc), encoding="utf-8")
        doc = {**s.to_json(), "certificate": cpath.name}
    if not cert.ok:
        raise CertificateFailure(f"certificate checks failed: {cert.checks}", doc)
    return doc


def cmd_classify(args) -> dict:
    s = _schedule_from(_read_json(args.input))
    label, rep = classify_case(s)
    print(str(label), file=sys.stderr)
    return {"format": 1, "kind": "classification", "label": str(label), "report": rep.to_json()}


def cmd_synth(args) -> dict:
    d = _read_json(args.config)
    d.setdefault("seed", args.seed)
    cfg = SynthesisConfig.from_json(d)
    s = build_saturated_schedule(cfg)
    doc = {"format": 1, "kind": "synthesis", "schedule": s.to_json()}
    if args.horizon:
        doc["prefix"] = schedule_prefix(s, args.horizon)
    if args.certify:
        cert = certify(args.certify, args.mode, cfg, s, terms=args.rho_terms)
        doc["certificate"] = cert.to_json()
        if not cert.ok:
            raise CertificateFailure(f"certificate checks failed: {cert.checks}", doc)
    return doc


def cmd_omega(args) -> dict:
    s = _schedule_from(_read_json(args.input))
    om = omega_limit(s)
    doc = {"format": 1, "kind": "omega", "omega_f": om.to_json(), "describe": om.describe()}
    try:
        doc["vf"] = vf_limits(s, args.depth).to_json()
    except OmegaError as e:
        doc["vf"] = {"unavailable": str(e)}
    return doc


def cmd_density(args) -> dict:
    S = index_set_from_json(_read_json(args.pattern))
    return {"kind": "density", **density_profile(S).to_json()}


def cmd_entropy(args) -> dict:
    sft = _sft(args)
    doc = {"kind": "entropy", "spectral": sft_entropy(sft).to_json()}
    if args.horizon:
        doc["word_count"] = word_count_entropy(sft, args.horizon).to_json()
    return {"format": 1, **doc}


def cmd_katok(args) -> dict:
    mu = _measure(args)
    est = katok_entropy_estimate(mu, Fraction(args.gamma), args.horizon or 24,
                                 monte_carlo=args.monte_carlo, seed=args.seed)
    return {"kind": "katok", "measure_entropy": mu.entropy, **est.to_json()}


def cmd_level(args) -> dict:
    phi = _observable(args)
    try:
        res = level_entropy(phi, Fraction(args.a), seed=args.seed)
    except BoundaryValue as e:
        if e.result is None:
            raise
        res = e.result
    return {"kind": "level", **res.to_json()}


def cmd_irregular(args) -> dict:
    w = irregular_witness(_observable(args), args.eta, m=max(args.m, 3), seed=args.seed)
    doc = w.to_json()
    if args.horizon:
        doc["report"] = birkhoff_bounds(w.schedule, _observable(args), args.horizon).to_json()
    return doc


def cmd_shadow(args) -> dict:
    data = _read_json(args.input)
    if not isinstance(data, list) or not data:
        raise UsageError("a pseudo-orbit is a nonempty JSON array")
    if isinstance(data[0], dict):
        res = shadow_shift(ShiftPseudoOrbit(tuple(data[1:]), int(data[0]["k"])))
        return {"kind": "shadow-shift", **res.to_json()}
    res = shadow_doubling([Fraction(str(x)) for x in data], Fraction(args.eps))
    return {"kind": "shadow-doubling", **res.to_json()}


def cmd_code(args) -> dict:
    return {"format": 1, "kind": "coding", "x": args.x,
            "code": doubling_coding(Fraction(args.x), args.n)}


def cmd_verify(args) -> dict:
    d = _read_json(args.input)
    if d.get("kind") != "certificate":
        raise UsageError("verify expects a certificate file")
    cert = verify_certificate(d)
    doc = {"format": 1, "kind": "verification", "label": str(cert.label), "ok": cert.ok,
           "checks": cert.checks, "matches_file": cert.checks == d.get("checks")}
    if not (cert.ok and doc["matches_file"]):
        raise CertificateFailure("certificate does not re-validate", doc)
    return doc


def cmd_report(args) -> dict:
    results = {}
    for p in args.inputs:
        results[Path(p).stem] = _read_json(p)
    if args.out:
        jpath, cpath = emit_report(results, args.out)
        return {"format": 1, "kind": "report-index", "json": jpath.name, "csv": cpath.name}
    return {"format": 1, "kind": "report", "results": results}


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    def globals_(suppress: bool) -> argparse.ArgumentParser:
        # subcommands repeat the global flags without defaults so they never clobber them
        g = argparse.ArgumentParser(add_help=False)
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        g.add_argument("--seed", type=int, default=d(0))
        g.add_argument("--depth", type=int, default=d(3), help="cylinder depth")
        g.add_argument("--rho-terms", type=int, default=d(16), help="terms J of the weak* metric")
        g.add_argument("--horizon", type=int, default=d(None))
        g.add_argument("--out", default=d(None))
        g.add_argument("--format", choices=("json", "csv"), default=d("json"))
        return g

    common = globals_(True)
    p = argparse.ArgumentParser(prog="omegasets", parents=[globals_(False)],
                                description="Statistical omega-limit sets of symbolic orbits.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("realize", cmd_realize, "build and certify a point of a given case")
    sp.add_argument("--case", required=True)
    sp.add_argument("--mode", choices=MODES, default="nonrecurrent")
    sp.add_argument("--m", type=int, default=3)
    sp.add_argument("--eta", type=float, default=0.05)
    sp.add_argument("--zeta", type=float, default=0.05)

    sp = add("classify", cmd_classify, "classify the point of a schedule")
    sp.add_argument("--in", dest="input", required=True)

    sp = add("synth", cmd_synth, "build a saturated schedule from a config")
    sp.add_argument("--config", required=True)
    sp.add_argument("--certify", default=None, help="expected case label")
    sp.add_argument("--mode", choices=MODES, default="nonrecurrent")

    sp = add("omega", cmd_omega, "omega-limit set and V_f of a schedule")
    sp.add_argument("--in", dest="input", required=True)

    sp = add("density", cmd_density, "density profile of an index set")
    sp.add_argument("--pattern", required=True)

    sp = add("entropy", cmd_entropy, "topological entropy of an SFT")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--sft")
    g.add_argument("--golden-mean", action="store_true")
    g.add_argument("--full", type=int)

    for name, fn, help_ in (("katok", cmd_katok, "Katok entropy estimate of a measure"),):
        sp = add(name, fn, help_)
        g = sp.add_mutually_exclusive_group(required=True)
        g.add_argument("--measure")
        g.add_argument("--bernoulli", help="probability of symbol 1")
        sp.add_argument("--m", type=int, default=2)
        sp.add_argument("--gamma", default="1/2")
        sp.add_argument("--monte-carlo", action="store_true")

    for name, fn, help_ in (("level", cmd_level, "entropy of a Birkhoff level set"),
                            ("irregular", cmd_irregular, "irregular nonrecurrent witness")):
        sp = add(name, fn, help_)
        g = sp.add_mutually_exclusive_group(required=True)
        g.add_argument("--phi")
        g.add_argument("--indicator")
        sp.add_argument("--m", type=int, default=2)
        if name == "level":
            sp.add_argument("--a", required=True)
        else:
            sp.add_argument("--eta", type=float, default=0.1)

    sp = add("shadow", cmd_shadow, "shadow a pseudo-orbit")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--eps", default="1/32")

    sp = add("code", cmd_code, "binary itinerary under doubling")
    sp.add_argument("--x", required=True)
    sp.add_argument("--n", type=int, default=32)

    sp = add("verify", cmd_verify, "recompute a certificate")
    sp.add_argument("--in", dest="input", required=True)

    sp = add("report", cmd_report, "merge result files into JSON + CSV")
    sp.add_argument("inputs", nargs="*")
    return p


def _write(doc: dict, args) -> None:
    text = to_csv(doc) if args.format == "csv" else dumps(doc)
    if args.out and args.command != "report":
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def run_command(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        doc = args.fn(args)
    except CertificateFailure as e:
        _write(e.document, args)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, PreconditionError, ValueError, KeyError, TypeError) as e:
        print(f"usage error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OmegaError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL
    doc.setdefault("format", 1)
    _write(doc, args)
    return EXIT_OK


def main() -> None:
    sys.exit(run_command())
