"""Command-line frontend: every run is fixed by an ExperimentConfig and emits one JSON report.

Exit codes: 0 ok, 1 usage, 2 precondition failure, 3 theory violation.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

from murley import groupforge as gf
from murley import ringlab as rl
from murley import serialize as ser
from murley.padx import IntPolynomial, PfReport, certified_roots, pf_verdict, primes_upto
from murley.tcond import (
    AlphaFamily,
    check_condition_T,
    explains_exception,
    forge_family,
    hensel_family,
)
from murley.typesys import TypeDescriptor, split_p0_pinf

OK, USAGE, PRECONDITION, VIOLATION = 0, 1, 2, 3

COMMANDS = (
    "forge", "audit", "build", "height", "delta", "prank", "member", "hom", "pf",
    "fieldring", "filial", "witness", "falsify", "prochazka", "verify",
)
RINGS = ("zsqrt2", "gaussian", "z15", "zero", "field")


@dataclass
class ExperimentConfig:
    command: str
    pmax: int = 100
    prec: int = 6
    seed: int = 42
    seed2: int | None = None
    n: int = 2
    B: int = 5
    rank: int = 2
    poly: str | None = None
    type: str | dict | None = None  # path to a descriptor file, or the descriptor itself
    family: str | None = None
    scheme: str | None = None
    scheme2: str | None = None
    ring: str = "field"
    p: int | None = None
    vec: str | None = None
    samples: int = 100
    bound: int = 10
    trials: int = 100
    J: int = 4
    out: str | None = None
    verify: str | None = None

    def identity(self) -> dict:
        """The fields that determine the result (paths to outputs excluded)."""
        d = asdict(self)
        for k in ("out", "verify"):
            d.pop(k)
        if self.type:
            d["type"] = _type_json(self.type)
        return d


def _type_json(t: str | dict) -> dict:
    return t if isinstance(t, dict) else json.loads(Path(t).read_text())


class UsageError(ValueError):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(json.dumps({"error": "usage", "message": message}), file=sys.stderr)
        raise SystemExit(USAGE)


def build_parser() -> argparse.ArgumentParser:
    ap = Parser(prog="murley", description=__doc__)
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--pmax", type=int, default=100, help="prime window bound")
    ap.add_argument("--prec", type=int, default=6, help="p-adic precision K")
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--seed2", type=int, default=None, help="second seed (hom)")
    ap.add_argument("--n", type=int, default=2, help="degree bound")
    ap.add_argument("--B", type=int, default=5, help="coefficient bound")
    ap.add_argument("--rank", type=int, default=2)
    ap.add_argument("--poly", help="coefficients, lowest degree first, e.g. 1,0,1")
    ap.add_argument("--type", help="path to a type descriptor JSON")
    ap.add_argument("--family", help="hensel:COEFFS, forged:SEED or a family file")
    ap.add_argument("--scheme", help="saved scheme file")
    ap.add_argument("--scheme2", help="second saved scheme (hom)")
    ap.add_argument("--ring", default="field", choices=RINGS)
    ap.add_argument("--p", type=int, help="prime")
    ap.add_argument("--vec", help="vector, comma separated rationals")
    ap.add_argument("--samples", type=int, default=100)
    ap.add_argument("--bound", type=int, default=10)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--J", type=int, default=4)
    ap.add_argument("--out", help="write the report here instead of stdout")
    ap.add_argument("--verify", help="report to re-verify")
    return ap


# -- inputs --------------------------------------------------------------------


def load_type(cfg: ExperimentConfig) -> TypeDescriptor:
    if not cfg.type:
        return TypeDescriptor.zero()
    return TypeDescriptor.from_json(_type_json(cfg.type))


def parse_vec(text: str | None) -> tuple[Fraction, ...]:
    if not text:
        raise UsageError("--vec is required")
    return tuple(Fraction(x.strip()) for x in text.split(","))


def parse_poly(text: str | None) -> IntPolynomial:
    if not text:
        raise UsageError("--poly is required")
    return IntPolynomial.parse(text)


def p0_window(cfg: ExperimentConfig, t: TypeDescriptor) -> list[int]:
    p0, _ = split_p0_pinf(t, max(cfg.pmax, *t.window) if t.window else cfg.pmax)
    return p0


def make_family(cfg: ExperimentConfig, t: TypeDescriptor, degree: int) -> AlphaFamily:
    spec = cfg.family or f"forged:{cfg.seed}"
    if spec.startswith("hensel:"):
        f = IntPolynomial.parse(spec.split(":", 1)[1])
        primes = [p for p in p0_window(cfg, t) if certified_roots(f, p, cfg.prec)]
        return hensel_family(f, primes, cfg.prec)
    if spec.startswith("forged:"):
        return forge_family(degree, cfg.B, p0_window(cfg, t), cfg.prec, int(spec.split(":", 1)[1]))
    fam = load_artifact(spec, "family")
    if not isinstance(fam, AlphaFamily):
        raise UsageError(f"{spec} is not a family file")
    return fam


def load_artifact(path: str, key: str):
    """Load a saved artifact, or the one embedded under `key` in a saved report."""
    env = ser.read_envelope(path)
    if env["kind"] == "report" and key in env["payload"]:
        inner = env["payload"][key]
        if key == "family":
            return AlphaFamily.from_json(inner)
        return ser.group_from_json(inner, Path(path).parent)
    return ser.from_envelope(env, Path(path).parent)


def make_scheme(cfg: ExperimentConfig, path: str | None = None, seed: int | None = None) -> gf.GroupScheme:
    path = path or cfg.scheme
    if path:
        s = load_artifact(path, "scheme")
        if not isinstance(s, gf.LocalGroup):
            raise UsageError(f"{path} is not a scheme file")
        return s
    t = load_type(cfg)
    if seed is not None:
        fam = forge_family(max(cfg.rank - 1, 1), cfg.B, p0_window(cfg, t), cfg.prec, seed)
    else:
        fam = make_family(cfg, t, max(cfg.rank - 1, 1)) if cfg.rank > 1 else None
    return gf.build_murley_scheme(t, cfg.rank, fam, cfg.prec, B=cfg.B)


def make_ring(cfg: ExperimentConfig) -> rl.RingStructure:
    if cfg.ring == "zsqrt2":
        return rl.zsqrt2_ring()
    if cfg.ring == "gaussian":
        return rl.gaussian_ring()
    if cfg.ring == "z15":
        return rl.z_one_fifth_ring(cfg.prec)
    if cfg.ring == "zero":
        return rl.zero_ring(cfg.rank)
    f = parse_poly(cfg.poly)
    t = load_type(cfg)
    pre = rl.fieldring_precondition(f, t, cfg.pmax, cfg.prec)
    if not pre.accepted:
        raise rl.PreconditionFailed(
            f"precondition fails: idempotent={pre.idempotent}, uncovered P_0 primes {list(pre.uncovered)}", pre
        )
    p0 = p0_window(cfg, t)
    fam = hensel_family(f, [p for p in p0 if certified_roots(f, p, cfg.prec)], cfg.prec) if f.degree > 1 else None
    s = gf.build_murley_scheme(t, f.degree, fam, cfg.prec, window=primes_upto(cfg.pmax), B=cfg.B)
    return rl.field_ring_from_poly(f, s)


def progress(line: str) -> None:
    print(line, file=sys.stderr, flush=True)


def _fmt(h):
    return str(h) if isinstance(h, gf.AtLeast) else h


def _need_p(cfg: ExperimentConfig) -> int:
    if cfg.p is None:
        raise UsageError("--p is required")
    return cfg.p


# -- commands --------------------------------------------------------------------


def run_command(cfg: ExperimentConfig) -> tuple[int, dict]:
    """Run one command; returns (exit status, report payload)."""
    c = cfg.command
    if c == "forge":
        window = primes_upto(cfg.pmax)
        fam = forge_family(cfg.n, cfg.B, window, cfg.prec, cfg.seed)
        return OK, {"family": fam.to_json()}
    if c == "audit":
        fam = make_family(cfg, load_type(cfg), cfg.n)
        rep = check_condition_T(fam, cfg.n, cfg.B)
        return (OK if rep.passed else PRECONDITION), {"audit": rep.to_json(), "family": fam.to_json()}
    if c == "build":
        s = make_scheme(cfg)
        return OK, {"scheme": ser.group_to_json(s), "p0": s.p0 if isinstance(s, gf.GroupScheme) else []}
    if c == "height":
        s, p, v = make_scheme(cfg), _need_p(cfg), parse_vec(cfg.vec)
        return OK, {"p": p, "vec": [str(x) for x in v], "height": _fmt(gf.element_height(s, v, p))}
    if c == "delta":
        s, p = make_scheme(cfg), _need_p(cfg)
        return OK, {"p": p, "delta": gf.delta_subspace(s, p).to_json()}
    if c == "prank":
        s, p = make_scheme(cfg), _need_p(cfg)
        r = gf.p_rank(s, p) if isinstance(s, gf.GroupScheme) else s.lattice_p_rank(p)
        return OK, {"p": p, "p_rank": r, "lattice_p_rank": s.lattice_p_rank(p)}
    if c == "member":
        s, p, v = make_scheme(cfg), _need_p(cfg), parse_vec(cfg.vec)
        return OK, {"p": p, "vec": [str(x) for x in v], "member": s.local_membership(v, p)}
    if c == "hom":
        if cfg.scheme and cfg.scheme2:
            a, b = make_scheme(cfg, cfg.scheme), make_scheme(cfg, cfg.scheme2)
        else:
            a = make_scheme(cfg, seed=cfg.seed)
            b = make_scheme(cfg, seed=cfg.seed2 if cfg.seed2 is not None else cfg.seed)
        mats = gf.hom_search(a, b, cfg.bound)
        return OK, {"bound": cfg.bound, "count": len(mats), "matrices": [list(map(list, m)) for m in mats],
                    "scalar_only": all(gf.is_scalar(m) for m in mats)}
    if c == "pf":
        f, verdicts = parse_poly(cfg.poly), {}
        for p in primes_upto(cfg.pmax):
            verdicts[p] = pf_verdict(f, p, cfg.prec)
            progress(f"pf p={p} {verdicts[p]}")
        return OK, {"pf": PfReport(f, cfg.prec, verdicts).to_json()}
    if c == "fieldring":
        r = make_ring(cfg)
        return OK, {"ring": ser.to_payload(r)[1]}
    if c == "filial":
        r = make_ring(cfg)
        v = rl.filial_probe(r, parse_vec(cfg.vec))
        return OK, {"filial": v.to_json()}
    if c == "witness":
        r, p = make_ring(cfg), _need_p(cfg)
        cert = rl.nonfilial_witness(r, p)
        out = {"ring": r.name, "p": p, "witness": cert.to_json() if cert else None}
        if cert is not None:
            out["verified"] = rl.verify_witness(r, cert)
        return OK, out
    if c == "falsify":
        rep = rl.nilpotent_filial_falsifier(cfg.seed, cfg.trials)
        return (OK if rep.passed else VIOLATION), {"falsifier": rep.to_json()}
    if c == "prochazka":
        G = gf.build_prochazka_example(cfg.J, cfg.prec)
        ranks = {str(p): G.p_rank(p) for p in G.window}
        heights = {
            f"e{i + 1}": {str(p): _fmt(G.height(e, p)) for p in G.window}
            for i, e in enumerate(((1, 0), (0, 1)))
        }
        return OK, {"group": G.to_json(), "p_rank": ranks, "heights": heights}
    if c == "verify":
        return verify_report(cfg)
    raise UsageError(f"unknown command {c!r}")


def verify_report(cfg: ExperimentConfig) -> tuple[int, dict]:
    """Re-run the recorded config and re-check every certificate in the report."""
    if not cfg.verify:
        raise UsageError("--verify is required")
    env = ser.read_envelope(cfg.verify)
    if env["kind"] != "report":
        raise UsageError("verify expects a report file")
    recorded = dict(env["config"])
    again = ExperimentConfig(**recorded)
    if ser.config_hash(again.identity()) != env["config_hash"]:
        return PRECONDITION, {"verified": False, "reason": "config hash mismatch"}
    status, payload = run_command(again)
    checks = {"payload_identical": payload == env["payload"]}
    if "family" in payload:
        fam = AlphaFamily.from_json(payload["family"])
        checks["exceptions_explained"] = all(explains_exception(fam, p) for p in fam.exceptions)
    if again.command == "witness" and payload.get("witness"):
        checks["witness"] = payload.get("verified", False)
    ok = all(checks.values())
    return (OK if ok else VIOLATION), {"verified": ok, "checks": checks, "command": again.command}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    cfg = ExperimentConfig(**vars(args))
    try:
        status, payload = run_command(cfg)
    except UsageError as e:
        print(json.dumps({"error": "usage", "message": str(e)}), file=sys.stderr)
        return USAGE
    except rl.PreconditionFailed as e:
        report = e.report.to_json() if e.report is not None else None
        print(json.dumps({"error": "precondition", "type": "PreconditionFailed", "message": str(e), "report": report}),
              file=sys.stderr)
        return PRECONDITION
    except (gf.SchemeRejected, rl.FieldRingError, rl.NotDivisionAlgebra,
            gf.UnsupportedDenominator, ser.MigrationError, ser.LoadError) as e:
        print(json.dumps({"error": "precondition", "type": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return PRECONDITION
    except rl.TheoryViolation as e:
        print(json.dumps({"error": "theory-violation", "message": str(e)}), file=sys.stderr)
        return VIOLATION
    except ValueError as e:
        print(json.dumps({"error": "precondition", "type": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return PRECONDITION
    text = ser.dumps(payload, config=cfg.identity())
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
