"""Command-line front end: ``entropicns <subcommand> ...``.

Exit codes: 0 on success, 1 on a domain error (infeasible input, failing
certificate, bad file contents), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .entropy import CoordinateSpace, EntropyVector, format_form
from .exactgeom import DDConfig, FeasibleSystemError, GeometryError, HCone, VCone, dd_enumerate
from .exactgeom.rational import format_rational
from .scenarios import (
    MarginalScenario,
    ScenarioSpec,
    bilocal_local_system,
    bilocal_ns_cone,
    hybrid_system,
    local_system,
    ns_cone,
    parse_scenario,
)

log = logging.getLogger("entropicns")

FAMILIES = ("ns", "local", "hybrid:A|BC", "hybrid:B|AC", "hybrid:C|AB", "bilocal", "bilocal-local")


class DomainError(Exception):
    pass


class Reporter:
    """Diagnostics on stderr, as text or as one JSON object per line."""

    def __init__(self, as_json: bool, interval: float = 2.0):
        self.as_json = as_json
        self.interval = interval
        self._last = 0.0

    def emit(self, kind: str, **fields):
        if self.as_json:
            print(json.dumps({"event": kind, **fields}, sort_keys=True), file=sys.stderr)
        else:
            extra = " ".join(f"{k}={v}" for k, v in fields.items())
            print(f"[{kind}] {extra}".rstrip(), file=sys.stderr)

    def progress(self, **fields):
        now = time.monotonic()
        if now - self._last >= self.interval:
            self._last = now
            self.emit("progress", **fields)


# ---------------------------------------------------------------------------
# artifacts
# ---------------------------------------------------------------------------


def build_system(sc: MarginalScenario, family: str) -> HCone:
    if family == "ns":
        return ns_cone(sc)
    if family == "local":
        return local_system(sc)
    if family.startswith("hybrid:"):
        return hybrid_system(family.split(":", 1)[1], sc)
    if family == "bilocal":
        return bilocal_ns_cone(sc)
    if family == "bilocal-local":
        return bilocal_local_system(sc)
    raise DomainError(f"unknown family {family!r}; known: {', '.join(FAMILIES)}")


def space_from_labels(sc: MarginalScenario, labels: Sequence[Sequence[str]]) -> CoordinateSpace:
    probe = CoordinateSpace.full(sc.observables)
    return CoordinateSpace(sc.observables, [probe.mask(list(lab)) if lab else 0 for lab in labels], sort=False)


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(data) -> str:
    return json.dumps(data, indent=2) + "\n"


def _load(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise DomainError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path} is not valid JSON: {exc}") from None


def read_cone_file(path: str) -> tuple[MarginalScenario, str, HCone]:
    data = _load(path)
    try:
        sc = ScenarioSpec.from_dict(data["scenario"]).build()
        cone = data["cone"]
        space = space_from_labels(sc, cone["space"])
        return sc, data.get("family", "ns"), HCone.from_dict(cone, space)
    except (KeyError, ValueError) as exc:
        raise DomainError(f"{path} is not a cone file: {exc}") from None


def read_rays_file(path: str) -> tuple[MarginalScenario, str, VCone]:
    data = _load(path)
    try:
        sc = ScenarioSpec.from_dict(data["scenario"]).build()
        rays = data["rays"]
        space = space_from_labels(sc, rays["space"])
        return sc, data.get("family", "ns"), VCone.from_dict(rays, space)
    except (KeyError, ValueError) as exc:
        raise DomainError(f"{path} is not a rays file: {exc}") from None


def read_ray_file(path: str) -> tuple[MarginalScenario, EntropyVector]:
    """``{"scenario": {...}, "values": {"A0": "1", "A0B0": "2", ...}}`` or an
    entropy-vector dict with ``space`` and ``values`` lists."""
    data = _load(path)
    try:
        sc = ScenarioSpec.from_dict(data["scenario"]).build()
        vals = data["values"]
        if isinstance(vals, dict):
            mapping = {sc.space.mask(k) if k not in ("", "{}") else 0: v for k, v in vals.items()}
            return sc, EntropyVector.exact(sc.space, mapping)
        space = space_from_labels(sc, data["space"])
        return sc, EntropyVector.from_dict({"values": vals}, space)
    except (KeyError, ValueError) as exc:
        raise DomainError(f"{path} is not a ray file: {exc}") from None


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_scenario(args, rep: Reporter) -> int:
    sc = parse_scenario(args.scenario).build()
    data = {
        "scenario": sc.spec.to_dict(),
        "observables": [o.name for o in sc.observables],
        "contexts": [sc.space.subset_label(c) for c in sc.contexts],
        "coordinates": sc.space.coordinate_labels(),
    }
    _write(_dump(data), args.out)
    return 0


def cmd_cone(args, rep: Reporter) -> int:
    spec = parse_scenario(args.scenario)
    if args.family == "ic" or spec.kind == "ic":
        spec = ScenarioSpec("ic")
        family = "ns"
    else:
        family = args.family
    sc = spec.build()
    cone = build_system(sc, family)
    rep.emit("cone", rows=len(cone.inequalities), equalities=len(cone.equalities), dim=cone.dim)
    _write(_dump({"scenario": spec.to_dict(), "family": family, "cone": cone.to_dict()}), args.out)
    return 0


def _group_for(sc: MarginalScenario, name: str, cone: HCone):
    from .classify.symmetry import SymmetryGroup, scenario_group

    if name == "trivial":
        return SymmetryGroup.trivial(sc.space)
    if name == "auto":
        return scenario_group(sc)
    if name == "cone":
        return scenario_group(sc, cone=cone)
    if name == "full":
        return scenario_group(sc, network=False)
    raise DomainError(f"unknown group {name!r}; use auto, cone, full or trivial")


def cmd_rays(args, rep: Reporter) -> int:
    from .classify.symmetry import orbit_classes

    sc, family, cone = read_cone_file(args.cone)

    def progress(step, total, nrays):
        rep.progress(rows=f"{step}/{total}", rays=nrays)

    cfg = DDConfig(max_rays=args.max_rays, progress=progress)
    v = dd_enumerate(cone, cfg)
    rep.emit("rays", count=len(v.rays))
    data = {"scenario": sc.spec.to_dict(), "family": family, "rays": v.to_dict()}
    if args.classes:
        group = _group_for(sc, args.group, cone)
        classes = orbit_classes(v, group)
        data["group_order"] = group.order
        data["classes"] = [c.to_dict() for c in classes]
        rep.emit("classes", count=len(classes), group_order=group.order)
    _write(_dump(data), args.out)
    return 0


def cmd_classify(args, rep: Reporter) -> int:
    from .classify.report import classify

    sc, family, v = read_rays_file(args.rays)
    wanted = [w.strip() for w in args.labels.split(",") if w.strip()]
    cone = build_system(sc, family)
    group = _group_for(sc, args.group, cone)
    res = classify(v, sc, wanted, group, threads=args.threads,
                   progress=lambda k, n: rep.progress(classified=f"{k}/{n}"))
    rep.emit("counts", **res.counts())
    _write(res.to_json() + "\n", args.out)
    return 0


def _check_systems(system: str, ineq) -> list[tuple[str, HCone]]:
    """``local:2x2`` / ``local:bell:2x2`` / ``ns`` / ``hybrid`` / ``bilocal``."""
    fam, _, rest = system.partition(":")
    sc = ineq.scenario
    if rest and fam != "hybrid":
        text = rest if ":" in rest or rest == "ic" else f"{'bilocal' if fam == 'bilocal' else 'bell'}:{rest}"
        sc = parse_scenario(text).build()
    if fam == "hybrid":
        from .scenarios import BIPARTITIONS

        parts = [rest] if rest else list(BIPARTITIONS)
        return [(f"hybrid:{bp}", hybrid_system(bp, sc)) for bp in parts]
    if fam == "local":
        return [(system, local_system(sc))]
    if fam == "ns":
        return [(system, ns_cone(sc))]
    if fam == "bilocal":
        return [(system, bilocal_local_system(sc))]
    raise DomainError(f"unknown system {system!r}")


def cmd_check(args, rep: Reporter) -> int:
    from .classify.membership import check_validity
    from .classify.registry import expression_form, get

    try:
        ineq = get(args.inequality)
    except KeyError as exc:
        raise DomainError(str(exc.args[0])) from None
    results = []
    if args.system == "ic":
        from .scenarios import ic_cone

        rays = dd_enumerate(ic_cone())
        for k, r in enumerate(rays.rays, 1):
            val = ineq.evaluate(r)
            results.append({"ray": k, "value": format_rational(val), "status": "valid" if val >= 0 else "violated"})
            print(f"ray {k}: {'satisfied' if val >= 0 else 'violated'} (value {format_rational(val)})")
        out = {"inequality": ineq.id, "system": "ic", "rays": results}
    else:
        form = expression_form(args.expr, ineq.space) if args.expr else ineq.form
        for name, system in _check_systems(args.system, ineq):
            v = check_validity(form, ineq.space, system)
            entry = {"system": name, "valid": v.valid}
            print(f"{ineq.id} on {name}: {'valid' if v.valid else 'invalid'}")
            if v.valid and v.outcome.certificate is not None:
                rows = []
                for rid, m in v.outcome.certificate.terms:
                    rows.append([format_rational(m), format_form(system.row(rid), system.space)])
                entry["certificate"] = rows
                for m, r in rows:
                    print(f"  {m} x [{r}]")
            elif not v.valid and v.witness is not None:
                entry["witness"] = [format_rational(x) for x in v.witness]
                print("  witness direction: " + " ".join(entry["witness"]))
            results.append(entry)
        out = {"inequality": ineq.id, "results": results}
    if args.out:
        Path(args.out).write_text(_dump(out))
    return 0


def cmd_derive(args, rep: Reporter) -> int:
    from .classify.derive import derive_gtnl_witness, derive_inequality

    sc, vec = read_ray_file(args.ray)
    try:
        if args.system == "hybrid":
            d = derive_gtnl_witness(vec, sc, max_rows=args.max_rows)
        else:
            d = derive_inequality(vec, build_system(sc, args.system), max_rows=args.max_rows)
    except FeasibleSystemError:
        raise DomainError("the vector is a member of the system; nothing to derive") from None
    viol = d.violation
    viol_s = format_rational(viol) if isinstance(viol, (int, Fraction)) else format(viol, ".17g")
    print(str(d))
    rep.emit("derived", iis_rows=d.iis_size, candidates=d.candidates, violation=viol_s)
    if args.out:
        Path(args.out).write_text(_dump({
            "scenario": sc.spec.to_dict(),
            "system": args.system,
            "inequality": str(d),
            "coefficients": [format_rational(c) for c in d.form.coeffs],
            "violation": viol_s,
        }))
    return 0


def cmd_certify(args, rep: Reporter) -> int:
    from .classify.certificates import PROOFS, verify_all, verify_proof

    if args.id:
        if args.id not in PROOFS:
            raise DomainError(f"unknown certificate {args.id!r}; known: {', '.join(PROOFS)}")
        results = [verify_proof(PROOFS[args.id])]
    else:
        results = verify_all()
    for r in results:
        print(f"{r.id}: {'ok' if r.ok else 'FAILED'} ({r.message})")
    good = sum(r.ok for r in results)
    print(f"{good}/{len(results)} certificates verified")
    if args.out:
        Path(args.out).write_text(_dump([r.to_dict() for r in results]))
    return 0 if good == len(results) else 1


def _scan_one(job):
    from .boxes import OptimizerConfig, optimize_ghz_violation

    d, starts, seed = job
    return optimize_ghz_violation(d, OptimizerConfig(starts=starts, seed=seed))


def cmd_ghz_scan(args, rep: Reporter) -> int:
    from concurrent.futures import ProcessPoolExecutor

    from .boxes import scan_csv

    if args.d_min < 2 or args.d_max < args.d_min:
        raise DomainError("need 2 <= d-min <= d-max")
    jobs = [(d, args.starts, args.seed) for d in range(args.d_min, args.d_max + 1)]
    results = []
    if args.threads > 1:
        with ProcessPoolExecutor(args.threads) as ex:
            for r in ex.map(_scan_one, jobs):
                results.append(r)
                rep.progress(d=r.d, value=format(r.value, ".6g"))
    else:
        for job in jobs:
            r = _scan_one(job)
            results.append(r)
            rep.progress(d=r.d, value=format(r.value, ".6g"))
    _write(scan_csv(results), args.out)
    return 0


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="entropicns", description="Entropic cones, rays and inequalities for Bell-type scenarios.")
    p.add_argument("--json", action="store_true", help="structured JSON diagnostics on stderr")
    p.add_argument("--threads", type=int, default=1, help="worker processes for independent jobs")
    p.add_argument("--seed", type=int, default=0, help="random seed (optimizer starts)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("scenario", help="describe a scenario")
    s.add_argument("scenario", help="e.g. bell:2x2, bilocal:2x2x2, ic")
    s.add_argument("--out")
    s.set_defaults(func=cmd_scenario)

    s = sub.add_parser("cone", help="build an H-representation")
    s.add_argument("--scenario", required=True)
    s.add_argument("--family", default="ns", help=", ".join(FAMILIES + ("ic",)))
    s.add_argument("--out")
    s.set_defaults(func=cmd_cone)

    s = sub.add_parser("rays", help="enumerate extremal rays of a cone file")
    s.add_argument("cone")
    s.add_argument("--classes", action="store_true", help="also group rays into symmetry classes")
    s.add_argument("--group", default="auto", choices=["auto", "cone", "full", "trivial"])
    s.add_argument("--max-rays", type=int, default=None)
    s.add_argument("--out")
    s.set_defaults(func=cmd_rays)

    s = sub.add_parser("classify", help="label the ray classes of a rays file")
    s.add_argument("rays")
    s.add_argument("--labels", default="local", help="comma list of local, gtnl, bilocal, ic")
    s.add_argument("--group", default="auto", choices=["auto", "cone", "full", "trivial"])
    s.add_argument("--out")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("check", help="validity of a named inequality")
    s.add_argument("--inequality", required=True)
    s.add_argument("--system", required=True, help="local[:2x2], ns, hybrid[:A|BC], bilocal, ic")
    s.add_argument("--expr", help="check this expression instead, on the inequality's scenario")
    s.add_argument("--out")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("derive", help="derive an inequality violated by a ray")
    s.add_argument("--ray", required=True, help="JSON ray file")
    s.add_argument("--system", required=True, help="local, hybrid, bilocal-local, ns, ...")
    s.add_argument("--max-rows", type=int, default=20000)
    s.add_argument("--out")
    s.set_defaults(func=cmd_derive)

    s = sub.add_parser("certify", help="replay built-in validity proofs")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--all", action="store_true")
    g.add_argument("--id")
    s.add_argument("--out")
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("ghz-scan", help="optimise the GHZ violation for a range of d")
    s.add_argument("--d-min", type=int, default=2)
    s.add_argument("--d-max", type=int, default=40)
    s.add_argument("--starts", type=int, default=24)
    s.add_argument("--out")
    s.set_defaults(func=cmd_ghz_scan)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    rep = Reporter(args.json)
    try:
        return args.func(args, rep)
    except (DomainError, GeometryError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        rep.emit("error", message=str(msg))
        return 1


def run(argv: Sequence[str]) -> int:
    """Programmatic entry point; artifacts go to the paths given by ``--out``."""
    try:
        return main(argv)
    except SystemExit as exc:  # usage errors from argparse
        return int(exc.code or 0)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
