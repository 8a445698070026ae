"""Command line: ``acf analyze | synth | simulate | verify | gen-target``.

Exit codes: 0 ok, 1 other acf error, 2 bad input, 3 resource cap,
4 phase obstruction (strict synthesis of a target with det != 1 blocks).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np
from scipy.stats import unitary_group

from . import io
from .compiler import BlockTarget, compile_target
from .errors import (
    AcfError,
    InvalidGeneratorError,
    InvalidTargetError,
    PhaseObstructionError,
    ReachabilityError,
    ResourceError,
    StructuralError,
)
from .groups import irreps_count, min_compression_length
from .oracle import BASIS_CAP, CLOSURE_CAP, klocal_invariant_basis, lie_closure_dim, verify_commutant
from .reachability import commutant_dim, components, is_semi_universal
from .sectors import (
    dim_full_symmetric_group,
    dim_gap_lower_bound,
    enumerate_sectors,
    phase_constraint_rank,
    predicted_dim,
)
from .simulator import (
    ancilla_action,
    block_phase_distance,
    check_invariance,
    circuit_unitary,
    unitary_hash,
)

EXIT_INPUT, EXIT_RESOURCE, EXIT_PHASE = 2, 3, 4


def _load_spec(args) -> io.ProblemSpec:
    spec = io.spec_from_json(io.load_json(args.spec))
    if args.k is not None:
        spec = io.ProblemSpec(spec.group, spec.rep, spec.n, args.k)
        if not 1 <= args.k <= spec.n:
            raise StructuralError(f"need 1 <= k <= n, got k={args.k}, n={spec.n}")
    return spec


def _table(spec: io.ProblemSpec):
    table = enumerate_sectors(spec.rep, spec.group, spec.n)
    return table, components(table, spec.k)


def _emit(args, payload: dict) -> None:
    text = io.dumps(payload)
    if getattr(args, "report", None):
        io.write_atomic(args.report, text)
    else:
        sys.stdout.write(text)


def analyze_report(spec: io.ProblemSpec) -> dict:
    rep, g, n, k = spec.rep, spec.group, spec.n, spec.k
    table, ct = _table(spec)
    semi = is_semi_universal(ct) if k >= 2 else None
    return {
        "schema": io.SCHEMA,
        "n": n,
        "k": k,
        "sectors": [{"charge": list(mu), "dim": table.sector(mu).dim} for mu in table.charges],
        "components": [{"charge": list(c.charge), "alpha": c.alpha, "dim": c.dim}
                       for c in ct.components],
        "semi_universal": semi,
        "commutant_dim": commutant_dim(ct),
        "irreps_n": irreps_count(rep, g, n),
        "irreps_k": irreps_count(rep, g, k),
        "l_min": min_compression_length(rep, g, n),
        "dim_full": dim_full_symmetric_group(table),
        "dim_gap_bound": dim_gap_lower_bound(rep, g, n, k),
        "phase_rank": phase_constraint_rank(rep, g, n, k),
        "predicted_dim": predicted_dim(rep, g, n, k, bool(semi)),
        # the formula is only exact when every sector is one component
        "predicted_dim_conditional": not semi,
    }


def cmd_analyze(args) -> int:
    _emit(args, analyze_report(_load_spec(args)))
    return 0


def cmd_synth(args) -> int:
    spec = _load_spec(args)
    _, ct = _table(spec)
    target = io.target_from_json(io.load_json(args.target))
    if not args.ancilla:
        target.validate(ct, strict=args.strict)
    res = compile_target(target, ct, strict=args.strict and not args.ancilla,
                         ancilla=args.ancilla)
    text = io.dumps(io.circuit_to_json(res.circuit))
    if args.out:
        io.write_atomic(args.out, text)
        _emit(args, {
            "schema": io.SCHEMA,
            "gates": len(res.circuit),
            "n": res.circuit.n,
            "max_locality": res.circuit.max_locality(),
            "ancilla": res.ancilla,
            "residual_phases": [{"charge": list(c), "alpha": a, "phase": io._angle(p)}
                                for (c, a), p in sorted(res.residual_phases.items())],
        })
    else:
        sys.stdout.write(text)
    return 0


def simulate_report(circ, spec: io.ProblemSpec | None, target: BlockTarget | None,
                    cap: int | None = None) -> dict:
    U = circuit_unitary(circ, cap)
    out = {"schema": io.SCHEMA, "unitary_hash": unitary_hash(U), "n": circ.n,
           "invariant_ok": None, "block_distance": None, "phases": None}
    if spec is None:
        return out
    out["invariant_ok"] = bool(check_invariance(U, spec.rep, spec.group))
    if target is None:
        return out
    _, ct = _table(spec)
    if circ.n == spec.n + 1:
        # ancilla circuits are compared on inputs with the ancilla in |0>
        U = ancilla_action(U, spec.n, spec.rep.d)
        V = target.to_dense(ct)
        out["full_distance"] = float(np.linalg.norm(U - V, 2))
    elif circ.n != spec.n:
        raise StructuralError(f"circuit has {circ.n} qudits, spec has {spec.n}")
    dist, phases = block_phase_distance(U, target.to_dense(ct), ct)
    out["block_distance"] = dist
    out["phases"] = [{"charge": list(c), "alpha": a, "phase": io._angle(p)}
                     for (c, a), p in sorted(phases.items())]
    return out


def cmd_simulate(args) -> int:
    circ = io.circuit_from_json(io.load_json(args.circuit))
    spec = _load_spec(args) if args.spec else None
    target = io.target_from_json(io.load_json(args.target)) if args.target else None
    if target is not None and spec is None:
        raise StructuralError("--target needs --spec to know the invariant subspaces")
    _emit(args, simulate_report(circ, spec, target, args.cap))
    return 0


def verify_report(spec: io.ProblemSpec, oracle: bool = True, cap: int | None = None) -> dict:
    rep, g, n, k = spec.rep, spec.group, spec.n, spec.k
    _, ct = _table(spec)
    semi = is_semi_universal(ct) if k >= 2 else False
    out = {
        "schema": io.SCHEMA,
        "components": len(ct.components),
        "predicted_dim": predicted_dim(rep, g, n, k, semi),
        "semi_universal": semi,
        "closure_dim": None,
        "commutant_dim": commutant_dim(ct),
        "ok": True,
    }
    if not oracle:
        return out
    basis = klocal_invariant_basis(rep, g, n, k, cap=cap or BASIS_CAP)
    report = verify_commutant(ct, basis)
    out["commutant_dim"] = report.dim
    closure = lie_closure_dim(basis, cap=cap or CLOSURE_CAP)
    out["closure_dim"] = closure
    ok = report.ok
    if semi:
        ok = ok and closure == out["predicted_dim"]
    out["ok"] = bool(ok)
    return out


def cmd_verify(args) -> int:
    out = verify_report(_load_spec(args), oracle=args.oracle, cap=args.cap)
    _emit(args, out)
    return 0 if out["ok"] else 1


def random_target(ct, seed: int, strict: bool = True) -> BlockTarget:
    """Haar-random unitary per component; strict targets are rescaled to det 1."""
    rng = np.random.default_rng(seed)
    blocks = {}
    for comp in ct.components:
        if comp.dim == 1:
            if not strict:
                blocks[comp.key] = np.array([[np.exp(1j * rng.uniform(-np.pi, np.pi))]])
            continue
        B = unitary_group.rvs(comp.dim, random_state=rng)
        if strict:
            B = B * np.exp(-1j * np.angle(np.linalg.det(B)) / comp.dim)
        blocks[comp.key] = B
    return BlockTarget(blocks)


def cmd_gen_target(args) -> int:
    spec = _load_spec(args)
    _, ct = _table(spec)
    text = io.dumps(io.target_to_json(random_target(ct, args.seed, args.strict)))
    if args.out:
        io.write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="acf", description="Abelian-symmetric circuit analysis and compilation")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, spec_required=True):
        sp.add_argument("spec", nargs=None if spec_required else "?",
                        help="problem spec JSON {moduli, d, letter_charges, n, k}")
        sp.add_argument("--k", type=int, help="override the locality in the spec")
        sp.add_argument("--cap", type=int, help="override the dense/oracle size cap")
        sp.add_argument("--report", help="write the JSON report here instead of stdout")

    a = sub.add_parser("analyze", help="sectors, components and dimension bookkeeping")
    common(a)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("synth", help="compile a block target into gates")
    common(s)
    s.add_argument("--target", required=True)
    s.add_argument("--out", help="circuit JSON path (stdout if omitted)")
    s.add_argument("--strict", action=argparse.BooleanOptionalAction, default=True,
                   help="reject blocks with det != 1 (default); --no-strict reports them")
    s.add_argument("--ancilla", action="store_true",
                   help="realise block phases with one ancilla qudit")
    s.set_defaults(func=cmd_synth)

    m = sub.add_parser("simulate", help="dense simulation and checks of a circuit")
    common(m, spec_required=False)
    m.add_argument("--circuit", required=True)
    m.add_argument("--target")
    m.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="brute-force oracle cross-checks")
    common(v)
    v.add_argument("--oracle", action=argparse.BooleanOptionalAction, default=True)
    v.set_defaults(func=cmd_verify)

    gt = sub.add_parser("gen-target", help="seeded Haar-per-block random target")
    common(gt)
    gt.add_argument("--seed", type=int, default=0)
    gt.add_argument("--out")
    gt.add_argument("--strict", action=argparse.BooleanOptionalAction, default=True)
    gt.set_defaults(func=cmd_gen_target)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PhaseObstructionError as exc:
        dets = [{"charge": list(c), "alpha": a, "det": [z.real, z.imag]}
                for (c, a), z in sorted(exc.determinants.items())]
        sys.stderr.write(io.dumps({"error": "phase_obstruction", "message": str(exc),
                                   "blocks": dets}))
        return EXIT_PHASE
    except ResourceError as exc:
        sys.stderr.write(f"acf: resource cap: {exc}\n")
        return EXIT_RESOURCE
    except (StructuralError, InvalidTargetError, InvalidGeneratorError, OSError) as exc:
        sys.stderr.write(f"acf: invalid input: {exc}\n")
        return EXIT_INPUT
    except (ReachabilityError, AcfError) as exc:
        sys.stderr.write(f"acf: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
