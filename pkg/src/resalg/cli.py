"""Command-line surface tying the modules into reproducible runs.

Every subcommand assembles a payload dict, wraps it in a result envelope
(config echo, version, timestamp, seed, residual summary) and writes JSON
or CSV.  Runs are deterministic for a fixed (config, seed): timestamps are
excluded from the determinism contract.  Exit status: 0 when all residual
gates pass, 1 on a residual failure, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import os
import sys
from datetime import datetime, timezone
from fractions import Fraction

import numpy as np

from . import __version__
from .config import RunConfig, Tolerances


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# small parsers
# ---------------------------------------------------------------------------

def parse_fraction_list(text: str):
    return [Fraction(part.strip()) for part in text.split(",") if part.strip()]


def parse_int_list(text: str):
    return [int(part.strip()) for part in text.split(",") if part.strip()]


def parse_float_list(text: str):
    return [float(part.strip()) for part in text.split(",") if part.strip()]


def parse_polynomial(expr: str, variables: dict):
    """Evaluate a polynomial expression over named atoms.

    Supports + - * and powers (both ``**`` and ``^``); constants become
    exact fractions.  ``variables`` maps names to atom objects implementing
    ring arithmetic; returns their combination.
    """
    tree = ast.parse(expr.replace("^", "**"), mode="eval")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.BinOp):
            left, right = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Pow):
                if not isinstance(right, Fraction) or right.denominator != 1:
                    raise UsageError("powers must be nonnegative integers")
                return left ** int(right)
            raise UsageError(f"unsupported operator {ast.dump(node.op)}")
        if isinstance(node, ast.UnaryOp):
            val = ev(node.operand)
            if isinstance(node.op, ast.USub):
                return -val
            if isinstance(node.op, ast.UAdd):
                return val
            raise UsageError("unsupported unary operator")
        if isinstance(node, ast.Name):
            if node.id not in variables:
                raise UsageError(f"unknown symbol {node.id!r}")
            return variables[node.id]
        if isinstance(node, ast.Constant):
            if isinstance(node.value, int):
                return Fraction(node.value)
            if isinstance(node.value, float):
                # decimal literals mean decimals, not binary floats
                return Fraction(str(node.value))
            raise UsageError(f"bad constant {node.value!r}")
        raise UsageError(f"unsupported syntax {ast.dump(node)}")

    return ev(tree)


class _QPolyAtom:
    """Commutative coordinate monomials with Fraction coefficients."""

    def __init__(self, terms):
        self.terms = dict(terms)

    @staticmethod
    def variable(index, nvars):
        e = tuple(1 if j == index else 0 for j in range(nvars))
        return _QPolyAtom({e: Fraction(1)})

    @staticmethod
    def const(c, nvars):
        return _QPolyAtom({(0,) * nvars: Fraction(c)})

    def _coerce(self, other):
        if isinstance(other, _QPolyAtom):
            return other
        nvars = len(next(iter(self.terms)))
        return _QPolyAtom.const(Fraction(other), nvars)

    def __add__(self, other):
        o = self._coerce(other)
        out = dict(self.terms)
        for k, v in o.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
            if out[k] == 0:
                del out[k]
        return _QPolyAtom(out)

    __radd__ = __add__

    def __neg__(self):
        return _QPolyAtom({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        out = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in o.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, Fraction(0)) + v1 * v2
                if out[k] == 0:
                    del out[k]
        return _QPolyAtom(out)

    __rmul__ = __mul__

    def __pow__(self, n):
        nvars = len(next(iter(self.terms)))
        out = _QPolyAtom.const(1, nvars)
        for _ in range(n):
            out = out * self
        return out


def parse_q_polynomial(expr: str, names=("x", "y")) -> dict:
    nvars = len(names)
    variables = {nm: _QPolyAtom.variable(i, nvars) for i, nm in enumerate(names)}
    out = parse_polynomial(expr, variables)
    if isinstance(out, Fraction):
        out = _QPolyAtom.const(out, nvars)
    return out.terms


# ---------------------------------------------------------------------------
# envelope and output
# ---------------------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, int, float, str)) or obj is None:
        return obj
    return repr(obj)


def make_envelope(config: RunConfig, payload, residuals, passed: bool) -> dict:
    return {
        "version": __version__,
        "payload_version": 1,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "config": config.as_dict(),
        "seed": config.seed,
        "payload": _jsonable(payload),
        "residuals": _jsonable(residuals),
        "pass": bool(passed),
        "provenance": f"resalg {config.command}",
    }


def emit(config: RunConfig, envelope: dict, csv_rows=None, csv_header=None) -> None:
    if config.fmt == "csv" and csv_rows is not None:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(csv_header)
        writer.writerows(csv_rows)
        text = buf.getvalue()
    else:
        text = json.dumps(envelope, indent=2, sort_keys=True)
    if config.out:
        tmp = config.out + ".tmp"
        with open(tmp, "w") as fh:
            fh.write(text)
        os.replace(tmp, config.out)
    else:
        sys.stdout.write(text + "\n")


# ---------------------------------------------------------------------------
# subcommand implementations (payload, residuals, passed, csv)
# ---------------------------------------------------------------------------

def cmd_decompose(args, config):
    from .lattice import FrequencySystem, decompose_frequency_system, is_resonant

    values = parse_fraction_list(args.freqs)
    units = (args.units.split(",") if args.units
             else ["a"] * len(values))
    fs = FrequencySystem(tuple(zip(values, units)))
    comps = decompose_frequency_system(fs)
    payload = {
        "components": [
            {"characteristic": str(c.characteristic), "unit": c.unit,
             "n": list(c.n), "indices": list(c.indices)}
            for c in comps
        ],
        "resonant": is_resonant(fs),
    }
    return payload, {}, True, None, None


def cmd_hilbert_basis(args, config):
    from .lattice import PrimeSystem, enumerate_minimal_elements

    basis = enumerate_minimal_elements(PrimeSystem(tuple(parse_int_list(args.n))))
    payload = {
        "gammas": [list(g) for g in basis.gammas],
        "primitives": [list(p) for p in basis.primitives],
        "box_bound": basis.box_bound,
    }
    return payload, {}, True, None, None


def _poly_repr(poly) -> dict:
    out = {}
    for (prims, lats), coef in sorted(poly.terms.items()):
        bits = [f"P{j}^{e}" for j, e in enumerate(prims) if e]
        bits += ["A[" + ",".join(map(str, g)) + f"]^{e}" for g, e in lats]
        key = "*".join(bits) if bits else "1"
        c = complex(coef)
        out[key] = {"re": c.real, "im": c.imag}
    return out


def cmd_brackets(args, config):
    from .lattice import PrimeSystem
    from .poisson import build_classical_algebra

    s = build_classical_algebra(PrimeSystem(tuple(parse_int_list(args.n))))
    table = {}
    ids = s.generator_ids()
    for i, g1 in enumerate(ids):
        for g2 in ids[i + 1:]:
            table[f"{{{_gid_name(g1)},{_gid_name(g2)}}}"] = _poly_repr(s.bracket_gen(g1, g2))
    payload = {
        "generators": [_gid_name(g) for g in ids],
        "brackets": table,
        "constraints": [_poly_repr(c) for c in s.constraints],
        "casimirs": [_poly_repr(c) for c in s.casimirs],
    }
    return payload, {}, True, None, None


def _gid_name(gid):
    kind, payload = gid
    if kind == "P":
        return f"P{payload}"
    return "A[" + ",".join(map(str, payload)) + "]"


def cmd_verify_jacobi(args, config):
    from .lattice import PrimeSystem
    from .poisson import build_classical_algebra, verify_jacobi

    s = build_classical_algebra(PrimeSystem(tuple(parse_int_list(args.n))))
    resid = verify_jacobi(s, args.samples, seed=config.seed)
    tol = config.tolerances.jacobi
    payload = {"max_residual": resid, "samples": args.samples}
    return payload, {"jacobi": resid}, resid < tol, None, None


def cmd_represent(args, config):
    from .fock import (FockBasis, casimirs12, relations12_residual,
                       resonance12_generators)
    from .hypergeo import (coherent_transform, intertwining_residual,
                           kernel_and_moments, vacuum_and_coherent)
    from .lattice import PrimeSystem

    n = args.n_level
    hp = args.hbar_prime
    checks = args.check.split(",")
    basis = FockBasis(PrimeSystem((1, 2)), max(2 * n, n + 6))
    payload = {"n_level": n, "hbar_prime": hp}
    residuals = {}
    if "relations" in checks:
        ops = resonance12_generators(basis, hp)
        residuals["relations"] = relations12_residual(*ops, hp)
    if "casimirs" in checks:
        ops = resonance12_generators(basis, hp)
        C1, C2 = casimirs12(*ops, hp)
        idx = np.array(basis.block(n), dtype=int)
        c1_err = float(np.abs(C1[np.ix_(idx, idx)]
                              - (n * hp / 3) * np.eye(idx.size)).max())
        c2_err = float(np.abs(C2[np.ix_(idx, idx)]).max()) / max(1.0, (n * hp) ** 3)
        residuals["casimir_linear"] = c1_err
        residuals["casimir_cubic"] = c2_err
        payload["casimir_block_values"] = {"linear": n * hp / 3, "cubic": 0.0}
    if "kernel" in checks:
        rng = np.random.default_rng(config.seed)
        fam = vacuum_and_coherent(n, basis, hp)
        kern = kernel_and_moments(n, hp)
        worst = 0.0
        for _ in range(50):
            z = rng.normal() * 0.8 + 1j * rng.normal() * 0.8
            v = fam.coherent(z)
            worst = max(worst, abs(float((v.conj() @ v).real) - float(kern.K(abs(z) ** 2))))
        residuals["kernel"] = worst
        T, _ = coherent_transform(n, basis, hp)
        residuals["intertwine"] = intertwining_residual(T, n, basis, hp)
        payload["moments"] = kern.moments.tolist()
    tol = config.tolerances
    ok = (residuals.get("relations", 0.0) < tol.relations
          and residuals.get("casimir_linear", 0.0) < tol.casimir
          and residuals.get("casimir_cubic", 0.0) < tol.casimir
          and residuals.get("kernel", 0.0) < tol.kernel
          and residuals.get("intertwine", 0.0) < tol.intertwine)
    return payload, residuals, ok, None, None


def cmd_average(args, config):
    from .averaging import average_to_order2, homological_residual
    from .lattice import PrimeSystem, enumerate_minimal_elements
    from .wick import wick_from_q_polynomial

    n = tuple(parse_int_list(args.n))
    qpoly = parse_q_polynomial(args.perturbation, names=("x", "y")[: len(n)])
    H1 = wick_from_q_polynomial(qpoly, len(n))
    nf = average_to_order2(n, H1)
    basis = enumerate_minimal_elements(PrimeSystem(n))
    hbar = Fraction(args.hbar) if args.hbar else Fraction(1)
    payload = {
        "n": list(n),
        "perturbation": args.perturbation,
        "order1": _poly_repr(nf.generator_form(basis, hbar, order=1)),
        "order2": _poly_repr(nf.generator_form(basis, hbar, order=2)) if args.order >= 2 else None,
        "hbar": str(hbar),
    }
    resid_zero = homological_residual(n, H1, nf.f0, nf.h1bar).is_zero()
    return payload, {"homological_residual_zero": resid_zero}, resid_zero, None, None


def cmd_spectrum(args, config):
    from .spectral import SchrodingerProblem, cluster_comparison

    hbars = parse_float_list(args.hbar)
    rows = []
    csv_rows = []
    for hbar in hbars:
        prob = SchrodingerProblem(gamma=args.gamma, hbar=hbar, smax=args.smax)
        comp = cluster_comparison(prob, args.levels)
        rows.extend(comp)
        for r in comp:
            csv_rows.append(["oracle", r["n"], r["k"], hbar, r["oracle"], r["residual"]])
            csv_rows.append(["asymptotic", r["n"], r["k"], hbar, r["asymptotic"], ""])
    worst = max((r["residual_over_h2"] for r in rows), default=0.0)
    payload = {"rows": rows, "gamma": args.gamma, "worst_residual_over_h2": worst}
    return (payload, {"worst_residual_over_h2": worst}, True,
            csv_rows, ["method", "n", "k", "hbar", "value", "residual"])


def cmd_model_spectrum(args, config):
    from .spectral import model_operator_spectrum

    w, _ = model_operator_spectrum(args.n_level, args.hbar_prime)
    payload = {"n_level": args.n_level, "hbar_prime": args.hbar_prime,
               "nu": w.tolist()}
    csv_rows = [["model", args.n_level, k, args.hbar_prime, float(v), ""]
                for k, v in enumerate(w)]
    return (payload, {}, True, csv_rows,
            ["method", "n", "k", "hbar", "value", "residual"])


def cmd_ebk(args, config):
    from .spectral import ebk_vs_model

    out = ebk_vs_model(args.n_level, args.hbar_prime)
    payload = dict(out)
    ok = out["max_rel_dev"] < config.tolerances.ebk_rel
    csv_rows = [["ebk", args.n_level, k, out["hbar_prime"], float(v), ""]
                for k, v in enumerate(out["ebk"])]
    csv_rows += [["model", args.n_level, k, out["hbar_prime"], float(v), ""]
                 for k, v in enumerate(out["model"])]
    return (payload, {"max_rel_dev": out["max_rel_dev"]}, ok, csv_rows,
            ["method", "n", "k", "hbar", "value", "residual"])


def cmd_evolve(args, config):
    from .fock import FockBasis
    from .hypergeo import half_index
    from .lattice import PrimeSystem
    from .spectral import BlockEvolution, long_time_evolution

    lo, hi = (int(x) for x in args.blocks.split(".."))
    basis = FockBasis(PrimeSystem((1, 2)), hi + 2)
    rng = np.random.default_rng(config.seed)
    taus = np.linspace(0.0, args.tau_max, args.steps)
    initial = {}
    for n in range(lo, hi + 1):
        d = half_index(n) + 1
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        initial[n] = v / np.linalg.norm(v)
    out = long_time_evolution(initial, basis, args.hbar_prime, taus,
                              microzone=args.microzone)
    evo = BlockEvolution(basis, args.hbar_prime, args.microzone)
    drift = {}
    payload_blocks = {}
    for n, traj in out.items():
        norms = np.linalg.norm(traj, axis=1)
        drift[str(n)] = float(np.abs(norms - norms[0]).max())
        payload_blocks[str(n)] = {
            "eigenphases": evo.eigenphases(n).tolist(),
            "final": [[c.real, c.imag] for c in traj[-1]],
        }
    worst = max(drift.values())
    payload = {"blocks": payload_blocks, "tau_max": args.tau_max,
               "norm_drift": drift}
    return payload, {"max_norm_drift": worst}, worst < 1e-10, None, None


def cmd_precess(args, config):
    from .lattice import PrimeSystem
    from .numbers import Exact, INV_SQRT2, ONE
    from .poisson import GenPoly, build_classical_algebra, lat_id, prim_id
    from .precession import PrecessionSystem, integrate_precession, leaf_point

    n = tuple(parse_int_list(args.n))
    s = build_classical_algebra(PrimeSystem(n))
    alpha = max(s.basis.gammas)
    scale = ONE if n == (1, 1) else INV_SQRT2
    half = Exact(Fraction(1, 2))
    over2i = Exact(0, 0, Fraction(-1, 2), 0)
    atoms = {
        "A1": GenPoly.generator(2, prim_id(0)),
        "A2": GenPoly.generator(2, prim_id(1)),
        "A3": GenPoly.generator(2, lat_id(alpha), scale * half)
              + GenPoly.generator(2, lat_id(tuple(-x for x in alpha)), scale * half),
        "A4": GenPoly.generator(2, lat_id(alpha), scale * over2i)
              + GenPoly.generator(2, lat_id(tuple(-x for x in alpha)), -(scale * over2i)),
    }
    atoms["X"], atoms["Y"], atoms["Z"], atoms["W"] = (
        atoms["A1"], atoms["A2"], atoms["A3"], atoms["A4"])
    f = parse_polynomial(args.f, atoms)
    if isinstance(f, Fraction):
        f = GenPoly.constant(2, f)
    init = leaf_point(s, args.c0, args.a1, args.phase)
    traj = integrate_precession(PrecessionSystem(s, f, init), args.t_max,
                                samples=args.steps)
    ids = [prim_id(0), prim_id(1), lat_id(alpha)]
    csv_rows = []
    for i, t in enumerate(traj.times):
        row = [t]
        for gid in ids[:2]:
            row.append(traj.values[gid][i].real)
        row.append(traj.values[ids[2]][i].real)
        row.append(traj.values[ids[2]][i].imag)
        vals = {gid: arr[i] for gid, arr in traj.values.items()}
        row.extend(abs(c.evaluate(vals) - c.evaluate(
            {g: a[0] for g, a in traj.values.items()})) for c in s.casimirs)
        csv_rows.append(row)
    payload = {
        "n": list(n), "f": args.f, "t_max": args.t_max,
        "casimir_drift": traj.casimir_drift, "energy_drift": traj.energy_drift,
    }
    ok = traj.casimir_drift <= config.tolerances.drift
    header = (["t", "A1", "A2", "ReA", "ImA"]
              + [f"casimir{i}_drift" for i in range(len(s.casimirs))])
    return payload, {"casimir_drift": traj.casimir_drift,
                     "energy_drift": traj.energy_drift}, ok, csv_rows, header


def cmd_reduce11(args, config):
    from scipy.integrate import solve_ivp

    from .precession import QuadraticHamiltonian, reduced_11_rhs, reduced_11_solve

    coeffs = parse_float_list(args.potential_quartics)
    f = QuadraticHamiltonian(*coeffs)
    initial = tuple(parse_float_list(args.initial))
    if len(initial) not in (2, 3):
        raise UsageError("--initial expects a0,b0 or a0,b0,W0")
    sol = reduced_11_solve(f, initial, args.c0)
    a0, b0 = initial[0], initial[1]
    w0 = initial[2] if len(initial) == 3 else -np.sqrt(
        max(args.c0**2 - a0**2 - b0**2, 0.0)) / 2
    taus = np.linspace(0.0, args.tau_max, args.steps)
    ab = sol.ab(taus)
    rhs = reduced_11_rhs(f, args.c0)
    tmax_phys = sol.t_of_tau(args.tau_max) if not sol.turning_flagged else None
    num = solve_ivp(rhs, (0, 1000.0), [a0, b0, w0], rtol=1e-12, atol=1e-14,
                    dense_output=True)
    err = 0.0
    csv_rows = []
    for tau, (a, b) in zip(taus, ab):
        t = sol.t_of_tau(float(tau))
        if not sol.turning_flagged and t <= num.t[-1]:
            a_n, b_n, _ = num.sol(t)
            err = max(err, abs(a - a_n), abs(b - b_n))
        csv_rows.append([tau, t, a, b])
    payload = {
        "flow_matrix": sol.A.tolist(), "affine": sol.c.tolist(),
        "closed_vs_numeric": err, "turning_flagged": sol.turning_flagged,
        "t_at_tau_max": tmax_phys,
    }
    ok = sol.turning_flagged or err <= config.tolerances.closed_form
    return (payload, {"closed_vs_numeric": err}, ok, csv_rows,
            ["tau", "t", "a", "b"])


def cmd_magneto(args, config):
    from .precession import classify_magneto

    d = classify_magneto(Fraction(args.ratio_sq))
    payload = {"kind": d.kind, **{k: (str(v) if isinstance(v, Fraction) else v)
                                  for k, v in d.data.items()}}
    return payload, {}, True, None, None


def cmd_accept(args, config):
    from .acceptance import run_acceptance

    names = args.only.split(",") if args.only else None
    results = run_acceptance(config.profile, names, config.tolerances,
                             verbose=False)
    for r in results:
        print(r.line(), file=sys.stderr)
    payload = {
        r.name: {"pass": r.passed, "runtime": r.runtime, "details": _jsonable(r.details)}
        for r in results
    }
    ok = all(r.passed for r in results)
    return payload, {"criteria_failed": [r.name for r in results if not r.passed]}, ok, None, None


COMMANDS = {
    "decompose": cmd_decompose,
    "hilbert-basis": cmd_hilbert_basis,
    "brackets": cmd_brackets,
    "verify-jacobi": cmd_verify_jacobi,
    "represent": cmd_represent,
    "average": cmd_average,
    "spectrum": cmd_spectrum,
    "model-spectrum": cmd_model_spectrum,
    "ebk": cmd_ebk,
    "evolve": cmd_evolve,
    "precess": cmd_precess,
    "reduce11": cmd_reduce11,
    "magneto": cmd_magneto,
    "accept": cmd_accept,
}


def _global_options(parser, suppress: bool):
    # the same flags are legal before and after the subcommand; the
    # post-subcommand copies suppress their defaults so they only override
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--seed", type=int,
                        default=d if suppress else 0)
    parser.add_argument("--tol", action="append",
                        default=d if suppress else [],
                        help="override a tolerance, e.g. --tol jacobi=1e-9")
    parser.add_argument("--out", default=d if suppress else None,
                        help="output file path")
    parser.add_argument("--format", choices=("json", "csv"),
                        default=d if suppress else "json")
    parser.add_argument("--json", dest="format", action="store_const",
                        const="json", default=d if suppress else "json",
                        help="shorthand for --format json")
    parser.add_argument("--profile", choices=("fast", "full"),
                        default=d if suppress else "fast")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resalg",
        description="Resonance algebras of commensurable oscillators",
    )
    _global_options(parser, suppress=False)
    trailing = argparse.ArgumentParser(add_help=False)
    _global_options(trailing, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        return sub.add_parser(name, parents=[trailing], **kw)

    p = add("decompose", help="split frequencies into commensurable components")
    p.add_argument("--freqs", required=True, help="comma separated rationals, e.g. 3,6")
    p.add_argument("--units", default=None, help="comma separated unit tags")

    p = add("hilbert-basis", help="minimal solutions of the resonance equation")
    p.add_argument("--n", required=True, help="prime system, e.g. 1,2")

    p = add("brackets", help="bracket table of the resonance algebra")
    p.add_argument("--n", required=True)

    p = add("verify-jacobi", help="sampled Jacobi residual")
    p.add_argument("--n", required=True)
    p.add_argument("--samples", type=int, default=1000)

    p = add("represent", help="operator checks of the 1:2 algebra")
    p.add_argument("--n-level", type=int, required=True)
    p.add_argument("--hbar-prime", type=float, default=1.0)
    p.add_argument("--check", default="relations,casimirs,kernel")

    p = add("average", help="normal form of a coordinate perturbation")
    p.add_argument("--n", required=True)
    p.add_argument("--perturbation", required=True, help='e.g. "x^2*y + 0.125*x^4"')
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--hbar", default=None, help="rational value for the coefficients")

    p = add("spectrum", help="oracle spectrum and cluster residuals")
    p.add_argument("--gamma", type=float, default=0.125)
    p.add_argument("--hbar", required=True, help="comma separated values")
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--smax", type=int, default=44)

    p = add("model-spectrum", help="model-operator eigenvalues")
    p.add_argument("--n-level", type=int, required=True)
    p.add_argument("--hbar-prime", type=float, default=1.0)

    p = add("ebk", help="quantized-area ladder vs model spectrum")
    p.add_argument("--n-level", type=int, required=True)
    p.add_argument("--hbar-prime", type=float, default=None)

    p = add("evolve", help="per-block long-time evolution")
    p.add_argument("--tau-max", type=float, default=50.0)
    p.add_argument("--blocks", default="0..8")
    p.add_argument("--steps", type=int, default=51)
    p.add_argument("--hbar-prime", type=float, default=1.0)
    p.add_argument("--microzone", action="store_true")

    p = add("precess", help="generator flow on a leaf")
    p.add_argument("--n", required=True)
    p.add_argument("--f", required=True, help='Hamiltonian over A1..A4, e.g. "A3"')
    p.add_argument("--t-max", type=float, default=100.0)
    p.add_argument("--c0", type=float, default=3.0)
    p.add_argument("--a1", type=float, default=1.0)
    p.add_argument("--phase", type=float, default=0.3)
    p.add_argument("--steps", type=int, default=201)
    p.add_argument("--csv", dest="out_csv", default=None)

    p = add("reduce11", help="closed-form reduced isotropic system")
    p.add_argument("--potential-quartics", required=True,
                   help="alpha,beta,gamma,delta,rho")
    p.add_argument("--initial", required=True, help="a0,b0,W0")
    p.add_argument("--c0", type=float, default=2.0)
    p.add_argument("--tau-max", type=float, default=10.0)
    p.add_argument("--steps", type=int, default=41)

    p = add("magneto", help="resonance data of the magnetic dot")
    p.add_argument("--ratio-sq", required=True,
                   help="(half Larmor / dot frequency)^2, e.g. 1/8")

    p = add("accept", help="run the acceptance criteria")
    p.add_argument("--only", default=None, help="comma separated criterion names")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    overrides = {}
    for item in args.tol:
        if "=" not in item:
            print(f"bad --tol {item!r}", file=sys.stderr)
            return 2
        key, val = item.split("=", 1)
        overrides[key] = val
    try:
        tolerances = Tolerances().merged(overrides)
    except KeyError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    out = args.out or getattr(args, "out_csv", None)
    fmt = args.format
    if getattr(args, "out_csv", None):
        fmt = "csv"
    config = RunConfig(
        command=args.command,
        params={k: v for k, v in vars(args).items()
                if k not in {"command", "seed", "tol", "out", "format", "profile"}},
        seed=args.seed, out=out, fmt=fmt, profile=args.profile,
        tolerances=tolerances,
    )
    try:
        payload, residuals, passed, csv_rows, csv_header = COMMANDS[args.command](args, config)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    envelope = make_envelope(config, payload, residuals, passed)
    emit(config, envelope, csv_rows, csv_header)
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
