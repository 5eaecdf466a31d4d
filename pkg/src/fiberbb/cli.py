"""Command-line entry point: ``fiberbb <command> ...``.

Exit codes: 0 success, 1 verification failure, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import bound
from .fock import FockSpace, annihilation, creation, op_distance, phase_rotation
from .grammar import ParseError, parse_element, parse_sequence, parse_terms
from .hamiltonian import ConfigError, FiberModel, build_segment
from .monomials import (
    BILINEAR,
    EIGHT_STEP,
    LINEAR,
    OMEGA12,
    OMEGA1234,
    PI,
    SET_A,
    SET_B,
    SIXTEEN_STEP,
    classify,
    matrix_check,
    survival_weight,
)
from .propagator import evolve, pair_cancellation_residual, qubit_state
from .search import search_sequences

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def fmt(x: float) -> str:
    """12 significant digits, locale-free."""
    return f"{float(x):.11e}"


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


# --- verify -----------------------------------------------------------------


def cmd_verify(args) -> int:
    seq = parse_sequence(args.seq)
    terms = parse_terms(args.terms)
    rep = classify(seq, terms, total_number_harmless=args.harmless_total_number)
    out = io.StringIO()
    out.write(f"sequence {seq.name or seq}: {len(seq)} segments, cyclic={seq.is_cyclic()}\n")
    for w in rep.warnings:
        out.write(f"warning: {w}\n")
    for literal, status, weight in rep.as_rows():
        out.write(f"{literal:<16} {status:<32} weight {weight}\n")
    if args.oracle:
        worst = max((matrix_check(seq, m) if m in rep.eliminated else 0.0) for m in terms)
        out.write(f"matrix oracle residual on eliminated terms: {worst:.3e}\n")
    verdict = "all eliminated" if rep.all_eliminated else f"{len(rep.surviving)} surviving"
    out.write(verdict + "\n")
    _emit(out.getvalue(), args.output)
    return EXIT_OK if rep.all_eliminated else EXIT_FAIL


# --- simulate ---------------------------------------------------------------


@dataclass
class SimulateConfig:
    model: dict
    controls: str = "omega12"
    g_rad_s: Optional[list] = None
    g2_ratio: float = 1.0
    epsilon: Optional[list] = None
    seeds: tuple = (0,)
    bath_occupation: float = 0.0

    @classmethod
    def from_dict(cls, data) -> "SimulateConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        allowed = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise ConfigError(f"unknown key(s) in config: {', '.join(unknown)}")
        if "model" not in data:
            raise ConfigError("config is missing 'model'")
        return cls(**data)


SIMULATE_HEADER = "seed,epsilon,g,tau_s,bb,fidelity,coherence,purity"


def simulate_rows(cfg: SimulateConfig, seed_override: Optional[int] = None) -> list[dict]:
    base = FiberModel.from_dict(cfg.model)
    controls = parse_sequence(cfg.controls)
    gs = cfg.g_rad_s if cfg.g_rad_s is not None else [base.bath_modes[0].g1_rad_s]
    epsilons = cfg.epsilon if cfg.epsilon is not None else [base.epsilon]
    seeds = [seed_override] if seed_override is not None else list(cfg.seeds)
    rows = []
    for seed in seeds:
        for eps in epsilons:
            for g in gs:
                model = base.with_(seed=int(seed), epsilon=float(eps))
                if cfg.g_rad_s is not None:
                    model = model.with_coupling(float(g), cfg.g2_ratio * float(g))
                initial = qubit_state(model, bath_occupation=cfg.bath_occupation)
                draw = 0 if model.epsilon > 0 else None
                for bb in (0, 1):
                    res = evolve(model, controls if bb else None, initial, draw=draw)
                    rows.append({"seed": int(seed), "epsilon": float(eps), "g": float(g),
                                 "tau_s": model.tau_s, "bb": bb, "fidelity": res.fidelity,
                                 "coherence": res.coherence, "purity": res.purity})
    return rows


def _rows_csv(header: str, rows: list[dict]) -> str:
    cols = header.split(",")
    lines = [header]
    for r in rows:
        lines.append(",".join(str(r[c]) if isinstance(r[c], (int, str)) else fmt(r[c]) for c in cols))
    return "\n".join(lines) + "\n"


def _rows_json(rows: list[dict]) -> str:
    return json.dumps(rows, indent=2, sort_keys=True) + "\n"


def load_config(path: str) -> dict:
    """Read a config from a path, or from the bundled data when ``path`` names one."""
    p = Path(path)
    if p.exists():
        text = p.read_text()
    else:
        name = p.name if p.suffix else p.name + ".json"
        bundled = resources.files("fiberbb") / "data" / name
        if not bundled.is_file():
            raise ConfigError(f"config {path!r} not found (bundled: {', '.join(bundled_configs())})")
        text = bundled.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None


def bundled_configs() -> list[str]:
    return sorted(p.name for p in (resources.files("fiberbb") / "data").iterdir() if p.name.endswith(".json"))


def cmd_simulate(args) -> int:
    cfg = SimulateConfig.from_dict(load_config(args.config))
    rows = simulate_rows(cfg, args.seed)
    text = _rows_json(rows) if args.format == "json" else _rows_csv(SIMULATE_HEADER, rows)
    _emit(text, args.output)
    return EXIT_OK


# --- delta ------------------------------------------------------------------


def _query(args) -> bound.BoundQuery:
    return bound.BoundQuery(delta=args.delta, length_m=args.length_m, speed_m_s=args.speed_m_s,
                            time_s=args.time_s)


def cmd_delta(args) -> int:
    q = _query(args)
    if args.curve:
        grid = bound.log_range(args.omega_from, args.omega_to, args.points)
        if args.omega_from <= 0 or args.omega_to <= 0:
            raise ValueError("curve range must be positive")
        table = bound.figure_curve(args.n, grid, q, args.alpha, include_reference=args.include_reference)
    else:
        sd = bound.SpectralDensity(args.n, args.alpha, args.omega_c, args.beta_s)
        method = args.method or ("closed" if math.isinf(args.beta_s) and args.n <= 3 else "bisection")
        table = [(args.omega_c, bound.delta_bound(sd, q, method))]
    rows = [{"omega_c_rad_s": w, "delta_m": d} for w, d in table]
    text = _rows_json(rows) if args.format == "json" else _rows_csv("omega_c_rad_s,delta_m", rows)
    _emit(text, args.output)
    return EXIT_OK


# --- estimate ---------------------------------------------------------------


def cmd_estimate(args) -> int:
    fn = bound.rough_estimate_linear if args.order == "linear" else bound.rough_estimate_bilinear
    est = fn(args.transmission_per_km, args.target, args.span_km)
    _emit(json.dumps(est.to_dict(), sort_keys=True) + "\n", args.output)
    return EXIT_OK


# --- search -----------------------------------------------------------------


def cmd_search(args) -> int:
    terms = parse_terms(args.terms)
    alphabet = [parse_element(t) for t in args.alphabet.split(",")]
    res = search_sequences(terms, alphabet, max_steps=args.max_steps, cap=args.cap,
                           require_cyclic=not args.allow_acyclic,
                           total_number_harmless=args.harmless_total_number)
    out = io.StringIO()
    if not res.found:
        out.write("no sequence found" + "".join(f"; {n}" for n in res.notes) + "\n")
        _emit(out.getvalue(), args.output)
        return EXIT_FAIL
    out.write(f"minimal length {res.length}: {len(res.sequences)} sequence(s)"
              + (" (truncated)" if res.truncated else "") + "\n")
    for s in res.sequences:
        out.write(str(s) + "\n")
    _emit(out.getvalue(), args.output)
    return EXIT_OK


# --- reproduce --------------------------------------------------------------


@dataclass(frozen=True)
class Anchor:
    key: str
    quantity: str
    expected: float
    rel_tol: float
    compute: Callable[[int], float]


def _conjugation_residual(seed: int) -> float:
    sp = FockSpace(1, 4)
    b, bd = annihilation(sp, 0).matrix, creation(sp, 0).matrix
    worst = 0.0
    for phi in (np.pi / 4, np.pi / 2, np.pi, 3 * np.pi / 2):
        u = phase_rotation(sp, [phi]).matrix
        ud = u.conj().T
        worst = max(worst,
                    np.abs(u @ bd @ ud - np.exp(1j * phi) * bd).max(),
                    np.abs(u @ b @ ud - np.exp(-1j * phi) * b).max(),
                    np.abs(u @ bd @ bd @ ud - np.exp(2j * phi) * bd @ bd).max())
    return float(worst)


def _count_eliminated(seq, terms) -> float:
    return float(len(classify(seq, terms).eliminated))


def _weight(seq, m) -> float:
    return abs(survival_weight(seq, m).value)


def _pair_ratio(seed: int) -> float:
    model = FiberModel(2, 1e-2, 1.0, 1.0, 1.1, ({"nu_rad_s": 0.6},)).with_coupling(0.01, 0.008)
    seg = build_segment(model)
    r1 = pair_cancellation_residual(seg, 5e-3)
    r0 = pair_cancellation_residual(seg, 1e-2)
    return r0 / r1


def bb_point(seed: int) -> dict:
    """One seeded parameter point for the fidelity-benefit comparison."""
    rng = np.random.default_rng(seed)
    tau = rng.uniform(0.05, 0.3)
    g = rng.uniform(0.01, 0.05) / tau
    nu = rng.uniform(0.5, 0.9)
    w2 = rng.uniform(0.95, 1.05)
    model = FiberModel(16, tau, 1.0, 1.0, w2, ({"nu_rad_s": nu},)).with_coupling(g, 0.8 * g)
    off = 1 - evolve(model, None).fidelity
    on = 1 - evolve(model, OMEGA12).fidelity
    return {"tau_s": tau, "g": g, "nu": nu, "omega2": w2, "deficit_off": off, "deficit_on": on}


def _bb_ratio(seed: int) -> float:
    p = bb_point(seed)
    return p["deficit_on"] / p["deficit_off"]


def _delta_anchor(n: int) -> Callable[[int], float]:
    q = bound.BoundQuery(time_s=1.6 / 3 * 1e-5)
    return lambda seed: bound.delta_bound(bound.SpectralDensity(n, 1.0, bound.REFERENCE_CUTOFF_RAD_S), q)


def _search_length(seed: int) -> float:
    return float(search_sequences(LINEAR, [PI], max_steps=4).length)


ANCHORS = [
    Anchor("conjugation", "max |e^{i phi n} b^dag e^{-i phi n} - e^{i phi} b^dag| (d=4)", 0.0, 1e-12,
           _conjugation_residual),
    Anchor("omega12.linear", "omega12: linear terms eliminated", 4, 0.0,
           lambda s: _count_eliminated(OMEGA12, LINEAR)),
    Anchor("omega12.AB", "omega12: A,B terms eliminated", 0, 0.0,
           lambda s: _count_eliminated(OMEGA12, SET_A + SET_B)),
    Anchor("omega1234.linearA", "omega1234: linear+A eliminated", 10, 0.0,
           lambda s: _count_eliminated(OMEGA1234, LINEAR + SET_A)),
    Anchor("omega1234.B.weight", "omega1234: |survival weight| of b1 b2", 4, 0.0,
           lambda s: _weight(OMEGA1234, SET_B[0])),
    Anchor("eightstep.linearAB", "eight-step: linear+A+B eliminated", 12, 0.0,
           lambda s: _count_eliminated(EIGHT_STEP, LINEAR + SET_A + SET_B)),
    Anchor("sixteenstep.all", "sixteen-step: bilinear terms eliminated or harmless", 10, 0.0,
           lambda s: float(len(classify(SIXTEEN_STEP, BILINEAR, True).eliminated)
                           + len(classify(SIXTEEN_STEP, BILINEAR, True).harmless))),
    Anchor("pair.ratio", "pair residual(tau)/residual(tau/2)", 4.0, 0.1, _pair_ratio),
    Anchor("bb.benefit", "deficit with pi-pairs / deficit without (seeded point)", 0.0, 0.1, _bb_ratio),
    Anchor("gamma.n2", "Gamma(T), n=2, alpha=1, w_c=1, T=1", 0.25, 1e-8,
           lambda s: bound.gamma_quadrature(bound.SpectralDensity(2, 1.0, 1.0), 1.0)),
    Anchor("delta.n1", "Delta bound (m), Ohmic", 6e5, 0.1, _delta_anchor(1)),
    Anchor("delta.n2", "Delta bound (m), super-Ohmic", 0.6, 0.1, _delta_anchor(2)),
    Anchor("delta.n3", "Delta bound (m), Debye-like", 1e-7, 0.6, _delta_anchor(3)),
    Anchor("estimate.linear.delta", "shifter spacing (m), linear", 20.0, 1e-12,
           lambda s: bound.rough_estimate_linear().delta_m),
    Anchor("estimate.linear.count", "shifters per km, linear", 50.0, 1e-12,
           lambda s: bound.rough_estimate_linear().shifter_count),
    Anchor("estimate.bilinear.N", "cancellation steps per km, bilinear", 1.2, 0.1,
           lambda s: bound.rough_estimate_bilinear().N),
    Anchor("estimate.bilinear.delta", "shifter spacing (m), bilinear", 100.0, 0.15,
           lambda s: bound.rough_estimate_bilinear().delta_m),
    Anchor("search.linear", "minimal pi-only sequence length for linear terms", 2, 0.0, _search_length),
]


def _passes(value: float, expected: float, tol: float) -> bool:
    if expected == 0:
        return abs(value) <= tol
    return abs(value - expected) <= tol * abs(expected)


def reproduce_rows(seed: int = 0, strict_tol: Optional[float] = None, only=None) -> list[dict]:
    rows = []
    for a in ANCHORS:
        if only and a.key not in only:
            continue
        tol = a.rel_tol if strict_tol is None or a.expected == 0 else strict_tol
        value = float(a.compute(seed))
        rows.append({"key": a.key, "computed": value, "expected": float(a.expected), "tolerance": tol,
                     "status": "pass" if _passes(value, a.expected, tol) else "FAIL"})
    return rows


REPRODUCE_HEADER = "key,computed,expected,tolerance,status"


def cmd_reproduce(args) -> int:
    if args.list:
        text = "".join(f"{a.key:<26} {a.quantity}\n" for a in ANCHORS)
        _emit(text, args.output)
        return EXIT_OK
    only = set(args.only.split(",")) if args.only else None
    if only:
        unknown = sorted(only - {a.key for a in ANCHORS})
        if unknown:
            raise ConfigError(f"unknown anchor(s): {', '.join(unknown)}")
    rows = reproduce_rows(args.seed, args.strict_tol, only)
    text = _rows_json(rows) if args.format == "json" else _rows_csv(REPRODUCE_HEADER, rows)
    _emit(text, args.output)
    failed = [r["key"] for r in rows if r["status"] != "pass"]
    print(f"{len(rows) - len(failed)}/{len(rows)} anchors pass" + (f"; failing: {', '.join(failed)}" if failed else ""),
          file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fiberbb", description="Spatial bang-bang decoupling toolkit for optical fibers.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="first-order elimination report for a control sequence")
    v.add_argument("--seq", required=True, help="sequence literal or name (omega12, omega1234, eightstep, ...)")
    v.add_argument("--terms", required=True, help="comma-separated set names and c(r,k)a(s,l) monomials")
    v.add_argument("--harmless-total-number", action="store_true",
                   help="report residuals proportional to n1+n2 as harmless")
    v.add_argument("--oracle", action="store_true", help="also run the Fock-matrix oracle")
    v.add_argument("--output")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", help="paired BB / no-BB fiber runs from a JSON config")
    s.add_argument("config", help="config path, or a bundled name (paired_pi, zero_coupling)")
    s.add_argument("--seed", type=int, help="override the config's seed list")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--output")
    s.set_defaults(func=cmd_simulate)

    d = sub.add_parser("delta", help="phase-shifter spacing bound or curve")
    d.add_argument("--n", type=int, required=True, help="spectral exponent (1 Ohmic, 2 super-Ohmic, 3 Debye)")
    d.add_argument("--omega-c", type=float, default=bound.REFERENCE_CUTOFF_RAD_S, help="cutoff (rad/s)")
    d.add_argument("--alpha", type=float, default=1.0)
    d.add_argument("--beta-s", type=float, default=math.inf, help="inverse temperature (s)")
    d.add_argument("--delta", type=float, default=1e-4, help="coherence deficit target")
    d.add_argument("--length-m", type=float, default=1000.0)
    d.add_argument("--speed-m-s", type=float, default=bound.FIBER_SPEED)
    d.add_argument("--time-s", type=float, help="transit time; overrides length/speed")
    d.add_argument("--method", choices=("closed", "bisection"))
    d.add_argument("--curve", action="store_true")
    d.add_argument("--from", dest="omega_from", type=float, default=1e10)
    d.add_argument("--to", dest="omega_to", type=float, default=1e16)
    d.add_argument("--points", type=int, default=61)
    d.add_argument("--include-reference", action="store_true", help="add the reference cutoff to the curve")
    d.add_argument("--format", choices=("csv", "json"), default="csv")
    d.add_argument("--output")
    d.set_defaults(func=cmd_delta)

    e = sub.add_parser("estimate", help="rough spacing estimate from fiber loss")
    e.add_argument("--order", choices=("linear", "bilinear"), required=True)
    e.add_argument("--target", type=float, default=1e-4)
    e.add_argument("--transmission-per-km", type=float, default=0.95)
    e.add_argument("--span-km", type=float, default=1.0)
    e.add_argument("--output")
    e.set_defaults(func=cmd_estimate)

    r = sub.add_parser("reproduce", help="recompute every anchor number with pass/fail")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--strict-tol", type=float, help="relative tolerance applied to every nonzero anchor")
    r.add_argument("--list", action="store_true", help="list anchors without computing")
    r.add_argument("--only", help="comma-separated anchor keys")
    r.add_argument("--format", choices=("csv", "json"), default="csv")
    r.add_argument("--output")
    r.set_defaults(func=cmd_reproduce)

    q = sub.add_parser("search", help="shortest sequences over an alphabet eliminating given terms")
    q.add_argument("--terms", required=True)
    q.add_argument("--alphabet", default="Pi,Pi1,G,Gd")
    q.add_argument("--max-steps", type=int, default=8)
    q.add_argument("--cap", type=int, default=32)
    q.add_argument("--allow-acyclic", action="store_true")
    q.add_argument("--harmless-total-number", action="store_true")
    q.add_argument("--output")
    q.set_defaults(func=cmd_search)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParseError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
