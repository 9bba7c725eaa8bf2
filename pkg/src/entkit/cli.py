"""Command-line front end: `entkit <command> ...`.

Results go to stdout as JSON (or CSV for tabular output), floats with 12
significant digits. Exit codes: 0 ok, 2 bad usage or parameters, 3 a
numerical routine did not converge (the partial result is still printed).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import games, measures, nlgates, perm_distill, qla, schmidt, states, transform, werner_lp

EXIT_USAGE = 2
EXIT_NOT_CONVERGED = 3


class UsageError(Exception):
    pass


class NotConverged(Exception):
    def __init__(self, payload):
        super().__init__("computation did not converge")
        self.payload = payload


def _fmt(x):
    return float(f"{x:.12g}") + 0.0


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x) or math.isnan(x):
            return str(x)
        return 0.0 if abs(x) < 1e-15 else _fmt(x)
    if isinstance(obj, complex):
        return [_fmt(obj.real), _fmt(obj.imag)]
    return obj


def emit_json(obj, out):
    out.write(json.dumps(_clean(obj), sort_keys=True) + "\n")


def emit_csv(header, rows, out):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([f"{_clean(v):.12g}" if isinstance(v, (float, np.floating)) else v for v in r])


def _floats(text):
    try:
        return [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def _load_state(spec):
    if os.path.exists(spec):
        with open(spec) as fh:
            obj = json.load(fh)
        m, dims = qla.matrix_from_json(obj)
        return qla.DensityMatrix(m, dims)
    return states.named_state(spec)


def _cut(text):
    if text is None:
        return None
    if "," in text:
        return [int(x) for x in text.split(",")]
    return int(text)


# measure

def cmd_measure(a, out):
    rho = _load_state(a.state)
    cut = _cut(a.cut)
    res = {"measure": a.kind, "state": a.state}
    if a.kind == "negativity":
        res["value"] = measures.negativity(rho, cut)
    elif a.kind == "logneg":
        res["value"] = measures.log_negativity(rho, cut)
    elif a.kind == "concurrence":
        res["value"] = measures.concurrence(rho)
    elif a.kind == "eof":
        res["value"] = measures.eof_two_qubit(rho)
    elif a.kind == "er":
        r = measures.rel_ent_entanglement(rho, cut, reference=a.reference, tol=a.tol, seed=a.seed)
        res.update(r.to_dict())
        res.pop("certificate", None)
    elif a.kind == "et":
        r = measures.trace_norm_measure(rho, cut, tol=a.tol, seed=a.seed, reference=a.reference)
        res.update(r.to_dict())
        res.pop("certificate", None)
    elif a.kind == "schmidt":
        if a.split is None:
            raise UsageError("--split is required for the Schmidt measure")
        psi = states.named_vector(a.state)
        b = schmidt.schmidt_measure_bounds(psi, a.split, seed=a.seed)
        res.update({"lower": b.lower, "upper": b.upper, "exact": b.exact, "split": b.split})
    if res.get("converged") is False:
        raise NotConverged(res)
    return res


# transform

def _pure(coeffs):
    return states.schmidt_state(_floats(coeffs))


def cmd_transform(a, out):
    psi, phi = _pure(a.source), _pure(a.target)
    if a.kind == "check":
        v = transform.nielsen_transformable(psi, phi)
    elif a.kind == "catalyst":
        if a.catalyst is None:
            raise UsageError("--catalyst is required")
        v = transform.catalyst_enables(psi, phi, _floats(a.catalyst))
    elif a.kind == "obstruct":
        v = transform.powersum_obstruction(psi, phi)
    else:
        r = transform.optimal_fidelity_locc(psi, phi)
        return {"kind": "fidelity", "value": r.value, "converged": r.converged}
    return {"kind": a.kind, **v.to_dict()}


# werner

def cmd_werner(a, out):
    if a.kind == "lp":
        sol = werner_lp.max_antisym_weight(a.n)
        return {"n": a.n, "p": [str(x) for x in sol.p], "objective": str(sol.objective),
                "e_n": werner_lp.e_antisym(a.n)}
    if a.kind == "series":
        rows = [(n, werner_lp.e_antisym(n)) for n in range(1, a.n + 1)]
        emit_csv(["n", "e_n"], rows, out)
        return None
    r = werner_lp.e_general(a.n, a.lam)
    res = {"n": a.n, "lambda": a.lam, "value": r.value, "p": list(r.p), "converged": r.converged,
           "kkt_residual": r.residual}
    if not r.converged:
        raise NotConverged(res)
    return res


# permute

def cmd_permute(a, out):
    if a.sweep:
        rows = []
        for alpha in np.linspace(0, 1, a.points):
            r = perm_distill.distillable_after_permutation(2, float(alpha))
            rows.append((float(alpha), r.D_before, r.D_after, r.info_loss, r.delta_D))
        emit_csv(["alpha", "D_before", "D_after", "delta_I", "delta_D"], rows, out)
        return None
    if a.n % 2:
        if a.n > 3:
            raise UsageError("odd n is only available through the explicit oracle (n = 3)")
        return perm_distill.oracle_report(a.n, a.alpha).to_dict()
    return perm_distill.distillable_after_permutation(a.n, a.alpha).to_dict()


# game

def _game(a):
    if a.game in games.GAMES:
        spec = games.GAMES[a.game]()
    else:
        try:
            with open(a.game) as fh:
                spec = games.GameSpec.from_json(json.load(fh))
        except OSError as exc:
            raise UsageError(f"unknown game {a.game!r}") from exc
    return spec.with_gamma(a.gamma) if a.gamma is not None else spec


def _strategy(text, kind):
    named = {"C": games.C, "D": games.D, "Q": games.Q, "M": games.M}
    if text in named:
        p = named[text]()
        if kind == "S1":
            return games.StrategyPoint("S1", (p.params[0],))
        if kind == "SU2":
            return games.StrategyPoint("SU2", (p.params[0], p.params[1], 0.0))
        return p
    return games.StrategyPoint(kind, tuple(_floats(text)))


def cmd_game(a, out):
    spec = _game(a)
    kind = a.set.upper()
    if a.kind == "payoff":
        sA, sB = _strategy(a.a, kind), _strategy(a.b, kind)
        pa, pb = games.payoff(spec, sA, sB)
        return {"game": spec.name, "gamma": spec.gamma, "payoffA": pa, "payoffB": pb}
    if a.kind == "nash":
        sA, sB = _strategy(a.a, kind), _strategy(a.b, kind)
        v = games.is_nash(spec, sA, sB, kind, a.grid)
        res = {"game": spec.name, "set": kind, "nash": v.nash, "payoffs": list(v.payoffs)}
        if not v.nash:
            res.update({"deviator": v.deviator, "deviation": list(v.deviation.params),
                        "deviation_payoff": v.deviation_payoff})
        return res
    if a.kind == "focal":
        pa, pb = games.focal_payoff(spec)
        return {"game": spec.name, "payoffA": pa, "payoffB": pb}
    rows = games.threshold_sweep(spec, np.linspace(0, math.pi / 2, a.points), a.grid)
    emit_csv(["gamma", "m"], rows, out)
    return None


# gate

def _protocol(name, seed):
    if name == "cnot":
        return nlgates.protocol_nonlocal_cnot(), nlgates.CNOT
    if name == "cu":
        U = states.haar_unitary(2, states.make_rng(seed))
        return nlgates.protocol_control_u(U), nlgates.controlled(U)
    if name == "swap":
        return nlgates.protocol_swap(), nlgates.SWAP
    if name == "toffoli":
        return nlgates.protocol_toffoli(), nlgates.controlled(nlgates.X, 2)
    if name.startswith("ncu:"):
        N = int(name.split(":")[1])
        U = states.haar_unitary(2, states.make_rng(seed))
        return nlgates.protocol_n_control_u(N, U), nlgates.controlled(U, N - 1)
    raise UsageError(f"unknown protocol {name!r}")


def cmd_gate(a, out):
    circ, ideal = _protocol(a.protocol, a.seed)
    if a.kind == "verify":
        eq = nlgates.channel_equivalence(circ, ideal)
        res = {"protocol": a.protocol, **circ.ledger().to_dict(), "equal": eq.equal,
               "worst_fidelity": eq.worst_fidelity, "branches": eq.branches}
        if eq.witness is not None:
            res["witness"] = list(eq.witness)
        return res
    k = len(circ.data_in)
    psi = np.zeros(2 ** k, complex)
    psi[0] = 1
    if a.input:
        psi = states.named_vector(a.input).amplitudes
    bs, led = nlgates.run(circ, psi)
    return {"protocol": a.protocol, "ledger": led.to_dict(),
            "branches": [{"transcript": b.transcript, "probability": b.probability} for b in bs.branches]}


# state

def cmd_state(a, out):
    rho = _load_state(a.state)
    res = {"state": a.state, "dims": list(rho.dims), "spectrum": list(rho.spectrum()),
           "entropy": qla.von_neumann_entropy(rho.matrix)}
    if a.matrix:
        res["matrix"] = qla.matrix_to_json(rho.matrix, rho.dims)
    return res


# repro

def cmd_repro(a, out):
    tid = a.target.lower()
    if tid in ("fig2.2", "fig-2.2"):
        rows = [(n, werner_lp.e_antisym(n)) for n in range(1, 8)]
        rows.append((40, werner_lp.e_antisym(40)))
        emit_csv(["n", "e_n"], rows, out)
    elif tid in ("fig5.2", "fig-5.2"):
        rows = []
        for alpha in np.linspace(0, 1, 101):
            r = perm_distill.distillable_after_permutation(2, float(alpha))
            rows.append((float(alpha), r.D_before, r.D_after, r.info_loss))
        emit_csv(["alpha", "D_before", "D_after", "delta_I"], rows, out)
    elif tid in ("fig6.7", "fig-6.7"):
        rows = games.threshold_sweep(games.prisoners_dilemma(), np.linspace(0, math.pi / 2, 41), 128)
        emit_csv(["gamma", "m"], rows, out)
    elif tid in ("table1", "table-1"):
        tab = schmidt.four_qubit_table(seed=a.seed)
        rows = [(name, b.split, b.lower, b.upper) for name, bs in tab.items() for b in bs]
        emit_csv(["state", "split", "lower", "upper"], rows, out)
    elif tid in ("table2", "table-2"):
        rows = [(lam, s, v) for lam, d in schmidt.ghz_mixture_table().items() for s, v in d.items()]
        emit_csv(["lambda", "split", "E_S"], rows, out)
    elif tid in ("appendixb", "appendix-b"):
        rows = []
        for n in range(1, 8):
            sol = werner_lp.max_antisym_weight(n)
            rows.append((n, " ".join(str(x) for x in sol.p)))
        emit_csv(["n", "p"], rows, out)
    else:
        raise UsageError(f"unknown target {a.target!r}")
    return None


def _command(sub, name, text):
    return sub.add_parser(name, help=text, description=text)


def build_parser():
    p = argparse.ArgumentParser(prog="entkit", description="Finite-dimensional entanglement workbench.")
    p.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="command", required=True)

    m = _command(sub, "measure", "entanglement monotones: negativity, concurrence, relative entropy, trace-norm and Schmidt measures")
    m.add_argument("kind", choices=["negativity", "logneg", "concurrence", "eof", "er", "et", "schmidt"])
    m.add_argument("--state", required=True, help="factory string such as ghz:3 or a matrix JSON file")
    m.add_argument("--cut", help="k (first k parties on side A) or a comma list of side-A parties")
    m.add_argument("--split", help="Schmidt-measure split such as (A1A2)A3")
    m.add_argument("--reference", default="separable", choices=["separable", "ppt"])
    m.add_argument("--tol", type=float, default=1e-4)
    m.set_defaults(func=cmd_measure)

    t = _command(sub, "transform", "pure-state LOCC and catalysed transformations: majorization, power sums, optimal fidelity")
    t.add_argument("kind", choices=["check", "catalyst", "obstruct", "fidelity"])
    t.add_argument("--from", dest="source", required=True, help="squared Schmidt coefficients")
    t.add_argument("--to", dest="target", required=True)
    t.add_argument("--catalyst")
    t.set_defaults(func=cmd_transform)

    w = _command(sub, "werner", "relative entropy of entanglement of Werner-state copies via exact linear programming")
    w.add_argument("kind", choices=["lp", "series", "general"])
    w.add_argument("--n", type=int, required=True)
    w.add_argument("--lam", type=float, default=0.0)
    w.set_defaults(func=cmd_werner)

    pm = _command(sub, "permute", "distillable entanglement after the order of the pairs is lost")
    pm.add_argument("sweep", nargs="?", choices=["sweep"])
    pm.add_argument("--n", type=int, default=2)
    pm.add_argument("--alpha", type=float, default=0.5)
    pm.add_argument("--points", type=int, default=101)
    pm.set_defaults(func=cmd_permute)

    g = _command(sub, "game", "quantized two-player games: payoffs, equilibria, entanglement threshold")
    g.add_argument("kind", choices=["payoff", "nash", "focal", "sweep"])
    g.add_argument("--game", default="pd", help="pd, chicken, or a JSON file with A, B tables")
    g.add_argument("--set", default="s2", choices=["s1", "s2", "su2"])
    g.add_argument("--gamma", type=float)
    g.add_argument("--a", default="Q", help="Alice: C, D, Q, M or comma-separated parameters")
    g.add_argument("--b", default="Q")
    g.add_argument("--grid", type=int, default=128)
    g.add_argument("--points", type=int, default=41)
    g.set_defaults(func=cmd_game)

    gt = _command(sub, "gate", "non-local gate protocols: branch-exact verification and resource ledgers")
    gt.add_argument("kind", choices=["verify", "trace"])
    gt.add_argument("--protocol", required=True, help="cnot, cu, swap, toffoli or ncu:N")
    gt.add_argument("--input", help="product basis string for trace, e.g. product:10")
    gt.set_defaults(func=cmd_gate)

    s = _command(sub, "state", "inspect a named or stored state: dimensions, spectrum, entropy")
    s.add_argument("--state", required=True)
    s.add_argument("--matrix", action="store_true")
    s.set_defaults(func=cmd_state)

    r = _command(sub, "repro", "regenerate data behind fig2.2, fig5.2, fig6.7, four_qubit_table, ghz_mixture_table, appendixB")
    r.add_argument("target")
    r.set_defaults(func=cmd_repro)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    threads = os.environ.get("ENTKIT_THREADS")
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        res = args.func(args, out)
    except NotConverged as exc:
        emit_json({**exc.payload, "seed": args.seed}, out)
        print("entkit: computation did not converge", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except (UsageError, states.BadParameter, states.BadPartition, schmidt.BadSplit, qla.NotHermitian,
            qla.NotPositive, qla.DimensionMismatch, transform.BadInput, games.BadParameter,
            perm_distill.DimensionTooLarge, ValueError) as exc:
        print(f"entkit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if res is not None:
        emit_json({**res, "seed": args.seed}, out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
