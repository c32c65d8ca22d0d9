"""Command-line driver: ``osdual <group> <action> [flags]``.

Every action runs one or more module operations and emits a report::

    {"command": ..., "params": {...},
     "checks": [{"name", "pass", "value", "expected", "tolerance"}, ...],
     "elapsed_ms": ...}

Exit status is 0 when every check passes, 1 when a check fails, 2 on a
usage error and 3 on an internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from fractions import Fraction

import numpy as np

from . import bargmann, counterexamples, os_core, path_measure, structure_data, su11
from .errors import OsdualError
from .numerics import DEFAULT_NODES

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _num(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


class Report:
    def __init__(self, command, params):
        self.command = command
        self.params = {k: _num(v) for k, v in params.items()}
        self.checks = []
        self.table = None

    def check(self, name, ok, value, expected, tolerance=0.0):
        self.checks.append({"name": name, "pass": bool(ok), "value": _num(value),
                            "expected": _num(expected), "tolerance": _num(tolerance)})

    def le(self, name, value, bound, tolerance=0.0):
        self.check(name, value <= bound + tolerance, value, f"<= {bound}", tolerance)

    @property
    def passed(self):
        return all(c["pass"] for c in self.checks)

    def to_dict(self, elapsed_ms):
        out = {"command": self.command, "params": self.params, "checks": self.checks}
        if elapsed_ms is not None:
            out["elapsed_ms"] = int(elapsed_ms)
        return out


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def _read_column(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return [float(row[0]) for row in csv.reader(fh) if row and row[0].strip()]


def _times(args):
    if args.times_file:
        return _read_column(args.times_file)
    if args.times:
        return _floats(args.times)
    raise UsageError("give --times or --times-file")


def _nodes(args):
    if args.nodes is not None:
        return args.nodes
    env = os.environ.get("OSDUAL_NODES")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise UsageError(f"OSDUAL_NODES must be an integer, got {env!r}") from exc
    return DEFAULT_NODES


def _rng(args, rep):
    rep.params["seed"] = args.seed
    return np.random.default_rng(args.seed)


# --------------------------------------------------------------------------
# os


def cmd_os_check(args, rep):
    with open(args.system, encoding="utf-8") as fh:
        system = os_core.system_from_json(fh.read())
    times = _floats(args.times) if args.times else [0.0, 0.5, 1.0]
    ax = os_core.check_axioms(system, times, args.tol or os_core.AXIOM_TOL)
    rep.le("reflection_residual", max(ax.reflection_residuals), ax.tolerance)
    rep.le("invariance_residual", max(ax.invariance_residuals), ax.tolerance)
    rep.check("positivity", ax.positivity.is_psd, ax.positivity.min_eigenvalue, ">= 0", ax.positivity.tolerance)
    if ax.positivity.is_psd:
        q = os_core.build_quotient(system)
        rep.check("quotient_dim", True, q.dim, q.dim)
        rep.check("null_dim", True, q.null_dim, q.null_dim)


def cmd_os_spectrum(args, rep):
    with open(args.system, encoding="utf-8") as fh:
        system = os_core.system_from_json(fh.read())
    q = os_core.build_quotient(system)
    times = _floats(args.times) if args.times else [0.1, 0.2]
    sp = os_core.induced_generator(system, q, times)
    tol = args.tol or 1e-6
    rep.le("time_disagreement", sp.disagreement, tol)
    for i, e in enumerate(sp.eigenvalues):
        rep.check(f"eigenvalue_{i}", e >= -1e-8, e, ">= 0")


def cmd_os_bound(args, rep):
    rng = _rng(args, rep)
    rep.params["trials"] = args.trials
    worst_gap, worst_law = -math.inf, 0.0
    for trial in range(args.trials):
        system, gamma = os_core.random_twisted_system(rng, 8, "unitary" if trial % 2 == 0 else "modes")
        q = os_core.build_quotient(system)
        op = os_core.induce_operator(system, q, gamma)
        worst_gap = max(worst_gap, op.j_norm - op.bound)
        pairs = [(1.0, -1.0)] if system.generator is None else [(0.3, 0.4), (0.5, 1.0)]
        worst_law = max(worst_law, os_core.semigroup_residual(system, pairs))
    rep.le("norm_minus_bound", worst_gap, 0.0, args.tol or 1e-8)
    rep.le("semigroup_law", worst_law, 1e-10)


def cmd_os_phillips(args, rep):
    theta = [int(v) for v in _floats(args.theta)]
    masses = _floats(args.masses) if args.masses else None
    ph = os_core.phillips_max_subspace(theta, masses)
    brute, _ = os_core.brute_force_max_positive(theta, masses)
    dim = ph.basis.shape[1]
    rep.check("dimension_matches_brute_force", dim == brute, dim, brute)
    rep.check("maximal", ph.maximal, ph.maximal, True)


def cmd_os_translation(args, rep):
    system = os_core.translation_system(args.points)
    ax = os_core.check_axioms(system, [1.0])
    rep.check("reflection_relation", ax.reflection_ok, max(ax.reflection_residuals), 0.0, ax.tolerance)
    rep.check("positivity", ax.positivity.is_psd, ax.positivity.min_eigenvalue, ">= 0")
    rep.check("invariance_fails", not ax.invariance_ok, max(ax.invariance_residuals), "> 0")


# --------------------------------------------------------------------------
# path


def cmd_path_covariance(args, rep):
    t = _times(args)
    _, r = path_measure.covariance_gram(t)
    rep.check("psd", r.is_psd, r.min_eigenvalue, ">= 0", r.tolerance)


def cmd_path_reflection(args, rep):
    t = _times(args)
    m, r = path_measure.reflection_gram(t)
    sv = np.linalg.svd(m, compute_uv=False)
    rep.check("psd", r.is_psd, r.min_eigenvalue, ">= 0", r.tolerance)
    rank = int(np.sum(sv > 1e-10 * sv[0]))
    rep.check("rank", rank == 1, rank, 1)


def cmd_path_schwinger(args, rep):
    t = _times(args)
    coeffs = _floats(args.coeffs) if args.coeffs else [1.0] * len(t)
    f = path_measure.TestFunction(t, coeffs)
    exact = path_measure.schwinger_functional(f)
    mc, se = path_measure.monte_carlo_schwinger(f, args.samples, args.seed)
    rep.params["seed"] = args.seed
    rep.check("monte_carlo_3sigma", abs(mc - exact) <= 3 * se, mc, exact, 3 * se)


def cmd_path_random(args, rep):
    rng = _rng(args, rep)
    rep.params["trials"] = args.trials
    worst_cov, worst_refl = math.inf, math.inf
    for _ in range(args.trials):
        t = rng.uniform(0.01, 5.0, int(rng.integers(1, 41)))
        worst_cov = min(worst_cov, path_measure.covariance_gram(t)[1].min_eigenvalue)
        worst_refl = min(worst_refl, path_measure.reflection_gram(t)[1].min_eigenvalue)
    tol = args.tol or 1e-10
    rep.check("covariance_min_eigenvalue", worst_cov >= -tol, worst_cov, ">= 0", tol)
    rep.check("reflection_min_eigenvalue", worst_refl >= -tol, worst_refl, ">= 0", tol)


# --------------------------------------------------------------------------
# su11


def _levels(args):
    if args.n < 1:
        raise UsageError("--n must be at least 1")


def _s(args):
    if not 0.02 <= args.s <= 0.98:
        raise UsageError("--s must lie in [0.02, 0.98]")
    return args.s


def cmd_su11_spectrum(args, rep):
    s = _s(args)
    _levels(args)
    system = su11.delta_os_system(s, args.n - 1)
    q = os_core.build_quotient(system)
    sp = os_core.induced_generator(system, q, (0.1, 0.2))
    expected = su11.dilation_spectrum(s, args.n - 1)
    tol = args.tol or 1e-6
    for i, (e, x) in enumerate(zip(sp.eigenvalues, expected)):
        rep.check(f"eigenvalue_{i}", abs(e - x) <= tol * max(1.0, x), e, x, tol)
    rep.le("time_disagreement", sp.disagreement, tol)


def cmd_su11_norms(args, rep):
    s = _s(args)
    _levels(args)
    q = os_core.build_quotient(su11.delta_os_system(s, args.n - 1))
    expected = su11.delta_norms_sq(s, args.n - 1)
    tol = args.tol or 1e-10
    off = np.abs(q.j_gram - np.diag(np.diag(q.j_gram))).max() / np.abs(q.j_gram).max()
    rep.le("offdiagonal", off, tol)
    for n, (v, x) in enumerate(zip(np.diag(q.j_gram).real, expected)):
        rep.check(f"norm_sq_{n}", abs(v - x) <= tol * abs(x), v, x, tol)


def cmd_su11_isometry(args, rep):
    s = _s(args)
    rng = _rng(args, rep)
    rule = su11.default_rule(_nodes(args))
    rep.params["nodes"] = len(rule)
    worst = 0.0
    for _ in range(args.pairs):
        f, g = (su11.GridFunction(rule, rng.standard_normal(len(rule)) + 1j * rng.standard_normal(len(rule)))
                for _ in range(2))
        lhs = su11.rkhs_inner(s, su11.intertwiner_u(s, f), su11.intertwiner_u(s, g))
        rhs = su11.j_form(s, f, g)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    rep.le("isometry", worst, args.tol or 1e-8)


def cmd_su11_intertwine(args, rep):
    s = _s(args)
    rule = su11.default_rule(_nodes(args), 0.5)
    f = su11.GridFunction.from_callable(lambda u: np.exp(-u * u) * (1 + u), rule)
    tol = args.tol or 1e-6
    for t in _floats(args.t):
        g = su11.dilation(t)
        lhs = su11.intertwiner_u(s, su11.pi_s_action(s, g, f))
        uf = su11.intertwiner_u(s, f)
        rhs = su11.rho_s_action(s, g, uf, degree=uf.degree)
        n = min(lhs.taylor.size, rhs.taylor.size)
        res = float(np.max(np.abs(lhs.taylor[:n] - rhs.taylor[:n])))
        rep.le(f"intertwining_t={t:g}", res, tol)


# --------------------------------------------------------------------------
# bargmann


def _bargmann_rule(args):
    return bargmann.line_rule(args.nodes or int(os.environ.get("OSDUAL_NODES", bargmann.DEFAULT_GRID_NODES)))


def cmd_bargmann_heat(args, rep):
    rule = _bargmann_rule(args)
    f = np.exp(-rule.nodes ** 2 / 2) * np.cos(rule.nodes)
    t1, t2 = args.t1, args.t2
    lhs = bargmann.heat_convolve(t1, bargmann.heat_convolve(t2, f, rule), rule)
    rhs = bargmann.heat_convolve(t1 + t2, f, rule)
    res = math.sqrt(abs(bargmann.l2_inner(rule, lhs - rhs, lhs - rhs)))
    rep.le("semigroup_law", res, args.tol or 1e-8)


def cmd_bargmann_unitary(args, rep):
    rule = _bargmann_rule(args)
    h = bargmann.hermite_functions(args.n, rule.nodes)
    c = bargmann.scaling_constant(rule)
    rep.check("scaling_constant", abs(abs(c) - 1.0) <= 1e-6, abs(c), 1.0, 1e-6)
    mat = np.array([bargmann.bargmann_transform(h[k], args.n, rule, args.method).coefficients for k in range(args.n + 1)])
    err = float(np.abs(mat / c - np.eye(args.n + 1)).max())
    rep.le("basis_correspondence", err, args.tol or 1e-6)


# --------------------------------------------------------------------------
# tube


def cmd_tube_table(args, rep):
    entries = structure_data.cayley_table()
    for e in entries:
        rep.check(f"{e.algebra}", e.holds, str(e.R), f"<= {e.l_pos_plus_rho}")
    rep.table = (structure_data.CSV_COLUMNS, structure_data.table_rows(args.n))
    rep.params["n"] = args.n


def cmd_tube_constants(args, rep):
    c = structure_data.tube_constants(args.family, args.rank)
    rep.params.update(family=args.family, rank=args.rank)
    rep.check("l_pos_plus_rho_equals_r", c.l_pos_plus_rho == c.r, c.l_pos_plus_rho, c.r)
    rep.table = (("r", "d", "gamma", "rho", "l_pos", "l_pos_plus_rho"),
                 [{"r": c.r, "d": c.d, "gamma": c.gamma, "rho": c.rho, "l_pos": c.l_pos,
                   "l_pos_plus_rho": c.l_pos_plus_rho}])


# --------------------------------------------------------------------------
# counter


def cmd_counter_axb(args, rep):
    pair = counterexamples.HardyPair.twisted(args.freqs)
    w = counterexamples.axb_positivity_falsifier(pair)
    rep.le("witness_ratio", w.ratio, -0.1)
    _, diag = counterexamples.diagonal_form(pair)
    rep.check("diagonal_psd", diag.is_psd, diag.min_eigenvalue, ">= 0", diag.tolerance)
    if args.csv:
        x = pair.grid()
        rep.table = (("x", "h_plus_re", "h_plus_im", "h_minus_re", "h_minus_im"),
                     [{"x": xi, "h_plus_re": a.real, "h_plus_im": a.imag, "h_minus_re": b.real,
                       "h_minus_im": b.imag} for xi, a, b in zip(x, w.h_plus, w.h_minus)])


def cmd_counter_projection(args, rep):
    xi = np.linspace(-args.extent, args.extent, args.points)
    mu = args.mu_re + 1j * args.mu_im * np.tanh(xi)
    r = counterexamples.projection_field_check(xi, mu)
    for name, v in r.residuals.items():
        rep.le(name, v, 1e-12)


def cmd_counter_heisenberg(args, rep):
    model = counterexamples.FiniteHeisenberg(args.size, 2)
    rng = _rng(args, rep)
    n = model.n
    phi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    psi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v = np.concatenate([np.kron(phi, [1.0, 0.5]), np.kron(psi, [0.3, 1.0])])
    k0 = counterexamples.invariant_closure(model, v[:, None])
    r = counterexamples.heisenberg_uncorrelated(model, k0)
    rep.le("subspace_angle", r.max_angle, args.tol or 1e-6)
    rep.le("d_invariance", r.d_invariance_residual, 1e-8)


def cmd_counter_sublaplacian(args, rep):
    rng = _rng(args, rep)
    worst_gap, worst_min = 0.0, math.inf
    for _ in range(args.probes):
        f = _random_probe(rng)
        r = counterexamples.sublaplacian_rp_form(f)
        worst_gap = max(worst_gap, r.relative_gap)
        worst_min = min(worst_min, r.reduced, r.direct)
    rep.le("relative_gap", worst_gap, args.tol or 1e-4)
    rep.check("nonnegative", worst_min >= 0, worst_min, ">= 0")


def _random_probe(rng, n_bumps=3):
    bumps = [(complex(rng.normal(), rng.normal()),
              counterexamples.bump(rng.uniform(-1, 1), rng.uniform(0.9, 1.4), rng.uniform(-1, 1),
                                   sx=rng.uniform(0.3, 0.7), sy=rng.uniform(0.1, 0.2), sc=rng.uniform(0.3, 0.6)))
             for _ in range(n_bumps)]
    return counterexamples.HeisenbergGridFunction.from_callable(
        lambda x, y, c: sum(a * b(x, y, c) for a, b in bumps), (-4.5, 4.5), (0.2, 2.5), (-4, 4))


# --------------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="osdual", description="Reflection positivity verification suite")
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--nodes", type=int, default=None)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="csv", action="store_false")
    fmt.add_argument("--csv", dest="csv", action="store_true")
    common.set_defaults(csv=None)
    common.add_argument("--out", default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--no-timing", action="store_true")
    groups = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def action(group, name, func, help_text):
        sp = group.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(func=func)
        return sp

    g = groups.add_parser("os").add_subparsers(dest="action", required=True, parser_class=_Parser)
    a = action(g, "check", cmd_os_check, "axioms and quotient of a JSON system")
    a.add_argument("--system", required=True)
    a.add_argument("--times")
    a = action(g, "spectrum", cmd_os_spectrum, "induced generator of a JSON system")
    a.add_argument("--system", required=True)
    a.add_argument("--times")
    a = action(g, "bound", cmd_os_bound, "norm bound on random twisted systems")
    a.add_argument("--trials", type=int, default=100)
    a = action(g, "phillips", cmd_os_phillips, "maximal positive subspace of an involution")
    a.add_argument("--theta", required=True)
    a.add_argument("--masses")
    a = action(g, "translation", cmd_os_translation, "translation semigroup on the line")
    a.add_argument("--points", type=int, default=32)

    g = groups.add_parser("path").add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name, func in (("covariance", cmd_path_covariance), ("reflection", cmd_path_reflection),
                       ("schwinger", cmd_path_schwinger)):
        a = action(g, name, func, f"{name} check on a time list")
        a.add_argument("--times")
        a.add_argument("--times-file")
        if name == "schwinger":
            a.add_argument("--coeffs")
            a.add_argument("--samples", type=int, default=1_000_000)
    a = action(g, "random", cmd_path_random, "random time sets")
    a.add_argument("--trials", type=int, default=50)

    g = groups.add_parser("su11").add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name, func in (("spectrum", cmd_su11_spectrum), ("norms", cmd_su11_norms),
                       ("isometry", cmd_su11_isometry), ("intertwine", cmd_su11_intertwine)):
        a = action(g, name, func, f"complementary series {name}")
        a.add_argument("--s", type=float, default=0.5)
        if name in ("spectrum", "norms"):
            a.add_argument("--n", type=int, default=6, help="number of delta levels")
        if name == "isometry":
            a.add_argument("--pairs", type=int, default=50)
        if name == "intertwine":
            a.add_argument("--t", default="0.1,0.5")

    g = groups.add_parser("bargmann").add_subparsers(dest="action", required=True, parser_class=_Parser)
    a = action(g, "heat", cmd_bargmann_heat, "heat semigroup law")
    a.add_argument("--t1", type=float, default=0.3)
    a.add_argument("--t2", type=float, default=0.7)
    a = action(g, "unitary", cmd_bargmann_unitary, "Hermite functions to monomials")
    a.add_argument("--n", type=int, default=12)
    a.add_argument("--method", choices=("kernel", "composition"), default="kernel")

    g = groups.add_parser("tube").add_subparsers(dest="action", required=True, parser_class=_Parser)
    a = action(g, "table", cmd_tube_table, "complementary series constants table")
    a.add_argument("--n", type=int, default=1)
    a = action(g, "constants", cmd_tube_constants, "constants of one tube family")
    a.add_argument("--family", required=True, choices=[f.value for f in structure_data.TubeFamily])
    a.add_argument("--rank", type=int, default=None)

    g = groups.add_parser("counter").add_subparsers(dest="action", required=True, parser_class=_Parser)
    a = action(g, "axb", cmd_counter_axb, "indefinite form on the Hardy pair")
    a.add_argument("--freqs", type=int, default=8)
    a = action(g, "projection", cmd_counter_projection, "projection field identities")
    a.add_argument("--mu-re", type=float, default=0.5)
    a.add_argument("--mu-im", type=float, default=1.0)
    a.add_argument("--extent", type=float, default=5.0)
    a.add_argument("--points", type=int, default=201)
    a = action(g, "heisenberg", cmd_counter_heisenberg, "split of an invariant subspace")
    a.add_argument("--size", type=int, default=8)
    a = action(g, "sublaplacian", cmd_counter_sublaplacian, "reflected sub-Laplacian form")
    a.add_argument("--probes", type=int, default=5)
    return p


def _render(rep, args, elapsed_ms):
    # tables default to CSV, everything else to JSON
    as_csv = args.csv if args.csv is not None else (rep.table is not None and args.group == "tube")
    if as_csv:
        buf = io.StringIO()
        if rep.table is not None:
            cols, rows = rep.table
            w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
            w.writeheader()
            for row in rows:
                w.writerow({k: str(v) for k, v in row.items()})
        else:
            w = csv.DictWriter(buf, fieldnames=("name", "pass", "value", "expected", "tolerance"), lineterminator="\n")
            w.writeheader()
            for c in rep.checks:
                w.writerow(c)
        return buf.getvalue()
    return json.dumps(rep.to_dict(elapsed_ms), sort_keys=False) + "\n"


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    start = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"osdual: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    params = {k: v for k, v in vars(args).items()
              if k not in ("func", "group", "action", "out", "csv", "no_timing", "seed") and v is not None}
    rep = Report(f"{args.group} {args.action}", params)
    try:
        args.func(args, rep)
    except UsageError as exc:
        print(f"osdual: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"osdual: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OsdualError as exc:
        rep.check(exc.code, False, str(exc), "no error")
    except Exception as exc:  # noqa: BLE001
        print(f"osdual: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    elapsed = None if args.no_timing else (time.perf_counter() - start) * 1000.0
    text = _render(rep, args, elapsed)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK if rep.passed else EXIT_FAIL


def main():
    sys.exit(run())
