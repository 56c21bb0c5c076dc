"""Command-line front end.

Verbs:
  verify    run the algebraic-relation residual suites (ybe, rll, tcommute,
            charges, hrel, all)
  spectrum  exact-diagonalization spectrum as CSV
  bae       solve the rapidity equations, cross-check against the spectrum,
            emit CSV rows and a JSON report
  fig2      ground-state scan E0/mu1 versus mu2/mu1 for the reference
            non-integrable parameter set, as CSV
  identify  map physical couplings to the integrable family, report as JSON

Configs are single JSON documents; numbers are printed with 17 significant
digits so CSV output is byte-deterministic for a fixed config and seed.
Exit codes: 0 success/all-pass, 1 validation or integrability failure,
2 numerical-threshold failure.
"""

import argparse
import io
import json
import sys

import numpy as np

from . import bethe, fock, model, yangbaxter
from .model import ModelParams
from .yangbaxter import IntegrableParams, default_integrable_params

SPECTRUM_DIM_CAP = 50000
SUITES = ("ybe", "rll", "tcommute", "charges", "hrel")


def _fmt(x) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------

def _load_json(path, errors):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        errors.append(f"config {path}: {exc}")
        return {}
    if not isinstance(cfg, dict):
        errors.append(f"config {path}: top level must be a JSON object")
        return {}
    return cfg


def _model_from_config(cfg, errors):
    """Returns ('integrable', IntegrableParams) or ('physical', ModelParams)."""
    block = cfg.get("model")
    if block is None:
        errors.append("config: missing 'model' block")
        return None
    kind = block.get("kind")
    if kind not in ("integrable", "physical"):
        errors.append(f"config: model.kind must be 'integrable' or 'physical', got {kind!r}")
        return None
    fields = {
        "integrable": ("n_levels", "eta", "omega", "s", "t", "alpha"),
        "physical": ("n_levels", "U_aa", "U_bb", "U_ab", "mu", "eps_a", "eps_b", "Omega"),
    }[kind]
    missing = [f for f in fields if f not in block]
    if missing:
        errors.append(f"config: model block missing fields {missing}")
        return None
    try:
        if kind == "integrable":
            params = IntegrableParams(
                n_levels=int(block["n_levels"]),
                eta=block["eta"],
                omega=block["omega"],
                s=block["s"],
                t=block["t"],
                alpha=block["alpha"],
                u=block.get("u", 0.0),
            )
        else:
            params = ModelParams(
                n_levels=int(block["n_levels"]),
                U_aa=block["U_aa"],
                U_bb=block["U_bb"],
                U_ab=block["U_ab"],
                mu=block["mu"],
                eps_a=block["eps_a"],
                eps_b=block["eps_b"],
                Omega=block["Omega"],
            )
    except (ValueError, TypeError) as exc:
        errors.append(f"config: invalid model parameters: {exc}")
        return None
    return kind, params


def _atoms_from(cfg, args, errors, default=(1,)):
    raw = None
    if args.atoms is not None:
        raw = args.atoms
    elif "n_atoms" in cfg:
        raw = cfg["n_atoms"]
    if raw is None:
        return list(default)
    if isinstance(raw, str):
        raw = raw.split(",")
    try:
        atoms = [int(x) for x in raw]
    except (TypeError, ValueError):
        errors.append(f"invalid atom list {raw!r}")
        return list(default)
    bad = [a for a in atoms if a < 0]
    if bad:
        errors.append(f"atom numbers must be >= 0, got {bad}")
    return atoms


def _echo_model(kind, params):
    if kind == "integrable":
        return {
            "kind": "integrable",
            "n_levels": params.n_levels,
            "eta": params.eta,
            "omega": params.omega.tolist(),
            "s": params.s.tolist(),
            "t": params.t.tolist(),
            "alpha": params.alpha,
            "u": [params.u.real, params.u.imag],
        }
    return {
        "kind": "physical",
        "n_levels": params.n_levels,
        "U_aa": params.U_aa.tolist(),
        "U_bb": params.U_bb.tolist(),
        "U_ab": params.U_ab.tolist(),
        "mu": params.mu.tolist(),
        "eps_a": params.eps_a.tolist(),
        "eps_b": params.eps_b.tolist(),
        "Omega": params.Omega.tolist(),
    }


def _report_json(command, config_echo, results, residual_summary):
    return json.dumps(
        {
            "command": command,
            "config_echo": config_echo,
            "results": results,
            "residual_summary": residual_summary,
        },
        indent=2,
        sort_keys=True,
    )


def _write_text(path, text):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _fail_validation(errors):
    for err in errors:
        print(f"error: {err}", file=sys.stderr)
    return 1


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _draw_away_from_poles(rng, eta):
    while True:
        u = complex(rng.uniform(-3.5, 3.5), rng.uniform(-3.5, 3.5))
        v = complex(rng.uniform(-3.5, 3.5), rng.uniform(-3.5, 3.5))
        if min(abs(u + eta), abs(v + eta), abs(u - v + eta)) > 0.05:
            return u, v


def _suite_ybe(seed):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(100):
        eta = rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 3.0)
        u, v = _draw_away_from_poles(rng, eta)
        worst = max(worst, yangbaxter.ybe_residual(u, v, eta))
    return [("ybe 100 draws", worst, 1e-12)]


def _random_ip(rng, n):
    while True:
        s = rng.standard_normal(n)
        t = rng.standard_normal(n)
        if abs(np.dot(s, t)) > 0.2:
            return IntegrableParams(n, 1.0, np.ones(n), s, t, alpha=1.0)


def _suite_rll(seed, levels=(1, 2, 3), cutoff=4, draws=20):
    rng = np.random.default_rng(seed)
    checks = []
    for n in levels:
        worst = 0.0
        for _ in range(draws):
            ip = _random_ip(rng, n)
            u, v = _draw_away_from_poles(rng, ip.eta)
            worst = max(worst, yangbaxter.rll_residual(u, v, ip, cutoff))
        checks.append((f"rll n={n} {draws} draws", worst, 1e-12))
        control = yangbaxter.rll_residual(
            0.9, -0.4, default_integrable_params(n), cutoff, zeta_shift=0.1
        )
        checks.append((f"rll n={n} zeta-shift control (>= 1e-3)", control, None, control >= 1e-3))
    return checks


def _suite_tcommute(seed, n=2, atoms=(1, 2, 3, 4), draws=20):
    rng = np.random.default_rng(seed)
    ip = default_integrable_params(n)
    checks = []
    for N in atoms:
        sector = fock.enumerate_sector(n, N)
        worst = 0.0
        for _ in range(draws):
            u = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
            v = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
            worst = max(worst, yangbaxter.transfer_commutator_residual(u, v, ip, sector))
        checks.append((f"tcommute n={n} N={N} {draws} pairs", worst, 1e-10))
    return checks


def _suite_charges(seed, n=2, atoms=(1, 2, 3)):
    rng = np.random.default_rng(seed)
    ip = default_integrable_params(n)
    checks = []
    for N in atoms:
        sector = fock.enumerate_sector(n, N)
        C0, C1, C2 = yangbaxter.conserved_charges(ip, sector)
        eye = np.eye(sector.dim)
        c1_gap = float(np.max(np.abs(C1.toarray() - ip.eta * N * eye)))
        c2_gap = float(np.max(np.abs(C2.toarray() - eye)))
        worst = 0.0
        for u in rng.uniform(-2, 2, size=3):
            recon = (u * u) * C2 + u * C1 + C0
            gap = yangbaxter.transfer_matrix(u, ip, sector) - recon
            worst = max(worst, 0.0 if gap.nnz == 0 else float(np.max(np.abs(gap.data))))
        comm = 0.0
        for A, B in ((C0, C1), (C0, C2), (C1, C2)):
            g = A @ B - B @ A
            comm = max(comm, 0.0 if g.nnz == 0 else float(np.max(np.abs(g.data))))
        checks.append((f"charges n={n} N={N} reconstruction", worst, 1e-12))
        checks.append((f"charges n={n} N={N} commutators", comm, 1e-12))
        checks.append((f"charges n={n} N={N} C1=etaN, C2=I", max(c1_gap, c2_gap), 0.0))
    return checks


def _suite_hrel(seed, levels=(1, 2, 3), atoms=(0, 1, 2, 3, 4)):
    rng = np.random.default_rng(seed)
    checks = []
    for n in levels:
        ips = [default_integrable_params(n), _random_ip(rng, n)]
        for N in atoms:
            sector = fock.enumerate_sector(n, N)
            worst = 0.0
            for ip in ips:
                h_t = yangbaxter.hamiltonian_from_transfer(ip, sector)
                h_m = model.build_hamiltonian(yangbaxter.identify_parameters(ip), sector)
                gap = h_t - h_m
                worst = max(worst, 0.0 if gap.nnz == 0 else float(np.max(np.abs(gap.data))))
            checks.append((f"hrel n={n} N={N}", worst, 1e-12))
    return checks


def cmd_verify(args) -> int:
    suites = SUITES if args.suite == "all" else (args.suite,)
    levels = (args.n,) if args.n else None
    errors = []
    atoms = _atoms_from({}, args, errors, default=()) or None
    if errors:
        return _fail_validation(errors)
    args.seed = 0 if args.seed is None else args.seed

    checks = []
    for suite in suites:
        if suite == "ybe":
            checks += _suite_ybe(args.seed)
        elif suite == "rll":
            checks += _suite_rll(args.seed, levels=levels or (1, 2, 3))
        elif suite == "tcommute":
            checks += _suite_tcommute(args.seed, n=args.n or 2, atoms=atoms or (1, 2, 3, 4))
        elif suite == "charges":
            checks += _suite_charges(args.seed, n=args.n or 2, atoms=atoms or (1, 2, 3))
        elif suite == "hrel":
            checks += _suite_hrel(args.seed, levels=levels or (1, 2, 3), atoms=atoms or (0, 1, 2, 3, 4))

    all_pass = True
    results = []
    for check in checks:
        if len(check) == 4:
            name, value, threshold, passed = check
            thr_text = "control"
        else:
            name, value, threshold = check
            passed = value <= threshold
            thr_text = f"threshold {threshold:g}"
        all_pass &= passed
        status = "PASS" if passed else "FAIL"
        print(f"{name}: max residual {value:.3e} ({thr_text}) {status}")
        results.append({"check": name, "residual": value, "pass": bool(passed)})

    if args.out:
        summary = {
            "max_residual": max((r["residual"] for r in results), default=0.0),
            "n_checks": len(results),
            "n_failed": sum(not r["pass"] for r in results),
        }
        _write_text(
            args.out,
            _report_json("verify", {"suite": args.suite, "seed": args.seed}, results, summary)
            + "\n",
        )
    return 0 if all_pass else 2


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

def _physical_params(kind, params, errors):
    if kind == "physical":
        return params
    return yangbaxter.identify_parameters(params)


def cmd_spectrum(args) -> int:
    errors = []
    cfg = _load_json(args.config, errors) if args.config else {}
    if args.config:
        parsed = _model_from_config(cfg, errors)
    else:
        parsed = ("integrable", default_integrable_params(args.n or 2))
    atoms = _atoms_from(cfg, args, errors)
    if errors or parsed is None:
        return _fail_validation(errors)
    kind, params = parsed
    mp = _physical_params(kind, params, errors)

    for N in atoms:
        d = fock.dimension(mp.n_levels, N)
        if d > SPECTRUM_DIM_CAP:
            errors.append(
                f"sector n={mp.n_levels}, N={N} has dimension {d} > cap {SPECTRUM_DIM_CAP}"
            )
    if errors:
        return _fail_validation(errors)

    buf = io.StringIO()
    buf.write("n_atoms,index,eigenvalue\n")
    for N in atoms:
        sector = fock.enumerate_sector(mp.n_levels, N)
        spectrum = model.eigensolve(model.build_hamiltonian(mp, sector))
        for i, val in enumerate(spectrum.eigenvalues):
            buf.write(f"{N},{i},{_fmt(val)}\n")
    _write_text(args.out, buf.getvalue())
    return 0


# ---------------------------------------------------------------------------
# bae
# ---------------------------------------------------------------------------

def cmd_bae(args) -> int:
    errors = []
    cfg = _load_json(args.config, errors) if args.config else {}
    if args.config:
        parsed = _model_from_config(cfg, errors)
    else:
        parsed = ("integrable", default_integrable_params(args.n or 2))
    atoms = _atoms_from(cfg, args, errors)
    budget = args.budget if args.budget is not None else cfg.get("budget")
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    if errors or parsed is None:
        return _fail_validation(errors)
    kind, params = parsed

    if kind == "physical":
        report = yangbaxter.validate_model(params)
        if not report.integrable:
            payload = {
                "integrable": False,
                "violations": [
                    {"constraint": c, "lhs": l, "rhs": r} for c, l, r in report.violations
                ],
            }
            print(
                _report_json("bae", _echo_model(kind, params), payload, {}),
                file=sys.stderr,
            )
            print("error: physical couplings are not integrable", file=sys.stderr)
            return 1
        ip = report.derived
    else:
        ip = params
    if "u" in cfg:
        ip.u = complex(cfg["u"])

    rows = ["solution_id,root_index,re_v,im_v,energy,bae_residual,eigvec_residual,matched_eigenvalue,delta"]
    sol_json = []
    summary = {
        "attempts": 0,
        "converged": 0,
        "unique": 0,
        "matched": 0,
        "spectrum_levels": 0,
        "max_bae_residual": 0.0,
        "max_eigvec_residual": 0.0,
        "max_matched_delta": 0.0,
    }
    for N in atoms:
        result = bethe.solve_bae(ip, N, budget=budget, seed=seed)
        sector = fock.enumerate_sector(ip.n_levels, N)
        spectrum = model.eigensolve(
            model.build_hamiltonian(yangbaxter.identify_parameters(ip), sector)
        )
        match = bethe.match_spectrum(result.solutions, spectrum, tol=1e-8)
        summary["attempts"] += result.attempts
        summary["converged"] += result.converged
        summary["unique"] += result.unique
        summary["matched"] += match.n_matched
        summary["spectrum_levels"] += match.n_eigenvalues
        summary["max_matched_delta"] = max(summary["max_matched_delta"], match.max_matched_delta)
        for sid, sol in enumerate(result.solutions):
            eig_res = max(sol.h_residual or 0.0, sol.t_residual or 0.0)
            summary["max_bae_residual"] = max(summary["max_bae_residual"], sol.residual)
            summary["max_eigvec_residual"] = max(summary["max_eigvec_residual"], eig_res)
            matched = "" if sol.matched_eigenvalue is None else _fmt(sol.matched_eigenvalue)
            delta = (
                ""
                if sol.matched_eigenvalue is None
                else _fmt(abs(sol.energy.real - sol.matched_eigenvalue))
            )
            common = f"{_fmt(sol.energy.real)},{_fmt(sol.residual)},{_fmt(eig_res)},{matched},{delta}"
            if N == 0:
                rows.append(f"{N}_{sid},-1,,,{common}")
            for ri, root in enumerate(sol.roots):
                rows.append(f"{N}_{sid},{ri},{_fmt(root.real)},{_fmt(root.imag)},{common}")
            sol_json.append(
                {
                    "n_atoms": N,
                    "solution_id": f"{N}_{sid}",
                    "roots": [[r.real, r.imag] for r in sol.roots],
                    "energy": [sol.energy.real, sol.energy.imag],
                    "bae_residual": sol.residual,
                    "h_residual": sol.h_residual,
                    "t_residual": sol.t_residual,
                    "matched_eigenvalue": sol.matched_eigenvalue,
                    "near_eval_pole": sol.near_eval_pole,
                }
            )

    csv_text = "\n".join(rows) + "\n"
    report_text = _report_json(
        "bae",
        {"model": _echo_model("integrable", ip), "n_atoms": atoms, "seed": seed, "budget": budget},
        {"solutions": sol_json},
        summary,
    )
    if args.out:
        _write_text(args.out, csv_text)
        print(report_text)
    else:
        sys.stdout.write(csv_text)
        print(f"solutions: {summary['unique']}, matched: {summary['matched']}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# fig2
# ---------------------------------------------------------------------------

def scan_params(mu2: float, mu1: float = 1.0) -> ModelParams:
    """Reference two-level parameter set for the ground-state scan:
    U_ppjj = U_abjk = 1, U_pp12 = 2, eps_a = (-2, 2), eps_b = (1, -1),
    Omega_jk = 1/2, mu = (mu1, mu2).  Not integrable for generic mu2."""
    return ModelParams(
        n_levels=2,
        U_aa=[[1.0, 2.0], [2.0, 1.0]],
        U_bb=[[1.0, 2.0], [2.0, 1.0]],
        U_ab=[[1.0, 1.0], [1.0, 1.0]],
        mu=[mu1, mu2],
        eps_a=[-2.0, 2.0],
        eps_b=[1.0, -1.0],
        Omega=[[0.5, 0.5], [0.5, 0.5]],
    )


def _parse_grid(text, errors):
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError:
        errors.append(f"invalid grid {text!r}: expected start:stop:step")
        return []
    if step <= 0 or stop < start:
        errors.append(f"invalid grid {text!r}: need step > 0 and stop >= start")
        return []
    count = int(round((stop - start) / step)) + 1
    return [start + k * step for k in range(count) if start + k * step <= stop + 1e-12]


def cmd_fig2(args) -> int:
    errors = []
    atoms = _atoms_from({}, args, errors, default=(1, 2, 3, 4))
    grid = _parse_grid(args.grid, errors)
    mu1 = args.mu1
    if mu1 == 0.0:
        errors.append("mu1 must be nonzero (output is normalized by it)")
    if errors:
        return _fail_validation(errors)

    buf = io.StringIO()
    buf.write("N,mu2_over_mu1,E0_over_mu1\n")
    for N in atoms:
        sector = fock.enumerate_sector(2, N)
        for x in grid:
            mp = scan_params(mu2=x * mu1, mu1=mu1)
            if args.force_bae:
                report = yangbaxter.validate_model(mp)
                if not report.integrable:
                    payload = {
                        "integrable": False,
                        "violations": [
                            {"constraint": c, "lhs": l, "rhs": r}
                            for c, l, r in report.violations
                        ],
                    }
                    print(
                        _report_json("fig2", {"mu2_over_mu1": x, "N": N}, payload, {}),
                        file=sys.stderr,
                    )
                    print(
                        "error: --force-bae requires integrable couplings", file=sys.stderr
                    )
                    return 1
                result = bethe.solve_bae(
                    report.derived,
                    N,
                    budget=args.budget,
                    seed=0 if args.seed is None else args.seed,
                )
                if not result.solutions:
                    print("error: no rapidity solutions found", file=sys.stderr)
                    return 2
                e0 = min(sol.energy.real for sol in result.solutions)
            else:
                spectrum = model.eigensolve(model.build_hamiltonian(mp, sector))
                e0 = float(spectrum.eigenvalues[0])
            buf.write(f"{N},{_fmt(x)},{_fmt(e0 / mu1)}\n")
    _write_text(args.out, buf.getvalue())
    return 0


# ---------------------------------------------------------------------------
# identify
# ---------------------------------------------------------------------------

def cmd_identify(args) -> int:
    errors = []
    cfg = _load_json(args.config, errors) if args.config else {}
    if not args.config:
        errors.append("identify requires --config with a physical model block")
    parsed = _model_from_config(cfg, errors) if not errors else None
    if errors or parsed is None:
        return _fail_validation(errors)
    kind, params = parsed
    if kind != "physical":
        return _fail_validation(["identify requires model.kind == 'physical'"])

    report = yangbaxter.validate_model(params)
    results = {
        "integrable": report.integrable,
        "violations": [
            {"constraint": c, "lhs": l, "rhs": r} for c, l, r in report.violations
        ],
        "derived": _echo_model("integrable", report.derived) if report.derived else None,
    }
    text = _report_json("identify", _echo_model(kind, params), results, {})
    print(text)
    if args.out:
        _write_text(args.out, text + "\n")
    return 0 if report.integrable else 1


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _add_common(p, atoms_default=None):
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--n", type=int, help="number of on-well levels")
    p.add_argument("--atoms", help="comma-separated total atom numbers")
    p.add_argument("--seed", type=int, help="random seed (default 0)")
    p.add_argument("--budget", type=int, help="solver attempts per atom number")
    p.add_argument("--out", help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twowell",
        description="Two-well multi-state boson models: spectra, integrable-structure checks, rapidity equations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run algebraic-relation residual suites")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("spectrum", help="exact-diagonalization spectrum as CSV")
    _add_common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("bae", help="solve the rapidity equations and cross-check")
    _add_common(p)
    p.set_defaults(func=cmd_bae)

    p = sub.add_parser("fig2", help="ground-state scan E0/mu1 vs mu2/mu1 as CSV")
    _add_common(p)
    p.add_argument("--grid", default="0:5:0.05", help="mu2/mu1 grid start:stop:step")
    p.add_argument("--mu1", type=float, default=1.0, help="normalizing potential")
    p.add_argument("--force-bae", action="store_true", dest="force_bae",
                   help="use the rapidity-equation path (requires integrable couplings)")
    p.set_defaults(func=cmd_fig2)

    p = sub.add_parser("identify", help="check couplings against the integrable family")
    _add_common(p)
    p.set_defaults(func=cmd_identify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
