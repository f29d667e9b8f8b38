"""Command-line front end.

Exit codes: 0 all tested properties hold, 1 a property failed, 2 usage or
configuration error, 3 inconclusive (aliasing-dominated numerics).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import shlex
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .boundary_lab import (
    BoundaryFunction,
    CharacterizedSpec,
    FunctionSpecError,
    characterized,
    eval_polynomial,
    make_function,
    parse_complex,
    parse_polynomial,
    random_charspec,
)
from .decomposition import (
    catalog_slice,
    charspec_error,
    radial_coeffs,
    recover_charspec,
    reconstruct,
    reduced_disc_function,
    slice_grid,
)
from .disc_analysis import IllConditioned, hyperbolic_family_test, polyanalytic_fit
from .geometry import GeometryError, ball_automorphism, random_ball_points, random_sphere_points, random_unitary, unitary_map
from .moments import DEFAULT_LINES, DEFAULT_M_MAX, DEFAULT_TOL, bundle_test
from .poisson import default_quadrature, extension, integral, invariant_laplacian_fd, kernel_invariance_defect
from .spectral import FAIL, INCONCLUSIVE, PASS

SCHEMA_VERSION = "1.0"
EXIT = {PASS: 0, FAIL: 1, INCONCLUSIVE: 3}
COMMANDS = ("test", "decompose", "disc-test", "poisson-check", "charspec-roundtrip")


class UsageError(Exception):
    pass


def parse_vertices(text: str) -> list[tuple[complex, complex]]:
    """``"0.3+0i,0; -0.2+0i,0"`` -> [(0.3, 0), (-0.2, 0)]."""
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise UsageError(f"malformed vertex {chunk!r}: expected 'z1,z2'")
        try:
            out.append((parse_complex(parts[0]), parse_complex(parts[1])))
        except FunctionSpecError as exc:
            raise UsageError(str(exc)) from None
    if not out:
        raise UsageError("empty vertex list")
    return out


def format_complex(c: complex) -> str:
    c = complex(c)
    sign = "-" if math.copysign(1.0, c.imag) < 0 else "+"
    return f"{c.real!r}{sign}{abs(c.imag)!r}i"


def format_vertices(vs) -> str:
    return "; ".join(f"{format_complex(a)},{format_complex(b)}" for a, b in vs)


def parse_centers(text: str) -> list[complex]:
    try:
        return [parse_complex(c) for c in text.split(";") if c.strip()]
    except FunctionSpecError as exc:
        raise UsageError(str(exc)) from None


@dataclass
class RunConfig:
    command: str
    function: str | None = None
    vertices: list = field(default_factory=list)
    lines: int = DEFAULT_LINES
    nodes: int | None = None
    m_max: int = DEFAULT_M_MAX
    tol: float = DEFAULT_TOL
    seed: int = 0
    out: str | None = None
    format: str = "json"
    workers: int | None = None
    numax: int = 16
    nu: int | None = None
    disc: str | None = None
    centers: list = field(default_factory=list)
    radii: int = 8
    spec: str | None = None
    degree: int = 4

    def to_argv(self) -> list[str]:
        argv = [self.command]
        defaults = RunConfig(self.command)
        for name, flag in _FLAGS.items():
            val = getattr(self, name)
            if val == getattr(defaults, name) or val is None:
                continue
            if name == "vertices":
                val = format_vertices(val)
            elif name == "centers":
                val = "; ".join(format_complex(c) for c in val)
            text = repr(val) if isinstance(val, float) else str(val)
            argv.append(f"{flag}={text}")  # "=" keeps values like "-0.2,0" from reading as flags
        return argv

    def echo(self) -> dict:
        d = asdict(self)
        d["vertices"] = [[[a.real, a.imag], [b.real, b.imag]] for a, b in self.vertices]
        d["centers"] = [[c.real, c.imag] for c in self.centers]
        return d


_FLAGS = {
    "function": "--function", "vertices": "--vertices", "lines": "--lines", "nodes": "--nodes",
    "m_max": "--mmax", "tol": "--tol", "seed": "--seed", "out": "--out", "format": "--format",
    "workers": "--workers", "numax": "--numax", "nu": "--nu", "disc": "--disc",
    "centers": "--centers", "radii": "--radii", "spec": "--spec", "degree": "--degree",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--function", help="modulus_sq | globevnik:k=3 | poly:EXPR | charspec:PATH")
    common.add_argument("--vertices", type=str, help='semicolon separated pairs, e.g. "0.3+0i,0; -0.2+0i,0"')
    common.add_argument("--lines", type=int, default=DEFAULT_LINES, help="lines per vertex")
    common.add_argument("--nodes", type=int, help="quadrature nodes per circle (power of two)")
    common.add_argument("--mmax", dest="m_max", type=int, default=DEFAULT_M_MAX)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="report path (stdout if omitted)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--workers", type=int, help="threads (default: $FORELLI_WORKERS or 1)")
    common.add_argument("--numax", type=int, default=16)
    common.add_argument("--nu", type=int)
    common.add_argument("--disc", help="disc function, polynomial in z and zbar")
    common.add_argument("--centers", type=str, help='hyperbolic centers, e.g. "0.2; -0.3i"')
    common.add_argument("--radii", type=int, default=8, help="hyperbolic radii per center")
    common.add_argument("--spec", help="characterized spec JSON (charspec-roundtrip)")
    common.add_argument("--degree", type=int, default=4)
    p = _Parser(prog="forelli", description="Holomorphic extendibility along bundles of complex lines.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in [
        ("test", "bundle test of a boundary function"),
        ("decompose", "angular slices and radial coefficients"),
        ("disc-test", "hyperbolic circle families and polyanalytic fit"),
        ("poisson-check", "invariant Poisson kernel and M-harmonicity suite"),
        ("charspec-roundtrip", "generate a characterized function and recover its coefficients"),
    ]:
        sub.add_parser(name, parents=[common], help=help_)
    return p


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    d = vars(ns)
    d["vertices"] = parse_vertices(d["vertices"]) if d.get("vertices") else []
    d["centers"] = parse_centers(d["centers"]) if d.get("centers") else []
    cfg = RunConfig(**d)
    if cfg.nodes is not None and (cfg.nodes < 16 or cfg.nodes & (cfg.nodes - 1)):
        raise UsageError("--nodes must be a power of two >= 16")
    return cfg


# -- commands -----------------------------------------------------------------

def _function(cfg: RunConfig, default: str | None = None) -> BoundaryFunction:
    spec = cfg.function or default
    if spec is None:
        raise UsageError("--function is required")
    try:
        return make_function(spec)
    except FunctionSpecError as exc:
        raise UsageError(str(exc)) from None


def cmd_test(cfg: RunConfig) -> dict:
    f = _function(cfg)
    if not cfg.vertices:
        raise UsageError("--vertices is required")
    rep = bundle_test(f, [np.array(v) for v in cfg.vertices], cfg.lines, cfg.m_max, cfg.nodes,
                      cfg.tol, cfg.seed, cfg.workers)
    d = rep.to_dict()
    rows = [["line", "m", "residual"]]
    for i, r in enumerate(rep.reports):
        for m, v in r.residuals.items():
            rows.append([i, m, repr(v)])
    return {
        "verdict": rep.verdict,
        "function": f.describe(),
        "collinear_vertex_set": rep.collinear,
        "max_residual": rep.max_residual,
        "reports": d["reports"],
        "worst_offender": d["worst_offender"],
        "_csv": rows,
    }


def _sphere_z1_grid(n_rad: int = 6, n_ang: int = 8) -> np.ndarray:
    s = np.linspace(0.1, 0.9, n_rad)
    return np.concatenate([x * np.exp(2j * np.pi * (np.arange(n_ang) + 0.5 * (i % 2)) / n_ang)
                           for i, x in enumerate(s)])


def cmd_decompose(cfg: RunConfig) -> dict:
    f = _function(cfg)
    z1 = _sphere_z1_grid()
    grid = slice_grid(f, z1, nu_max=cfg.numax, N=cfg.nodes)
    phis = np.exp(2j * np.pi * np.arange(8) / 8)
    err = 0.0
    for a, r in zip(grid.z1, grid.r):
        for ph in phis:
            z2 = r * ph
            err = max(err, abs(reconstruct(grid, (a, z2), cfg.numax) - complex(f(a, z2))))
    active = grid.active()
    radial = []
    for nu in active:
        try:
            sl = catalog_slice(f, nu)
        except ValueError:
            break
        radial.append(radial_coeffs(sl, z1[:8], nu, np.arange(-cfg.numax, cfg.numax + 1)).to_dict())
    verdict = PASS if err < 1e-10 else FAIL
    rows = grid.to_csv().splitlines()
    return {
        "verdict": verdict,
        "function": f.describe(),
        "active_slices": active,
        "reconstruction_error": err,
        "reports": [grid.to_dict()] + radial,
        "worst_offender": None,
        "_csv": [r.split(",") for r in rows],
    }


def cmd_disc_test(cfg: RunConfig) -> dict:
    if cfg.disc:
        try:
            poly = parse_polynomial(cfg.disc, ("z", "zbar"))
        except FunctionSpecError as exc:
            raise UsageError(str(exc)) from None

        def B(z):
            return eval_polynomial(poly, z, np.conj(z)) * np.ones(np.shape(z))
        nu = cfg.nu if cfg.nu is not None else max(k for _, k in poly)
        label = {"disc": cfg.disc}
    else:
        f = _function(cfg)
        if cfg.nu is None:
            raise UsageError("--nu is required with --function")
        nu = cfg.nu
        B = reduced_disc_function(f, nu)
        label = {"function": f.describe(), "slice": nu}
    centers = cfg.centers or [0.2 + 0j, -0.3j]
    r_grid = np.linspace(0.1, 0.9, cfg.radii)
    fams = [hyperbolic_family_test(B, c, nu, r_grid, tol=min(cfg.tol, 1e-9)) for c in centers]
    verdicts = [fam.verdict for fam in fams]
    try:
        fit = polyanalytic_fit(B, nu, poly_degree=max(cfg.degree, 0) + max(nu, 0))
        fit_d = {"order": nu, "residual": fit.residual, "condition": fit.condition,
                 "coeffs": [[[c.real, c.imag] for c in h] for h in fit.E.coeffs]}
    except IllConditioned as exc:
        fit_d = {"error": str(exc)}
    verdict = FAIL if FAIL in verdicts else INCONCLUSIVE if INCONCLUSIVE in verdicts else PASS
    worst = None
    rows = [["center_re", "center_im", "r_index", "m", "abs_coeff"]]
    for fam in fams:
        for i, rep in enumerate(fam.reports):
            for m, c in rep.coeffs.items():
                rows.append([repr(fam.center.real), repr(fam.center.imag), i, m, repr(abs(c))])
            if rep.verdict(fam.budget) != PASS and worst is None:
                worst = rep.to_dict()
    return {
        "verdict": verdict,
        "subject": label,
        "fit": fit_d,
        "reports": [fam.to_dict() for fam in fams],
        "worst_offender": worst,
        "_csv": rows,
    }


def cmd_poisson_check(cfg: RunConfig) -> dict:
    f = _function(cfg, "modulus_sq")
    rng = np.random.default_rng(cfg.seed)
    quad = default_quadrature()
    checks = []
    one = lambda a, b: np.ones(np.shape(a), complex)  # noqa: E731
    pts = random_ball_points(rng, 20, 0.7)
    norm_err = max(abs(integral(one, pts[:, i], quad).value - 1.0) for i in range(pts.shape[1]))
    checks.append({"name": "normalisation", "value": float(norm_err), "tol": 1e-9, "ok": bool(norm_err < 1e-9)})
    inv_err = 0.0
    for _ in range(200):
        z = random_ball_points(rng, 1, 0.8)[:, 0]
        xi = random_sphere_points(rng, 1)[:, 0]
        om = unitary_map(random_unitary(rng)).then(ball_automorphism(random_ball_points(rng, 1, 0.8)[:, 0]))
        inv_err = max(inv_err, float(kernel_invariance_defect(om, z, xi)))
    checks.append({"name": "kernel_invariance", "value": float(inv_err), "tol": 1e-11, "ok": bool(inv_err < 1e-11)})
    F = extension(f, quad)
    pts = random_ball_points(rng, 10, 0.6)
    lap = max(abs(invariant_laplacian_fd(F, pts[:, i], 1e-3)) for i in range(10))
    checks.append({"name": "m_harmonic", "value": float(lap), "tol": 1e-4, "ok": bool(lap < 1e-4)})
    verdict = PASS if all(c["ok"] for c in checks) else FAIL
    bad = [c for c in checks if not c["ok"]]
    return {
        "verdict": verdict,
        "function": f.describe(),
        "reports": checks,
        "worst_offender": bad[0] if bad else None,
        "_csv": [["check", "value", "tol", "ok"]] + [[c["name"], repr(c["value"]), c["tol"], c["ok"]] for c in checks],
    }


def cmd_charspec_roundtrip(cfg: RunConfig) -> dict:
    if cfg.spec:
        try:
            spec = CharacterizedSpec.from_json(json.loads(Path(cfg.spec).read_text()))
        except (OSError, json.JSONDecodeError, FunctionSpecError) as exc:
            raise UsageError(f"cannot load spec: {exc}") from None
    else:
        spec = random_charspec(np.random.default_rng(cfg.seed), min(cfg.numax, 6) if cfg.numax else 6, cfg.degree)
    nu_max = max(spec.nus) if spec.terms else 0
    degree = max(len(h) for h in spec.terms.values()) - 1 if spec.terms else 0
    f = characterized(spec)
    vertices = cfg.vertices or [(0.3 + 0j, 0j), (-0.2 + 0j, 0j)]
    rep = bundle_test(f, [np.array(v) for v in vertices], cfg.lines, cfg.m_max, cfg.nodes,
                      cfg.tol, cfg.seed, cfg.workers)
    rec = recover_charspec(f, nu_max, degree)
    err = charspec_error(spec, rec.spec)
    ok = err < 1e-6
    verdict = rep.verdict if rep.verdict != PASS else (PASS if ok else FAIL)
    return {
        "verdict": verdict,
        "spec": spec.to_json(),
        "recovered": rec.spec.to_json(),
        "recovery_relative_error": err,
        "forbidden_term_residual": rec.forbidden_residual,
        "negative_slice_max": rec.negative_slice_max,
        "bundle": {"verdict": rep.verdict, "max_residual": rep.max_residual,
                   "collinear_vertex_set": rep.collinear},
        "reports": [r.to_dict() for r in rep.reports],
        "worst_offender": rep.worst.to_dict() if rep.worst else None,
        "_csv": [["nu", "j", "p", "true_re", "true_im", "fit_re", "fit_im"]] + _charspec_rows(spec, rec.spec),
    }


def _charspec_rows(true: CharacterizedSpec, fitted: CharacterizedSpec) -> list:
    rows = []
    for (nu, j), h in true.terms.items():
        g = np.zeros(len(h), complex)
        got = np.asarray(fitted.terms.get((nu, j), []), complex)[:len(h)]
        g[:len(got)] = got
        for p, (a, b) in enumerate(zip(h, g)):
            a, b = complex(a), complex(b)
            rows.append([nu, j, p, repr(a.real), repr(a.imag), repr(b.real), repr(b.imag)])
    return rows


HANDLERS = {
    "test": cmd_test,
    "decompose": cmd_decompose,
    "disc-test": cmd_disc_test,
    "poisson-check": cmd_poisson_check,
    "charspec-roundtrip": cmd_charspec_roundtrip,
}


def build_report(cfg: RunConfig) -> dict:
    t0 = time.perf_counter()
    body = HANDLERS[cfg.command](cfg)
    body.pop("_csv", None)
    return _assemble(cfg, body, t0)


def _assemble(cfg: RunConfig, body: dict, t0: float) -> dict:
    report = {
        "schema_version": SCHEMA_VERSION,
        "header": {"runtime_ms": round(1000 * (time.perf_counter() - t0), 3),
                   "created": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())},
        "command": cfg.command,
        "config_echo": cfg.echo(),
        "verdict": body.pop("verdict"),
        "reports": body.pop("reports"),
        "worst_offender": body.pop("worst_offender"),
    }
    report["details"] = body
    return report


def report_body(report: dict) -> dict:
    """The report without the timing header, for determinism comparisons."""
    return {k: v for k, v in report.items() if k != "header"}


def _write(cfg: RunConfig, report: dict, rows) -> None:
    if cfg.format == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps(report, indent=2) + "\n"
    if cfg.out:
        try:
            Path(cfg.out).write_text(text)
        except OSError as exc:
            raise UsageError(f"cannot write {cfg.out}: {exc}") from None
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = parse_config(argv)
        t0 = time.perf_counter()
        body = HANDLERS[cfg.command](cfg)
        rows = body.pop("_csv")
        report = _assemble(cfg, body, t0)
        _write(cfg, report, rows)
    except UsageError as exc:
        print(f"forelli: error: {exc}", file=sys.stderr)
        return 2
    except (GeometryError, FunctionSpecError) as exc:
        print(f"forelli: error: {exc}", file=sys.stderr)
        return 2
    print(f"{cfg.command}: {report['verdict']}", file=sys.stderr)
    return EXIT[report["verdict"]]


def main() -> None:
    sys.exit(run())


def command_line(cfg: RunConfig) -> str:
    return " ".join(shlex.quote(a) for a in ["forelli"] + cfg.to_argv())
