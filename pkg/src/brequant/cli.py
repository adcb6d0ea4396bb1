"""Command-line front end: design, sweep, eval and staircase commands.

Exit codes: 0 success, 2 invalid configuration or input file, 3 a design
did not converge (output files are still written).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from importlib import metadata
from pathlib import Path

import numpy as np

from .analysis import loglog_slope, sweep
from .exceptions import BREQuantError, DomainError, InsufficientDataError
from .models import BinaryGaussianModel, DetectionModel, ExponentialTernaryModel, model_from_params
from .quantizer_scalar import ScalarQuantizer, design_minimax, max_divergence, quantize
from .quantizer_simplex import CellPolygon, SimplexQuantizer, design_minimax_simplex, quantize_simplex

log = logging.getLogger("brequant")

EXIT_OK, EXIT_CONFIG, EXIT_NOT_CONVERGED = 0, 2, 3
BINARY_STEP = 1e-3
TERNARY_STEP = 5e-3


class ConfigError(Exception):
    """Invalid command-line configuration or input file."""


def tool_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        from . import __version__
        return __version__


# -- serialisation -------------------------------------------------------------

def fmt(x: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("non-finite number cannot be serialised")
    return f"{x:.17g}"


def _dumps(obj, indent: int = 0) -> str:
    """JSON text with every float written at 17 significant digits."""
    pad, inner = " " * indent, " " * (indent + 2)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_dumps(v, indent + 2)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if all(isinstance(v, (int, float, np.floating, np.integer)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_dumps(v) for v in obj) + "]"
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(inner + _dumps(v, indent + 2) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if obj is None:
        return "null"
    return json.dumps(obj)


def write_json(path: Path, obj) -> None:
    path.write_text(_dumps(obj) + "\n", encoding="utf-8", newline="\n")


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def quantizer_to_json(model: DetectionModel, q, report) -> dict:
    out = {"model": model.params(), "M": model.M, "K": q.K}
    if model.M == 2:
        out["weights"] = [[float(a)] for a in q.weights]
        out["boundaries"] = [float(b) for b in q.boundaries]
    else:
        out["weights"] = [[float(v) for v in s] for s in q.seeds]
        out["cells"] = [{"seed": [float(v) for v in q.seeds[c.seed_index]],
                         "vertices": [[float(v) for v in p] for p in c.vertices]} for c in q.cells]
    out["max_divergence"] = float(report.max_divergence)
    out["converged"] = bool(report.converged)
    out["iterations"] = int(report.iterations)
    out["tool_version"] = tool_version()
    return out


@dataclass
class LoadedQuantizer:
    model: DetectionModel
    quantizer: object
    stored_max_divergence: float

    def recomputed_max_divergence(self) -> float:
        m, q = self.model, self.quantizer
        if m.M == 2:
            return max_divergence(m, q)[0]
        vals = [np.max(m.divergence(c.vertices, q.seeds[c.seed_index])) for c in q.cells if not c.is_empty]
        return float(max(vals))


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def quantizer_from_json(doc: dict) -> LoadedQuantizer:
    """Validate and load a quantizer document written by ``design``."""
    _require(isinstance(doc, dict), "quantizer file must hold a JSON object")
    for key in ("model", "M", "K", "weights", "max_divergence", "converged", "iterations", "tool_version"):
        _require(key in doc, f"quantizer file lacks the {key!r} field")
    try:
        model = model_from_params(doc["model"])
    except (BREQuantError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad model block: {exc}") from exc
    M, K = doc["M"], doc["K"]
    _require(M == model.M, "field 'M' disagrees with the model")
    _require(isinstance(K, int) and K >= 1, "field 'K' must be a positive integer")
    W = np.asarray(doc["weights"], dtype=float)
    _require(W.shape == (K, M - 1), f"'weights' must have shape ({K}, {M - 1})")
    try:
        if M == 2:
            _require("boundaries" in doc, "binary quantizer needs 'boundaries'")
            q = ScalarQuantizer(W[:, 0], np.asarray(doc["boundaries"], dtype=float))
            _require(q.is_interleaved(), "weights and boundaries must interleave on [0, 1]")
        else:
            _require("cells" in doc and len(doc["cells"]) == K, "ternary quantizer needs K 'cells'")
            cells = []
            for k, c in enumerate(doc["cells"]):
                seed = np.asarray(c["seed"], dtype=float)
                _require(np.allclose(seed, W[k], rtol=0, atol=0), "cell seeds must equal the weights")
                verts = np.asarray(c["vertices"], dtype=float).reshape(-1, 2)
                cells.append(CellPolygon(k, verts))
            q = SimplexQuantizer(model, W, cells)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed quantizer: {exc}") from exc
    return LoadedQuantizer(model, q, float(doc["max_divergence"]))


# -- argument handling -------------------------------------------------------------

def _int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return v


def _k_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(t) for t in text.split(".."))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo..hi, got {text!r}")
    return lo, hi


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    model_args = argparse.ArgumentParser(add_help=False)
    g = model_args.add_argument_group("model")
    g.add_argument("--model", choices=["gaussian", "exponential"], default="gaussian")
    g.add_argument("--mu", type=float, default=1.0)
    g.add_argument("--sigma2", type=float, default=1.0)
    g.add_argument("--c10", type=float, default=1.0)
    g.add_argument("--c01", type=float, default=1.0)
    g.add_argument("--lambda", dest="lam", type=_floats, default=[5.0, 4.0, 3.0],
                   help="three exponential rates, e.g. 5,4,3")

    run_args = argparse.ArgumentParser(add_help=False)
    r = run_args.add_argument_group("design")
    r.add_argument("--tol", type=float, default=None)
    r.add_argument("--multistart", type=_int, default=None)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", type=Path, default=Path("."))

    p = argparse.ArgumentParser(prog="brequant", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("design", parents=[model_args, run_args], help="design one quantizer")
    d.add_argument("--K", type=_int, required=True)

    s = sub.add_parser("sweep", parents=[model_args, run_args], help="D(K) over a range of K")
    s.add_argument("--K-range", dest="k_range", type=_k_range, required=True)
    s.add_argument("--k-min", type=_int, default=4)

    e = sub.add_parser("eval", help="quantize a prior with a stored design")
    e.add_argument("--quantizer", type=Path, required=True)
    e.add_argument("--prior", type=_floats, required=True,
                   help="p0 for binary models; p0,p1 or p0,p1,p2 for ternary ones")

    st = sub.add_parser("staircase", parents=[model_args, run_args], help="p0 -> q(p0) table")
    st.add_argument("--K", type=_int, default=11)
    return p


def model_from_args(args) -> DetectionModel:
    try:
        if args.model == "gaussian":
            return BinaryGaussianModel(args.mu, args.sigma2, args.c10, args.c01)
        if len(args.lam) != 3:
            raise ConfigError("--lambda needs exactly three rates")
        return ExponentialTernaryModel(*args.lam)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def _check_run_args(args) -> None:
    if args.tol is not None and not args.tol > 0:
        raise ConfigError("--tol must be positive")
    if args.multistart is not None and args.multistart < 1:
        raise ConfigError("--multistart must be at least 1")
    args.out.mkdir(parents=True, exist_ok=True)


def _design(model, K, args):
    kw = {"random_state": args.seed}
    if args.tol is not None:
        kw["tol"] = args.tol
    if model.M == 2:
        return design_minimax(model, K, n_init=args.multistart or 1, **kw)
    return design_minimax_simplex(model, K, n_starts=args.multistart or 8, **kw)


# -- commands ------------------------------------------------------------------

def _risk_curve_rows(model, q):
    if model.M == 2:
        p = np.linspace(0.0, 1.0, int(round(1 / BINARY_STEP)) + 1)
        _, a = quantize(q, p)
        J, Jq = model.risk(p), model.risk_mismatched(p, a)
        for row in zip(p, J, Jq, Jq - J):
            yield row
        return
    n = int(round(1 / TERNARY_STEP))
    i, j = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
    keep = i + j <= n
    P = np.column_stack([i[keep], j[keep]]) / n
    _, A = quantize_simplex(q, P)
    J, Jq = model.risk(P), model.risk_mismatched(P, A)
    for (p0, p1), r, rq in zip(P, J, Jq):
        yield p0, p1, r, rq, rq - r


def cmd_design(args) -> int:
    _check_run_args(args)
    if args.K < 1:
        raise ConfigError("--K must be at least 1")
    model = model_from_args(args)
    q, rep = _design(model, args.K, args)
    write_json(args.out / "quantizer.json", quantizer_to_json(model, q, rep))
    header = ["p", "J", "J_quantized", "divergence"] if model.M == 2 else \
        ["p0", "p1", "J", "J_quantized", "divergence"]
    write_csv(args.out / "risk_curve.csv", header, _risk_curve_rows(model, q))
    print(f"K={q.K} D={fmt(rep.max_divergence)} converged={rep.converged} iterations={rep.iterations}")
    return EXIT_OK if rep.converged else EXIT_NOT_CONVERGED


def cmd_sweep(args) -> int:
    _check_run_args(args)
    lo, hi = args.k_range
    if lo < 1 or hi < lo:
        raise ConfigError("--K-range needs 1 <= lo <= hi")
    model = model_from_args(args)
    res = sweep(model, range(lo, hi + 1), tol=args.tol, n_starts=args.multistart, random_state=args.seed)
    rows = [(e.K, e.D, math.log(e.K), math.log(e.D) if e.D > 0 else float("nan"), str(e.converged).lower())
            for e in res.entries]
    write_csv(args.out / "sweep.csv", ["K", "D", "logK", "logD", "converged"],
              [[r[0], r[1], r[2], r[3] if math.isfinite(r[3]) else "nan", r[4]] for r in rows])
    try:
        fit = loglog_slope(res, k_min=args.k_min)
        doc = {"slope": fit.slope, "intercept": fit.intercept, "r2": fit.r2, "k_min_used": fit.k_min_used}
        print(f"slope={fmt(fit.slope)} r2={fmt(fit.r2)}")
    except InsufficientDataError:
        doc = {"slope": None, "reason": "insufficient-data", "k_min_used": args.k_min}
        print("slope unavailable: insufficient-data")
    write_json(args.out / "slope.json", doc)
    return EXIT_OK if res.converged.all() else EXIT_NOT_CONVERGED


def cmd_eval(args) -> int:
    try:
        doc = json.loads(args.quantizer.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read quantizer file: {exc}") from exc
    lq = quantizer_from_json(doc)
    m, q = lq.model, lq.quantizer
    p = list(args.prior)
    try:
        if m.M == 2:
            if len(p) != 1:
                raise ConfigError("binary models take --prior p0")
            k, a = quantize(q, p[0])
            d = float(m.divergence(p[0], a))
            weight = [a]
        else:
            if len(p) == 3:
                p = p[:2]
            if len(p) != 2:
                raise ConfigError("ternary models take --prior p0,p1 or p0,p1,p2")
            m.to_barycentric(np.asarray(p))
            k, a = quantize_simplex(q, np.asarray(p))
            k += 1
            d = float(m.divergence(np.asarray(p), a))
            weight = list(a)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    print(f"cell={k}")
    print("weight=" + ",".join(fmt(v) for v in weight))
    print(f"divergence={fmt(d)}")
    print(f"max_divergence={fmt(lq.recomputed_max_divergence())}")
    return EXIT_OK


def cmd_staircase(args) -> int:
    _check_run_args(args)
    model = model_from_args(args)
    if model.M != 2:
        raise ConfigError("staircase needs a binary model")
    q, rep = _design(model, args.K, args)
    p = np.linspace(0.0, 1.0, int(round(1 / BINARY_STEP)) + 1)
    k, a = quantize(q, p)
    write_csv(args.out / "staircase.csv", ["p0", "cell", "weight"], zip(p, k, a))
    print(f"K={q.K} D={fmt(rep.max_divergence)} converged={rep.converged}")
    return EXIT_OK if rep.converged else EXIT_NOT_CONVERGED


COMMANDS = {"design": cmd_design, "sweep": cmd_sweep, "eval": cmd_eval, "staircase": cmd_staircase}


def _setup_logging() -> None:
    level = os.environ.get("BREQUANT_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
