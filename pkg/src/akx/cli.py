"""Command-line front end: ``akx --config run.json [--out PATH] [--format json|csv]``.

Exit status is 0 on success, 1 for configuration errors and 2 when a
series or certificate fails (the report is still written).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys

import jsonschema
import numpy as np

from . import __version__
from .algebra import AlgebraDescriptor, AlgebraElement, AlgebraError, DualFunctional
from .jets import (
    apply,
    commutator_check,
    differentiation_operator,
    extend_operator,
    jet_of,
    jet_operator,
    multiplication_operator,
)
from .kernels import (
    KernelCoefficients,
    derivative_block,
    e_vector,
    extended_kernel,
    fock_extended,
    kernel_eval,
    matrix_trace_kernel,
    quaternion_kernel,
    radius_estimate,
    scaled_kernel,
)
from .psd import SamplePlan, check_psd, gram, point_kernel
from .series import ConvergenceError, EntireFunctionRep, TruncationPolicy, eval_ext, eval_weak

log = logging.getLogger("akx")

_SCALAR = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
_COORDS = {"type": "array", "items": _SCALAR}
_ELEMENT = {
    "oneOf": [
        _COORDS,
        {
            "type": "object",
            "properties": {"coords": _COORDS},
            "required": ["coords"],
        },
    ]
}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["command"],
    "properties": {
        "command": {"enum": ["eval", "jet", "kernel", "gram", "check", "opcheck"]},
        "algebra": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["matrix", "quaternion", "grassmann", "weighted_seq"]},
                "field": {"enum": ["real", "complex"]},
                "n": {"type": "integer", "minimum": 1},
                "N": {"type": "integer", "minimum": 0, "maximum": 12},
                "L": {"type": "integer", "minimum": 1},
                "beta": {"type": "number", "exclusiveMinimum": 1},
            },
        },
        "function": {
            "oneOf": [
                {"enum": ["exp", "sin", "cos", "geom"]},
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["coeffs"],
                    "properties": {
                        "coeffs": _COORDS,
                        "radius": {"oneOf": [{"type": "number", "exclusiveMinimum": 0}, {"const": "inf"}]},
                    },
                },
            ]
        },
        "kernel": {
            "oneOf": [
                {"enum": ["fock", "geom", "poly2"]},
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["c"],
                    "properties": {
                        "p": {"const": 1},
                        "c": {"type": "array", "items": _COORDS},
                        "radius": {"oneOf": [{"type": "number", "exclusiveMinimum": 0}, {"const": "inf"}]},
                    },
                },
            ]
        },
        "kernel_op": {
            "enum": [
                "kernel_eval", "derivative_block", "fock_extended", "matrix_trace",
                "quaternion", "extended", "scaled", "radius",
            ]
        },
        "family": {"enum": ["fock_matrix", "fock_quaternion", "fock_seq", "quaternion", "scalar"]},
        "params": {"type": "object"},
        "z": _SCALAR,
        "w": _SCALAR,
        "A": _ELEMENT,
        "B": _ELEMENT,
        "a": _ELEMENT,
        "b": _ELEMENT,
        "M": {"type": "number", "exclusiveMinimum": 0},
        "N": {"type": "integer", "minimum": 1, "maximum": 400},
        "op": {"enum": ["Z", "S", "Mz", "dz", "DM"]},
        "truncation": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "N": {"type": "integer", "minimum": 1},
                "tail_tol": {"type": "number", "exclusiveMinimum": 0},
                "max_terms": {"type": "integer", "minimum": 1},
            },
        },
        "seed": {"type": "integer"},
        "count": {"type": "integer", "minimum": 1, "maximum": 512},
        "tolerance": {"type": "number", "exclusiveMinimum": 0},
        "out": {"type": "string"},
        "format": {"enum": ["json", "csv"]},
    },
}


class ConfigError(ValueError):
    pass


class CheckFailed(RuntimeError):
    def __init__(self, message, payload):
        super().__init__(message)
        self.payload = payload


def _scalar(x, default=0.0) -> complex:
    if x is None:
        return complex(default)
    if isinstance(x, (list, tuple)):
        return complex(x[0], x[1])
    return complex(x)


def _cplx(x) -> list:
    x = complex(x)
    return [float(x.real), float(x.imag)]


def _require(cfg, *keys):
    missing = [k for k in keys if k not in cfg]
    if missing:
        raise ConfigError(f"command {cfg['command']!r} requires: {', '.join(missing)}")


def _descriptor(cfg) -> AlgebraDescriptor:
    _require(cfg, "algebra")
    return AlgebraDescriptor.from_dict(cfg["algebra"])


def _coords(item):
    raw = item["coords"] if isinstance(item, dict) else item
    return [_scalar(c) for c in raw]


def _element(cfg, key, desc) -> AlgebraElement:
    _require(cfg, key)
    return AlgebraElement(desc, _coords(cfg[key]))


def _functional(cfg, key, desc) -> DualFunctional:
    _require(cfg, key)
    return DualFunctional(desc, _coords(cfg[key]))


def _policy(cfg) -> TruncationPolicy:
    t = cfg.get("truncation", {})
    N = t.get("N", 30)
    return TruncationPolicy(N, t.get("tail_tol", 1e-12), t.get("max_terms", max(200, N)))


def _kernel(cfg) -> KernelCoefficients:
    return KernelCoefficients.from_dict(cfg.get("kernel", "fock"))


def cmd_eval(cfg):
    desc = _descriptor(cfg)
    _require(cfg, "function")
    f = EntireFunctionRep.from_dict(cfg["function"])
    z = _scalar(cfg.get("z"))
    A = _element(cfg, "A", desc)
    pol = _policy(cfg)
    out = {"command": "eval", "base": _cplx(z), "tail_tol": pol.tail_tol}
    try:
        res = eval_ext(f, z, A, pol)
    except ConvergenceError as exc:
        rep = exc.report
        if rep is not None:
            out.update(converged=False, tail=rep.tail, order=rep.order, partial=rep.value.to_dict())
        raise CheckFailed(str(exc), out)
    out.update(value=res.value.to_dict(), tail=res.tail, order=res.order, converged=True)
    if desc.kind == "matrix":
        n = desc.size
        out["matrix"] = [[_cplx(x) for x in row] for row in res.value.as_matrix().reshape(n, n)]
    if "a" in cfg:
        a = _functional(cfg, "a", desc)
        weak = eval_weak(f, z, A, a, pol)
        out["weak"] = {"value": _cplx(weak.value), "tail": weak.tail, "order": weak.order}
    return out


def cmd_jet(cfg):
    _require(cfg, "function")
    f = EntireFunctionRep.from_dict(cfg["function"])
    z = _scalar(cfg.get("z"))
    N = cfg.get("N", 10)
    J = jet_of(f, z, N)
    return {"command": "jet", "base": _cplx(z), "order": N, "entries": J.to_list(), "tail": 0.0}


def cmd_kernel(cfg):
    _require(cfg, "kernel_op")
    op = cfg["kernel_op"]
    z, w = _scalar(cfg.get("z")), _scalar(cfg.get("w"))
    N = cfg.get("N", 20)
    out = {"command": "kernel", "kernel_op": op}
    if op == "kernel_eval":
        K = _kernel(cfg)
        kv = kernel_eval(K, z, w)
        out.update(value=_cplx(kv.value), tail=kv.tail)
    elif op == "derivative_block":
        K = _kernel(cfg)
        blk = derivative_block(K, z, w, N)
        out.update(block=[[_cplx(x) for x in row] for row in blk], tail=0.0)
    elif op == "radius":
        K = _kernel(cfg)
        est = radius_estimate(K, z, w)
        out.update(M0=_num(est.M0), C=_num(est.C))
    elif op in ("fock_extended", "matrix_trace", "extended"):
        desc = _descriptor(cfg)
        A, B = _element(cfg, "A", desc), _element(cfg, "B", desc)
        a, b = _functional(cfg, "a", desc), _functional(cfg, "b", desc)
        if op == "fock_extended":
            r = fock_extended((z, A, a), (w, B, b), N)
        elif op == "matrix_trace":
            r = matrix_trace_kernel(a, A, z, b, B, w, N)
        else:
            r = extended_kernel(_kernel(cfg), (z, A, a), (w, B, b), N)
        out.update(value=_cplx(r.value), tail=r.tail, order=r.order)
    elif op == "quaternion":
        desc = AlgebraDescriptor("quaternion", 1, "real")
        r = quaternion_kernel(
            _element(cfg, "a", desc), _element(cfg, "A", desc), z.real,
            _element(cfg, "b", desc), _element(cfg, "B", desc), w.real, N,
        )
        out.update(value=_cplx(r.value), tail=r.tail, order=r.order)
    elif op == "scaled":
        _require(cfg, "M")
        K = _kernel(cfg)
        M = float(cfg["M"])
        out["M"] = M
        xa = np.array(_coords(cfg["a"])) if "a" in cfg else np.eye(1, N, 0)[0]
        xb = np.array(_coords(cfg["b"])) if "b" in cfg else np.eye(1, N, 0)[0]
        try:
            r = scaled_kernel(K, z, w, M, xb, xa)
        except ConvergenceError as exc:
            raise CheckFailed(str(exc), dict(out, converged=False, reason=str(exc)))
        out.update(value=_cplx(r.value), tail=r.tail, op_bound=r.op_bound, M0=_num(r.M0), converged=True)
    return out


def _num(x):
    return "inf" if math.isinf(x) else float(x)


def _plan(cfg) -> SamplePlan:
    _require(cfg, "family")
    return SamplePlan(cfg["family"], cfg.get("seed", 0), cfg.get("count", 20), cfg.get("params", {}))


_DEFAULT_POINT_KERNEL = {
    "fock_matrix": "fock_extended",
    "fock_quaternion": "fock_extended",
    "fock_seq": "fock_extended",
    "quaternion": "quaternion",
    "scalar": "block",
}


def _gram(cfg):
    plan = _plan(cfg)
    name = cfg.get("kernel_op", _DEFAULT_POINT_KERNEL[plan.family])
    if name == "matrix_trace" and plan.family != "fock_matrix":
        raise ConfigError("matrix_trace Grams need the fock_matrix family")
    K = _kernel(cfg) if name in ("extended", "block") else None
    kfun = point_kernel(name, cfg.get("N", 30), K)
    g = gram(kfun, plan.points())
    rep = check_psd(g.matrix, cfg.get("tolerance"))
    return plan, name, g, rep


def cmd_gram(cfg):
    plan, name, g, rep = _gram(cfg)
    return {
        "command": "gram",
        "family": plan.family,
        "kernel_op": name,
        "seed": plan.seed,
        "matrix": [[_cplx(x) for x in row] for row in g.matrix],
        "report": rep.to_dict(),
    }


def cmd_check(cfg):
    plan, name, g, rep = _gram(cfg)
    out = {"command": "check", "family": plan.family, "kernel_op": name, "seed": plan.seed, "report": rep.to_dict()}
    if rep.verdict != "pass":
        raise CheckFailed("Gram matrix is not PSD within tolerance", out)
    return out


def cmd_opcheck(cfg):
    _require(cfg, "op")
    op = cfg["op"]
    N = cfg.get("N", 16)
    rng = np.random.default_rng(cfg.get("seed", 0))
    z = _scalar(cfg.get("z"), 0.3)
    out = {"command": "opcheck", "op": op, "N": N}
    if op == "Z" or op == "S":
        c = commutator_check(N)
        out.update(leading=c["leading"], full=c["full"])
        if op == "S":
            worst = 0.0
            for _ in range(20):
                f = EntireFunctionRep(rng.standard_normal(N) + 1j * rng.standard_normal(N))
                got = apply(jet_operator("S", N), jet_of(f, z, N))
                want = jet_of(differentiation_operator(N)(f), z, N)
                worst = max(worst, float(np.max(np.abs(got.jet.entries - want.entries)[: got.clean])))
            out["derivative_identity"] = worst
    elif op in ("Mz", "dz"):
        dim = 2 * N
        worst = 0.0
        for _ in range(20):
            f = EntireFunctionRep(rng.standard_normal(N) + 1j * rng.standard_normal(N))
            if op == "Mz":
                got = apply(jet_operator("zI_plus_Z", N, z=z), jet_of(f, z, N))
                want = extend_operator(multiplication_operator(dim), f, z, N)
            else:
                got = apply(jet_operator("S", N), jet_of(f, z, N))
                want = extend_operator(differentiation_operator(dim), f, z, N)
            worst = max(worst, float(np.max(np.abs(got.jet.entries - want.entries)[: got.clean])))
        out["extension_identity"] = worst
    else:  # DM
        K = _kernel(cfg)
        M = float(cfg.get("M", 0.5))
        w = _scalar(cfg.get("w"), 0.1)
        h, k = complex(rng.uniform(-0.3, 0.3)), complex(rng.uniform(-0.3, 0.3))
        est = radius_estimate(K, z, w)
        blk = derivative_block(K, z, w, N)
        D = M ** np.arange(N)
        lhs = np.vdot(e_vector(h, N), (D[:, None] * blk * D[None, :]) @ e_vector(k, N))
        rhs = kernel_eval(K, z + M * h, w + M * k).value
        out.update(M=M, M0=_num(est.M0), scaling_identity=float(abs(lhs - rhs)))
    tol = cfg.get("tolerance", 1e-10)
    worst = max(v for k, v in out.items() if k in _DEVIATIONS)
    out.update(tolerance=tol, verdict="pass" if worst <= tol else "fail")
    if worst > tol:
        raise CheckFailed(f"{op} identity deviation {worst:.3g} exceeds {tol:.3g}", out)
    return out


# "full" for Z/S includes the known truncation corner and is reported only
_DEVIATIONS = ("leading", "derivative_identity", "extension_identity", "scaling_identity")


COMMANDS = {
    "eval": cmd_eval,
    "jet": cmd_jet,
    "kernel": cmd_kernel,
    "gram": cmd_gram,
    "check": cmd_check,
    "opcheck": cmd_opcheck,
}


def run(cfg: dict):
    """Validate and dispatch; returns ``(exit_code, payload)``."""
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        return 1, {"error": f"schema: {path}: {exc.message}"}
    try:
        return 0, COMMANDS[cfg["command"]](cfg)
    except CheckFailed as exc:
        payload = dict(exc.payload)
        payload["error"] = str(exc)
        return 2, payload
    except ConvergenceError as exc:
        return 2, {"command": cfg["command"], "error": str(exc), "converged": False}
    except (ConfigError, AlgebraError, ValueError, KeyError) as exc:
        return 1, {"error": f"config: {exc}"}


def _rows(payload):
    """Flatten a payload to CSV rows."""
    if "matrix" in payload:
        mat = payload["matrix"]
        header = []
        for j in range(len(mat[0]) if mat else 0):
            header += [f"re{j}", f"im{j}"]
        return [header] + [[v for x in row for v in x] for row in mat]
    if "entries" in payload:
        return [["index", "re", "im"]] + [[i, *x] for i, x in enumerate(payload["entries"])]
    if "value" in payload and isinstance(payload["value"], dict):
        return [["index", "re", "im"]] + [[i, *x] for i, x in enumerate(payload["value"]["coords"])]
    rows = [["key", "value"]]
    for k in sorted(payload):
        v = payload[k]
        rows.append([k, json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v])
    return rows


def render(payload, fmt="json") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(_rows(payload))
        return buf.getvalue()
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="akx", description=__doc__.splitlines()[0])
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--out", help="output path (default: stdout)")
    ap.add_argument("--format", choices=["json", "csv"], help="output format (default json)")
    ap.add_argument("--seed", type=int, help="override the configuration seed")
    ap.add_argument("--quiet", action="store_true", help="suppress the summary on stderr")
    ap.add_argument("--version", action="version", version=__version__)
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")

    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        log.error("config: %s", exc)
        return 1
    if not isinstance(cfg, dict):
        log.error("config: top level must be an object")
        return 1
    if args.seed is not None:
        cfg["seed"] = args.seed
    fmt = args.format or cfg.pop("format", "json")
    out_path = args.out or cfg.pop("out", None)
    cfg.pop("format", None)
    cfg.pop("out", None)

    code, payload = run(cfg)
    text = render(payload, fmt if code != 1 else "json")
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code == 0:
        log.info("akx %s: ok", cfg.get("command"))
    else:
        log.warning("akx %s: exit %d: %s", cfg.get("command"), code, payload.get("error"))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
