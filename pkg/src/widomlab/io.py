"""JSON and CSV formats for sets, measures, results and experiment configs."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import sets
from .measures import AtomList, DensitySpec, MeasureError, MeasureSpec, TabulatedDensity, normalize
from .potential import equilibrium_measure


# ---------------------------------------------------------------------------
# generic helpers

def _num(v):
    """JSON-friendly number: complex as [re, im], non-finite floats as strings."""
    if isinstance(v, complex):
        return [_num(v.real), _num(v.imag)]
    v = float(v)
    if math.isfinite(v):
        return v
    return "inf" if v > 0 else ("-inf" if v < 0 else "nan")


def _parse_num(v):
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise MeasureError(f"complex numbers are written as [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        return float(v)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise MeasureError(f"expected a number, got {v!r}")
    return float(v)


def stable_id(obj) -> str:
    """Short content hash of a JSON-serializable object."""
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def read_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise sets.SetValidationError(f"{path}: invalid JSON ({exc})") from exc


def write_text(path, text: str) -> None:
    if path is None or str(path) == "-":
        print(text, end="")
    else:
        Path(path).write_text(text)


def csv_text(header, rows, meta: dict | None = None) -> str:
    """CSV with optional leading ``# key=value`` metadata lines."""
    buf = io.StringIO()
    for key in sorted(meta or {}):
        buf.write(f"# {key}={json.dumps(meta[key], sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, complex):
        return repr(v)
    if isinstance(v, float):
        return repr(v)
    return v


# ---------------------------------------------------------------------------
# sets and measures

set_from_dict = sets.from_dict
set_to_dict = sets.to_dict


def density_to_dict(density) -> dict:
    if isinstance(density, TabulatedDensity):
        return {"tabulated": {"x": list(map(float, density.x)), "values": list(map(float, density.values)),
                              "smoothness": density.smoothness}}
    return {"const": _num(density.const),
            "powers": [[_num(r), _num(g)] for r, g in density.powers],
            "exp_poly": [_num(c) for c in density.exp_poly]}


def density_from_dict(data: dict | None):
    if data is None:
        return DensitySpec()
    if not isinstance(data, dict):
        raise MeasureError("density must be an object")
    if "tabulated" in data:
        t = data["tabulated"]
        return TabulatedDensity(tuple(t["x"]), tuple(t["values"]), int(t.get("smoothness", 3)))
    unknown = set(data) - {"const", "powers", "exp_poly"}
    if unknown:
        raise MeasureError(f"unknown density keys {sorted(unknown)}")
    powers = []
    for item in data.get("powers", []):
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise MeasureError("powers entries are [root, exponent] pairs")
        powers.append((_parse_num(item[0]), _parse_num(item[1])))
    return DensitySpec(_parse_num(data.get("const", 1.0)), tuple(powers),
                       tuple(_parse_num(c) for c in data.get("exp_poly", [])))


def atoms_from_list(items) -> AtomList:
    out = []
    for item in items or []:
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise MeasureError("atoms are [location, mass] pairs")
        out.append((_parse_num(item[0]), _parse_num(item[1])))
    return AtomList(tuple(out))


def measure_to_dict(mu: MeasureSpec) -> dict:
    return {"set": set_to_dict(mu.set), "density": density_to_dict(mu.density),
            "atoms": [[_num(z), _num(m)] for z, m in mu.atoms.atoms]}


def measure_from_dict(data: dict, precision: int | None = None) -> MeasureSpec:
    """Build and normalize a measure; a bare set description gives mu_K."""
    if "set" not in data:
        K = set_from_dict(data)
        return normalize(equilibrium_measure(K, precision))
    K = set_from_dict(data["set"])
    E = equilibrium_measure(K, precision)
    return normalize(E, density_from_dict(data.get("density")), atoms_from_list(data.get("atoms")))


def measure_id(mu: MeasureSpec) -> str:
    return stable_id(measure_to_dict(mu))


def set_id(K) -> str:
    return stable_id(set_to_dict(K))


# ---------------------------------------------------------------------------
# result tables

def ortho_to_dict(res) -> dict:
    return {"n_max": res.n_max, "kind": res.kind, "a": list(map(_num, res.a)), "b": list(map(_num, res.b)),
            "verblunsky": [_num(complex(v)) for v in res.verblunsky],
            "log_norm_sq": list(map(_num, res.log_norm_sq)), "widom_log": list(map(_num, res.widom_log)),
            "log_capacity": _num(res.log_capacity), "precision_digits": res.precision}


def ortho_csv(res, start: int = 1, meta: dict | None = None) -> str:
    """Columns n, a_n, b_n (or alpha_n on the circle), log||P_n||^2, W_n for n >= start."""
    W = res.widom
    if res.kind == "circle":
        header = ["n", "alpha_n", "log_norm_sq", "W_n"]
        rows = [[n, complex(res.verblunsky[n]) if n < len(res.verblunsky) else None,
                 res.log_norm_sq[n], float(W[n])] for n in range(start, res.n_max + 1)]
    else:
        header = ["n", "a_n", "b_n", "log_norm_sq", "W_n"]
        rows = [[n, res.a[n] if n < len(res.a) else None, res.b[n - 1] if 1 <= n <= len(res.b) else None,
                 res.log_norm_sq[n], float(W[n])] for n in range(start, res.n_max + 1)]
    return csv_text(header, rows, meta)


def chebyshev_csv(results, meta: dict | None = None) -> str:
    rows = [[r.n, r.sup_norm, r.m_factor, " ".join(repr(float(x)) for x, _ in r.alternation_points)]
            for r in results]
    return csv_text(["n", "sup_norm", "m_factor", "alternation_abscissae"], rows, meta)


def chebyshev_to_dict(r) -> dict:
    return {"n": r.n, "coeffs": list(r.coeffs), "sup_norm": r.sup_norm, "m_factor": r.m_factor,
            "alternation_points": [[float(x), s] for x, s in r.alternation_points],
            "iterations": r.iterations, "converged": r.converged}


# ---------------------------------------------------------------------------
# experiment configuration

@dataclass(frozen=True)
class ExperimentConfig:
    set: dict | None = None
    measure: dict | None = None
    N: int = 30
    m_max: int = 6
    seeds: tuple = (0,)
    precision: int | None = None
    extra: dict = field(default_factory=dict)


def config_from_dict(data: dict) -> ExperimentConfig:
    known = {"set", "measure", "N", "m_max", "seeds", "seed", "precision"}
    seeds = data.get("seeds", [data["seed"]] if "seed" in data else [0])
    return ExperimentConfig(
        set=data.get("set"), measure=data.get("measure"), N=int(data.get("N", 30)),
        m_max=int(data.get("m_max", 6)), seeds=tuple(int(s) for s in seeds),
        precision=data.get("precision"), extra={k: v for k, v in data.items() if k not in known})
