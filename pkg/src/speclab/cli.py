"""Command-line front end.

Examples
--------
::

    speclab bounds --potential builtin:log3 --estimates sol,clclr
    speclab eigencount --potential builtin:alpha1_i --N 2 --alpha 0.999
    speclab compare --potential builtin:inverse_square
    speclab construct alpha1_iii --param q=2 --param p=2
    speclab verify alpha1_i --N 3
    speclab sharp-constants --kappa 1.559
    speclab phi-max

A config file (``--config FILE``) holds ``key = value`` lines, ``param name
= value`` lines for builtin parameters and, optionally, an inline potential
in the region/disk format of :meth:`speclab.potentials.Potential.to_text`.
Command-line flags override the file.  Exit status: 0 success, 1 config
error, 2 numeric failure, 3 internal inconsistency.
"""

from __future__ import annotations

import argparse
import concurrent.futures as cf
import csv
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

from . import __version__
from . import bounds as Bd
from . import constructions as C
from . import spectral1d as S
from .errors import (BracketGap, ConfigError, InconsistentVerdict, InvalidParameters, InvalidPotential,
                     MissingDecayClass, MissingParameter, SpeclabError)
from .potentials import Potential, parse_potential
from .values import Infinite, Unknown, fmt, status, to_json

__all__ = ["RunConfig", "parse_config", "main", "run"]

TASKS = ("bounds", "eigencount", "compare", "construct", "verify", "sharp-constants", "phi-max")
FORMATS = ("json", "csv", "table")
_KEYS = ("task", "potential", "construction", "estimates", "alpha", "range", "p", "c", "c_A", "tol",
         "format", "jobs", "kappa", "N", "out", "a", "b")
_POTENTIAL_WORDS = ("name", "region", "radial", "angular", "disk")


@dataclass
class RunConfig:
    """Everything a run depends on; its canonical text defines the config hash."""

    task: str = ""
    potential: str = ""
    inline: str = ""
    construction: str = ""
    params: dict = field(default_factory=dict)
    estimates: list = field(default_factory=list)
    alpha: list = field(default_factory=list)
    range: str = ""
    p: Optional[float] = None
    c: Optional[float] = None
    c_A: Optional[float] = None
    kappa: list = field(default_factory=list)
    a: float = 1.0
    b: float = 2.0
    tol: float = 1e-11
    format: str = "json"
    jobs: int = 1
    out: str = ""

    def canonical(self) -> str:
        rows = [f"task={self.task}", f"potential={self.potential}", f"construction={self.construction}",
                f"estimates={','.join(self.estimates)}", f"alpha={','.join(repr(x) for x in self.alpha)}",
                f"range={self.range}", f"p={self.p!r}", f"c={self.c!r}", f"c_A={self.c_A!r}",
                f"kappa={','.join(repr(x) for x in self.kappa)}", f"a={self.a!r}", f"b={self.b!r}",
                f"tol={self.tol!r}"]
        rows += [f"param {k}={self.params[k]!r}" for k in sorted(self.params)]
        if self.inline:
            rows.append("inline:\n" + self.inline.strip())
        return "\n".join(rows)

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]

    def bound_params(self) -> dict:
        out = {}
        for k in ("p", "c", "c_A"):
            v = getattr(self, k)
            if v is not None:
                out[k] = v
        return out

    def alphas(self) -> list:
        vals = list(self.alpha)
        if self.range:
            lo, hi, n = _parse_range(self.range)
            vals += [lo + (hi - lo) * i / (n - 1) for i in range(n)] if n > 1 else [lo]
        return vals or [1.0]

    # potentials ---------------------------------------------------------
    def construction_obj(self, name: Optional[str] = None) -> C.NamedConstruction:
        name = name or self.construction or self.potential.split(":", 1)[-1]
        try:
            return C.build(name, **self.params)
        except InvalidParameters as exc:
            raise ConfigError(str(exc)) from None

    def load_potential(self) -> Potential:
        if self.inline.strip():
            return parse_potential(self.inline)
        if self.potential.startswith("builtin:"):
            c = self.construction_obj(self.potential.split(":", 1)[1])
            if c.potential is None:
                raise ConfigError(f"{c.id}: radii exceed floating range; use eigencount or verify")
            return c.potential
        if self.potential:
            if os.path.exists(self.potential):
                with open(self.potential) as fh:
                    return parse_potential(fh.read())
            raise ConfigError(f"potential {self.potential!r} is neither builtin:NAME nor a file")
        raise ConfigError("no potential given")


def _num(text: str):
    t = text.strip()
    try:
        v = float(t.replace("pi", repr(math.pi))) if t != "pi" else math.pi
    except ValueError:
        if t.lower() in ("true", "false"):
            return t.lower() == "true"
        return t
    return int(v) if v.is_integer() and "." not in t and "e" not in t.lower() else v


def _value(text: str):
    if "," in text:
        return [_num(x) for x in text.split(",") if x.strip()]
    return _num(text)


def _parse_range(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError("range must be lo:hi:n")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError("range must be lo:hi:n with numeric entries") from None
    if n < 1:
        raise ConfigError("range needs n >= 1")
    return lo, hi, n


def _floats(v) -> list:
    if isinstance(v, list):
        return [float(x) for x in v]
    return [float(v)]


def _set(cfg: RunConfig, key: str, raw: str) -> None:
    v = raw.strip()
    if key == "N":
        cfg.params["N"] = int(float(v))
    elif key in ("estimates",):
        cfg.estimates = [x.strip() for x in v.split(",") if x.strip()]
    elif key in ("alpha", "kappa"):
        try:
            setattr(cfg, key, [float(x) for x in v.split(",") if x.strip()])
        except ValueError:
            raise ConfigError(f"{key} must be numeric") from None
    elif key in ("p", "c", "c_A", "tol", "a", "b"):
        try:
            setattr(cfg, key, float(v))
        except ValueError:
            raise ConfigError(f"{key} must be numeric") from None
    elif key == "jobs":
        try:
            cfg.jobs = max(1, int(v))
        except ValueError:
            raise ConfigError("jobs must be an integer") from None
    elif key == "format":
        if v not in FORMATS:
            raise ConfigError(f"format must be one of {', '.join(FORMATS)}")
        cfg.format = v
    elif key == "range":
        _parse_range(v)
        cfg.range = v
    elif key == "task":
        if v not in TASKS:
            raise ConfigError(f"unknown task {v!r}")
        cfg.task = v
    else:
        setattr(cfg, key, v)


def parse_config(text: str) -> RunConfig:
    """Parse config text; potential blocks are collected verbatim for :func:`parse_potential`."""
    cfg = RunConfig()
    inline = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word = line.split()[0].split("=")[0]
        if word in _POTENTIAL_WORDS:
            inline.append(line)
            continue
        if word == "param":
            k, _, v = line[5:].partition("=")
            if not _:
                raise ConfigError(f"line {lineno}: param needs name = value")
            cfg.params[k.strip()] = _value(v)
            continue
        key, eq, val = line.partition("=")
        key = key.strip()
        if not eq or key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown setting {raw.strip()!r}")
        _set(cfg, key, val)
    if inline:
        params = "".join(f"param {k} = {v}\n" for k, v in cfg.params.items() if not isinstance(v, list))
        cfg.inline = params + "\n".join(inline) + "\n"
    return cfg


# ---------------------------------------------------------------------------
# tasks


def _eigen_one(args) -> dict:
    prof, alpha, atol = args
    try:
        r = S.radial_eigencount(prof, alpha, atol=atol)
        out = r.to_json()
    except BracketGap as exc:
        out = {"count": None, "lower": exc.lower, "upper": exc.upper, "error": str(exc)}
    out["alpha"] = fmt(alpha)
    return out


def _jobs(cfg: RunConfig) -> int:
    env = os.environ.get("SPECLAB_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError("SPECLAB_JOBS must be an integer") from None
    return cfg.jobs


def _task_bounds(cfg: RunConfig) -> list:
    V = cfg.load_potential()
    ests = cfg.estimates or [e for e in Bd.ESTIMATES if e != "Lower10pi"]
    ing = Bd.Ingredients(V, cfg.p)
    out = []
    for e in ests:
        name = Bd.canonical(e)
        if name == "Lower10pi":
            val, n = Bd.lower_bound_10pi(V, ing)
            row = {"estimate": name, "status": status(val), "card": n if isinstance(n, int) else "inf"}
            row.update(to_json(val))
            out.append(row)
            continue
        out.append(Bd.evaluate(V, name, cfg.bound_params(), ing).to_json())
    return out


def _task_compare(cfg: RunConfig) -> list:
    V = cfg.load_potential()
    ests = cfg.estimates or [e for e in Bd.ESTIMATES if e not in ("Lower10pi",)]
    params = cfg.bound_params()
    if "p" not in params:
        params["p"] = 2.0
    rows = Bd.compare(V, [Bd.canonical(e) for e in ests], params, check=True)
    return [rep.to_json() for _, rep in rows]


def _task_eigencount(cfg: RunConfig) -> list:
    if cfg.inline.strip() or not cfg.potential.startswith("builtin:"):
        V = cfg.load_potential()
        if not V.is_radial:
            raise ConfigError("eigencount needs a radial potential")
        from .potentials import log_reduce

        prof = log_reduce(V)
    else:
        c = cfg.construction_obj(cfg.potential.split(":", 1)[1])
        if c.profile is None:
            raise ConfigError(f"{c.id} has no radial profile")
        prof = c.profile
    work = [(prof, a, cfg.tol) for a in cfg.alphas()]
    n = _jobs(cfg)
    if n > 1 and len(work) > 1:
        with cf.ProcessPoolExecutor(n) as ex:
            return list(ex.map(_eigen_one, work))
    return [_eigen_one(w) for w in work]


def _task_construct(cfg: RunConfig) -> list:
    c = cfg.construction_obj()
    return [{"id": c.id, "params": c.params, "notes": c.notes,
             "radii": [fmt(x) for x in c.radii], "claims": [cl.label for cl in c.claims],
             "config": c.to_config()}]


def _task_verify(cfg: RunConfig) -> list:
    c = cfg.construction_obj()
    rep = C.verify_claims(c, jobs=_jobs(cfg))
    for r in rep:
        r["construction"] = c.id
    return rep


def _task_sharp(cfg: RunConfig) -> list:
    kappas = list(cfg.kappa)
    if cfg.range:
        lo, hi, n = _parse_range(cfg.range)
        kappas += [lo + (hi - lo) * i / (n - 1) for i in range(n)] if n > 1 else [lo]
    if not kappas:
        raise ConfigError("sharp-constants needs --kappa or --range")
    rows = []
    for k in kappas:
        if not k > 0:
            raise ConfigError("kappa must be positive")
        sc = S.sharp_sobolev_C(k, cfg.a, cfg.b)
        rows.append({"kappa": fmt(k), "Phi": fmt(Bd.phi_kappa(k)), "a": fmt(cfg.a), "b": fmt(cfg.b),
                     "C": fmt(sc.C), "x_star": fmt(sc.x_star), "C0": fmt(S.sharp_sobolev_C0(k))})
    return rows


def _task_phimax(cfg: RunConfig) -> list:
    k, phi = Bd.maximize_phi()
    return [{"kappa_star": fmt(k), "Phi_star": fmt(phi), "sqrt_2_4k1_Phi": fmt(math.sqrt(2 * (4 * k + 1) * phi))}]


_RUNNERS = {
    "bounds": _task_bounds, "compare": _task_compare, "eigencount": _task_eigencount,
    "construct": _task_construct, "verify": _task_verify, "sharp-constants": _task_sharp,
    "phi-max": _task_phimax,
}


# ---------------------------------------------------------------------------
# output


def _clean(x):
    if isinstance(x, Infinite):
        return {"value": "inf", "reason": x.reason}
    if isinstance(x, Unknown):
        return {"value": "unknown", "reason": x.reason, "partial": fmt(x.partial)}
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return fmt(x)
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if hasattr(x, "item"):
        return _clean(x.item())
    return str(x)


def _flat(row: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in row.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flat(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(v, sort_keys=True)
        else:
            out[key] = v
    return out


def render(report: dict, form: str) -> str:
    """Render a report as deterministic JSON, CSV or an aligned table."""
    if form == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    rows = [_flat(r) for r in report["results"]]
    cols = sorted({k for r in rows for k in r})
    head = f"# speclab {report['version']} task={report['task']} config_hash={report['config_hash']}\n"
    if form == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow(r)
        return head + buf.getvalue()
    # table: one block per row keeps long reasons readable
    lines = [head.rstrip()]
    for i, r in enumerate(rows):
        lines.append(f"[{i}]")
        width = max((len(k) for k in r), default=0)
        for k in sorted(r):
            lines.append(f"  {k.ljust(width)}  {r[k]}")
    return "\n".join(lines) + "\n"


def run(cfg: RunConfig) -> tuple:
    """Run a config; returns ``(exit_status, report_dict)``."""
    if cfg.task not in _RUNNERS:
        raise ConfigError(f"unknown task {cfg.task!r}")
    results = _RUNNERS[cfg.task](cfg)
    status = 0
    if cfg.task == "verify" and any(r["status"] == "fail" for r in results):
        status = 3
    elif cfg.task == "eigencount" and any("error" in r for r in results):
        status = 2
        for r in results:
            if "error" in r:
                print(f"speclab: numeric failure at alpha = {r['alpha']}: {r['error']}", file=sys.stderr)
    report = {"tool": "speclab", "version": __version__, "config_hash": cfg.digest(), "task": cfg.task,
              "results": _clean(results)}
    return status, report


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="speclab", description="Bound-state estimates for 2D Schroedinger operators")
    ap.add_argument("--version", action="version", version=f"speclab {__version__}")
    sub = ap.add_subparsers(dest="task")
    for t in TASKS:
        sp = sub.add_parser(t)
        if t in ("construct", "verify"):
            sp.add_argument("construction", nargs="?", default=None)
        sp.add_argument("--config", help="config file; flags override its settings")
        sp.add_argument("--potential", help="builtin:NAME or a potential file")
        sp.add_argument("--estimates", help="comma-separated estimate ids")
        sp.add_argument("--alpha", help="coupling(s), comma separated")
        sp.add_argument("--range", help="sweep lo:hi:n over alpha (or kappa)")
        sp.add_argument("--p", type=float)
        sp.add_argument("--c", type=float, help="threshold c")
        sp.add_argument("--c-A", dest="c_A", type=float, help="threshold on A_n")
        sp.add_argument("--tol", type=float)
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--format", choices=FORMATS)
        sp.add_argument("--jobs", type=int)
        sp.add_argument("--kappa", help="kappa value(s), comma separated")
        sp.add_argument("--N", type=int)
        sp.add_argument("--a", type=float)
        sp.add_argument("--b", type=float)
        sp.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    if ns.config:
        try:
            with open(ns.config) as fh:
                cfg = parse_config(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    else:
        cfg = RunConfig()
    cfg.task = ns.task
    if getattr(ns, "construction", None):
        cfg.construction = ns.construction
    for key in ("potential", "estimates", "alpha", "range", "p", "c", "c_A", "tol", "format", "jobs",
                "kappa", "a", "b", "out"):
        v = getattr(ns, key, None)
        if v is not None:
            _set(cfg, key, str(v))
    if ns.N is not None:
        cfg.params["N"] = ns.N
    for item in ns.param:
        k, eq, v = item.partition("=")
        if not eq:
            raise ConfigError(f"--param needs NAME=VALUE, got {item!r}")
        cfg.params[k.strip()] = _value(v)
    if cfg.task in ("construct", "verify") and not cfg.construction:
        if cfg.potential.startswith("builtin:"):
            cfg.construction = cfg.potential.split(":", 1)[1]
        else:
            raise ConfigError(f"{cfg.task} needs a construction id")
    return cfg


def main(argv: Optional[list] = None) -> int:
    ap = _parser()
    ns = ap.parse_args(argv)
    if not ns.task:
        ap.print_help()
        return 1
    try:
        cfg = config_from_args(ns)
        status, report = run(cfg)
    except (ConfigError, MissingParameter, InvalidParameters, InvalidPotential) as exc:
        print(f"speclab: config error: {exc}", file=sys.stderr)
        return 1
    except InconsistentVerdict as exc:
        print(f"speclab: inconsistency: {exc}", file=sys.stderr)
        return 3
    except (BracketGap, MissingDecayClass, SpeclabError, ArithmeticError) as exc:
        print(f"speclab: numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    text = render(report, cfg.format)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
