"""Run configuration: TOML schema, validation, round-trip serialization.

The configuration is a single TOML document (key-value pairs with nested
tables).  Grammar, with defaults in brackets:

    [kernel]                 required
    states  = [v1, v2, ...]  distinct real velocity labels, m >= 2
    P       = [[...], ...]   m x m row-stochastic matrix

    [[kernel.sojourn]]       one table per transition with P[from, to] > 0
    from = 0                 row index
    to = 1                   column index
    family = "exponential"   exponential(rate) | gamma(shape, rate)
    rate = 1.0               | uniform(a, b) | deterministic(c)

    [run]                    optional, all fields optional
    lambda   = 400.0         scale of the diffusion limit
    reps     = 20000         replication count for the clt suite
    tol      = 1e-10         series truncation tolerance
    seed     = 42            master seed (unsigned 64-bit)
    workers  = 0             0 means available parallelism
    out      = "out"         output directory
    suites   = [...]         subset of clt, renewal, ergodic, residual, occupancy
    t_points = [0.5, 1.0]    marginal times for the clt suite
    n_values = [100, 1000, 10000]   renewal/residual scale ladder
    v0       = 0             reference state index for cycle estimators
    f        = "x"           observable tag: one, x, vx, centered
    horizon  = 1e5           occupancy suite horizon
    grid     = "0:1:0.25"    simulate grid, start:stop:step inclusive

    [telegraph]              optional, used by the telegraph subcommand
    p       = 1.0            initial probability of state v1
    t_table = [0.5, 1.0, 2.0]
    n_max   = 40             largest n tabulated in the PMF table

The serializer below reproduces this layout; load -> serialize -> load is
the identity on configurations.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace

import numpy as np

try:  # Python 3.11+
    import tomllib
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .errors import ParseError, SchemaError
from .kernel import ROW_SUM_TOL, SemiMarkovKernel, SojournLaw
from .regen import F_CATALOG

ALL_SUITES = ("clt", "renewal", "ergodic", "residual", "occupancy")

_FAMILY_PARAMS = {
    "exponential": ("rate",),
    "gamma": ("shape", "rate"),
    "uniform": ("a", "b"),
    "deterministic": ("c",),
}

_RUN_FIELDS = {
    "lambda", "reps", "tol", "seed", "workers", "out", "suites",
    "t_points", "n_values", "v0", "f", "horizon", "grid",
}


@dataclass(frozen=True)
class RunConfig:
    kernel: SemiMarkovKernel
    lam: float = 400.0
    n_reps: int = 20000
    tol: float = 1e-10
    seed: int = 42
    workers: int = 0
    out_dir: str = "out"
    suites: tuple[str, ...] = ALL_SUITES
    t_points: tuple[float, ...] = (0.5, 1.0)
    n_values: tuple[int, ...] = (100, 1000, 10000)
    v0: int = 0
    f_tag: str = "x"
    horizon: float = 1e5
    grid: str = "0:1:0.25"
    telegraph_p: float = 1.0
    telegraph_t_table: tuple[float, ...] = (0.5, 1.0, 2.0)
    telegraph_n_max: int = 40


def _require(condition: bool, name: str, message: str) -> None:
    if not condition:
        raise SchemaError(f"{name}: {message}")


def _parse_law(entry: dict, index: int) -> tuple[int, int, SojournLaw]:
    where = f"kernel.sojourn[{index}]"
    for key in ("from", "to", "family"):
        _require(key in entry, f"{where}.{key}", "missing")
    family = entry["family"]
    if family not in _FAMILY_PARAMS:
        raise SchemaError(
            f"{where}.family: unknown family {family!r}; heavy-tailed or "
            "non-parametric laws are unsupported (finite second moments required)"
        )
    names = _FAMILY_PARAMS[family]
    extra = set(entry) - {"from", "to", "family", *names}
    _require(not extra, where, f"unexpected keys {sorted(extra)}")
    try:
        params = tuple(float(entry[name]) for name in names)
    except KeyError as e:
        raise SchemaError(f"{where}.{e.args[0]}: missing for family {family!r}") from None
    try:
        law = SojournLaw(family, params)
    except ValueError as e:
        raise SchemaError(f"{where}: {e}") from None
    return int(entry["from"]), int(entry["to"]), law


def _parse_kernel(data: dict) -> SemiMarkovKernel:
    _require("kernel" in data, "kernel", "missing section")
    sec = data["kernel"]
    _require("states" in sec, "kernel.states", "missing")
    _require("P" in sec, "kernel.P", "missing")
    states = np.asarray(sec["states"], dtype=float)
    m = states.size
    _require(m >= 2, "kernel.states", "need at least two states")
    _require(len(set(states.tolist())) == m, "kernel.states", "labels must be distinct")
    P = np.asarray(sec["P"], dtype=float)
    _require(P.shape == (m, m), "kernel.P", f"must be {m}x{m}")
    for i in range(m):
        _require((P[i] >= 0).all(), f"P row {i}", "negative entry")
        _require(abs(P[i].sum() - 1.0) <= ROW_SUM_TOL, f"P row {i}", f"sums to {P[i].sum()!r}")
    table: list[list[SojournLaw | None]] = [[None] * m for _ in range(m)]
    for idx, entry in enumerate(sec.get("sojourn", [])):
        v, w, law = _parse_law(entry, idx)
        where = f"kernel.sojourn[{idx}]"
        _require(0 <= v < m and 0 <= w < m, where, "state index out of range")
        _require(table[v][w] is None, where, f"duplicate entry for ({v}, {w})")
        table[v][w] = law
    extra = set(sec) - {"states", "P", "sojourn"}
    _require(not extra, "kernel", f"unexpected keys {sorted(extra)}")
    try:
        return SemiMarkovKernel(states=states, P=P, laws=tuple(map(tuple, table)))
    except ValueError as e:
        raise SchemaError(f"kernel: {e}") from None


def parse_config(text: str) -> RunConfig:
    """Parse and validate a TOML configuration, applying defaults."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ParseError(str(e)) from None

    extra = set(data) - {"kernel", "run", "telegraph"}
    _require(not extra, "config", f"unexpected sections {sorted(extra)}")
    kernel = _parse_kernel(data)
    cfg = RunConfig(kernel=kernel)

    run = data.get("run", {})
    extra = set(run) - _RUN_FIELDS
    _require(not extra, "run", f"unexpected keys {sorted(extra)}")
    if "suites" in run:
        suites = tuple(run["suites"])
        bad = [s for s in suites if s not in ALL_SUITES]
        _require(not bad, "run.suites", f"unknown suites {bad}; known: {list(ALL_SUITES)}")
        cfg = replace(cfg, suites=suites)
    if "f" in run:
        _require(run["f"] in F_CATALOG, "run.f", f"unknown tag {run['f']!r}; catalog: {list(F_CATALOG)}")
        cfg = replace(cfg, f_tag=run["f"])
    if "v0" in run:
        _require(0 <= int(run["v0"]) < kernel.n_states, "run.v0", "state index out of range")
        cfg = replace(cfg, v0=int(run["v0"]))
    numeric = {
        "lambda": ("lam", float), "reps": ("n_reps", int), "tol": ("tol", float),
        "seed": ("seed", int), "workers": ("workers", int), "horizon": ("horizon", float),
    }
    for key, (attr, conv) in numeric.items():
        if key in run:
            cfg = replace(cfg, **{attr: conv(run[key])})
    if "out" in run:
        cfg = replace(cfg, out_dir=str(run["out"]))
    if "t_points" in run:
        cfg = replace(cfg, t_points=tuple(float(x) for x in run["t_points"]))
    if "n_values" in run:
        cfg = replace(cfg, n_values=tuple(int(x) for x in run["n_values"]))
    if "grid" in run:
        parse_grid(str(run["grid"]))  # validates early
        cfg = replace(cfg, grid=str(run["grid"]))
    _require(cfg.lam > 0, "run.lambda", "must be > 0")
    _require(cfg.n_reps > 0, "run.reps", "must be > 0")
    _require(cfg.seed >= 0, "run.seed", "must be a non-negative integer")
    _require(cfg.workers >= 0, "run.workers", "must be >= 0")

    tel = data.get("telegraph", {})
    extra = set(tel) - {"p", "t_table", "n_max"}
    _require(not extra, "telegraph", f"unexpected keys {sorted(extra)}")
    if "p" in tel:
        _require(0.0 <= float(tel["p"]) <= 1.0, "telegraph.p", "must be in [0, 1]")
        cfg = replace(cfg, telegraph_p=float(tel["p"]))
    if "t_table" in tel:
        cfg = replace(cfg, telegraph_t_table=tuple(float(x) for x in tel["t_table"]))
    if "n_max" in tel:
        cfg = replace(cfg, telegraph_n_max=int(tel["n_max"]))
    return cfg


def parse_grid(spec: str) -> np.ndarray:
    """Inclusive arithmetic grid from a `start:stop:step` string."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise SchemaError(f"run.grid: expected start:stop:step, got {spec!r}")
    try:
        start, stop, step = (float(x) for x in parts)
    except ValueError:
        raise SchemaError(f"run.grid: non-numeric component in {spec!r}") from None
    if step <= 0 or stop <= start:
        raise SchemaError("run.grid: need step > 0 and stop > start")
    n = int(round((stop - start) / step))
    grid = start + step * np.arange(n + 1)
    return grid[grid <= stop + 1e-12]


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value)}")


def serialize_config(config: RunConfig, runtime_fields: bool = True) -> str:
    """Canonical TOML text; parse_config(serialize_config(c)) == c.

    With runtime_fields=False the workers and out fields are omitted, which
    is the form hashed into emitted files (so reports are byte-identical
    across worker counts and output locations).
    """
    k = config.kernel
    lines = ["[kernel]", f"states = {_fmt(k.states)}", f"P = {_fmt([row for row in k.P])}", ""]
    for v in range(k.n_states):
        for w in range(k.n_states):
            law = k.laws[v][w]
            if law is None:
                continue
            lines += ["[[kernel.sojourn]]", f"from = {v}", f"to = {w}",
                      f"family = {_fmt(law.family)}"]
            for name, value in zip(_FAMILY_PARAMS[law.family], law.params):
                lines.append(f"{name} = {_fmt(value)}")
            lines.append("")
    lines += [
        "[run]",
        f"lambda = {_fmt(config.lam)}",
        f"reps = {_fmt(config.n_reps)}",
        f"tol = {_fmt(config.tol)}",
        f"seed = {_fmt(config.seed)}",
    ]
    if runtime_fields:
        lines += [f"workers = {_fmt(config.workers)}", f"out = {_fmt(config.out_dir)}"]
    lines += [
        f"suites = {_fmt(config.suites)}",
        f"t_points = {_fmt(config.t_points)}",
        f"n_values = {_fmt(config.n_values)}",
        f"v0 = {_fmt(config.v0)}",
        f"f = {_fmt(config.f_tag)}",
        f"horizon = {_fmt(config.horizon)}",
        f"grid = {_fmt(config.grid)}",
        "",
        "[telegraph]",
        f"p = {_fmt(config.telegraph_p)}",
        f"t_table = {_fmt(config.telegraph_t_table)}",
        f"n_max = {_fmt(config.telegraph_n_max)}",
        "",
    ]
    return "\n".join(lines)


def config_digest(config: RunConfig) -> str:
    """Short hash of the result-affecting part of the configuration."""
    text = serialize_config(config, runtime_fields=False)
    return hashlib.sha256(text.encode()).hexdigest()[:12]
