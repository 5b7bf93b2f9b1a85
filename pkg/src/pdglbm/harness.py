"""Experiment drivers: single runs, convergence studies and the Riemann comparison."""

from __future__ import annotations

import configparser
import csv
import dataclasses
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dg import BoundaryCondition, DgMesh, Transport, cfl_dt
from .errors import ConfigError, InadmissibleStateError, PdglbmError, SingularCollisionError, UnstableRunError
from .fluxes import make_model, primitive
from .lattice import check_subcharacteristic, conserved, maxwellian
from .palindrome import (
    SCHEMES,
    Stepper,
    build_plan,
    check_plan,
    collision_denominators,
    get_scheme,
    lie_plan,
    strang_plan,
)
from .reference import (
    contact_wave_exact,
    l2_error,
    load_field,
    observed_order,
    save_field,
    smooth_pulse_init,
    solve_riemann_isothermal,
)
from .relaxation import RelaxationParams

log = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "PDGLBM_OUTPUT_DIR"
CONFIG_DIR = Path(__file__).parent / "configs"

INITS = ("smooth_pulse", "riemann", "contact_wave", "table")
REFERENCES = ("none", "self", "contact_exact", "riemann_exact")


def _floats(value):
    if isinstance(value, str):
        return tuple(float(v) for v in value.replace(",", " ").split())
    return tuple(float(v) for v in value)


def _ints(value):
    if isinstance(value, str):
        return tuple(int(v) for v in value.replace(",", " ").split())
    return tuple(int(v) for v in value)


def _bool(value):
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


@dataclass(frozen=True)
class RunConfig:
    # model
    model: str = "isothermal"
    c: float = 0.6
    gamma: float = 1.4
    lam: float = 2.0
    tau: float = 0.0
    singular_tol: float = 1e-12
    # mesh
    a: float = -2.0
    b: float = 2.0
    nx: int = 100
    degree: int = 5
    # time
    scheme: str = "m2"
    beta: float = 5.0
    t_max: float = 0.4
    scalar: str = "real"
    base: str = "ap"
    fuse: bool = False
    # initial data
    init: str = "smooth_pulse"
    left_state: tuple = ()
    right_state: tuple = ()
    init_table: str = ""
    # study
    nx_list: tuple = (30, 60, 120, 240, 480)
    reference: str = "none"
    ref_factor: int = 4
    ref_scheme: str = "kahanli6"
    ref_beta: float = 0.0
    ref_cache: str = ""
    jobs: int = 1
    # output and diagnostics
    output: str = ""
    plot_script: bool = False
    check_admissibility: bool = False
    blowup: float = 1e6
    name: str = "run"

    _SECTIONS = {
        "model": ("model", "c", "gamma", "lam", "tau", "singular_tol"),
        "mesh": ("a", "b", "nx", "degree"),
        "time": ("scheme", "beta", "t_max", "scalar", "base", "fuse"),
        "init": ("init", "left_state", "right_state", "init_table"),
        "study": ("nx_list", "reference", "ref_factor", "ref_scheme", "ref_beta", "ref_cache", "jobs"),
        "output": ("output", "plot_script", "check_admissibility", "blowup", "name"),
    }

    def validate(self) -> "RunConfig":
        if self.model not in ("isothermal", "euler"):
            raise ConfigError(f"unknown model {self.model!r}")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}; choose from {sorted(SCHEMES)}")
        if self.scalar not in ("real", "complex"):
            raise ConfigError("scalar must be 'real' or 'complex'")
        if get_scheme(self.scheme).is_complex and self.scalar != "complex":
            raise ConfigError(f"scheme {self.scheme} has complex steps and needs scalar = complex")
        if self.base not in ("ap", "strang", "lie"):
            raise ConfigError("base must be ap, strang or lie")
        if not self.beta > 0:
            raise ConfigError("beta must be positive")
        if not self.t_max >= 0:
            raise ConfigError("t_max must be nonnegative")
        if not self.lam > 0:
            raise ConfigError("lam must be positive")
        if self.tau < 0:
            raise ConfigError("tau must be nonnegative")
        if self.nx < 1 or not 1 <= self.degree <= 8:
            raise ConfigError("need nx >= 1 and 1 <= degree <= 8")
        if not self.b > self.a:
            raise ConfigError("domain must satisfy a < b")
        if self.init not in INITS:
            raise ConfigError(f"unknown init {self.init!r}")
        if self.reference not in REFERENCES:
            raise ConfigError(f"unknown reference {self.reference!r}")
        m = 2 if self.model == "isothermal" else 3
        if self.init == "riemann" and (len(self.left_state) != m or len(self.right_state) != m):
            raise ConfigError(f"riemann init needs left_state and right_state with {m} values")
        if self.init == "table" and not self.init_table:
            raise ConfigError("table init needs init_table")
        if self.init == "contact_wave" and self.model != "euler":
            raise ConfigError("contact_wave init needs the euler model")
        if self.init == "smooth_pulse" and self.model != "isothermal":
            raise ConfigError("smooth_pulse init needs the isothermal model")
        if self.reference == "riemann_exact" and (self.model != "isothermal" or self.init != "riemann"):
            raise ConfigError("riemann_exact reference needs the isothermal model with riemann init")
        if self.reference == "contact_exact" and self.init != "contact_wave":
            raise ConfigError("contact_exact reference needs contact_wave init")
        return self

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_mapping(cls, values: dict) -> "RunConfig":
        kwargs = {}
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        defaults = cls()
        for key, raw in values.items():
            key = key.strip()
            if key not in types:
                raise ConfigError(f"unknown config key {key!r}")
            current = getattr(defaults, key)
            try:
                if isinstance(current, bool):
                    kwargs[key] = _bool(raw)
                elif key == "nx_list":
                    kwargs[key] = _ints(raw)
                elif isinstance(current, tuple):
                    kwargs[key] = _floats(raw)
                elif isinstance(current, int):
                    kwargs[key] = int(raw)
                elif isinstance(current, float):
                    kwargs[key] = float(raw)
                else:
                    kwargs[key] = str(raw).strip()
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {raw!r} ({exc})") from None
        return cls(**kwargs)

    def to_text(self) -> str:
        lines = []
        for section, keys in self._SECTIONS.items():
            lines.append(f"[{section}]")
            for key in keys:
                value = getattr(self, key)
                if isinstance(value, tuple):
                    value = ", ".join(repr(v) for v in value)
                lines.append(f"{key} = {value}")
            lines.append("")
        return "\n".join(lines)


def load_config(source, overrides: dict | None = None) -> RunConfig:
    """Read a sectioned ``key = value`` file; ``source`` may be a path or a shipped config name."""
    path = Path(source)
    if not path.exists():
        shipped = CONFIG_DIR / f"{source}.cfg"
        if not shipped.exists():
            raise ConfigError(f"config {source!r} not found")
        path = shipped
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    values = {}
    for section in parser.sections():
        if section not in RunConfig._SECTIONS:
            raise ConfigError(f"unknown section [{section}] in {path}")
        for key, value in parser.items(section):
            if key not in RunConfig._SECTIONS[section]:
                raise ConfigError(f"key {key!r} does not belong to section [{section}]")
            values[key] = value
    values.update(overrides or {})
    return RunConfig.from_mapping(values)


def shipped_configs():
    return sorted(p.stem for p in CONFIG_DIR.glob("*.cfg"))


# ---------------------------------------------------------------------------
# problem setup
# ---------------------------------------------------------------------------


@dataclass
class Problem:
    config: RunConfig
    model: object
    mesh: DgMesh
    bc: BoundaryCondition
    stepper: Stepper
    w0: np.ndarray
    dtype: type

    @property
    def dt(self) -> float:
        return cfl_dt(self.config.beta, self.mesh, self.model.lam)


def initial_state(config: RunConfig, model, mesh: DgMesh):
    """Initial conservative state at the nodes plus the left/right boundary states."""
    x = mesh.x
    if config.init == "smooth_pulse":
        w = smooth_pulse_init(x)
        return w, smooth_pulse_init(mesh.a), smooth_pulse_init(mesh.b)
    if config.init == "contact_wave":
        w = contact_wave_exact(x, 0.0, config.gamma)
        return w, contact_wave_exact(mesh.a, 0.0, config.gamma), contact_wave_exact(mesh.b, 0.0, config.gamma)
    if config.init == "riemann":
        left, right = np.asarray(config.left_state), np.asarray(config.right_state)
        # interface nodes belong to their own cell: judge by the position relative to the cell centre
        centre = mesh.cell_left[:, None] + 0.5 * mesh.h
        side = np.where(x == 0.0, centre, x) < 0.0
        w = np.where(side[..., None], left, right)
        return w, left, right
    table = np.loadtxt(config.init_table, delimiter=",", comments="#", ndmin=2)
    if table.shape[1] != model.m + 1:
        raise ConfigError(f"init table needs x plus {model.m} columns")
    order = np.argsort(table[:, 0])
    xs = table[order, 0]
    cols = [np.interp(x, xs, table[order, k + 1]) for k in range(model.m)]
    ends = [np.array([np.interp(p, xs, table[order, k + 1]) for k in range(model.m)]) for p in (mesh.a, mesh.b)]
    return np.stack(cols, axis=-1), ends[0], ends[1]


def build_problem(config: RunConfig) -> Problem:
    config.validate()
    model = make_model(config.model, config.lam, c=config.c, gamma=config.gamma)
    mesh = DgMesh(config.a, config.b, config.nx, config.degree)
    w0, left, right = initial_state(config, model, mesh)
    states = np.concatenate([w0.reshape(-1, model.m), [left, right]])
    try:
        margin = check_subcharacteristic(model, states)
    except InadmissibleStateError as exc:
        raise ConfigError(f"inadmissible initial data: {exc}") from None
    if margin <= 0:
        raise ConfigError(f"sub-characteristic condition violated: lam - max speed = {margin:.4g}")
    bc = BoundaryCondition(np.asarray(left, dtype=float), np.asarray(right, dtype=float))
    transport = Transport(mesh, model, bc)
    params = RelaxationParams(config.tau, config.singular_tol)
    dtype = complex if config.scalar == "complex" else float
    return Problem(config, model, mesh, bc, Stepper(transport, params), w0, dtype)


def make_plan(config: RunConfig, dt):
    if config.base == "strang":
        return strang_plan(dt)
    if config.base == "lie":
        return lie_plan(dt)
    return build_plan(get_scheme(config.scheme), dt, fuse=config.fuse)


# ---------------------------------------------------------------------------
# single run
# ---------------------------------------------------------------------------


@dataclass
class RunReport:
    config: RunConfig
    status: str = "ok"
    t_final: float = 0.0
    steps: int = 0
    dt: float = 0.0
    stage_count: int = 0
    unfused_stage_count: int = 0
    errors: dict = field(default_factory=dict)
    orders: list = field(default_factory=list)
    table: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    max_imag: dict = field(default_factory=dict)
    norm_history: list = field(default_factory=list)
    margin_history: list = field(default_factory=list)
    collision_denominators: list = field(default_factory=list)
    message: str = ""
    extra: dict = field(default_factory=dict)
    final: object = field(default=None, repr=False)
    problem: object = field(default=None, repr=False)
    exact: object = field(default=None, repr=False)

    def summary(self) -> str:
        lines = [f"{self.config.name}: status={self.status} steps={self.steps} dt={self.dt:.6g} t={self.t_final:.6g}"]
        for key, val in self.errors.items():
            lines.append(f"  error[{key}] = {val:.6e}")
        for key, val in self.max_imag.items():
            lines.append(f"  max|Im {key}| = {val:.3e}")
        for key, val in self.extra.items():
            lines.append(f"  {key} = {val}")
        if self.table:
            lines.append("  nx        dt            error         slope   status")
            for row in self.table:
                slope = "" if row["slope"] is None or math.isnan(row["slope"]) else f"{row['slope']:.3f}"
                err = "" if row["error"] is None else f"{row['error']:.6e}"
                lines.append(f"  {row['nx']:<9d} {row['dt']:<13.6e} {err:<13} {slope:<7} {row['status']}")
        if self.message:
            lines.append(f"  {self.message}")
        return "\n".join(lines)


def simulate(config: RunConfig, problem: Problem | None = None):
    """Advance the initial equilibrium to ``t_max``; returns ``(f, problem, report)``.

    The last step is shortened to land exactly on ``t_max``.  Raises
    :class:`UnstableRunError` (report attached as ``exc.report``) when the
    discrete norm grows by more than ``config.blowup`` or stops being finite.
    """
    problem = problem or build_problem(config)
    model, mesh, stepper = problem.model, problem.mesh, problem.stepper
    report = RunReport(config)
    f = maxwellian(problem.w0, model).astype(problem.dtype)
    dt = problem.dt
    report.dt = dt

    n_full = int(math.floor(config.t_max / dt * (1.0 + 1e-12)))
    remainder = config.t_max - n_full * dt
    if remainder <= 1e-12 * max(config.t_max, dt):
        remainder = 0.0
    plan = make_plan(config, dt)
    report.stage_count = len(plan.stages)
    report.unfused_stage_count = plan.unfused_count
    if n_full:
        check_plan(plan, stepper.params)
        report.collision_denominators = collision_denominators(plan, stepper.params)
    final_plan = None
    if remainder:
        final_plan = make_plan(config, remainder)
        try:
            check_plan(final_plan, stepper.params)
        except SingularCollisionError as exc:
            raise SingularCollisionError(
                f"shortened final step (dt={remainder:.6g}) needed to reach t_max={config.t_max} "
                f"is singular: {exc}",
                stage=exc.stage,
                dt=exc.dt,
            ) from exc

    norm0 = mesh.norm(f)
    ref_norm = max(norm0, np.finfo(float).tiny)
    report.norm_history.append(norm0)
    t = 0.0
    plans = [plan] * n_full + ([final_plan] if final_plan else [])
    for i, current in enumerate(plans):
        f = stepper.step(f, current)
        t = config.t_max if i == len(plans) - 1 else t + dt
        norm = mesh.norm(f)
        report.norm_history.append(norm)
        report.steps = i + 1
        report.t_final = t
        if not np.isfinite(norm) or norm > config.blowup * ref_norm:
            report.status = "unstable"
            report.message = f"norm grew to {norm:.3e} (initial {norm0:.3e}) at step {i + 1}, t={t:.6g}"
            report.timings = dict(stepper.timings)
            exc = UnstableRunError(report.message)
            exc.report = report
            raise exc
        if config.check_admissibility:
            try:
                margin = check_subcharacteristic(model, np.real(conserved(f)).reshape(-1, model.m))
            except InadmissibleStateError:
                margin = float("nan")
            report.margin_history.append(margin)
    report.timings = dict(stepper.timings)
    if np.iscomplexobj(f):
        w = conserved(f)
        prim = primitive(w, model)
        report.max_imag = {k: float(np.max(np.abs(np.imag(v)))) for k, v in prim.items()}
    return f, problem, report


def profile_columns(f, problem: Problem):
    """Per-node macroscopic profile: x, rho, u (and p for Euler)."""
    x = problem.mesh.x.ravel()
    prim = primitive(conserved(f).reshape(-1, problem.model.m), problem.model)
    cols = {"x": x}
    for key in problem.model.variables:
        val = prim[key]
        if np.iscomplexobj(val):
            cols[f"{key}_re"] = val.real
            cols[f"{key}_im"] = val.imag
        else:
            cols[key] = val
    return cols


def write_csv(path, columns: dict):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    rows = zip(*(np.asarray(columns[n]).ravel() for n in names))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _fmt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ""
    return f"{float(value):.16e}"


def resolve_output(path: str) -> Path | None:
    if not path:
        return None
    out = Path(path)
    root = os.environ.get(OUTPUT_DIR_ENV)
    if root and not out.is_absolute():
        out = Path(root) / out
    return out


PLOT_TEMPLATE = """\
import csv
import sys

import matplotlib.pyplot as plt

with open({path!r}, newline="", encoding="utf-8") as fh:
    rows = list(csv.DictReader(fh))
x = [float(r["x"]) for r in rows]
for name in {columns!r}:
    plt.plot(x, [float(r[name]) for r in rows], label=name)
plt.xlabel("x")
plt.legend()
plt.savefig({png!r}) if len(sys.argv) > 1 else plt.show()
"""


def write_plot_script(csv_path: Path, columns):
    script = csv_path.with_suffix(".plot.py")
    script.write_text(
        PLOT_TEMPLATE.format(path=str(csv_path), columns=[c for c in columns if c != "x"], png=str(csv_path.with_suffix(".png"))),
        encoding="utf-8",
    )
    return script


def reference_error(f, problem: Problem, t):
    """Error against an exact solution for the configured reference, or ``None``."""
    config, model, mesh = problem.config, problem.model, problem.mesh
    if config.reference == "contact_exact":
        exact = maxwellian(contact_wave_exact(mesh.x, t, config.gamma), model)
    elif config.reference == "riemann_exact":
        rl, ml = config.left_state
        rr, mr = config.right_state
        sol = solve_riemann_isothermal(rl, ml / rl, rr, mr / rr, config.c)
        exact = maxwellian(sol.conservative(mesh.x, t), model)
    else:
        return None
    return l2_error(f, exact, mesh, model)


def run(config: RunConfig) -> RunReport:
    """Single simulation with CSV output; raises on configuration or solver errors."""
    f, problem, report = simulate(config)
    err = reference_error(f, problem, report.t_final)
    if err is not None:
        report.errors["f"] = err.total
        for name, val in zip(("w%d" % k for k in range(problem.model.m)), err.per_variable):
            report.errors[name] = val
    out = resolve_output(config.output)
    if out is not None:
        cols = profile_columns(f, problem)
        write_csv(out, cols)
        if config.plot_script:
            write_plot_script(out, cols)
    if out is not None:
        report.extra["output"] = str(out)
    report.final = f
    report.problem = problem
    return report


# ---------------------------------------------------------------------------
# convergence study
# ---------------------------------------------------------------------------


def _study_point(config: RunConfig):
    # returns only picklable data so it can run in a worker process
    try:
        f, _, report = simulate(config)
    except UnstableRunError as exc:
        return config.nx, None, "unstable", exc.report.dt
    except (PdglbmError, FloatingPointError) as exc:
        mesh = DgMesh(config.a, config.b, config.nx, config.degree)
        return config.nx, None, f"failed: {exc}", cfl_dt(config.beta, mesh, config.lam)
    return config.nx, f, "ok", report.dt


def self_reference(config: RunConfig, finest: int):
    """Fine-mesh reference field for ``config`` (cached on disk when ``ref_cache`` is set)."""
    cache = resolve_output(config.ref_cache) if config.ref_cache else None
    ref_cfg = config.replace(
        nx=config.ref_factor * finest,
        scheme=config.ref_scheme,
        beta=config.ref_beta or config.beta,
        scalar="complex" if get_scheme(config.ref_scheme).is_complex else "real",
        base="ap",
        fuse=False,
        output="",
    )
    if cache is not None and cache.exists():
        f, mesh = load_field(cache)
        if mesh.n_cells == ref_cfg.nx and mesh.degree == ref_cfg.degree and (mesh.a, mesh.b) == (ref_cfg.a, ref_cfg.b):
            log.info("reusing reference %s", cache)
            return f, mesh
    f, problem, _ = simulate(ref_cfg)
    if cache is not None:
        cache.parent.mkdir(parents=True, exist_ok=True)
        save_field(cache, f, problem.mesh)
    return f, problem.mesh


def converge(config: RunConfig, nx_list=None, reference=None) -> RunReport:
    """Run ``config`` on several meshes at fixed CFL number and tabulate errors and slopes.

    ``reference`` may be a ``(field, mesh)`` pair to skip computing the
    self-reference.  Diverged runs are reported as ``unstable`` rows.
    """
    nx_list = tuple(nx_list or config.nx_list)
    if len(nx_list) < 3:
        raise ConfigError("a convergence study needs at least three resolutions")
    config = config.replace(reference=config.reference if config.reference != "none" else "self").validate()
    report = RunReport(config)
    if config.reference == "self" and reference is None:
        reference = self_reference(config, max(nx_list))

    configs = [config.replace(nx=nx, output="") for nx in nx_list]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_study_point, configs))
    else:
        results = [_study_point(c) for c in configs]

    rows = []
    for cfg, (nx, f, status, dt) in zip(configs, results):
        error = None
        if f is not None:
            problem = build_problem(cfg)
            if config.reference == "self":
                ref_f, ref_mesh = reference
                error = problem.mesh.norm(f - ref_mesh.evaluate(ref_f, problem.mesh.x))
            else:
                error = reference_error(f, problem, config.t_max).total
        rows.append({"nx": nx, "h": (config.b - config.a) / nx, "dt": dt, "error": error, "slope": None, "status": status})

    for prev, row in zip(rows, rows[1:]):
        if prev["error"] is not None and row["error"] is not None:
            row["slope"] = observed_order([prev["error"], row["error"]], [prev["h"], row["h"]])[0]
    report.table = rows
    report.orders = [r["slope"] for r in rows[1:]]
    report.status = "ok" if all(r["status"] == "ok" for r in rows) else "partial"

    out = resolve_output(config.output)
    if out is not None:
        write_csv(
            out,
            {
                "nx": [r["nx"] for r in rows],
                "dt": [r["dt"] for r in rows],
                "error": [float("nan") if r["error"] is None else r["error"] for r in rows],
                "slope": [float("nan") if r["slope"] is None else r["slope"] for r in rows],
                "status": [r["status"] for r in rows],
            },
        )
    return report


# ---------------------------------------------------------------------------
# Riemann comparison
# ---------------------------------------------------------------------------


def cell_means(values, mesh: DgMesh):
    """Quadrature average of nodal ``values[cell, node]`` over each cell."""
    return np.tensordot(values, 0.5 * mesh.ref_weights, axes=([1], [0]))


def riemann_compare(config: RunConfig) -> RunReport:
    """Run an isothermal Riemann problem and compare with the exact solution."""
    if config.model != "isothermal" or config.init != "riemann":
        raise ConfigError("riemann comparison needs the isothermal model and riemann init")
    config = config.replace(reference="riemann_exact")
    f, problem, report = simulate(config.replace(output=""))
    mesh = problem.mesh
    t = report.t_final
    rl, ml = config.left_state
    rr, mr = config.right_state
    sol = solve_riemann_isothermal(rl, ml / rl, rr, mr / rr, config.c)

    w = conserved(f)
    rho = w[..., 0]
    u = w[..., 1] / rho
    rho_ex, u_ex = sol.sample(mesh.x / t) if t > 0 else (
        np.where(mesh.x < 0, sol.rho_l, sol.rho_r),
        np.where(mesh.x < 0, sol.u_l, sol.u_r),
    )

    err = reference_error(f, problem, t)
    report.errors["f"] = err.total
    report.errors["rho"] = err.per_variable[0]

    means = cell_means(rho.real, mesh)
    jumps = np.abs(np.diff(means))
    (l0, l1), (r0, r1) = sol.wave_fronts()
    shock_speed = None
    if sol.right_wave == "shock":
        shock_speed = r0
    elif sol.left_wave == "shock":
        shock_speed = l0
    if jumps.size and jumps.max() > 0:
        k = int(np.argmax(jumps))
        x_shock = mesh.a + (k + 1) * mesh.h
    else:
        x_shock = float("nan")
    report.extra["shock_x_numeric"] = x_shock
    report.extra["shock_x_exact"] = None if shock_speed is None else shock_speed * t
    if shock_speed is not None:
        report.extra["shock_offset_cells"] = abs(x_shock - shock_speed * t) / mesh.h

    # rarefaction fan: mean absolute density error over the cells fully inside it
    fan = (l0, l1) if sol.left_wave == "rarefaction" else (r0, r1)
    lo, hi = fan[0] * t, fan[1] * t
    inside = (mesh.cell_left >= lo) & (mesh.cell_left + mesh.h <= hi)
    if inside.any() and t > 0:
        diff = np.abs(rho.real - rho_ex)[inside]
        l1_err = float(np.tensordot(diff, 0.5 * mesh.h * mesh.ref_weights, axes=([1], [0])).sum())
        length = inside.sum() * mesh.h
        report.extra["fan_mean_abs_error"] = l1_err / length
        report.extra["fan_rel_error"] = l1_err / length / abs(rl - rr) if rl != rr else 0.0

    if np.iscomplexobj(rho):
        imag = np.abs(rho.imag)
        idx = np.unravel_index(np.argmax(imag), imag.shape)
        report.extra["max_im_rho"] = float(imag[idx])
        report.extra["max_im_rho_x"] = float(mesh.x[idx])
        if shock_speed is not None:
            report.extra["max_im_offset_cells"] = abs(mesh.x[idx] - shock_speed * t) / mesh.h

    out = resolve_output(config.output)
    if out is not None:
        cols = profile_columns(f, problem)
        cols["rho_exact"] = rho_ex.ravel()
        cols["u_exact"] = u_ex.ravel()
        write_csv(out, cols)
        if config.plot_script:
            write_plot_script(out, cols)
    report.final = f
    report.problem = problem
    report.exact = sol
    return report


__all__ = [
    "RunConfig",
    "RunReport",
    "load_config",
    "build_problem",
    "simulate",
    "run",
    "converge",
    "riemann_compare",
    "shipped_configs",
]
