"""Palindromic composition of the asymptotic-preserving second-order splitting.

A step of size ``dt`` of a scheme with fractions ``gammas`` applies the base
brick ``T(g/4) C(g/2) T(g/2) C(g/2) T(g/4)`` with ``g = gamma_i * dt`` for
every fraction in turn.  Transport stages with a negative real part run
through velocity reversal; collision stages use Crank-Nicolson.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .dg import Transport
from .errors import PdglbmError, SingularCollisionError, StageError
from .lattice import LatticeModel
from .relaxation import RelaxationParams, c2_denominator, collide_c1, collide_c2

TRANSPORT = "transport"
COLLIDE = "collide"

# netlib ode/ table, 60 digits
_KAHAN_LI_6 = (
    "0.392161444007314139275655330038380932595385404354442882183619",
    "0.332599136789359438604272125325790569941599549617156528439173",
    "-0.706246172557639359809845337222763994485425050210063375842163",
    "0.0822135962935508002304427053341134143428469807222103772811280",
    "0.798543990934829963398950353048958155211186231032507175876486",
)


@dataclass(frozen=True)
class CompositionScheme:
    gammas: tuple
    nominal_order: int
    family: str

    def __post_init__(self):
        g = self.gammas
        if len(g) == 0:
            raise ValueError("empty scheme")
        if any(g[i] != g[-1 - i] for i in range(len(g))):
            raise ValueError("fractions are not palindromic")
        if abs(sum(g) - 1.0) > 1e-13:
            raise ValueError(f"fractions sum to {sum(g)}, not 1")

    @property
    def is_complex(self) -> bool:
        return any(complex(x).imag != 0 for x in self.gammas)

    @property
    def n_steps(self) -> int:
        return len(self.gammas)


def triple_jump_real(p: int):
    """Real ``(alpha, beta)`` raising a symmetric order-p method to order p+2."""
    _check_order(p)
    r = 2.0 ** (1.0 / (p + 1))
    return 1.0 / (2.0 - r), -r / (2.0 - r)


def triple_jump_complex(p: int):
    """Complex ``(alpha, beta)`` with positive real parts (for p up to 14)."""
    _check_order(p)
    rot = complex(math.cos(math.pi / (p + 1)), math.sin(math.pi / (p + 1)))
    r = 2.0 ** (1.0 / (p + 1))
    den = 2.0 * rot + r
    return rot / den, r / den


def _check_order(p):
    if p < 2 or p % 2:
        raise ValueError(f"order must be an even integer >= 2, got {p}")


def order2() -> CompositionScheme:
    return CompositionScheme((1.0,), 2, "order2")


def triple_jump(order: int, kind: str = "complex") -> CompositionScheme:
    """Recursive triple jump from order 2 up to ``order`` (3**(order/2 - 1) base steps)."""
    _check_order(order)
    coeffs = triple_jump_complex if kind == "complex" else triple_jump_real
    gammas = [1.0]
    for p in range(2, order, 2):
        alpha, beta = coeffs(p)
        gammas = [alpha * g for g in gammas] + [beta * g for g in gammas] + [alpha * g for g in gammas]
    return CompositionScheme(tuple(gammas), order, f"triple_jump_{kind}")


def suzuki4() -> CompositionScheme:
    r = 4.0 ** (1.0 / 3.0)
    outer = 1.0 / (4.0 - r)
    return CompositionScheme((outer, outer, -r / (4.0 - r), outer, outer), 4, "suzuki4")


def kahan_li6() -> CompositionScheme:
    half = [float(x) for x in _KAHAN_LI_6]
    return CompositionScheme(tuple(half + half[-2::-1]), 6, "kahan_li6")


SCHEMES = {
    "m2": order2,
    "tj4_real": lambda: triple_jump(4, "real"),
    "tj4_complex": lambda: triple_jump(4, "complex"),
    "tj6_real": lambda: triple_jump(6, "real"),
    "tj6_complex": lambda: triple_jump(6, "complex"),
    "suzuki4": suzuki4,
    "kahanli6": kahan_li6,
}


def get_scheme(name: str) -> CompositionScheme:
    try:
        return SCHEMES[name]()
    except KeyError:
        raise ValueError(f"unknown scheme {name!r}; choose from {sorted(SCHEMES)}") from None


@dataclass(frozen=True)
class Stage:
    kind: str
    dt: complex


@dataclass(frozen=True)
class StepPlan:
    dt: float
    stages: tuple
    first_order: bool = False
    unfused_count: int = 0

    @property
    def multipliers(self):
        return [s.dt / self.dt for s in self.stages] if self.dt else [0.0] * len(self.stages)

    def count(self, kind: str) -> int:
        return sum(1 for s in self.stages if s.kind == kind)


def _scalar(x):
    x = complex(x)
    return x.real if x.imag == 0 else x


def ap_stages(dt):
    """The five stages of the asymptotic-preserving base step."""
    return [
        Stage(TRANSPORT, _scalar(dt / 4)),
        Stage(COLLIDE, _scalar(dt / 2)),
        Stage(TRANSPORT, _scalar(dt / 2)),
        Stage(COLLIDE, _scalar(dt / 2)),
        Stage(TRANSPORT, _scalar(dt / 4)),
    ]


def build_plan(scheme: CompositionScheme, dt, fuse: bool = False) -> StepPlan:
    """Expand ``scheme`` at step ``dt`` into its primitive stages.

    With ``fuse=True`` adjacent transport stages of consecutive base steps
    are merged into one transport with the summed step.  That halves the
    transport count but is *not* the same map: the Crank-Nicolson transport
    is not a one-parameter group, so ``T(a) T(b) != T(a + b)`` beyond second
    order.  Keep the default for anything order-sensitive.
    """
    stages = []
    for gamma in scheme.gammas:
        stages.extend(ap_stages(gamma * dt))
    unfused = len(stages)
    if fuse:
        merged = []
        for st in stages:
            if merged and st.kind == TRANSPORT and merged[-1].kind == TRANSPORT:
                merged[-1] = Stage(TRANSPORT, _scalar(merged[-1].dt + st.dt))
            else:
                merged.append(st)
        stages = merged
    return StepPlan(dt=dt, stages=tuple(stages), unfused_count=unfused)


def strang_plan(dt) -> StepPlan:
    """``T(dt/2) C(dt) T(dt/2)``: second order for tau > 0, degrades as tau -> 0."""
    stages = (Stage(TRANSPORT, _scalar(dt / 2)), Stage(COLLIDE, _scalar(dt)), Stage(TRANSPORT, _scalar(dt / 2)))
    return StepPlan(dt=dt, stages=stages, unfused_count=3)


def lie_plan(dt) -> StepPlan:
    """First-order ``C1(dt) T1(dt)`` (transport applied first)."""
    stages = (Stage(TRANSPORT, _scalar(dt)), Stage(COLLIDE, _scalar(dt)))
    return StepPlan(dt=dt, stages=stages, first_order=True, unfused_count=2)


def check_plan(plan: StepPlan, params: RelaxationParams):
    """Raise :class:`SingularCollisionError` for the first collision stage failing the guard."""
    for i, st in enumerate(plan.stages):
        if st.kind != COLLIDE:
            continue
        if plan.first_order:
            if params.tau > 0 and abs(st.dt + params.tau) <= params.singular_tol * max(abs(st.dt), params.tau, 1.0):
                raise SingularCollisionError(f"dt + tau vanishes at stage {i}", stage=i, dt=st.dt)
            continue
        denom, ok = c2_denominator(st.dt, params)
        if not ok:
            raise SingularCollisionError(
                f"collision stage {i} has 2*tau + dt = {abs(denom):.3e} "
                f"(tau={params.tau}, stage dt={st.dt})",
                stage=i,
                dt=st.dt,
            )


def collision_denominators(plan: StepPlan, params: RelaxationParams):
    """``|2 tau + dt|`` of every collision stage, in plan order."""
    return [abs(2.0 * params.tau + st.dt) for st in plan.stages if st.kind == COLLIDE]


@dataclass
class Stepper:
    """Applies step plans to a kinetic field.

    Holds the transport operator (mesh, lattice speed, boundary traces) and
    the relaxation parameters.  ``timings`` accumulates wall-clock seconds
    per stage kind.
    """

    transport: Transport
    params: RelaxationParams
    timings: dict = field(default_factory=lambda: {TRANSPORT: 0.0, COLLIDE: 0.0})

    @property
    def model(self) -> LatticeModel:
        return self.transport.model

    def step(self, f, plan: StepPlan) -> np.ndarray:
        for i, st in enumerate(plan.stages):
            t0 = time.perf_counter()
            try:
                if st.kind == TRANSPORT:
                    if plan.first_order:
                        f = self.transport.solve_t1(f, st.dt)
                    else:
                        f = self.transport.transport_signed(f, st.dt)
                elif plan.first_order:
                    f = collide_c1(f, st.dt, self.params, self.model)
                else:
                    f = collide_c2(f, st.dt, self.params, self.model, stage=i)
            except SingularCollisionError as exc:
                if exc.stage is None:
                    exc.stage = i
                raise
            except PdglbmError as exc:
                raise StageError(f"{st.kind} stage {i} (dt={st.dt}) failed: {exc}", i, st.kind) from exc
            self.timings[st.kind] += time.perf_counter() - t0
        return f


def step(f, plan: StepPlan, transport: Transport, params: RelaxationParams) -> np.ndarray:
    return Stepper(transport, params).step(f, plan)


def step_m2_strang(f, dt, transport: Transport, params: RelaxationParams) -> np.ndarray:
    return step(f, strang_plan(dt), transport, params)


def step_m1(f, dt, transport: Transport, params: RelaxationParams) -> np.ndarray:
    return step(f, lie_plan(dt), transport, params)


def is_palindromic(values) -> bool:
    values = list(values)
    return all(np.asarray(values[i]) == np.asarray(values[-1 - i]) for i in range(len(values)))
