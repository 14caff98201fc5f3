"""Load-stepped Newton solution of the assembled shell equations.

``newton_solve`` drives the residual of a :class:`~igashell.assembly.
ShellProblem` to zero over a sequence of load factors.  Constraints are
applied by null-space condensation and the reduced tangent is factorized by
sparse LU without exploiting symmetry (the closed-form partially-stressed
pipeline is genuinely non-symmetric, so one factorization path serves all
pipelines).

Each Newton correction is backtracked (halving the step) until the
residual norm decreases; trial states whose kinematics degenerate (for
example a through-thickness station pushed through the surface by a wild
iterate) are rejected the same way instead of aborting.  Contact problems
are solved on a frozen set of penalized quadrature points that is
refreshed between Newton solves until it matches the penetrating points
(see ``_solve_step``).  A step that still fails to converge is bisected;
after the configured number of bisections the solver raises
:class:`~igashell.errors.NonConvergence` carrying the report collected
so far.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import splu

from .errors import (
    ConstitutiveOverflow,
    DegenerateElement,
    DegenerateLayer,
    NonConvergence,
    NonPositiveLayerJacobian,
    SingularTangent,
)

_RECOVERABLE = (
    ConstitutiveOverflow,
    DegenerateElement,
    DegenerateLayer,
    NonPositiveLayerJacobian,
)


@dataclass(frozen=True)
class LoadStepping:
    """Incremental-iterative control parameters.

    The absolute residual tolerance is ``abs_tol_scale * E * T * L`` with
    E the ground Young modulus, T the thickness and L the square root of
    the reference area, making it insensitive to unit choices; the relative
    tolerance is measured against the first residual of each step.
    """

    n_steps: int = 20
    max_iterations: int = 25
    max_bisections: int = 8
    max_active_set_sweeps: int = 30
    abs_tol_scale: float = 1.0e-8
    rel_tol: float = 1.0e-10


@dataclass(frozen=True)
class StepRecord:
    """Converged state of one load increment."""

    load_factor: float
    iterations: int
    residual_norm: float
    monitors: dict = field(default_factory=dict)


@dataclass(frozen=True)
class NewtonReport:
    """Summary of one incremental solve."""

    steps: tuple
    n_solves: int
    converged: bool

    @property
    def load_factors(self):
        return np.array([s.load_factor for s in self.steps])

    def monitor(self, name):
        return np.array([s.monitors[name] for s in self.steps])


def residual_tolerance(problem, stepping):
    """Force-scale tolerance: abs_tol_scale * E * T * sqrt(reference area)."""
    mat = problem.material
    length = float(np.sqrt(problem.mesh.reference_area))
    return stepping.abs_tol_scale * mat.young_equivalent * mat.thickness * length


def _reduced_residual(problem, cond, u, t, active=None, scale=1.0):
    """Reduced residual and tangent, or None for an inadmissible state.

    Numpy warnings are silenced: wild line-search trials legitimately
    produce overflow, which the recoverable exceptions and the finiteness
    check below already classify as a rejected state.
    """
    try:
        with np.errstate(all="ignore"):
            residual, tangent = problem.residual_and_tangent(u, t, active, scale)
    except _RECOVERABLE:
        return None
    r_red = cond.reduce_vector(residual)
    if not np.all(np.isfinite(r_red)):
        return None
    return r_red, tangent


def _iterate(problem, cond, u, t, stepping, tol_abs, active=None, scale=1.0):
    """Damped Newton iteration at fixed load factor.

    Returns ``(u or None, iterations, norm, solves)``.  One iteration is
    one residual evaluation (rejected line-search trials included);
    convergence is checked before each linear solve, so an equilibrium
    start costs a single iteration.  Corrections are halved until the
    residual norm decreases or the iteration budget runs out.
    """
    u = u.copy()
    evals = 1
    state = _reduced_residual(problem, cond, u, t, active, scale)
    if state is None:
        return None, evals, float("inf"), 0
    r_red, tangent = state
    norm0 = norm = float(np.linalg.norm(r_red))
    solves = 0
    while True:
        if norm <= tol_abs or norm <= stepping.rel_tol * norm0:
            return u, evals, norm, solves
        if evals >= stepping.max_iterations:
            return None, evals, norm, solves
        k_red = cond.reduce_matrix(tangent)
        try:
            lu = splu(k_red)
        except RuntimeError as exc:
            raise SingularTangent(str(exc)) from None
        step = lu.solve(-r_red)
        if not np.all(np.isfinite(step)):
            raise SingularTangent("non-finite Newton correction")
        solves += 1
        full = cond.expand(step)
        damping = 1.0
        accepted = None
        while evals < stepping.max_iterations:
            u_try = u + damping * full
            evals += 1
            state = _reduced_residual(problem, cond, u_try, t, active, scale)
            if state is not None:
                norm_try = float(np.linalg.norm(state[0]))
                if norm_try <= tol_abs or norm_try < (1.0 - 1.0e-4) * norm:
                    accepted = (u_try, state, norm_try)
                    break
            if damping < 1.0e-3:
                break
            damping *= 0.5
        if accepted is None:
            return None, evals, norm, solves
        u, (r_red, tangent), norm = accepted


def _contact_sweeps(problem, cond, u, t, stepping, tol_abs, scale):
    """Active-set fixed point at one penalty scale; same return contract."""
    active = problem.contact_active_set(u, t)
    evals = solves = 0
    norm = float("inf")
    for _ in range(stepping.max_active_set_sweeps):
        u_new, ev, norm, sv = _iterate(
            problem, cond, u, t, stepping, tol_abs, active, scale
        )
        evals += ev
        solves += sv
        if u_new is None:
            return None, evals, norm, solves
        refreshed = problem.contact_active_set(u_new, t)
        if refreshed == active:
            return u_new, evals, norm, solves
        active = refreshed
        u = u_new
    return None, evals, norm, solves


# penalty continuation ladder for contact steps that stall under the
# nominal spring (softer solves are warm starts within the Newton basin
# of the next stiffer one)
_CONTACT_LADDER = (1.0e-3, 1.0e-2, 1.0e-1, 1.0)


def _solve_step(problem, cond, u, t, stepping, tol_abs):
    """One load increment: plain Newton, or contact-stabilized Newton.

    A gap-activated penalty kinks the residual exactly where the contact
    equilibrium sits, and Newton chatters across the kink instead of
    converging.  With contact present each increment is therefore solved
    on a frozen set of penalized quadrature points (a smooth problem),
    after which the set is refreshed from the penetrating points of the
    new state; the increment is converged when the set reproduces itself.
    If that still stalls — a stiff material can shrink the Newton basin
    of the near-rigid spring below the increment size — the increment is
    re-solved by continuation: the penalty is softened, then tightened
    back to nominal with each solution warm-starting the next.
    """
    if problem.contact is None:
        return _iterate(problem, cond, u, t, stepping, tol_abs)
    u_new, evals, norm, solves = _contact_sweeps(
        problem, cond, u, t, stepping, tol_abs, 1.0
    )
    if u_new is not None:
        return u_new, evals, norm, solves
    u_level = u
    for scale in _CONTACT_LADDER:
        u_level, ev, norm, sv = _contact_sweeps(
            problem, cond, u_level, t, stepping, tol_abs, scale
        )
        evals += ev
        solves += sv
        if u_level is None:
            return None, evals, norm, solves
    return u_level, evals, norm, solves


def newton_solve(problem, stepping=None, monitor=None, record_displacements=False):
    """Trace the solution from load factor 0 to 1.

    ``monitor(problem, u, t)`` may return a dict of scalars stored on each
    step record.  Returns ``(u, report)`` with the converged displacements
    at full load.  Raises :class:`NonConvergence` when a load increment
    still fails after the bisection budget, and :class:`SingularTangent`
    when the reduced tangent cannot be factorized.
    """
    stepping = stepping if stepping is not None else LoadStepping()
    cond = problem.condensation
    tol_abs = residual_tolerance(problem, stepping)
    u = np.zeros(problem.n_dofs)
    records = []
    n_solves = 0
    t = 0.0
    dt = 1.0 / stepping.n_steps
    while t < 1.0 - 1.0e-12:
        dt_try = min(dt, 1.0 - t)
        bisections = 0
        while True:
            t_try = t + dt_try
            u_new, iters, norm, solves = _solve_step(
                problem, cond, u, t_try, stepping, tol_abs
            )
            n_solves += solves
            if u_new is not None:
                break
            bisections += 1
            if bisections > stepping.max_bisections:
                raise NonConvergence(
                    f"no convergence at load factor {t_try:.6g} after "
                    f"{stepping.max_bisections} bisections",
                    report=NewtonReport(tuple(records), n_solves, False),
                )
            dt_try *= 0.5
        t = t_try
        u = u_new
        monitors = dict(monitor(problem, u, t)) if monitor is not None else {}
        if record_displacements:
            monitors["displacements"] = u.copy()
        records.append(StepRecord(t, iters, norm, monitors))
    return u, NewtonReport(tuple(records), n_solves, True)


def solve_enclosed_volume(problem, target_volume, stepping=None, monitor=None,
                          max_outer=40, volume_tol=1.0e-8):
    """Inflate to a prescribed enclosed volume by a secant loop on the load.

    The load case must contain a reference pressure; the returned report's
    final record carries the matching load factor and pressure-volume pair.
    Convergence is declared when the volume mismatch falls below
    ``volume_tol`` relative to the target.
    """
    stepping = stepping if stepping is not None else LoadStepping()
    cond = problem.condensation
    tol_abs = residual_tolerance(problem, stepping)
    u = np.zeros(problem.n_dofs)
    records = []
    n_solves = 0

    def volume_at(t, u_start):
        u_new, iters, norm, solves = _solve_step(
            problem, cond, u_start, t, stepping, tol_abs
        )
        if u_new is None:
            raise NonConvergence(
                f"no convergence during volume search at load factor {t:.6g}",
                report=NewtonReport(tuple(records), n_solves, False),
            )
        return u_new, problem.enclosed_volume(u_new), iters, norm, solves

    v0 = problem.enclosed_volume(u)
    t_prev, v_prev = 0.0, v0
    t_cur = 1.0 / stepping.n_steps
    for _ in range(max_outer):
        u, v_cur, iters, norm, solves = volume_at(t_cur, u)
        n_solves += solves
        monitors = dict(monitor(problem, u, t_cur)) if monitor is not None else {}
        monitors["enclosed_volume"] = v_cur
        records.append(StepRecord(t_cur, iters, norm, monitors))
        if abs(v_cur - target_volume) <= volume_tol * abs(target_volume):
            return u, NewtonReport(tuple(records), n_solves, True)
        dv = v_cur - v_prev
        if dv == 0.0:
            raise NonConvergence(
                "volume stagnated during the secant search",
                report=NewtonReport(tuple(records), n_solves, False),
            )
        t_next = t_cur + (target_volume - v_cur) * (t_cur - t_prev) / dv
        t_prev, v_prev = t_cur, v_cur
        t_cur = float(t_next)
    raise NonConvergence(
        "volume target not reached within the secant budget",
        report=NewtonReport(tuple(records), n_solves, False),
    )
