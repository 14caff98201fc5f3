"""Benchmark driver: scenarios -> assembled problems -> response curves.

Four benchmark kinds are supported, one per class of shell response:

- ``uniaxial_strip``: membrane-dominated stretch of a rectangular strip
  pulled at one corner of an edge whose axial displacements are tied equal;
  curve = normalized force F/(EA) vs normalized tip displacement v/L.
- ``cantilever_bending``: bending-dominated response driven by rotating the
  free-edge normal; curve = rotation angle vs normalized moment M L/(E I).
- ``pressurized_plate``: mixed membrane/bending of a clamped square plate
  (quarter model) under live pressure; curve = pressure vs center deflection.
- ``indentation``: frictionless rigid-sphere indentation of the same plate
  on a corner-graded mesh; curve = depth vs total contact force.

Every run emits one row per converged load step: (load factor, control
value, response value, iteration count), preceded by self-describing
normalization comments.  Outputs are deterministic for a fixed scenario.
"""

import io
import math
from dataclasses import dataclass

import numpy as np

from .assembly import (
    ConstraintSet,
    ContactSphere,
    FollowerPressure,
    LoadCase,
    PointForce,
    PrescribedNormal,
    ShellProblem,
)
from .materials import make_material
from .mesh import graded_refinement, make_plate, make_strip
from .solver import LoadStepping, newton_solve


@dataclass(frozen=True)
class CurveResult:
    """One solved benchmark curve plus its labeling metadata."""

    scenario: object
    pipeline_label: str
    control_label: str
    response_label: str
    notes: tuple
    load_factors: np.ndarray
    control: np.ndarray
    response: np.ndarray
    iterations: np.ndarray
    report: object


def fiber_directions_for(sc):
    """Two symmetric in-plane fiber families at +-fiber_angle from the
    loading axis (e2 for strips, e2 of the plate plane otherwise)."""
    mat_needs = sc.material in ("amr", "goh")
    if not mat_needs:
        return ()
    theta = math.radians(sc.fiber_angle)
    return (
        np.array([math.sin(theta), math.cos(theta), 0.0]),
        np.array([-math.sin(theta), math.cos(theta), 0.0]),
    )


def material_for(sc, thickness=None):
    return make_material(
        sc.material,
        sc.thickness if thickness is None else thickness,
        kappa=sc.kappa,
        switch=sc.switch,
    )


def stepping_for(sc, steps=None):
    return LoadStepping(
        n_steps=steps if steps is not None else sc.steps,
        max_iterations=sc.max_iterations,
        max_bisections=sc.max_bisections,
    )


def pipeline_label(pipeline, n_gp):
    return f"np({n_gp})" if pipeline == "np" else pipeline


@dataclass(frozen=True)
class _Model:
    problem: ShellProblem
    monitor: object
    control_label: str
    response_label: str
    notes: tuple
    control_of: object


def build_model(sc, pipeline=None, n_gp=None, thickness=None):
    """Assemble the ShellProblem and monitors of one scenario.

    ``pipeline``, ``n_gp`` and ``thickness`` override the scenario (used by
    comparison and sweep drivers so every variant shares one mesh recipe).
    """
    pipeline = pipeline if pipeline is not None else sc.pipeline
    builder = _BUILDERS[sc.kind]
    return builder(sc, pipeline, n_gp, thickness)


def _build_uniaxial(sc, pipeline, n_gp, thickness):
    t = sc.thickness if thickness is None else thickness
    mat = material_for(sc, t)
    mesh = make_strip(t, sc.width, sc.length, sc.elements_width, sc.elements_length)
    master = mesh.corner_index("u-min", "v-max")
    bottom = mesh.boundary_rows("v-min")
    fixed = [(i, 1) for i in bottom]
    fixed.append((mesh.corner_index("u-min", "v-min"), 0))
    # membrane test: the deformation stays in-plane, so the out-of-plane
    # component is removed everywhere (it is load-free and otherwise leaves
    # neutral bending modes at zero load)
    fixed.extend((i, 2) for i in range(mesh.n_ctrl))
    ties = [((i, 1), (master, 1)) for i in mesh.boundary_rows("v-max")
            if i != master]
    area = sc.width * t
    f_total = sc.force * mat.young_equivalent * area
    problem = ShellProblem(
        mesh, mat, pipeline,
        fiber_directions=fiber_directions_for(sc),
        loads=LoadCase(point_forces=(PointForce(master, (0.0, f_total, 0.0)),)),
        constraints=ConstraintSet(fixed=tuple(fixed), ties=tuple(ties)),
        n_gp_thickness=n_gp,
    )

    def monitor(prob, u, t_load):
        return {"response": u.reshape(-1, 3)[master, 1] / sc.length}

    notes = (
        f"normalization: E = {mat.young_equivalent:g} kPa, "
        f"A = W*T = {area:g} mm^2",
        "control: F/(E*A) applied at the tied edge corner",
        "response: v/L of the loaded corner",
    )
    return _Model(
        problem, monitor, "F_over_EA", "v_over_L", notes,
        lambda tl: tl * sc.force,
    )


def _build_cantilever(sc, pipeline, n_gp, thickness):
    t = sc.thickness if thickness is None else thickness
    mat = material_for(sc, t)
    mesh = make_strip(t, sc.width, sc.length, sc.elements_width, sc.elements_length)
    angle = math.radians(sc.rotation)
    problem = ShellProblem(
        mesh, mat, pipeline,
        fiber_directions=fiber_directions_for(sc),
        loads=LoadCase(prescribed_normals=(
            PrescribedNormal("v-max", (1.0, 0.0, 0.0), angle),
        )),
        constraints=ConstraintSet(clamped_edges=("v-min",)),
        n_gp_thickness=n_gp,
    )
    inertia = sc.width * t ** 3 / 12.0
    scale = sc.length / (mat.young_equivalent * inertia)

    def monitor(prob, u, t_load):
        return {"response": prob.reaction_moment(u, t_load) * scale}

    notes = (
        f"normalization: E = {mat.young_equivalent:g} kPa, "
        f"I = W*T^3/12 = {inertia:g} mm^4, L = {sc.length:g} mm",
        "control: prescribed edge rotation [deg]",
        "response: M*L/(E*I) recovered from the normal penalty",
    )
    return _Model(
        problem, monitor, "alpha_deg", "ML_over_EI", notes,
        lambda tl: tl * sc.rotation,
    )


def _quarter_plate_mesh(sc, t):
    return make_plate(t, 0.5 * sc.side, sc.elements)


def _build_plate(sc, pipeline, n_gp, thickness):
    t = sc.thickness if thickness is None else thickness
    mat = material_for(sc, t)
    mesh = _quarter_plate_mesh(sc, t)
    center = mesh.corner_index("u-min", "v-min")
    problem = ShellProblem(
        mesh, mat, pipeline,
        fiber_directions=fiber_directions_for(sc),
        loads=LoadCase(pressure=FollowerPressure(sc.pressure)),
        constraints=ConstraintSet(
            clamped_edges=("u-max", "v-max"),
            symmetry=(("u-min", 0), ("v-min", 1)),
        ),
        n_gp_thickness=n_gp,
    )

    def monitor(prob, u, t_load):
        return {"response": u.reshape(-1, 3)[center, 2]}

    notes = (
        f"quarter model of a {sc.side:g} x {sc.side:g} clamped plate",
        "control: live pressure [kPa]",
        "response: center deflection w [mm]",
    )
    return _Model(
        problem, monitor, "pressure", "w_center", notes,
        lambda tl: tl * sc.pressure,
    )


def _build_indentation(sc, pipeline, n_gp, thickness):
    t = sc.thickness if thickness is None else thickness
    mat = material_for(sc, t)
    mesh = _quarter_plate_mesh(sc, t)
    if sc.grading_ratio != 1.0:
        mesh = graded_refinement(mesh, "min-corner", sc.grading_ratio)
    radius = sc.radius if sc.radius is not None else sc.side / 6.0
    sphere = ContactSphere(
        radius,
        center_start=(0.0, 0.0, radius),
        center_end=(0.0, 0.0, radius - sc.depth),
    )
    outer = [
        (i, c)
        for side in ("u-max", "v-max")
        for i in mesh.boundary_rows(side)
        for c in range(3)
    ]
    problem = ShellProblem(
        mesh, mat, pipeline,
        fiber_directions=fiber_directions_for(sc),
        constraints=ConstraintSet(
            fixed=tuple(outer),
            symmetry=(("u-min", 0), ("v-min", 1)),
        ),
        contact=sphere,
        n_gp_thickness=n_gp,
    )

    def monitor(prob, u, t_load):
        f_c, _ = prob.contact_force_and_tangent(u, t_load)
        # quarter model: 4x the quarter resultant; reported positive downward
        return {"response": -4.0 * float(f_c.reshape(-1, 3)[:, 2].sum())}

    notes = (
        f"quarter model, rigid sphere R = {radius:g} mm driven into the sheet",
        "control: indentation depth [mm]",
        "response: total vertical contact force [kPa mm^2], full sheet",
    )
    return _Model(
        problem, monitor, "depth", "contact_force", notes,
        lambda tl: tl * sc.depth,
    )


_BUILDERS = {
    "uniaxial_strip": _build_uniaxial,
    "cantilever_bending": _build_cantilever,
    "pressurized_plate": _build_plate,
    "indentation": _build_indentation,
}


def run_scenario(sc, pipeline=None, n_gp=None, thickness=None, steps=None):
    """Solve one scenario and return its :class:`CurveResult`."""
    pipeline = pipeline if pipeline is not None else sc.pipeline
    model = build_model(sc, pipeline, n_gp, thickness)
    if n_gp is None:
        n_gp = model.problem.n_gp_thickness
    _, report = newton_solve(
        model.problem, stepping_for(sc, steps), monitor=model.monitor
    )
    load_factors = np.concatenate([[0.0], report.load_factors])
    control = np.array([model.control_of(t) for t in load_factors])
    response = np.concatenate([[0.0], report.monitor("response")])
    iterations = np.concatenate(
        [[0], [s.iterations for s in report.steps]]
    ).astype(int)
    return CurveResult(
        scenario=sc,
        pipeline_label=pipeline_label(pipeline, n_gp),
        control_label=model.control_label,
        response_label=model.response_label,
        notes=model.notes,
        load_factors=load_factors,
        control=control,
        response=response,
        iterations=iterations,
        report=report,
    )


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------


def curve_csv_text(result):
    """Serialize one curve with self-describing comment headers."""
    out = io.StringIO()
    sc = result.scenario
    out.write(f"# scenario: {sc.name}\n")
    out.write(f"# kind: {sc.kind}\n")
    mat_desc = sc.material
    if sc.material == "goh":
        mat_desc += f" (kappa = {sc.kappa!r}, switch = {'on' if sc.switch else 'off'})"
    if sc.material in ("amr", "goh"):
        mat_desc += f", fibers at +-{sc.fiber_angle!r} deg"
    out.write(f"# material: {mat_desc}\n")
    out.write(f"# pipeline: {result.pipeline_label}\n")
    for note in result.notes:
        out.write(f"# {note}\n")
    out.write(f"load_factor,{result.control_label},{result.response_label},iterations\n")
    for t, c, r, it in zip(
        result.load_factors, result.control, result.response, result.iterations
    ):
        out.write(f"{t!r},{c!r},{r!r},{int(it)}\n")
    return out.getvalue()


def write_curve_csv(result, path):
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(curve_csv_text(result))


def read_curve_csv(path):
    """Read back (load_factor, control, response, iterations) columns."""
    rows = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("load_factor"):
                continue
            t, c, r, it = line.split(",")
            rows.append((float(t), float(c), float(r), int(it)))
    arr = np.array(rows)
    return arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3].astype(int)


# ---------------------------------------------------------------------------
# comparison and sweep drivers
# ---------------------------------------------------------------------------


def curve_deviation(reference, other):
    """Max relative deviation of the response columns at shared steps."""
    ref = reference.response
    floor = 1.0e-12 * max(1.0, float(np.abs(ref).max()))
    dev = 0.0
    for r, o in zip(ref, other.response):
        dev = max(dev, abs(o - r) / max(abs(r), floor))
    return float(dev)


def compare_pipelines(sc, pipelines, steps=None):
    """Run one scenario under several pipelines on the identical mesh.

    Returns (results, deviations) where deviations maps pipeline label to
    the max relative deviation from the first (reference) pipeline.
    """
    if len(pipelines) < 2:
        raise ValueError("comparison needs at least two pipelines")
    results = []
    for spec in pipelines:
        pip, n_gp = spec if isinstance(spec, tuple) else (spec, None)
        results.append(run_scenario(sc, pipeline=pip, n_gp=n_gp, steps=steps))
    reference = results[0]
    deviations = {
        r.pipeline_label: curve_deviation(reference, r) for r in results[1:]
    }
    return results, deviations


def sweep_gauss_points(sc, values, steps=None):
    """NP(n_gp) error against the closed-form reference, per n_gp value."""
    if len(values) < 2:
        raise ValueError("a sweep needs at least two axis values")
    reference = run_scenario(sc, pipeline="ap", steps=steps)
    rows = []
    for n in values:
        result = run_scenario(sc, pipeline="np", n_gp=int(n), steps=steps)
        rows.append((int(n), curve_deviation(reference, result)))
    return reference, rows


def sweep_thickness_ratio(sc, values, steps=None):
    """AP error against NP(5), per thickness/width ratio value."""
    if len(values) < 2:
        raise ValueError("a sweep needs at least two axis values")
    if sc.kind not in ("uniaxial_strip", "cantilever_bending"):
        raise ValueError("thickness sweeps need a strip-based scenario")
    rows = []
    for ratio in values:
        t = ratio * sc.width
        reference = run_scenario(sc, pipeline="np", n_gp=5, thickness=t, steps=steps)
        result = run_scenario(sc, pipeline="ap", thickness=t, steps=steps)
        rows.append((float(ratio), curve_deviation(reference, result)))
    return rows


def sweep_csv_text(sc, axis_label, rows):
    out = io.StringIO()
    out.write(f"# scenario: {sc.name}\n")
    out.write(f"# sweep axis: {axis_label}\n")
    out.write("# error: max relative deviation of the response curve\n")
    out.write(f"{axis_label},error\n")
    for value, err in rows:
        out.write(f"{value!r},{err!r}\n")
    return out.getvalue()


# ---------------------------------------------------------------------------
# self-verification suite
# ---------------------------------------------------------------------------


def _fd_tangent_error(problem, u, rng, n_cols=6, corrupt=False):
    """Max relative FD error over sampled assembled-tangent columns."""
    _, k = problem.internal_force_and_tangent(u)
    k = k.toarray()
    cols = rng.choice(u.size, size=n_cols, replace=False)
    if corrupt:
        i = int(np.argmax(np.abs(k[:, cols[0]])))
        k[i, cols[0]] *= 1.001
    h = 1.0e-6
    worst = 0.0
    for col in cols:
        du = np.zeros(u.size)
        du[col] = h
        fp, _ = problem.internal_force_and_tangent(u + du)
        fm, _ = problem.internal_force_and_tangent(u - du)
        fd = (fp - fm) / (2 * h)
        scale = max(float(np.linalg.norm(k[:, col])), 1.0e-12)
        worst = max(worst, float(np.linalg.norm(fd - k[:, col])) / scale)
    return worst


def _bent_probe(mesh, rng, amplitude=1.0e-2):
    """Gentle cylindrical-bend + noise displacement for FD probing."""
    ref = mesh.patch.points.reshape(-1, 3)
    x = ref.copy()
    lam, radius = 1.002, 0.75 * ref[:, 1].max()
    arc = lam * ref[:, 1] / radius
    x[:, 1] = radius * np.sin(arc)
    x[:, 2] = radius * (1.0 - np.cos(arc))
    u = (x - ref).ravel()
    return u + amplitude * rng.standard_normal(u.size)


def verify_checks(seed=0, corrupt_tangent=False):
    """Run the deterministic self-verification suite.

    Returns a list of ``(name, passed, detail)`` tuples.  With
    ``corrupt_tangent=True`` one assembled tangent is perturbed on purpose;
    the corresponding check must then FAIL, demonstrating that the finite-
    difference harness can actually catch a broken tangent.
    """
    from .constitution import switch_interval
    from .kinematics import reference_point

    rng = np.random.default_rng(seed)
    checks = []

    def record(name, passed, detail):
        checks.append((name, bool(passed), detail))

    mesh = make_strip(0.05, 1.0, 2.0, 2, 4)
    theta = math.radians(30.0)
    fibers = (
        np.array([math.sin(theta), math.cos(theta), 0.0]),
        np.array([-math.sin(theta), math.cos(theta), 0.0]),
    )
    configs = [
        ("nh", "np", ()), ("nh", "ap", ()), ("nh", "dd", ()),
        ("goh-switch", "np", fibers), ("goh-switch", "ap", fibers),
    ]
    for label, pipeline, dirs in configs:
        switch = label.endswith("switch")
        mat = make_material("goh" if switch else label, 0.05,
                            kappa=0.0, switch=switch)
        problem = ShellProblem(mesh, mat, pipeline, fiber_directions=dirs)
        u = _bent_probe(mesh, rng)
        corrupt = corrupt_tangent and label == "nh" and pipeline == "np"
        err = _fd_tangent_error(problem, u, rng, corrupt=corrupt)
        name = f"assembled-tangent-fd [{label}/{pipeline}]"
        detail = f"max column error {err:.2e} (tol 1e-5)"
        if corrupt:
            detail += " [intentionally corrupted]"
        record(name, err < 1.0e-5, detail)

    mat = make_material("nh", 0.05)
    loaded = ShellProblem(
        mesh, mat, "np",
        loads=LoadCase(
            pressure=FollowerPressure(0.02),
            prescribed_normals=(PrescribedNormal("v-max", (1, 0, 0), 0.3),),
        ),
    )
    u = _bent_probe(mesh, rng)
    h = 1.0e-6
    _, ke = loaded.external_force_and_tangent(u, 1.0)
    ke = ke.toarray()
    worst = 0.0
    for col in rng.choice(u.size, size=6, replace=False):
        du = np.zeros(u.size)
        du[col] = h
        fp, _ = loaded.external_force_and_tangent(u + du, 1.0)
        fm, _ = loaded.external_force_and_tangent(u - du, 1.0)
        fd = (fp - fm) / (2 * h)
        scale = max(float(np.linalg.norm(ke[:, col])), 1.0e-12)
        worst = max(worst, float(np.linalg.norm(fd - ke[:, col])) / scale)
    record("load-tangent-fd", worst < 1.0e-5,
           f"max column error {worst:.2e} (tol 1e-5)")

    plate = make_plate(0.05, 2.0, 3)
    sphere = ContactSphere(0.6, (0.0, 0.0, 0.6), (0.0, 0.0, 0.3))
    touching = ShellProblem(mesh=plate, material=mat, pipeline="np",
                            contact=sphere)
    u = 1.0e-2 * rng.standard_normal(touching.n_dofs)
    fc0, kc = touching.contact_force_and_tangent(u, 1.0)
    kc = kc.toarray()
    active = np.flatnonzero(np.abs(fc0) > 0)
    worst = 0.0
    for col in rng.choice(active, size=min(6, active.size), replace=False):
        du = np.zeros(u.size)
        du[col] = h
        fp, _ = touching.contact_force_and_tangent(u + du, 1.0)
        fm, _ = touching.contact_force_and_tangent(u - du, 1.0)
        fd = (fp - fm) / (2 * h)
        scale = max(float(np.linalg.norm(kc[:, col])), 1.0e-12)
        worst = max(worst, float(np.linalg.norm(fd - kc[:, col])) / scale)
    record("contact-tangent-fd", worst < 1.0e-4,
           f"max column error {worst:.2e} (tol 1e-4)")

    thickness = 0.4
    worst = 0.0
    xi = np.linspace(-thickness / 2, thickness / 2, 4001)
    dxi = xi[1] - xi[0]
    for _ in range(500):
        i4 = float(rng.uniform(0.5, 1.5))
        deriv = float(rng.uniform(-3.0, 3.0))
        interval = switch_interval(i4, deriv, thickness)
        mask = i4 + xi * deriv > 1.0
        if interval.empty:
            inside = np.zeros_like(mask)
        else:
            inside = (xi >= interval.lower) & (xi <= interval.upper)
        err = float(np.abs(inside.astype(float) - mask.astype(float)).sum()) * dxi
        worst = max(worst, err)
    record("switch-interval-scan", worst < thickness * 1.0e-3,
           f"max mismatch measure {worst:.2e} (tol {thickness * 1.0e-3:.1e})")

    sc = _verify_scenario()
    tips = {}
    for pipeline in ("np", "ap", "dd"):
        tips[pipeline] = run_scenario(sc, pipeline=pipeline).response[-1]
    dev = max(abs(tips["ap"] - tips["np"]), abs(tips["dd"] - tips["np"]))
    dev /= abs(tips["np"])
    record("membrane-pipeline-equivalence", dev < 1.0e-6,
           f"np/ap/dd tip deviation {dev:.2e} (tol 1e-6)")

    problem = ShellProblem(mesh, mat, "np")
    u = _bent_probe(mesh, rng, amplitude=2.0e-3)
    f_int, _ = problem.internal_force_and_tangent(u)
    worst = 0.0
    for col in rng.choice(u.size, size=6, replace=False):
        du = np.zeros(u.size)
        du[col] = h
        fd = (problem.internal_energy(u + du) - problem.internal_energy(u - du)) / (2 * h)
        worst = max(worst, abs(fd - f_int[col]) / max(abs(fd), 1.0e-12))
    record("energy-gradient", worst < 1.0e-5,
           f"max component error {worst:.2e} (tol 1e-5)")

    return checks


def _verify_scenario():
    from .scenario import Scenario

    return Scenario(kind="uniaxial_strip", name="verify-membrane",
                    material="nh", width=1.0, length=3.0,
                    elements_width=3, elements_length=6,
                    force=0.5, steps=2)
