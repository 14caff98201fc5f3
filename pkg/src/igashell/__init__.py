"""Isogeometric Kirchhoff-Love thin shells for incompressible soft tissue.

The package solves large-deformation shell problems with quadratic NURBS
surfaces and five incompressible hyperelastic materials, each available
through three constitutive pipelines:

- ``"np"``: stress resultants integrated through the thickness by Gauss
  quadrature of the layer stresses;
- ``"ap"``: closed-form resultants projected analytically through the
  thickness (including the partially-stressed closed form when the fiber
  tension switch deactivates part of the cross-section);
- ``"dd"``: decoupled membrane and plate-like bending responses.

Typical use::

    from igashell import ShellProblem, make_material, make_strip, newton_solve

    mesh = make_strip(thickness=0.3, width=3.0, length=9.0, nel_w=6, nel_l=18)
    problem = ShellProblem(mesh, make_material("nh", 0.3), "np")
    report = newton_solve(problem)

The ``igashell`` console script runs the bundled benchmark scenarios; see
``igashell --help``.
"""

from .assembly import (
    Condensation,
    ConstraintSet,
    ContactSphere,
    DeadEdgeTraction,
    FollowerPressure,
    LoadCase,
    PointForce,
    PrescribedNormal,
    ShellProblem,
)
from .bench import (
    CurveResult,
    compare_pipelines,
    curve_csv_text,
    curve_deviation,
    read_curve_csv,
    run_scenario,
    sweep_gauss_points,
    sweep_thickness_ratio,
    verify_checks,
    write_curve_csv,
)
from .constitution import (
    StressResultants,
    SwitchInterval,
    TangentSet,
    default_gauss_points,
    switch_interval,
)
from .errors import (
    ConstitutiveOverflow,
    DegenerateElement,
    DegenerateLayer,
    IgaShellError,
    InvalidDimensions,
    NonConvergence,
    NonPositiveLayerJacobian,
    OutOfDomain,
    ParseError,
    SingularTangent,
    SolverFailure,
    UnsupportedGeometry,
)
from .materials import MaterialSpec, make_material
from .mesh import (
    ShellMesh,
    build_mesh,
    graded_refinement,
    make_hemitube,
    make_plate,
    make_strip,
)
from .scenario import Scenario, dump_scenario, load_scenario, parse_scenario
from .solver import (
    LoadStepping,
    NewtonReport,
    StepRecord,
    newton_solve,
    solve_enclosed_volume,
)

__version__ = "1.0.0"

__all__ = [
    "Condensation",
    "ConstitutiveOverflow",
    "ConstraintSet",
    "ContactSphere",
    "CurveResult",
    "DeadEdgeTraction",
    "DegenerateElement",
    "DegenerateLayer",
    "FollowerPressure",
    "IgaShellError",
    "InvalidDimensions",
    "LoadCase",
    "LoadStepping",
    "MaterialSpec",
    "NewtonReport",
    "NonConvergence",
    "NonPositiveLayerJacobian",
    "OutOfDomain",
    "ParseError",
    "PointForce",
    "PrescribedNormal",
    "Scenario",
    "ShellMesh",
    "ShellProblem",
    "SingularTangent",
    "SolverFailure",
    "StepRecord",
    "StressResultants",
    "SwitchInterval",
    "TangentSet",
    "UnsupportedGeometry",
    "build_mesh",
    "compare_pipelines",
    "curve_csv_text",
    "curve_deviation",
    "default_gauss_points",
    "dump_scenario",
    "graded_refinement",
    "load_scenario",
    "make_hemitube",
    "make_material",
    "make_plate",
    "make_strip",
    "newton_solve",
    "parse_scenario",
    "read_curve_csv",
    "run_scenario",
    "solve_enclosed_volume",
    "sweep_gauss_points",
    "sweep_thickness_ratio",
    "switch_interval",
    "verify_checks",
    "write_curve_csv",
]
