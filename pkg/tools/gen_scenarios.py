"""Regenerate the bundled scenario files under src/igashell/scenarios/.

Each file is produced from a Scenario instance via dump_scenario and then
reparsed to prove the bundle stays readable by the CLI.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from igashell.scenario import Scenario, dump_scenario, parse_scenario

THIRD = 1.0 / 3.0

STRIP = dict(thickness=0.3, width=3.0, length=9.0,
             elements_width=6, elements_length=18)
BEAM = dict(thickness=0.15, width=3.0, length=9.0,
            elements_width=6, elements_length=18)
SHEET = dict(thickness=0.25, side=10.0, elements=6)

SCENARIOS = []


def add(name, comment, kind, **kw):
    SCENARIOS.append((name, comment, Scenario(kind=kind, name=name, **kw)))


def goh(kappa, switch, angle):
    return dict(material="goh", kappa=kappa, switch=switch, fiber_angle=angle)


# --- uniaxial tension of a strip (membrane-dominated) -----------------------
for mat in ("nh", "mr", "fung"):
    add(f"uniaxial-{mat}",
        "strip pulled along its length; force is given as F/(EA)",
        "uniaxial_strip", material=mat, force=1.0, steps=10, **STRIP)
add("uniaxial-amr",
    "strip with two fiber families at +/-45 degrees",
    "uniaxial_strip", material="amr", fiber_angle=45.0,
    force=1.0, steps=10, **STRIP)
for tag, kappa in (("k0", 0.0), ("k0226", 0.226), ("k13", THIRD)):
    add(f"uniaxial-goh-{tag}",
        "strip with two dispersed fiber families at +/-30 degrees",
        "uniaxial_strip", force=1.0, steps=10,
        **goh(kappa, False, 30.0), **STRIP)
for tag, kappa in (("k0", 0.0), ("k0226", 0.226)):
    add(f"uniaxial-goh-{tag}-switch",
        "strip; compressed fibers carry no stress",
        "uniaxial_strip", force=1.0, steps=10,
        **goh(kappa, True, 30.0), **STRIP)

# --- cantilever driven by an end rotation (bending-dominated) ---------------
for mat in ("nh", "mr", "fung"):
    add(f"cantilever-{mat}",
        "slab clamped at one end; the far-edge normal is rotated to 90 deg",
        "cantilever_bending", material=mat, rotation=90.0, steps=20, **BEAM)
add("cantilever-amr",
    "cantilever with two fiber families at +/-45 degrees",
    "cantilever_bending", material="amr", fiber_angle=45.0,
    rotation=90.0, steps=20, **BEAM)
for tag, kappa in (("k0", 0.0), ("k0226", 0.226), ("k13", THIRD)):
    add(f"cantilever-goh-{tag}",
        "cantilever with two dispersed fiber families at +/-30 degrees",
        "cantilever_bending", rotation=90.0, steps=20,
        **goh(kappa, False, 30.0), **BEAM)
for tag, kappa in (("k0", 0.0), ("k0226", 0.226)):
    add(f"cantilever-goh-{tag}-switch",
        "cantilever; the tension switch makes the response "
        "asymmetric about the mid-surface",
        "cantilever_bending", rotation=90.0, steps=20, gauss_points=5,
        **goh(kappa, True, 30.0), **BEAM)

# --- clamped square plate under live pressure (mixed response) --------------
for mat in ("nh", "mr", "fung"):
    add(f"plate-{mat}",
        "quarter model of a clamped square plate under follower pressure",
        "pressurized_plate", material=mat, pressure=0.04, steps=20, **SHEET)
add("plate-amr",
    "clamped plate with two fiber families at +/-45 degrees",
    "pressurized_plate", material="amr", fiber_angle=45.0,
    pressure=0.04, steps=20, **SHEET)
for tag, kappa in (("k0", 0.0), ("k0226", 0.226), ("k13", THIRD)):
    add(f"plate-goh-{tag}",
        "clamped plate with two dispersed fiber families at +/-45 degrees",
        "pressurized_plate", pressure=0.04, steps=20, gauss_points=3,
        **goh(kappa, False, 45.0), **SHEET)
    add(f"plate-goh-{tag}-switch",
        "clamped plate; compressed fibers carry no stress",
        "pressurized_plate", pressure=0.04, steps=20, gauss_points=5,
        **goh(kappa, True, 45.0), **SHEET)

# --- spherical indentation of the same sheet (contact) ----------------------
for tag, kappa in (("k0226", 0.226), ("k13", THIRD)):
    add(f"indentation-goh-{tag}-switch",
        "rigid sphere of radius side/6 pressed into the sheet; the mesh is "
        "graded toward the contact zone",
        "indentation", depth=2.0, grading_ratio=4.0, steps=20, gauss_points=5,
        **goh(kappa, True, 45.0), **SHEET)


def main():
    out_dir = Path(__file__).resolve().parents[1] / "src/igashell/scenarios"
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, comment, sc in SCENARIOS:
        text = f"# {comment}\n" + dump_scenario(sc)
        assert parse_scenario(text, name=name) == sc, name
        (out_dir / f"{name}.scn").write_text(text, encoding="utf-8")
    print(f"wrote {len(SCENARIOS)} scenarios to {out_dir}")


if __name__ == "__main__":
    main()
