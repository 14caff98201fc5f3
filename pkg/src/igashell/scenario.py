"""Plain-text scenario files describing one benchmark analysis.

The format is line oriented and deterministic: ``[section]`` headers group
``key = value`` pairs, ``#`` starts a comment, blank lines are ignored.
Sections and keys are whitelisted per benchmark kind; anything unknown is
rejected with the offending line number so that typos cannot silently fall
back to defaults.

Example::

    [scenario]
    kind = uniaxial_strip
    name = uniaxial-nh

    [geometry]
    thickness = 0.3
    width = 3.0
    length = 9.0
    elements_width = 6
    elements_length = 18

    [material]
    model = nh

    [pipeline]
    model = np

    [loads]
    force = 1.0

    [stepping]
    steps = 10
"""

import os
from dataclasses import dataclass

from .errors import ParseError

KINDS = (
    "uniaxial_strip",
    "cantilever_bending",
    "pressurized_plate",
    "indentation",
)

MATERIAL_MODELS = ("nh", "mr", "fung", "amr", "goh")
PIPELINE_MODELS = ("np", "ap", "dd")

# Monitored quantity per benchmark kind (the response column of the curve).
MONITORS = {
    "uniaxial_strip": "tip_displacement",
    "cantilever_bending": "reaction_moment",
    "pressurized_plate": "center_deflection",
    "indentation": "contact_force",
}


@dataclass(frozen=True)
class Scenario:
    """One fully specified benchmark analysis."""

    kind: str
    name: str = ""
    # geometry
    thickness: float = 0.3
    width: float = 3.0
    length: float = 9.0
    side: float = 10.0
    elements_width: int = 6
    elements_length: int = 18
    elements: int = 6
    grading_ratio: float = 1.0
    # material
    material: str = "nh"
    kappa: float = 0.0
    switch: bool = False
    fiber_angle: float = 45.0
    # pipeline
    pipeline: str = "np"
    gauss_points: int = None
    # loads
    force: float = 1.0
    rotation: float = 90.0
    pressure: float = 0.04
    depth: float = 2.0
    radius: float = None
    # stepping
    steps: int = 20
    max_iterations: int = 25
    max_bisections: int = 8
    # output
    monitor: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParseError(f"unknown scenario kind {self.kind!r}")
        if self.material not in MATERIAL_MODELS:
            raise ParseError(f"unknown material model {self.material!r}")
        if self.pipeline not in PIPELINE_MODELS:
            raise ParseError(f"unknown pipeline {self.pipeline!r}")
        if self.switch and self.material != "goh":
            raise ParseError("the fiber switch requires the goh material")
        if not self.monitor:
            object.__setattr__(self, "monitor", MONITORS[self.kind])
        if not self.name:
            object.__setattr__(self, "name", self.kind.replace("_", "-"))


# key -> (scenario field, converter); geometry keys differ per kind
_BOOLS = {"on": True, "off": False, "true": True, "false": False,
          "yes": True, "no": False}


def _to_bool(text):
    try:
        return _BOOLS[text.lower()]
    except KeyError:
        raise ValueError(f"expected on/off, got {text!r}") from None


_SECTION_KEYS = {
    "scenario": {"kind": str, "name": str},
    "geometry": {
        "thickness": float, "width": float, "length": float, "side": float,
        "elements_width": int, "elements_length": int, "elements": int,
        "grading_ratio": float,
    },
    "material": {
        "model": str, "kappa": float, "switch": _to_bool, "fiber_angle": float,
    },
    "pipeline": {"model": str, "gauss_points": int},
    "loads": {
        "force": float, "rotation": float, "pressure": float,
        "depth": float, "radius": float,
    },
    "stepping": {"steps": int, "max_iterations": int, "max_bisections": int},
    "output": {"monitor": str},
}

# scenario-field name for keys whose section key differs from the field
_FIELD_OF = {
    ("material", "model"): "material",
    ("pipeline", "model"): "pipeline",
}

# per-kind whitelist of (section, key) pairs beyond the common ones
_COMMON_KEYS = {
    ("scenario", "kind"), ("scenario", "name"),
    ("geometry", "thickness"),
    ("material", "model"), ("material", "kappa"), ("material", "switch"),
    ("material", "fiber_angle"),
    ("pipeline", "model"), ("pipeline", "gauss_points"),
    ("stepping", "steps"), ("stepping", "max_iterations"),
    ("stepping", "max_bisections"),
    ("output", "monitor"),
}

_KIND_KEYS = {
    "uniaxial_strip": {
        ("geometry", "width"), ("geometry", "length"),
        ("geometry", "elements_width"), ("geometry", "elements_length"),
        ("loads", "force"),
    },
    "cantilever_bending": {
        ("geometry", "width"), ("geometry", "length"),
        ("geometry", "elements_width"), ("geometry", "elements_length"),
        ("loads", "rotation"),
    },
    "pressurized_plate": {
        ("geometry", "side"), ("geometry", "elements"),
        ("loads", "pressure"),
    },
    "indentation": {
        ("geometry", "side"), ("geometry", "elements"),
        ("geometry", "grading_ratio"),
        ("loads", "depth"), ("loads", "radius"),
    },
}


def parse_scenario(text, name=""):
    """Parse scenario text into a :class:`Scenario`.

    Raises :class:`~igashell.errors.ParseError` with a line number for any
    malformed line, unknown section, unknown key, key outside its kind's
    whitelist, bad value, or duplicate key.
    """
    section = None
    raw = {}
    lines_of = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ParseError("unterminated section header", line=lineno)
            section = stripped[1:-1].strip()
            if section not in _SECTION_KEYS:
                raise ParseError(f"unknown section [{section}]", line=lineno)
            continue
        if "=" not in stripped:
            raise ParseError("expected 'key = value'", line=lineno)
        if section is None:
            raise ParseError("key outside of any [section]", line=lineno)
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SECTION_KEYS[section]:
            raise ParseError(f"unknown key {key!r} in [{section}]", line=lineno)
        if (section, key) in raw:
            raise ParseError(f"duplicate key {key!r}", line=lineno)
        raw[(section, key)] = value
        lines_of[(section, key)] = lineno

    if ("scenario", "kind") not in raw:
        raise ParseError("missing required key 'kind' in [scenario]")
    kind = raw[("scenario", "kind")]
    if kind not in KINDS:
        raise ParseError(
            f"unknown scenario kind {kind!r}", line=lines_of[("scenario", "kind")]
        )
    allowed = _COMMON_KEYS | _KIND_KEYS[kind]
    values = {"kind": kind}
    if name:
        values["name"] = name
    for (section, key), value in raw.items():
        if (section, key) == ("scenario", "kind"):
            continue
        if (section, key) not in allowed:
            raise ParseError(
                f"key {key!r} in [{section}] does not apply to kind {kind!r}",
                line=lines_of[(section, key)],
            )
        conv = _SECTION_KEYS[section][key]
        try:
            converted = conv(value)
        except ValueError as exc:
            raise ParseError(str(exc), line=lines_of[(section, key)]) from None
        values[_FIELD_OF.get((section, key), key)] = converted
    return Scenario(**values)


def load_scenario(path):
    """Read and parse one scenario file."""
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    default_name = os.path.splitext(os.path.basename(path))[0]
    return parse_scenario(text, name=default_name)


def dump_scenario(sc):
    """Serialize a scenario back to its file format (used by tooling)."""
    out = ["[scenario]", f"kind = {sc.kind}", f"name = {sc.name}", ""]
    out.append("[geometry]")
    out.append(f"thickness = {sc.thickness!r}")
    if sc.kind in ("uniaxial_strip", "cantilever_bending"):
        out.append(f"width = {sc.width!r}")
        out.append(f"length = {sc.length!r}")
        out.append(f"elements_width = {sc.elements_width}")
        out.append(f"elements_length = {sc.elements_length}")
    else:
        out.append(f"side = {sc.side!r}")
        out.append(f"elements = {sc.elements}")
        if sc.kind == "indentation":
            out.append(f"grading_ratio = {sc.grading_ratio!r}")
    out.append("")
    out.append("[material]")
    out.append(f"model = {sc.material}")
    if sc.material == "goh":
        out.append(f"kappa = {sc.kappa!r}")
        out.append(f"switch = {'on' if sc.switch else 'off'}")
    if sc.material in ("amr", "goh"):
        out.append(f"fiber_angle = {sc.fiber_angle!r}")
    out.append("")
    out.append("[pipeline]")
    out.append(f"model = {sc.pipeline}")
    if sc.gauss_points is not None:
        out.append(f"gauss_points = {sc.gauss_points}")
    out.append("")
    out.append("[loads]")
    if sc.kind == "uniaxial_strip":
        out.append(f"force = {sc.force!r}")
    elif sc.kind == "cantilever_bending":
        out.append(f"rotation = {sc.rotation!r}")
    elif sc.kind == "pressurized_plate":
        out.append(f"pressure = {sc.pressure!r}")
    else:
        out.append(f"depth = {sc.depth!r}")
        if sc.radius is not None:
            out.append(f"radius = {sc.radius!r}")
    out.append("")
    out.append("[stepping]")
    out.append(f"steps = {sc.steps}")
    out.append("")
    return "\n".join(out)
