"""Scenario text format: parsing, validation and the bundled set."""

import pytest

from igashell import cli
from igashell.errors import ParseError
from igashell.scenario import (
    KINDS,
    MONITORS,
    Scenario,
    dump_scenario,
    load_scenario,
    parse_scenario,
)

MINIMAL = """\
[scenario]
kind = uniaxial_strip
name = tiny

[geometry]
thickness = 0.1
width = 1.0
length = 2.0
elements_width = 2
elements_length = 4

[loads]
force = 0.25

[stepping]
steps = 3
"""


def test_parse_minimal():
    sc = parse_scenario(MINIMAL)
    assert sc.kind == "uniaxial_strip"
    assert sc.name == "tiny"
    assert sc.thickness == 0.1
    assert sc.force == 0.25
    assert sc.steps == 3
    # untouched fields fall back to defaults
    assert sc.material == "nh"
    assert sc.pipeline == "np"
    assert sc.gauss_points is None


def test_monitor_and_name_defaults():
    for kind in KINDS:
        sc = Scenario(kind=kind)
        assert sc.monitor == MONITORS[kind]
        assert sc.name == kind.replace("_", "-")


def test_comments_and_blank_lines_ignored():
    text = "# leading comment\n\n[scenario]\nkind = indentation  # trailing\n"
    sc = parse_scenario(text)
    assert sc.kind == "indentation"


def test_roundtrip_through_dump():
    sc = Scenario(kind="cantilever_bending", name="rt", material="goh",
                  kappa=0.226, switch=True, fiber_angle=30.0,
                  thickness=0.15, gauss_points=5, rotation=45.0, steps=7)
    assert parse_scenario(dump_scenario(sc), name="rt") == sc


def test_load_scenario_names_after_file(tmp_path):
    path = tmp_path / "my-run.scn"
    path.write_text(MINIMAL.replace("name = tiny\n", ""), encoding="utf-8")
    sc = load_scenario(path)
    assert sc.name == "my-run"


@pytest.mark.parametrize("text,line,fragment", [
    ("kind = uniaxial_strip\n", 1, "outside of any [section]"),
    ("[scenario]\nkind = bogus\n", 2, "unknown scenario kind 'bogus'"),
    ("[bogus]\n", 1, "unknown section [bogus]"),
    ("[scenario]\nbad line\n", 2, "expected 'key = value'"),
    ("[scenario]\nkind = uniaxial_strip\nkind = uniaxial_strip\n", 3,
     "duplicate key 'kind'"),
    ("[scenario]\nkind = uniaxial_strip\n[loads]\npressure = 1.0\n", 4,
     "does not apply to kind 'uniaxial_strip'"),
    ("[scenario]\nkind = uniaxial_strip\n[geometry]\nbogus = 1\n", 4,
     "unknown key 'bogus'"),
    ("[scenario]\nkind = uniaxial_strip\n[stepping]\nsteps = many\n", 4,
     "invalid literal"),
])
def test_parse_errors_carry_line_numbers(text, line, fragment):
    with pytest.raises(ParseError) as err:
        parse_scenario(text)
    assert f"line {line}:" in str(err.value)
    assert fragment in str(err.value)


def test_missing_kind_rejected():
    with pytest.raises(ParseError, match="missing required key 'kind'"):
        parse_scenario("[scenario]\nname = x\n")


def test_switch_requires_goh():
    with pytest.raises(ParseError, match="switch requires the goh"):
        Scenario(kind="uniaxial_strip", material="nh", switch=True)


def test_bool_values():
    base = "[scenario]\nkind = uniaxial_strip\n[material]\nmodel = goh\nswitch = %s\n"
    assert parse_scenario(base % "on").switch is True
    assert parse_scenario(base % "No").switch is False
    with pytest.raises(ParseError, match="expected on/off"):
        parse_scenario(base % "maybe")


def test_bundled_scenarios_all_parse():
    names = cli.bundled_scenario_names()
    assert len(names) >= 20
    for name in names:
        sc = cli.resolve_scenario(name)
        assert sc.name == name
        assert sc.kind in KINDS
        # the four benchmark families are all represented
    kinds = {cli.resolve_scenario(n).kind for n in names}
    assert kinds == set(KINDS)


def test_resolve_scenario_prefers_disk_path(tmp_path):
    path = tmp_path / "uniaxial-nh.scn"
    path.write_text(MINIMAL, encoding="utf-8")
    sc = cli.resolve_scenario(str(path))
    assert sc.width == 1.0  # the local file, not the bundled uniaxial-nh


def test_resolve_scenario_unknown_name_lists_bundle():
    with pytest.raises(ParseError) as err:
        cli.resolve_scenario("no-such-scenario")
    assert "uniaxial-nh" in str(err.value)
