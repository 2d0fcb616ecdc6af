"""Tests for TOML configuration loading and overrides."""

from pathlib import Path

import pytest

from micdam.config import apply_overrides, build_config, load_config, parse_override, parse_value
from micdam.errors import ConfigError, ParseError
from micdam.geometry import block3d, strip, write_mesh

REPO_CONFIG = Path(__file__).parents[1] / "config" / "config.toml"


class TestParseValue:
    """Tests for override value parsing."""

    @pytest.mark.parametrize(
        ("text", "expected"),
        [("2", 2), ("2.5", 2.5), ("1e4", 1.0e4), ("true", True), ('"B"', "B"), ("C", "C"),
         ("fd", "fd"), ("[1, 2]", [1, 2]), ('["left:x", "bottom:y"]', ["left:x", "bottom:y"]),
         ("out/run 1", "out/run 1")],
    )
    def test_literals(self, text, expected):
        """TOML literals are typed; anything else is a bare string."""
        assert parse_value(text) == expected

    def test_override_split(self):
        """section.key=value splits on the first '='."""
        assert parse_override("output.directory=a=b") == ("output", "directory", "a=b")

    @pytest.mark.parametrize("text", ["eta_v=2", "material.eta_v", ".eta_v=2", "material.=2"])
    def test_malformed_override(self, text):
        """Flags without section, key or value are rejected."""
        with pytest.raises(ConfigError, match="section.key=value"):
            parse_override(text)

    def test_overrides_do_not_mutate_input(self):
        """apply_overrides returns a new mapping."""
        raw = {"material": {"eta_v": 1.0}}
        merged = apply_overrides(raw, ["material.eta_v=4", "solver.threads=2"])
        assert raw == {"material": {"eta_v": 1.0}}
        assert merged == {"material": {"eta_v": 4}, "solver": {"threads": 2}}


class TestLoadConfig:
    """Tests for building the typed configuration."""

    def test_defaults(self):
        """Without a file the reference parameters and plate benchmark are used."""
        config = load_config()
        assert config.mesh.geometry == "plate_with_hole"
        assert config.material.variant.tag == "B"
        assert config.material.mu == 55000.0
        assert config.loading.control == "top:y"
        assert config.loading.fixed == ("left:x", "bottom:y")
        assert config.solver.tangent == "analytic"

    def test_repository_config(self):
        """The shipped config file loads and matches the defaults it documents."""
        config = load_config(REPO_CONFIG)
        assert config.material.penalty == (1.0e4,) * 3
        assert config.material.length_scale == (75.0,) * 3
        assert config.loading.steps == 50
        assert config.output.field_every == 10

    def test_overrides_are_typed(self):
        """Overrides pass through the same converters as the file."""
        config = load_config(REPO_CONFIG, [
            "material.variant=C", "material.length_scale=1300", "material.eta_v=2",
            "solver.tangent=fd", "output.fields=false", "mesh.level=1",
        ])
        assert config.material.variant.tag == "C"
        assert config.material.length_scale == (1300.0, 1300.0)
        assert config.material.eta_v == 2.0
        assert config.solver.tangent == "fd"
        assert config.output.fields is False
        assert config.mesh.level == 1

    def test_component_lists_win(self):
        """Per-field lists override the uniform value."""
        config = build_config({"material": {
            "variant": "C", "penalty": 5.0, "penalty_components": [1.0, 2.0],
        }})
        assert config.material.penalty == (1.0, 2.0)

    def test_local_variant_has_no_fields(self):
        """The local variant ignores uniform penalty and length scale."""
        config = build_config({"material": {"variant": "local", "penalty": 5.0}})
        assert config.material.n_dbar == 0
        assert config.material.penalty == ()

    def test_notched_defaults(self):
        """Choosing the notched geometry picks its boundary program and notch radius."""
        config = build_config({"mesh": {"geometry": "notched", "notch_radius": 4.0}})
        assert config.mesh.radius == 4.0
        assert config.loading.control == "right:x"
        assert config.loading.fixed == ("left:x", "left:y")

    @pytest.mark.parametrize(
        ("raw", "message"),
        [
            ({"material": {"stiffness": 1.0}}, "unknown key"),
            ({"physics": {}}, "unknown section"),
            ({"material": {"mu": "soft"}}, "expected a number"),
            ({"loading": {"steps": 0}}, "must be >= 1"),
            ({"loading": {"steps": 2.5}}, "expected an integer"),
            ({"loading": {"target": 0.0}}, "non-zero"),
            ({"material": {"variant": "Z"}}, "Unknown variant"),
            ({"material": {"variant": "B", "penalty_components": [1.0, 2.0]}}, "one value per nonlocal field"),
            ({"material": {"theta": 1.5}}, "theta"),
            ({"mesh": {"geometry": "disk"}}, "expected one of"),
            ({"mesh": {"level": -1}}, "must be >= 0"),
            ({"solver": {"tangent": "secant"}}, "analytic"),
            ({"solver": {"executor": "cluster"}}, "process"),
            ({"loading": {"control": "top:z"}}, "invalid for a 2D mesh"),
            ({"loading": {"control": "top"}}, "set:axis"),
            ({"output": {"fields": "yes"}}, "true/false"),
        ],
    )
    def test_invalid(self, raw, message):
        """Every violation is a ConfigError naming the problem."""
        with pytest.raises(ConfigError, match=message):
            build_config(raw)

    def test_mesh_file_relative_to_config(self, tmp_path):
        """A mesh file path resolves against the config file's directory."""
        write_mesh(strip(0), tmp_path / "two.mesh")
        path = tmp_path / "run.toml"
        path.write_text(
            '[mesh]\nfile = "two.mesh"\n[loading]\ncontrol = "top:y"\nfixed = ["bottom:y"]\n',
            encoding="utf-8",
        )
        config = load_config(path)
        assert config.mesh.file == tmp_path / "two.mesh"
        assert config.loading.fixed == ("bottom:y",)

    def test_mesh_file_axis_checked_against_its_dimension(self, tmp_path):
        """A z constraint on a 2D file mesh is rejected; a 3D file mesh accepts it."""
        write_mesh(strip(0), tmp_path / "flat.mesh")
        write_mesh(block3d(), tmp_path / "solid.mesh")
        loading = {"control": "top:y", "fixed": ["bottom:z"]}
        with pytest.raises(ConfigError, match="invalid for a 2D mesh"):
            build_config({"mesh": {"file": "flat.mesh"}, "loading": loading}, tmp_path)
        config = build_config({"mesh": {"file": "solid.mesh"}, "loading": loading}, tmp_path)
        assert config.loading.fixed == ("bottom:z",)

    def test_mesh_file_without_header(self, tmp_path):
        """A file mesh whose header is broken fails while the config is loaded."""
        (tmp_path / "broken.mesh").write_text("MESH\n", encoding="utf-8")
        with pytest.raises(ParseError, match="not a MICDAM-MESH file"):
            build_config({"mesh": {"file": "broken.mesh"}, "loading": {"control": "top:y"}}, tmp_path)

    def test_mesh_file_needs_control(self, tmp_path):
        """A file mesh has no default boundary program."""
        (tmp_path / "two.mesh").write_text("", encoding="utf-8")
        with pytest.raises(ConfigError, match="required when the mesh is read from file"):
            build_config({"mesh": {"file": "two.mesh"}}, tmp_path)

    def test_missing_mesh_file(self, tmp_path):
        """A mesh file that does not exist is rejected up front."""
        with pytest.raises(ConfigError, match="does not exist"):
            build_config({"mesh": {"file": "absent.mesh"}}, tmp_path)

    def test_unreadable_file(self, tmp_path):
        """A missing config file is a ConfigError."""
        with pytest.raises(ConfigError, match="cannot read config file"):
            load_config(tmp_path / "absent.toml")

    def test_invalid_toml(self, tmp_path):
        """Broken TOML is reported as a ConfigError."""
        path = tmp_path / "bad.toml"
        path.write_text("[material\nmu = 1", encoding="utf-8")
        with pytest.raises(ConfigError, match="invalid TOML"):
            load_config(path)
