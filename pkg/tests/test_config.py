"""Scenario document parsing: defaults, strict key validation with key
paths, and the parse/emit/parse round trip."""

import math

import pytest

from coldpress.config import (ConfigError, emit_config, load_config,
                              parse_config)

MINIMAL = """
name: minimal
preset: normalized
boundary:
  K_Gamma: 1.0
  h: 1.0
  theta_Gamma: 0.9
grid:
  dim: 1
  cells: 32
  extent: 1.0
initial:
  theta0: 1.0
solver:
  dt: 1.0e-3
run:
  t_end: 50.0
"""


class TestParsing:
    def test_minimal_document_fills_defaults(self):
        cfg = parse_config(MINIMAL)
        assert cfg.name == "minimal"
        assert cfg.material.L == 2.0
        assert cfg.boundary.h_faces == (1.0, 1.0)
        assert cfg.boundary.p0 == 0.0
        assert cfg.boundary.P_stand == 1.0e5
        assert cfg.grid.shape == (32,)
        assert cfg.solver.mode == "staggered"
        assert cfg.solver.picard_tol == 1.0e-8
        assert cfg.solver.picard_max == 50
        assert math.isinf(cfg.solver.truncation_R)
        assert cfg.output_every == 1
        assert cfg.snapshot_every == 0
        assert cfg.steady_tol is None
        assert cfg.sweep is None
        assert cfg.chi0.kind == "constant" and cfg.chi0.value == 1.0

    def test_explicit_material(self):
        text = MINIMAL.replace("preset: normalized", """material:
  c: 1.0
  kappa: 1.0
  nu: 1.0
  lambda: 1.0
  alpha: 1.0
  beta: 1.0
  gamma: 1.0
  L: 2.0
  theta_c: 1.0
  rho0: 1.0""")
        cfg = parse_config(text)
        assert cfg.preset is None
        assert cfg.material.lam == 1.0

    def test_preset_overrides(self):
        text = MINIMAL + "overrides:\n  beta: 0.5\n"
        cfg = parse_config(text)
        assert cfg.material.beta == 0.5
        assert cfg.material.L == 2.0

    def test_profiles(self):
        text = MINIMAL.replace("theta0: 1.0", """theta0:
    profile: cosine
    base: 1.0
    amplitude: 0.1""")
        cfg = parse_config(text)
        theta, _, _ = cfg.initial_fields()
        assert theta.max() <= 1.1 and theta.min() >= 0.9

    @pytest.mark.parametrize("needle,replacement,path", [
        ("theta_Gamma: 0.9", "theta_Gamma: 0.9\n  hh: 2", "boundary.hh"),
        ("dt: 1.0e-3", "dt: 1.0e-3\n  dtt: 1", "solver.dtt"),
        ("t_end: 50.0", "t_end: -1.0", "run.t_end"),
        ("dim: 1", "dim: 4", "grid.dim"),
        ("K_Gamma: 1.0", "K_Gamma: -2.0", "boundary.K_Gamma"),
    ])
    def test_errors_carry_key_paths(self, needle, replacement, path):
        with pytest.raises(ConfigError, match=path.replace(".", r"\.")):
            parse_config(MINIMAL.replace(needle, replacement))

    def test_phase_bound_violation_named(self):
        text = MINIMAL + "\n"
        text = text.replace("initial:\n  theta0: 1.0",
                            "initial:\n  theta0: 1.0\n  chi0: 1.5")
        with pytest.raises(ConfigError, match=r"chi0 in \[0,1\]"):
            parse_config(text)

    def test_nonpositive_initial_temperature_rejected(self):
        with pytest.raises(ConfigError, match="theta0"):
            parse_config(MINIMAL.replace("theta0: 1.0", "theta0: -0.5"))

    def test_both_preset_and_material_rejected(self):
        text = MINIMAL + "material:\n  c: 1.0\n"
        with pytest.raises(ConfigError, match="exactly one"):
            parse_config(text)

    def test_empty_sweep_rejected(self):
        text = MINIMAL + "sweep:\n  parameter: theta_Gamma\n  values: []\n"
        with pytest.raises(ConfigError, match="sweep.values"):
            parse_config(text)

    def test_h_face_count_must_match_grid(self):
        text = MINIMAL.replace("h: 1.0", "h: [1.0, 1.0, 1.0]")
        with pytest.raises(ConfigError, match="boundary.h"):
            parse_config(text)


class TestRoundTrip:
    @pytest.mark.parametrize("source", ["minimal", "water", "sweeping"])
    def test_parse_emit_parse_identity(self, source):
        if source == "minimal":
            text = MINIMAL
        elif source == "water":
            text = MINIMAL.replace("preset: normalized", "preset: water") \
                          .replace("theta_Gamma: 0.9", "theta_Gamma: 250.0") \
                          .replace("theta0: 1.0", "theta0: 275.0")
        else:
            text = MINIMAL + ("sweep:\n  parameter: theta_Gamma\n"
                              "  values: [0.5, 0.9, 1.05]\n")
        first = parse_config(text)
        second = parse_config(emit_config(first))
        assert first == second
        assert emit_config(first) == emit_config(second)

    def test_bundled_scenarios_round_trip(self):
        import pathlib
        for path in sorted(pathlib.Path("scenarios").glob("*.yaml")):
            cfg = load_config(path)
            assert parse_config(emit_config(cfg)) == cfg
