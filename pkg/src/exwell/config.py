"""Flat key = value scenario configuration.

Lines hold one `key = value` pair each; `#` starts a comment; keys are
dot-namespaced (grid.n, well.depth_a, kernel.lambda).  Unknown keys are
rejected so a typo can never silently fall back to a default.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigError

SCENARIOS = (
    "spectrum",
    "tunneling-scan",
    "exchange-scan",
    "hf-mix",
    "exact-compare",
    "strong-coupling",
    "coherence",
    "wide-b",
)

SCAN_PARAMETERS = ("well.separation", "kernel.lambda", "kernel.s")


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "on", "1"):
        return True
    if t in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_float_list(text: str) -> list:
    items = [p.strip() for p in text.split(",") if p.strip()]
    return [float(p) for p in items]


def _parse_int_list(text: str) -> list:
    return [int(p.strip()) for p in text.split(",") if p.strip()]


# key -> (parser, default, description); defaults document every optional key
KEY_REGISTRY = {
    "scenario": (str, None, "one of " + ", ".join(SCENARIOS)),
    "seed": (int, 0, "seed for randomized self-checks"),
    "output.dir": (str, "out", "directory for CSV/JSON artifacts"),
    "grid.x_min": (float, -20.0, "left box wall"),
    "grid.x_max": (float, 20.0, "right box wall"),
    "grid.n": (int, 2001, "number of mesh points"),
    "well.shape": (str, "square", "square or gaussian"),
    "well.center_a": (float, -2.5, "center of well a"),
    "well.center_b": (float, 2.5, "center of well b"),
    "well.separation": (float, None, "optional: overrides centers to -/+ separation/2"),
    "well.depth_a": (float, 8.0, "depth of well a (>= depth_b)"),
    "well.depth_b": (float, 8.0, "depth of well b"),
    "well.width_a": (float, 2.0, "width of well a"),
    "well.width_b": (float, 2.0, "width of well b"),
    "kernel.lambda": (float, 1.0, "interaction strength (negative = attraction)"),
    "kernel.s": (float, 1.0, "interaction softening length"),
    "scan.parameter": (str, "", "swept key: " + ", ".join(SCAN_PARAMETERS)),
    "scan.values": (_parse_float_list, [], "comma-separated scan values"),
    "spectrum.k": (int, 8, "number of levels to report"),
    "spectrum.compare_box": (_parse_bool, False, "compare against particle-in-box energies"),
    "exchange.legs_a": (_parse_int_list, [2, 1], "well-a orbital levels for the element legs"),
    "exchange.legs_b": (_parse_int_list, [1, 1], "well-b orbital levels for the element legs"),
    "exchange.fit_min": (float, 0.0, "lower separation bound of the power-law fit window"),
    "exchange.fit_max": (float, 0.0, "upper bound; 0 = no bound"),
    "hf.spectator_state": (int, 3, "1-based eigenstate index used as the spectator orbital"),
    "compare.spectator_state": (int, 3, "spectator eigenstate for the exact comparison"),
    "compare.k": (int, 8, "number of pair eigenstates solved"),
    "compare.tol": (float, 1e-10, "pair eigensolver residual tolerance"),
    "strong.g_target": (float, 0.0, "pin the cross exchange element to this value (0 = off)"),
    "strong.k": (int, 6, "pair eigenstates per parity sector"),
    "strong.tol": (float, 1e-9, "pair eigensolver residual tolerance"),
    "wideb.bandwidth": (float, 2.0, "band half-width around E_1a for the escape sum"),
    "wideb.spectator_level": (int, 2, "well-a level acting as the exchange spectator"),
    "wideb.min_levels": (int, 20, "required number of bound levels in well b"),
    "coherence.counts": (_parse_int_list, [1, 2, 4, 8], "external-orbital counts for the linearity scan"),
    "coherence.bump_sigma": (float, 0.4, "width of each external bump orbital"),
    "coherence.spacing": (float, 3.2, "center spacing of the external bumps"),
    "coherence.plateau_halfwidth": (float, 13.0, "half-width of the flat target/probe plateau"),
    "coherence.edge_width": (float, 0.8, "plateau edge roll-off length"),
    "coherence.pair_separation": (float, 6.0, "well separation of the node-parity test pair"),
    "coherence.pair_depth": (float, 8.0, "well depth of the node-parity test pair"),
    "coherence.pair_width": (float, 2.0, "well width of the node-parity test pair"),
    "coherence.ext_width": (float, 2.5, "width of the node-parity external orbitals"),
}

REQUIRED_KEYS = ("scenario",)


@dataclass
class ScenarioConfig:
    values: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        return self.values.get(key, default)

    def resolved(self) -> dict:
        """Full key -> value map with defaults filled in, for the JSON echo."""
        out = {}
        for key, (_parser, default, _doc) in KEY_REGISTRY.items():
            if key in self.values:
                out[key] = self.values[key]
            elif default is not None or key == "well.separation":
                out[key] = default
        return out


def parse_config(text: str) -> ScenarioConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in KEY_REGISTRY:
            raise ConfigError(f"unknown key {key!r}", key=key, line=lineno)
        parser = KEY_REGISTRY[key][0]
        try:
            parsed = parser(val)
        except (TypeError, ValueError):
            raise ConfigError(f"type mismatch: cannot parse {val!r}", key=key, line=lineno) from None
        if key in values:
            raise ConfigError("duplicate key", key=key, line=lineno)
        values[key] = parsed

    for key in REQUIRED_KEYS:
        if key not in values:
            raise ConfigError(f"missing required key {key!r}", key=key)
    if values["scenario"] not in SCENARIOS:
        raise ConfigError(f"unknown scenario {values['scenario']!r}; valid: "
                          + ", ".join(SCENARIOS), key="scenario")
    if values.get("scan.parameter") and values["scan.parameter"] not in SCAN_PARAMETERS:
        raise ConfigError(f"unknown scan parameter {values['scan.parameter']!r}",
                          key="scan.parameter")

    cfg = ScenarioConfig(values=values)
    # fill defaults for everything else
    for key, (_parser, default, _doc) in KEY_REGISTRY.items():
        if key not in cfg.values and default is not None:
            cfg.values[key] = default
    return cfg


def describe_keys() -> str:
    lines = []
    for key, (_parser, default, doc) in KEY_REGISTRY.items():
        d = "(required)" if key in REQUIRED_KEYS else f"default {default!r}"
        lines.append(f"{key:32s} {d:22s} {doc}")
    return "\n".join(lines)
