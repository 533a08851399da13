"""INI-style run configuration: parsing, building module inputs, and writing it back out."""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field
from fractions import Fraction

from .contraction import FORMS, InequalityForm, MapTriple, ZeroMode
from .dsl import Policy, parse_piecewise
from .errors import CfpError, ConfigError
from .families import MapFamily, PieceOverride
from .hypotheses import WitnessSequence
from .metric import MetricSpace, as_rational
from .phi import PhiSpec

RUN_DEFAULTS = {
    "tol": "1e-9",
    "max_n": "10000",
    "window": "8",
    "zero_mode": "strict",
    "grid": "200",
    "sweep_tol": "1e-9",
    "limit_tol": "1e-6",
}

_FORM_PARAMS = {"lambda": "lam"}


def _rationals(text: str) -> list[Fraction]:
    return [as_rational(t) for t in text.replace(",", " ").split()]


def parse_form(spec: str | dict, phi: PhiSpec | None) -> InequalityForm:
    """``"lambda_max:lambda=0.99"`` or a mapping with a ``form`` key plus parameters."""
    if isinstance(spec, str):
        key, _, rest = spec.partition(":")
        params = {}
        for item in filter(None, (p.strip() for p in rest.split(","))):
            name, eq, value = item.partition("=")
            if not eq:
                raise ConfigError(f"inequality parameter {item!r} needs name=value")
            params[name.strip()] = value.strip()
    else:
        params = dict(spec)
        key = params.pop("form", "")
    key = key.strip()
    if key not in FORMS:
        raise ConfigError(f"unknown inequality form {key!r}; choose from {sorted(FORMS)}")
    cls = FORMS[key]
    kwargs = {}
    for name, value in params.items():
        kwargs[_FORM_PARAMS.get(name, name)] = float(as_rational(value))
    if "phi" in cls.__dataclass_fields__:
        if phi is None:
            raise ConfigError(f"form {key} needs a [phi] section")
        kwargs["phi"] = phi
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {key}: {exc}") from exc


@dataclass
class RunConfig:
    domain: str
    maps: dict[str, str] = field(default_factory=dict)
    policy: str = "leftmost"
    phi: str | None = None
    inequality: dict[str, str] = field(default_factory=dict)
    witnesses: dict[str, dict[str, str]] = field(default_factory=dict)
    family: dict[str, str] = field(default_factory=dict)
    run: dict[str, str] = field(default_factory=dict)

    @classmethod
    def parse(cls, text: str) -> RunConfig:
        cp = configparser.ConfigParser(interpolation=None, delimiters=("=",))
        cp.optionxform = str  # map names are case-sensitive
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"malformed config: {exc}") from exc
        if not cp.has_option("space", "domain"):
            raise ConfigError("config needs [space] domain")
        maps = dict(cp["maps"]) if cp.has_section("maps") else {}
        policy = maps.pop("policy", "leftmost")
        cfg = cls(
            domain=cp["space"]["domain"],
            maps=maps,
            policy=policy,
            phi=cp["phi"].get("body") if cp.has_section("phi") else None,
            inequality=dict(cp["inequality"]) if cp.has_section("inequality") else {},
            witnesses={s.split(".", 1)[1]: dict(cp[s]) for s in cp.sections() if s.startswith("witness.")},
            family=dict(cp["family"]) if cp.has_section("family") else {},
            run=dict(cp["run"]) if cp.has_section("run") else {},
        )
        cfg.validate()
        return cfg

    def validate(self) -> None:
        """Build every declared input once so errors surface before any run."""
        try:
            self.space()
            if "A" in self.maps and ("S" in self.maps or self.family):
                if self.family:
                    self.map_family()
                else:
                    self.triple()
            self.phi_spec()
            if self.inequality:
                self.form()
            self.witness_list()
            ZeroMode(self.get("zero_mode"))
            Policy(self.policy)
            for key in ("tol", "sweep_tol", "limit_tol"):
                float(self.get(key))
            for key in ("max_n", "window", "grid"):
                int(self.get(key))
        except ConfigError:
            raise
        except (CfpError, ValueError) as exc:
            raise ConfigError(f"invalid config: {exc}") from exc

    def get(self, key: str, default: str | None = None) -> str | None:
        return self.run.get(key, RUN_DEFAULTS.get(key, default))

    def floats(self, key: str) -> list[float]:
        value = self.get(key)
        return [] if value is None else [float(q) for q in _rationals(value)]

    def ints(self, key: str) -> list[int]:
        value = self.get(key)
        return [] if value is None else [int(v) for v in value.replace(",", " ").split()]

    def space(self) -> MetricSpace:
        return MetricSpace(self.domain)

    def fn(self, name: str):
        if name not in self.maps:
            raise ConfigError(f"[maps] has no {name}")
        return parse_piecewise(self.maps[name])

    def triple(self) -> MapTriple:
        S = self.fn("S")
        T = self.fn("T") if "T" in self.maps else S
        return MapTriple(self.space(), self.fn("A"), S, T, Policy(self.policy))

    def phi_spec(self) -> PhiSpec | None:
        return PhiSpec.parse(self.phi) if self.phi else None

    def form(self) -> InequalityForm:
        if not self.inequality:
            raise ConfigError("config has no [inequality] section")
        return parse_form(self.inequality, self.phi_spec())

    def witness_list(self) -> list[WitnessSequence]:
        out = []
        for name, sec in sorted(self.witnesses.items()):
            try:
                out.append(
                    WitnessSequence(as_rational(sec["a"]), as_rational(sec["b"]), int(sec["n0"]), sec.get("limit"), name)
                )
            except KeyError as exc:
                raise ConfigError(f"[witness.{name}] is missing {exc}") from exc
        return out

    def map_family(self) -> MapFamily:
        if "base" not in self.family:
            raise ConfigError("[family] needs a base function")
        overrides: dict[int, dict] = {}
        for key, value in self.family.items():
            kind, _, idx = key.partition(".")
            if kind not in ("const", "slope"):
                continue
            pair = _rationals(value)
            if len(pair) != 2:
                raise ConfigError(f"{key} needs two coefficients 'a b' for a + b/n")
            overrides.setdefault(int(idx), {})[kind] = tuple(pair)
        return MapFamily(
            self.space(),
            parse_piecewise(self.family["base"]),
            self.fn("A"),
            {i: PieceOverride(**kw) for i, kw in overrides.items()},
        )

    def with_run(self, **overrides) -> RunConfig:
        run = dict(self.run)
        run.update({k: str(v) for k, v in overrides.items() if v is not None})
        return RunConfig(self.domain, dict(self.maps), self.policy, self.phi, dict(self.inequality),
                         {k: dict(v) for k, v in self.witnesses.items()}, dict(self.family), run)

    def to_text(self) -> str:
        cp = configparser.ConfigParser(interpolation=None, delimiters=("=",))
        cp.optionxform = str
        cp["space"] = {"domain": self.domain}
        cp["maps"] = {**self.maps, "policy": self.policy}
        if self.phi:
            cp["phi"] = {"body": self.phi}
        if self.inequality:
            cp["inequality"] = self.inequality
        for name, sec in sorted(self.witnesses.items()):
            cp[f"witness.{name}"] = sec
        if self.family:
            cp["family"] = self.family
        if self.run:
            cp["run"] = self.run
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return RunConfig.parse(text)

