"""Run configuration shared by the CLI and the service."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConfigError
from .scalars import ParamEnv, parse_rat

KNOWN_PARAM_KEYS = {
    "g", "x", "M", "jQ", "Q", "q", "sigma", "base", "lattice_pow",
    "f", "tau", "a", "kappa", "bn", "an",
}

VERIFY_CHECKS = ("init", "prop1", "case", "lax", "persist", "pqr",
                 "bcflow", "ccflow", "wave", "trend", "all")

CASES = ("a", "b", "c", "d", "gbin", "gbin_finite", "grr")


@dataclass
class RunConfig:
    case: str | None = None
    params: dict = field(default_factory=dict)
    cap: int = 6
    n_cut: int = 6
    nvars: int = 6
    window: tuple = (-40, 12)
    seed: int = 1
    points: int = 3
    strict: bool = False

    @classmethod
    def from_params(cls, raw_params: dict | None = None, **kw) -> "RunConfig":
        params = {}
        for key, value in (raw_params or {}).items():
            if key not in KNOWN_PARAM_KEYS:
                raise ConfigError(f"unknown parameter key {key!r}")
            if key in ("bn", "an"):
                params[key] = tuple(parse_rat(v) for v in str(value).split(","))
            elif key in ("M", "lattice_pow"):
                params[key] = int(value)
            else:
                params[key] = parse_rat(value) if not isinstance(value, Fraction) else value
        case = kw.pop("case", None)
        if case is not None and case not in CASES:
            raise ConfigError(f"unknown case {case!r}; expected one of {CASES}")
        return cls(case=case, params=params, **kw)


def env_from_config(cfg: RunConfig, case: str | None, rng) -> ParamEnv:
    """Build a parameter point; pinned values are honored, the rest is drawn."""
    p = cfg.params
    case = case or cfg.case
    framed = case in ("c", "d", "gbin", "grr")
    if framed:
        f = p.get("f", p.get("tau"))
        if f is None:
            f = Fraction(1) if case in ("c", "gbin", "grr") else Fraction(0)
        kwargs = {}
        if "lattice_pow" in p:
            kwargs["lattice_pow"] = p["lattice_pow"]
        if "base" in p:
            kwargs["base"] = p["base"]
        elif "sigma" in p:
            kwargs["sigma"] = p["sigma"]
        elif "q" in p:
            kwargs["q"] = p["q"]
        else:
            kwargs["sigma"] = rng.choice(
                [Fraction(1, 4), Fraction(1, 2), Fraction(3, 8), Fraction(2, 5),
                 Fraction(1, 3), Fraction(3, 5)]
            )
        a = p.get("a")
        if a is None and case == "d":
            a = Fraction(rng.randint(1, 4))
        bn = p.get("bn")
        an = p.get("an")
        if case in ("gbin", "grr") and not bn:
            bn = tuple(Fraction(v) for v in rng.sample(range(0, 5), 2))
        if case == "grr" and not an:
            pool = [v for v in range(0, 6) if Fraction(v) not in set(bn)]
            an = tuple(Fraction(v) for v in rng.sample(pool, 2))
        return ParamEnv.framed(f=f, a=a, b_exps=bn or (), a_exps=an or (), **kwargs)

    base = p.get("g", p.get("x", p.get("base")))
    if base is None:
        base = rng.choice([Fraction(3, 2), Fraction(2, 5), Fraction(5, 3),
                           Fraction(4, 3), Fraction(5, 7), Fraction(7, 4)])
    M = p.get("M", 24)
    jQ = p.get("jQ")
    Q = p.get("Q")
    if jQ is None and Q is None:
        jQ = rng.choice([-4, -2, 2, 4, 6])
    a = p.get("a")
    if a is None and case == "b":
        a = Fraction(rng.randint(1, 5), rng.randint(1, 3))
    kappa = p.get("kappa")
    if kappa is None and case == "b":
        kappa = Fraction(1)
    return ParamEnv.generic(base=base, M=M, jQ=jQ, Q=Q, a=a, kappa=kappa)
