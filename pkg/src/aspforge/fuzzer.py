"""Grammar-based random generation of ground programs.

Every program is built top-down from the rule grammar of its class, so
the output is well formed by construction.  Generation is a pure function
of the :class:`FuzzConfig`; randomness comes from :class:`SplitMix64`.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields, replace

from .core.program import (
    FALSITY,
    Disjunction,
    Literal,
    NormalHead,
    Program,
    ProgramClass,
    Rule,
    SetHead,
    SetKind,
    WeightAtom,
    choice,
)
from .rng import SplitMix64

RULE_TYPES = ("basic", "choice", "cardinality", "weight", "disjunctive")

LEGAL_TYPES = {
    ProgramClass.NLP: ("basic",),
    ProgramClass.WCP: ("basic", "choice", "cardinality", "weight"),
    ProgramClass.DLP: ("basic", "disjunctive"),
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class FuzzConfig:
    seed: int = 0
    program_class: ProgramClass = ProgramClass.NLP
    n_atoms: int = 30
    n_rules: int = 120
    p_negation: float = 0.5
    body_len: tuple[int, int] = (0, 6)
    p_fact: float = 0.05
    p_constraint: float = 0.1
    rule_mix: tuple[tuple[str, float], ...] = field(default=(("basic", 1.0),))
    weight_range: tuple[int, int] = (-5, 5)
    bound_slack: int = 2
    max_head_disjuncts: int = 4
    max_set_elems: int = 6

    def mix(self) -> dict[str, float]:
        out = dict.fromkeys(RULE_TYPES, 0.0)
        out.update(self.rule_mix)
        return out

    def with_seed(self, seed: int) -> "FuzzConfig":
        return replace(self, seed=seed)


def default_config_for_class(program_class, seed: int = 0) -> FuzzConfig:
    program_class = ProgramClass(program_class)
    legal = LEGAL_TYPES[program_class]
    mix = tuple((t, 1.0 / len(legal) if t in legal else 0.0) for t in RULE_TYPES)
    return FuzzConfig(seed=seed, program_class=program_class, rule_mix=mix)


def oracle_config_for_class(program_class, seed: int = 0) -> FuzzConfig:
    """Campaign profile: class defaults scaled down to stay inside the oracle caps."""
    return replace(default_config_for_class(program_class, seed), n_atoms=10, n_rules=40)


def check_config(cfg: FuzzConfig) -> list[str]:
    errs = []
    if not 0 <= cfg.seed < 2**64:
        errs.append("seed must be a 64-bit unsigned integer")
    for name in ("p_negation", "p_fact", "p_constraint"):
        v = getattr(cfg, name)
        if not 0.0 <= v <= 1.0:
            errs.append(f"{name} must lie in [0, 1]")
    for name in ("n_atoms", "n_rules", "bound_slack", "max_head_disjuncts", "max_set_elems"):
        if getattr(cfg, name) < 0:
            errs.append(f"{name} must be non-negative")
    for name in ("body_len", "weight_range"):
        lo, hi = getattr(cfg, name)
        if lo > hi:
            errs.append(f"{name}: minimum exceeds maximum")
    if cfg.body_len[0] < 0:
        errs.append("body_len must be non-negative")
    if cfg.n_rules > 0 and cfg.n_atoms < 1:
        errs.append("at least one atom is needed to generate rules")
    try:
        ProgramClass(cfg.program_class)
    except ValueError:
        errs.append(f"unknown program class {cfg.program_class!r}")
        return errs
    mix = cfg.mix()
    for name, weight in cfg.rule_mix:
        if name not in RULE_TYPES:
            errs.append(f"unknown rule type {name!r} in rule_mix")
        elif weight < 0:
            errs.append(f"rule_mix weight for {name} is negative")
        elif weight > 0 and name not in LEGAL_TYPES[ProgramClass(cfg.program_class)]:
            errs.append(f"rule type {name} is not allowed in class {ProgramClass(cfg.program_class).value}")
    if cfg.n_rules > 0 and sum(mix.values()) <= 0:
        errs.append("rule_mix has no positive weight")
    if mix["disjunctive"] > 0 and cfg.max_head_disjuncts < 2:
        errs.append("max_head_disjuncts must be at least 2")
    if (mix["choice"] > 0 or mix["cardinality"] > 0 or mix["weight"] > 0) and cfg.max_set_elems < 1:
        errs.append("max_set_elems must be at least 1")
    return errs


class _Generator:
    def __init__(self, cfg: FuzzConfig):
        self.cfg = cfg
        self.rng = SplitMix64(cfg.seed)
        self.atoms = list(range(2, cfg.n_atoms + 2))
        mix = cfg.mix()
        self.types = [t for t in RULE_TYPES if mix[t] > 0]
        self.weights = [mix[t] for t in self.types]

    def literals(self, n):
        rng = self.rng
        picked = rng.sample(self.atoms, min(n, len(self.atoms)))
        return [Literal(a, rng.chance(self.cfg.p_negation)) for a in picked]

    def body_length(self, nonempty: bool) -> int:
        lo, hi = self.cfg.body_len
        if not nonempty and (hi == 0 or self.rng.chance(self.cfg.p_fact)):
            return 0
        return self.rng.randint(max(1, lo), max(1, hi))

    def normal_head(self):
        if self.rng.chance(self.cfg.p_constraint):
            return FALSITY
        return NormalHead(self.atoms[self.rng.below(len(self.atoms))])

    def set_atom(self, kind: SetKind) -> WeightAtom:
        cfg, rng = self.cfg, self.rng
        k = rng.randint(1, min(cfg.max_set_elems, len(self.atoms)))
        lits = self.literals(k)
        if kind == SetKind.WEIGHT:
            elements = tuple((lit, rng.randint(*cfg.weight_range)) for lit in lits)
        else:
            elements = tuple((lit, 1) for lit in lits)
        lo_sum = sum(min(w, 0) for _, w in elements) - cfg.bound_slack
        hi_sum = sum(max(w, 0) for _, w in elements) + cfg.bound_slack
        mode = rng.below(3)
        a, b = rng.randint(lo_sum, hi_sum), rng.randint(lo_sum, hi_sum)
        if mode == 0:
            return WeightAtom(elements, lower=a, kind=kind)
        if mode == 1:
            return WeightAtom(elements, upper=a, kind=kind)
        return WeightAtom(elements, min(a, b), max(a, b), kind)

    def rule(self) -> Rule:
        rng = self.rng
        kind = self.types[rng.weighted(self.weights)]
        if kind == "disjunctive" and len(self.atoms) < 2:
            kind = "basic"
        if kind == "basic":
            head = self.normal_head()
            return Rule(head, tuple(self.literals(self.body_length(head is FALSITY))))
        if kind == "disjunctive":
            k = rng.randint(2, min(self.cfg.max_head_disjuncts, len(self.atoms)))
            head = Disjunction(tuple(rng.sample(self.atoms, k)))
            return Rule(head, tuple(self.literals(self.body_length(False))))
        if kind == "choice":
            k = rng.randint(1, min(self.cfg.max_set_elems, len(self.atoms)))
            head = SetHead(choice(rng.sample(self.atoms, k)))
            return Rule(head, tuple(self.literals(self.body_length(False))))
        set_kind = SetKind.WEIGHT if kind == "weight" else SetKind.CARDINALITY
        if rng.chance(0.5):
            head = SetHead(self.set_atom(set_kind))
            return Rule(head, tuple(self.literals(self.body_length(False))))
        head = self.normal_head()
        w = self.set_atom(set_kind)
        body = self.literals(self.body_length(True) - 1)
        body.insert(rng.below(len(body) + 1), w)
        return Rule(head, tuple(body))


def generate(cfg: FuzzConfig) -> Program:
    """Random program with exactly ``cfg.n_rules`` rules over atoms a1..aN."""
    errs = check_config(cfg)
    if errs:
        raise ConfigError("; ".join(errs))
    gen = _Generator(cfg)
    rules = tuple(gen.rule() for _ in range(cfg.n_rules))
    symbols = {a: f"a{a - 1}" for a in gen.atoms}
    return Program(rules, symbols, ProgramClass(cfg.program_class))


# key=value serialization -------------------------------------------------


def _encode(name, value) -> str:
    if name == "program_class":
        return ProgramClass(value).value
    if name in ("body_len", "weight_range"):
        return f"{value[0]},{value[1]}"
    if name == "rule_mix":
        return ",".join(f"{t}:{w:g}" for t, w in value)
    return str(value)


CONFIG_KEYS = {"class": "program_class"}


def config_to_text(cfg: FuzzConfig) -> str:
    lines = []
    for f in fields(cfg):
        key = "class" if f.name == "program_class" else f.name
        lines.append(f"{key}={_encode(f.name, getattr(cfg, f.name))}")
    return "\n".join(lines) + "\n"


def parse_config_value(name: str, text: str):
    text = text.strip()
    try:
        if name == "program_class":
            return ProgramClass(text.upper())
        if name in ("body_len", "weight_range"):
            lo, hi = text.split(",")
            return (int(lo), int(hi))
        if name == "rule_mix":
            mix = []
            for item in text.split(","):
                t, _, w = item.partition(":")
                mix.append((t.strip(), float(w)))
            return tuple(mix)
        if name in ("p_negation", "p_fact", "p_constraint"):
            return float(text)
        return int(text)
    except ValueError:
        raise ConfigError(f"bad value {text!r} for {name}") from None


def config_from_mapping(values: dict, base: FuzzConfig | None = None) -> FuzzConfig:
    """Apply ``key -> text`` settings on top of ``base`` (class defaults when absent)."""
    names = {f.name for f in fields(FuzzConfig)}
    parsed = {}
    for key, text in values.items():
        name = CONFIG_KEYS.get(key, key)
        if name not in names:
            raise ConfigError(f"unknown config key {key!r}")
        parsed[name] = parse_config_value(name, text)
    if base is None:
        base = default_config_for_class(parsed.get("program_class", ProgramClass.NLP))
    return replace(base, **parsed)


def config_from_text(text: str, base: FuzzConfig | None = None) -> FuzzConfig:
    values = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"expected key=value, found {line!r}")
        values[key.strip()] = value
    return config_from_mapping(values, base)


def config_as_dict(cfg: FuzzConfig) -> dict[str, str]:
    return {("class" if k == "program_class" else k): _encode(k, v) for k, v in asdict(cfg).items()}
