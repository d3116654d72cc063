"""Run configuration (TOML) and its eager validation.

Example::

    seed = 0
    metric_theta = 0.5
    matrix = ["11", "10"]

    [potential]
    kind = "expression"        # or "table"
    text = "euler"
    depth = 1
    # table = { "1" = 2.0, "2" = 4.0 }   with kind = "table"

    [computation]
    k = 1
    tol = 1e-12
    max_iter = 100000
"""
import hashlib
import json
from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import expression as ex
from .errors import ConfigError
from .potential import LocallyConstantPotential, discretize, require_exceeds_one
from .shift_space import ZeroOneMatrix, parse_word
from .transfer_op import DEFAULT_MAX_ITER, DEFAULT_TOL

_TOP = {"seed", "metric_theta", "matrix", "potential", "computation"}
_POT = {"kind", "text", "table", "depth"}
_COMP = {"k", "tol", "max_iter", "seed"}


@dataclass(frozen=True)
class RunConfig:
    matrix: tuple
    potential_kind: str
    potential_text: str
    potential_table: tuple
    potential_depth: int
    k: int
    tol: float
    max_iter: int
    seed: int
    metric_theta: float
    A: object = field(repr=False, compare=False)
    H: object = field(repr=False, compare=False)
    expression: object = field(repr=False, compare=False)

    def semantic(self):
        """Fields that define the computation, as plain JSON values."""
        pot = {"kind": self.potential_kind, "depth": self.potential_depth}
        if self.potential_kind == "expression":
            pot["text"] = self.potential_text
        else:
            pot["table"] = {w: v for w, v in self.potential_table}
        return {
            "matrix": list(self.matrix),
            "potential": pot,
            "computation": {"k": self.k, "tol": self.tol, "max_iter": self.max_iter},
            "seed": self.seed,
            "metric_theta": self.metric_theta,
        }

    def hash(self):
        blob = json.dumps(self.semantic(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _unknown(section, keys, allowed):
    extra = sorted(set(keys) - allowed)
    if extra:
        raise ConfigError(f"unknown key(s) in {section}: {', '.join(extra)}")


def _number(value, name, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    if kind is int and int(value) != value:
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    return kind(value)


def config_from_dict(raw):
    """Validate a parsed document and build the matrix and potential."""
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a table")
    _unknown("top level", raw, _TOP)
    if "matrix" not in raw:
        raise ConfigError("missing required key 'matrix'")
    A = ZeroOneMatrix.from_rows(raw["matrix"])
    pot = raw.get("potential")
    if not isinstance(pot, dict):
        raise ConfigError("missing [potential] section")
    _unknown("[potential]", pot, _POT)
    comp = raw.get("computation", {})
    _unknown("[computation]", comp, _COMP)

    kind = pot.get("kind", "expression")
    text, table, expr = "", (), None
    if kind == "expression":
        if "text" not in pot:
            raise ConfigError("[potential] kind = 'expression' needs 'text'")
        text = str(pot["text"])
        expr = ex.parse_potential(text)
        depth = _number(pot.get("depth", max(1, ex.depth(expr))), "potential.depth", int)
        if depth < 1:
            raise ConfigError("potential.depth must be >= 1")
        H = discretize(expr, A, depth)
    elif kind == "table":
        if not isinstance(pot.get("table"), dict):
            raise ConfigError("[potential] kind = 'table' needs a 'table' mapping")
        parsed = {parse_word(w): _number(v, f"potential.table[{w}]") for w, v in pot["table"].items()}
        depth = _number(pot.get("depth", len(next(iter(parsed), ()))), "potential.depth", int)
        H = LocallyConstantPotential.from_table(A, parsed, depth)
        table = tuple((",".join(map(str, w)), v) for w, v in sorted(H.as_table().items()))
    else:
        raise ConfigError(f"potential.kind must be 'expression' or 'table', got {kind!r}")
    require_exceeds_one(H)

    k = _number(comp.get("k", depth), "computation.k", int)
    if k < depth:
        raise ConfigError(f"computation.k = {k} is below the potential depth {depth}")
    tol = _number(comp.get("tol", DEFAULT_TOL), "computation.tol")
    if not tol > 0:
        raise ConfigError("computation.tol must be > 0")
    max_iter = _number(comp.get("max_iter", DEFAULT_MAX_ITER), "computation.max_iter", int)
    if max_iter < 1:
        raise ConfigError("computation.max_iter must be >= 1")
    seed = _number(raw.get("seed", comp.get("seed", 0)), "seed", int)
    theta = _number(raw.get("metric_theta", 0.5), "metric_theta")
    if not 0 < theta < 1:
        raise ConfigError("metric_theta must lie in (0, 1)")
    return RunConfig(tuple(A.to_rows()), kind, text, table, depth, k, tol, max_iter, seed, theta,
                     A, H, expr)


def load_config(path):
    """Read and validate a TOML run configuration."""
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        raw = tomllib.loads(data.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return config_from_dict(raw)
