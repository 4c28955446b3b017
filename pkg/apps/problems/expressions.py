"""
Symbolic expressions of x and y, and problems loaded from text files.

Expressions use + - * / ^ (or **), parentheses, numbers, the constants
pi and e, and the functions exp, sqrt, min, max and abs. They are parsed
with sympy against that vocabulary only and turned into numpy callables
with lambdify. Derivatives of the exact solution are taken symbolically.

A problem file holds `key = value` lines; `#` starts a comment:

    label  = paraboloid
    domain = 0 0, 1 0, 1 1, 0 1
    f      = 1
    g      = (x^2 + y^2) / 2
    u      = (x^2 + y^2) / 2
"""

import logging
from pathlib import Path
from tokenize import TokenError

import numpy as np
import sympy
from sympy.core.function import AppliedUndef
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from mafem.exceptions import InvalidArgumentError

from .catalog import ProblemSpec

logger = logging.getLogger(__name__)

X, Y = sympy.symbols("x y", real=True)

NAMESPACE = {
    "x": X,
    "y": Y,
    "exp": sympy.exp,
    "sqrt": sympy.sqrt,
    "min": sympy.Min,
    "max": sympy.Max,
    "abs": sympy.Abs,
    "pi": sympy.pi,
    "e": sympy.E,
}
TRANSFORMATIONS = standard_transformations + (convert_xor,)

# what the parser's own token rewriting refers to; no builtins
_PARSER_GLOBALS = {
    "__builtins__": {},
    "Integer": sympy.Integer,
    "Float": sympy.Float,
    "Rational": sympy.Rational,
    "Symbol": sympy.Symbol,
    "Function": sympy.Function,
}

PROBLEM_KEYS = ("label", "domain", "f", "g", "u")


def parse_expression(source: str) -> sympy.Expr:
    """
    Parse source into a sympy expression of x and y.

    Raises:
        InvalidArgumentError: On syntax errors, unknown names or
            functions, and anything that is not a scalar expression.
    """
    source = source.strip()
    if not source:
        raise InvalidArgumentError("Empty expression")
    try:
        expr = parse_expr(
            source,
            local_dict=dict(NAMESPACE),
            global_dict=dict(_PARSER_GLOBALS),
            transformations=TRANSFORMATIONS,
        )
    except (SyntaxError, TokenError, TypeError, ValueError, NameError, AttributeError) as e:
        raise InvalidArgumentError(f"Cannot parse {source!r}: {e}") from e

    if not isinstance(expr, sympy.Expr):
        raise InvalidArgumentError(f"{source!r} is not a scalar expression")
    unknown = expr.free_symbols - {X, Y}
    if unknown:
        names = ", ".join(sorted(str(s) for s in unknown))
        raise InvalidArgumentError(f"Unknown name {names} in {source!r}")
    if expr.atoms(AppliedUndef):
        raise InvalidArgumentError(f"Unknown function in {source!r}")
    return expr


class Expression:
    """A symbolic expression callable as f(x, y) on coordinate arrays."""

    def __init__(self, source: str | sympy.Expr) -> None:
        if isinstance(source, sympy.Expr):
            self.expr = source
            self.source = str(source)
        else:
            self.source = source.strip()
            self.expr = parse_expression(self.source)
        # Min and Max as Piecewise so scalar arguments broadcast against arrays
        numeric = self.expr.rewrite(sympy.Min, sympy.Max, sympy.Piecewise)
        self._func = sympy.lambdify((X, Y), numeric, modules="numpy")

    def __repr__(self) -> str:
        return f"Expression({self.source!r})"

    def diff(self, *symbols) -> "Expression":
        return Expression(sympy.diff(self.expr, *symbols))

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        with np.errstate(all="ignore"):
            value = self._func(x, y)
        return np.broadcast_to(np.asarray(value, dtype=float), np.broadcast(x, y).shape)


def derivatives(u: Expression):
    """
    Exact gradient and Hessian callables of u.

    Returns:
        (gradient, hessian) in the ProblemSpec conventions: a pair
        (u_x, u_y) and a nested 2 x 2 list.
    """
    ux, uy = u.diff(X), u.diff(Y)
    uxx, uxy, uyy = u.diff(X, X), u.diff(X, Y), u.diff(Y, Y)

    def gradient(x, y):
        return ux(x, y), uy(x, y)

    def hessian(x, y):
        return [[uxx(x, y), uxy(x, y)], [uxy(x, y), uyy(x, y)]]

    return gradient, hessian


def _parse_domain(text: str) -> np.ndarray:
    try:
        vertices = [[float(v) for v in pair.split()] for pair in text.split(",")]
        domain = np.array(vertices, dtype=float)
    except ValueError as e:
        raise InvalidArgumentError(f"Malformed domain {text!r}: {e}") from e
    if domain.ndim != 2 or domain.shape[1] != 2 or domain.shape[0] < 3:
        raise InvalidArgumentError(f"Domain needs at least 3 'x y' pairs, got {text!r}")
    return domain


def parse_problem(text: str, default_label: str = "custom") -> ProblemSpec:
    """
    Build a ProblemSpec from `key = value` lines.

    When u is given its gradient and Hessian are derived from it.

    Raises:
        InvalidArgumentError: On unknown keys, missing required keys or
            invalid expressions.
    """
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in PROBLEM_KEYS:
            raise InvalidArgumentError(f"Line {lineno}: expected one of {', '.join(PROBLEM_KEYS)} = value")
        entries[key] = value.strip()

    missing = [key for key in ("domain", "f", "g") if key not in entries]
    if missing:
        raise InvalidArgumentError(f"Problem file lacks {', '.join(missing)}")

    exact_u = Expression(entries["u"]) if "u" in entries else None
    gradient, hessian = derivatives(exact_u) if exact_u is not None else (None, None)

    return ProblemSpec(
        label=entries.get("label", default_label),
        domain=_parse_domain(entries["domain"]),
        f=Expression(entries["f"]),
        g=Expression(entries["g"]),
        exact_u=exact_u,
        exact_gradient=gradient,
        exact_hessian=hessian,
    )


def load_problem_file(path: Path) -> ProblemSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise InvalidArgumentError(f"Could not read problem file {path}: {e}") from e
    spec = parse_problem(text, default_label=path.stem)
    logger.info("Loaded problem %s from %s", spec.label, path)
    return spec
