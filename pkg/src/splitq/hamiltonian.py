"""Polynomial Hamiltonians with hypercomplex coefficients.

A :class:`HamiltonianSpec` is a finite sum of monomials
``c * x0**a * p0**b * x1**c * p1**d`` whose coefficients ``c`` are
four-component hypercomplex numbers, so ``H = H0 + i H1 + j H2 + k H3``.
Derivatives are exact (term-wise), which is what the flows and the
Cauchy-Riemann check rely on.

:class:`AnalyticSpec` holds a complex polynomial in the complexified pair
``(x, p)``; :func:`expand_analytic` substitutes ``x = x0 + i x1`` and
``p = p0 + i p1`` to obtain the real components.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from numbers import Number
from typing import Iterable, Mapping

import numpy as np

from .algebra import HyperComplex, Signature
from .errors import NotComplexValued

__all__ = [
    "VARIABLES",
    "MAX_EXPONENT",
    "PhasePoint",
    "HamiltonianSpec",
    "AnalyticSpec",
    "evaluate",
    "partials",
    "expand_analytic",
    "cr_residual",
    "parse_polynomial",
]

VARIABLES = ("x0", "p0", "x1", "p1")
MAX_EXPONENT = 8


@dataclass(frozen=True)
class PhasePoint:
    """Real canonical coordinates of the complexified phase space."""

    x0: float = 0.0
    p0: float = 0.0
    x1: float = 0.0
    p1: float = 0.0

    def __post_init__(self):
        for name in VARIABLES:
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"phase-space coordinate {name} is not finite: {value}")
            object.__setattr__(self, name, value)

    @classmethod
    def from_array(cls, arr) -> "PhasePoint":
        a = np.asarray(arr, dtype=float).reshape(4)
        return cls(*a)

    def as_array(self) -> np.ndarray:
        return np.array([self.x0, self.p0, self.x1, self.p1])

    def __iter__(self):
        return iter((self.x0, self.p0, self.x1, self.p1))


def _coeff_array(coeff) -> np.ndarray:
    if isinstance(coeff, HyperComplex):
        return coeff.as_array()
    if isinstance(coeff, complex):
        return np.array([coeff.real, coeff.imag, 0.0, 0.0])
    if isinstance(coeff, Number):
        return np.array([float(coeff), 0.0, 0.0, 0.0])
    arr = np.asarray(coeff, dtype=float)
    if arr.shape != (4,):
        raise ValueError(f"coefficient must have 4 components, got shape {arr.shape}")
    return arr


class HamiltonianSpec:
    """Immutable polynomial Hamiltonian over ``(x0, p0, x1, p1)``.

    Parameters
    ----------
    terms : iterable of ``(coefficient, exponents)``
        ``coefficient`` is a :class:`HyperComplex`, a real or complex number,
        or a length-4 sequence. ``exponents`` is four nonnegative integers for
        ``x0, p0, x1, p1``. Repeated exponent tuples are summed.
    sig : Signature
    """

    def __init__(self, terms: Iterable = (), sig: Signature | str = Signature.COQUATERNION):
        self.sig = Signature.parse(sig)
        merged: dict[tuple[int, int, int, int], np.ndarray] = {}
        for coeff, exps in terms:
            key = tuple(int(e) for e in exps)
            if len(key) != 4 or any(e < 0 for e in key):
                raise ValueError(f"exponents must be 4 nonnegative integers, got {exps!r}")
            if max(key) > MAX_EXPONENT:
                raise ValueError(f"exponent {max(key)} exceeds the cap of {MAX_EXPONENT}")
            c = _coeff_array(coeff)
            if not np.all(np.isfinite(c)):
                raise ValueError("coefficients must be finite")
            merged[key] = merged.get(key, np.zeros(4)) + c
        keys = sorted(k for k, c in merged.items() if np.any(c != 0.0))
        self._exponents = np.array(keys, dtype=np.int64).reshape(-1, 4)
        self._coefficients = np.array([merged[k] for k in keys], dtype=float).reshape(-1, 4)
        self._exponents.setflags(write=False)
        self._coefficients.setflags(write=False)

    @classmethod
    def from_dict(cls, terms: Mapping, sig: Signature | str = Signature.COQUATERNION):
        return cls(((c, e) for e, c in terms.items()), sig)

    @property
    def exponents(self) -> np.ndarray:
        return self._exponents

    @property
    def coefficients(self) -> np.ndarray:
        return self._coefficients

    @property
    def terms(self) -> list[tuple[HyperComplex, tuple[int, ...]]]:
        return [
            (HyperComplex.from_array(c, self.sig), tuple(int(x) for x in e))
            for c, e in zip(self._coefficients, self._exponents)
        ]

    def __len__(self):
        return len(self._exponents)

    def __add__(self, other: "HamiltonianSpec") -> "HamiltonianSpec":
        if not isinstance(other, HamiltonianSpec):
            return NotImplemented
        return HamiltonianSpec(
            list(zip(self._coefficients, self._exponents))
            + list(zip(other._coefficients, other._exponents)),
            self.sig,
        )

    def __mul__(self, scale: float) -> "HamiltonianSpec":
        return HamiltonianSpec(zip(self._coefficients * float(scale), self._exponents), self.sig)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, HamiltonianSpec):
            return NotImplemented
        return (
            self.sig is other.sig
            and np.array_equal(self._exponents, other._exponents)
            and np.array_equal(self._coefficients, other._coefficients)
        )

    def __repr__(self):
        return f"HamiltonianSpec({len(self)} terms, sig={self.sig.value})"

    def component(self, m: int) -> "HamiltonianSpec":
        """The real polynomial ``H_m`` kept as component 0."""
        c = np.zeros_like(self._coefficients)
        c[:, 0] = self._coefficients[:, m]
        return HamiltonianSpec(zip(c, self._exponents), self.sig)

    def nonzero_components(self) -> set[int]:
        return {m for m in range(4) if np.any(self._coefficients[:, m] != 0.0)}

    def is_separable(self, components: Iterable[int] = (0, 1, 2, 3)) -> bool:
        """True if every monomial of the given components is p-free or x-free."""
        comps = list(components)
        for c, e in zip(self._coefficients, self._exponents):
            if not np.any(c[comps] != 0.0):
                continue
            has_x = e[0] + e[2] > 0
            has_p = e[1] + e[3] > 0
            if has_x and has_p:
                return False
        return True

    # -- evaluation ------------------------------------------------------

    def eval_array(self, states) -> np.ndarray:
        """Evaluate at ``(..., 4)`` states; returns ``(..., 4)`` components."""
        s = np.asarray(states, dtype=float)
        if len(self) == 0:
            return np.zeros(s.shape[:-1] + (4,))
        mono = np.prod(s[..., None, :] ** self._exponents, axis=-1)
        return mono @ self._coefficients

    def partials_array(self, states) -> np.ndarray:
        """``out[..., m, v] = dH_m/dv`` at ``(..., 4)`` states."""
        s = np.asarray(states, dtype=float)
        out = np.zeros(s.shape[:-1] + (4, 4))
        if len(self) == 0:
            return out
        for v in range(4):
            e = self._exponents.copy()
            factor = e[:, v].astype(float)
            e[:, v] = np.maximum(e[:, v] - 1, 0)
            mono = np.prod(s[..., None, :] ** e, axis=-1) * factor
            out[..., :, v] = mono @ self._coefficients
        return out

    def __call__(self, s) -> HyperComplex:
        return evaluate(self, s)


def _state_array(s) -> np.ndarray:
    if isinstance(s, PhasePoint):
        return s.as_array()
    return np.asarray(s, dtype=float).reshape(4)


def evaluate(h: HamiltonianSpec, s) -> HyperComplex:
    """Value ``H0 + i H1 + j H2 + k H3`` at the phase point ``s``."""
    return HyperComplex.from_array(h.eval_array(_state_array(s)), h.sig)


def partials(h: HamiltonianSpec, s) -> np.ndarray:
    """4x4 array of exact partials ``dH_m/dv``, ``v`` ordered ``x0, p0, x1, p1``."""
    return h.partials_array(_state_array(s))


# ---------------------------------------------------------------------------
# analytic (complex) Hamiltonians


@dataclass(frozen=True)
class AnalyticSpec:
    """Complex polynomial ``sum c[a, b] x**a p**b`` in the complexified variables."""

    coeffs: Mapping[tuple[int, int], complex]
    sig: Signature = Signature.COQUATERNION

    def __post_init__(self):
        clean = {}
        for (a, b), c in dict(self.coeffs).items():
            a, b = int(a), int(b)
            if a < 0 or b < 0:
                raise ValueError("powers must be nonnegative")
            if max(a, b) > MAX_EXPONENT:
                raise ValueError(f"power {max(a, b)} exceeds the cap of {MAX_EXPONENT}")
            c = complex(c)
            if c != 0:
                clean[(a, b)] = clean.get((a, b), 0) + c
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "sig", Signature.parse(self.sig))

    @classmethod
    def parse(cls, text: str, sig: Signature | str = Signature.COQUATERNION) -> "AnalyticSpec":
        return cls(parse_polynomial(text), sig)

    def __call__(self, x: complex, p: complex) -> complex:
        return sum(c * x**a * p**b for (a, b), c in self.coeffs.items())


def expand_analytic(a: AnalyticSpec) -> HamiltonianSpec:
    """Split an analytic Hamiltonian into real components ``H0 + i H1``.

    >>> h = expand_analytic(AnalyticSpec.parse("p*x"))
    >>> [(e, c.q0, c.q1) for c, e in h.terms]
    [((0, 0, 1, 1), -1.0, 0.0), ((0, 1, 1, 0), 0.0, 1.0), ((1, 0, 0, 1), 0.0, 1.0), ((1, 1, 0, 0), 1.0, 0.0)]
    """
    terms = []
    for (ax, bp), c in a.coeffs.items():
        for k in range(ax + 1):
            for l in range(bp + 1):
                w = c * math.comb(ax, k) * math.comb(bp, l) * (1j ** (k + l))
                terms.append(((w.real, w.imag, 0.0, 0.0), (ax - k, bp - l, k, l)))
    return HamiltonianSpec(terms, a.sig)


def cr_residual(h: HamiltonianSpec, s) -> float:
    """Largest violation of the Cauchy-Riemann identities at ``s``.

    The identities are ``dH0/dx0 = dH1/dx1``, ``dH0/dx1 = -dH1/dx0`` and the
    same pair with ``p`` in place of ``x``.
    """
    if h.nonzero_components() & {2, 3}:
        raise NotComplexValued("Hamiltonian has nonzero j or k components")
    d = partials(h, s)
    x0, p0, x1, p1 = range(4)
    viol = [
        d[0, x0] - d[1, x1],
        d[0, x1] + d[1, x0],
        d[0, p0] - d[1, p1],
        d[0, p1] + d[1, p0],
    ]
    return float(max(abs(v) for v in viol))


# ---------------------------------------------------------------------------
# expression parser for analytic Hamiltonians
#
#   expr   := term (('+' | '-') term)*
#   term   := factor (('*' | '·' | '/')? factor)*       juxtaposition multiplies
#   factor := ('+' | '-') factor | atom (('^' | '**') INT | SUPERSCRIPT)?
#   atom   := NUMBER 'i'? | 'i' | 'x' | 'p' | '(' expr ')'

_SUPERSCRIPTS = str.maketrans("⁰¹²³⁴⁵⁶⁷⁸⁹", "0123456789")
_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<sup>[⁰¹²³⁴⁵⁶⁷⁸⁹]+)"
    r"|(?P<op>\*\*|[-+*/^()·−½])"
    r"|(?P<name>[xpi]))"
)

Poly = dict  # {(power of x, power of p): complex}


def _padd(a: Poly, b: Poly, sign: float = 1.0) -> Poly:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + sign * v
    return {k: v for k, v in out.items() if v != 0}


def _pmul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for (a1, b1), c1 in a.items():
        for (a2, b2), c2 in b.items():
            k = (a1 + a2, b1 + b2)
            out[k] = out.get(k, 0) + c1 * c2
    return {k: v for k, v in out.items() if v != 0}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str]] = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"unexpected character {text[pos:].strip()[:1]!r} at {pos} in {self.text!r}")
            kind = m.lastgroup
            val = m.group(kind)
            if val == "−":
                val = "-"
            self.tokens.append((kind, val))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self) -> Poly:
        if not self.tokens:
            raise ValueError("empty polynomial expression")
        poly = self.expr()
        if self.i != len(self.tokens):
            raise ValueError(f"unexpected token {self.peek()[1]!r} in {self.text!r}")
        return poly

    def expr(self) -> Poly:
        poly = self.term()
        while self.peek()[1] in ("+", "-"):
            sign = 1.0 if self.take()[1] == "+" else -1.0
            poly = _padd(poly, self.term(), sign)
        return poly

    def _starts_factor(self) -> bool:
        kind, val = self.peek()
        return kind in ("num", "name") or val in ("(", "½")

    def term(self) -> Poly:
        poly = self.factor()
        while True:
            kind, val = self.peek()
            if val in ("*", "·"):
                self.take()
                poly = _pmul(poly, self.factor())
            elif val == "/":
                self.take()
                den = self.factor()
                if set(den) - {(0, 0)} or not den:
                    raise ValueError("division is only allowed by a nonzero constant")
                poly = {k: v / den[(0, 0)] for k, v in poly.items()}
            elif self._starts_factor():
                poly = _pmul(poly, self.factor())
            else:
                return poly

    def factor(self) -> Poly:
        kind, val = self.peek()
        if val in ("+", "-"):
            self.take()
            inner = self.factor()
            return inner if val == "+" else {k: -v for k, v in inner.items()}
        base = self.atom()
        kind, val = self.peek()
        if val in ("^", "**"):
            self.take()
            kind, val = self.take()
            if kind != "num" or not val.isdigit():
                raise ValueError("exponents must be nonnegative integer literals")
            return self._power(base, int(val))
        if kind == "sup":
            self.take()
            return self._power(base, int(val.translate(_SUPERSCRIPTS)))
        return base

    @staticmethod
    def _power(base: Poly, n: int) -> Poly:
        out: Poly = {(0, 0): 1.0}
        for _ in range(n):
            out = _pmul(out, base)
        return out

    def atom(self) -> Poly:
        kind, val = self.take()
        if kind == "num":
            value: complex = float(val)
            if self.peek() == ("name", "i"):
                self.take()
                value = 1j * value
            return {(0, 0): value} if value != 0 else {}
        if val == "½":
            return {(0, 0): 0.5}
        if kind == "name":
            return {"x": {(1, 0): 1.0}, "p": {(0, 1): 1.0}, "i": {(0, 0): 1j}}[val]
        if val == "(":
            inner = self.expr()
            if self.take()[1] != ")":
                raise ValueError(f"missing ')' in {self.text!r}")
            return inner
        raise ValueError(f"unexpected token {val!r} in {self.text!r}")


def parse_polynomial(text: str) -> dict[tuple[int, int], complex]:
    """Parse a complex polynomial in ``x`` and ``p``.

    Supports ``+ - * / ^ **``, juxtaposition, parentheses, unicode superscripts
    and complex literals written with an ``i`` suffix (``2.5i``).

    >>> parse_polynomial("(p^2 + x^2)/2")
    {(0, 2): (0.5+0j), (2, 0): (0.5+0j)}
    """
    poly = _Parser(text).parse()
    return {k: complex(v) for k, v in sorted(poly.items())}
