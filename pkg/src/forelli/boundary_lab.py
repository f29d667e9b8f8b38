"""Catalog of test functions on the unit sphere of C^2.

Every :class:`BoundaryFunction` is evaluated as ``f(z1, z2)`` on complex
arrays of a common shape.  Families:

* ``holomorphic_poly``  a polynomial in z1, z2
* ``modulus_sq``        |z1|^2
* ``globevnik``         z2^k / conj(z2), k >= 2
* ``characterized``     sum over (nu, j) of h_{nu,j}(z1) z2^nu / |z2|^(2j)
* ``custom``            any user evaluator
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

import numpy as np


class FunctionSpecError(ValueError):
    pass


def horner(coeffs, z):
    """Evaluate sum_p coeffs[p] z^p."""
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z)
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


@dataclass(frozen=True)
class BoundaryFunction:
    family: str
    params: Mapping
    evaluator: Callable = field(repr=False, compare=False)
    smoothness: str = "analytic"
    smoothness_order: int | None = None
    singular_set: str = "empty"

    def __call__(self, z1, z2):
        z1 = np.asarray(z1, dtype=complex)
        z2 = np.asarray(z2, dtype=complex)
        z1, z2 = np.broadcast_arrays(z1, z2)
        return np.asarray(self.evaluator(z1, z2), dtype=complex) * np.ones(z1.shape)

    def at(self, z):
        return self(z[0], z[1])

    def compose(self, U) -> "BoundaryFunction":
        """f o U for a 2x2 unitary U (same smoothness data)."""
        U = np.asarray(U, dtype=complex)

        def ev(z1, z2):
            return self.evaluator(U[0, 0] * z1 + U[0, 1] * z2, U[1, 0] * z1 + U[1, 1] * z2)

        return BoundaryFunction("custom", {"base": self.family, "unitary": U.tolist()}, ev,
                                self.smoothness, self.smoothness_order, "transformed")

    def describe(self) -> dict:
        d = {"family": self.family, "smoothness": self.smoothness,
             "singular_set": self.singular_set}
        if self.smoothness_order is not None:
            d["smoothness_order"] = self.smoothness_order
        return d


# -- polynomials --------------------------------------------------------------

_COEF = re.compile(r"^\s*(\([^()]*\)|[0-9.]+(?:[eE][+-]?\d+)?i?|i)?\s*\*?\s*")
_FACTOR = re.compile(r"^\s*([a-z][a-z0-9]*)\s*(?:(?:\^|\*\*)\s*(\d+))?\s*\*?\s*")


def parse_complex(text: str) -> complex:
    """Parse literals such as ``0.3``, ``-0.2+0i``, ``0.5i``, ``(1-2i)``."""
    s = text.strip().replace(" ", "")
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    if s in ("i", "+i"):
        return 1j
    if s == "-i":
        return -1j
    s = re.sub(r"(?<![0-9.])i", "1i", s).replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise FunctionSpecError(f"malformed complex literal {text!r}") from None


def parse_polynomial(expr: str, variables=("z1", "z2")) -> dict[tuple[int, ...], complex]:
    """Parse a polynomial expression into ``{exponents: coefficient}``.

    Terms are separated by ``+``/``-``; a term is an optional coefficient
    followed by factors ``var`` or ``var^k`` joined by ``*``.
    """
    s = expr.replace(" ", "")
    if not s:
        raise FunctionSpecError("empty polynomial")
    # split into signed terms, keeping parenthesised coefficients intact
    terms, depth, cur = [], 0, ""
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and cur and cur[-1] not in "eE^*":
            terms.append(cur)
            cur = ch
        else:
            cur += ch
    terms.append(cur)
    poly: dict[tuple[int, ...], complex] = {}
    for term in terms:
        sign = -1.0 if term.startswith("-") else 1.0
        body = term.lstrip("+-")
        m = _COEF.match(body)
        coef = 1.0 + 0j
        if m and m.group(1):
            coef = parse_complex(m.group(1))
        rest = body[m.end():] if m else body
        exps = [0] * len(variables)
        while rest:
            fm = _FACTOR.match(rest)
            if not fm or fm.group(1) not in variables:
                raise FunctionSpecError(f"cannot parse term {term!r} in {expr!r}")
            exps[variables.index(fm.group(1))] += int(fm.group(2) or 1)
            rest = rest[fm.end():]
        key = tuple(exps)
        poly[key] = poly.get(key, 0.0) + sign * coef
    return poly


def eval_polynomial(poly: Mapping, *args):
    out = 0.0
    for exps, c in poly.items():
        term = c
        for x, e in zip(args, exps):
            if e:
                term = term * x ** e
        out = out + term
    return out


def holomorphic_poly(poly: Mapping | str) -> BoundaryFunction:
    if isinstance(poly, str):
        poly = parse_polynomial(poly)
    poly = {tuple(k): complex(v) for k, v in poly.items()}
    return BoundaryFunction("holomorphic_poly", {"coeffs": poly},
                            lambda z1, z2: eval_polynomial(poly, z1, z2))


def random_holomorphic_poly(rng: np.random.Generator, degree: int = 5) -> BoundaryFunction:
    poly = {}
    for p in range(degree + 1):
        for q in range(degree + 1 - p):
            poly[(p, q)] = complex(rng.standard_normal(), rng.standard_normal())
    return holomorphic_poly(poly)


# -- the counterexamples ------------------------------------------------------

def modulus_sq() -> BoundaryFunction:
    return BoundaryFunction("modulus_sq", {}, lambda z1, z2: np.abs(z1) ** 2 + 0j)


def globevnik(k: int) -> BoundaryFunction:
    """z2^k / conj(z2), extended by 0 on {z2 = 0}."""
    k = int(k)
    if k < 2:
        raise FunctionSpecError("globevnik needs k >= 2 to be continuous at z2 = 0")

    def ev(z1, z2):
        out = np.zeros(np.shape(z2), dtype=complex)
        nz = z2 != 0
        w = z2[nz]
        out[nz] = w ** k / np.conj(w)
        return out

    return BoundaryFunction("globevnik", {"k": k}, ev, "finitely_smooth", k - 1, "z2=0")


# -- characterized class ------------------------------------------------------

@dataclass(frozen=True)
class CharacterizedSpec:
    """Coefficient polynomials h[(nu, j)] (ascending powers of z1)."""

    terms: Mapping

    def __post_init__(self):
        clean = {}
        for (nu, j), coeffs in self.terms.items():
            nu, j = int(nu), int(j)
            if j < 0 or not (2 * j < nu or nu == j == 0):
                raise FunctionSpecError(f"term (nu={nu}, j={j}) violates 2j < nu")
            clean[(nu, j)] = np.asarray(coeffs, dtype=complex)
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    @property
    def nus(self) -> list[int]:
        return sorted({nu for nu, _ in self.terms})

    def to_json(self) -> dict:
        return {"terms": [
            {"nu": nu, "j": j, "coeffs": [[c.real, c.imag] for c in h]}
            for (nu, j), h in self.terms.items()
        ]}

    @classmethod
    def from_json(cls, data: Mapping) -> "CharacterizedSpec":
        try:
            terms = {}
            for t in data["terms"]:
                coeffs = [complex(*c) if isinstance(c, (list, tuple)) else complex(c)
                          for c in t["coeffs"]]
                terms[(t["nu"], t["j"])] = coeffs
        except (KeyError, TypeError) as exc:
            raise FunctionSpecError(f"malformed characterized spec: {exc}") from None
        return cls(terms)


def random_charspec(rng: np.random.Generator, nu_max: int = 6, degree: int = 4,
                    n_terms: int | None = None) -> CharacterizedSpec:
    admissible = [(nu, j) for nu in range(nu_max + 1) for j in range(nu)
                  if 2 * j < nu] + [(0, 0)]
    n_terms = n_terms or int(rng.integers(1, 5))
    picks = rng.choice(len(admissible), size=min(n_terms, len(admissible)), replace=False)
    terms = {}
    for i in sorted(picks):
        terms[admissible[i]] = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
    return CharacterizedSpec(terms)


def characterized(spec: CharacterizedSpec) -> BoundaryFunction:
    terms = spec.terms

    def ev(z1, z2):
        out = np.zeros(np.shape(z1), dtype=complex)
        nz = z2 != 0
        a, w = z1[nz], z2[nz]
        w2 = np.abs(w) ** 2
        acc = np.zeros(a.shape, dtype=complex)
        for (nu, j), h in terms.items():
            acc += horner(h, a) * w ** nu / w2 ** j
        out[nz] = acc
        for (nu, j), h in terms.items():
            if nu == 0:
                out[~nz] += horner(h, z1[~nz])
        return out

    gaps = [nu - 2 * j for (nu, j) in terms if nu > 0 and j > 0]
    if gaps:
        return BoundaryFunction("characterized", {"spec": spec}, ev,
                                "finitely_smooth", min(gaps) - 1, "z2=0")
    return BoundaryFunction("characterized", {"spec": spec}, ev)


def custom(evaluator: Callable, name: str = "custom", smoothness: str = "continuous") -> BoundaryFunction:
    return BoundaryFunction("custom", {"name": name}, evaluator, smoothness)


def make_function(spec: str | Mapping) -> BoundaryFunction:
    """Build a catalog function from a spec string or mapping.

    String forms: ``modulus_sq``, ``globevnik:k=3``, ``poly:1+2z1*z2``,
    ``charspec:<path to JSON>``.
    """
    if isinstance(spec, Mapping):
        family = spec.get("family")
        if family == "characterized":
            cs = spec["spec"]
            return characterized(cs if isinstance(cs, CharacterizedSpec) else CharacterizedSpec.from_json(cs))
        if family == "globevnik":
            return globevnik(spec.get("k", 3))
        if family == "modulus_sq":
            return modulus_sq()
        if family == "holomorphic_poly":
            return holomorphic_poly(spec["coeffs"])
        raise FunctionSpecError(f"unknown function family {family!r}")
    head, _, body = spec.partition(":")
    head = head.strip()
    if head == "modulus_sq":
        return modulus_sq()
    if head == "globevnik":
        try:
            params = dict(kv.split("=", 1) for kv in body.split(",") if kv)
            return globevnik(int(params.get("k", 3)))
        except ValueError as exc:
            raise FunctionSpecError(str(exc)) from None
    if head == "poly":
        return holomorphic_poly(body)
    if head == "charspec":
        try:
            data = json.loads(Path(body).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise FunctionSpecError(f"cannot read characterized spec {body!r}: {exc}") from None
        return characterized(CharacterizedSpec.from_json(data))
    raise FunctionSpecError(f"unknown function family {head!r}")


def evaluate_on_circle(f: BoundaryFunction, line, N: int) -> np.ndarray:
    """Samples of f at base + (lambda0 + rho e^{i theta_j}) dir, theta_j = 2 pi j / N."""
    from .geometry import line_boundary_circle

    if N < 4 or N & (N - 1):
        raise ValueError("node count must be a power of two")
    circ = line_boundary_circle(line)
    theta = 2 * np.pi * np.arange(N) / N
    lam = circ.lambda0 + circ.rho * np.exp(1j * theta)
    z = line.point(lam)
    return f(z[0], z[1])
