"""Sparse multivariate polynomials with exact coefficients.

Homogeneous polynomials drive all the hyperbolicity machinery, and the
lowest-degree-part extraction done there is brittle under floating-point
cancellation, so polynomials built symbolically (products, determinants,
derivatives, shifts of exact points) carry int/Fraction coefficients and
only drop to float at evaluation time or when a float enters the data.

A polynomial is a dict mapping exponent tuples to coefficients.  Terms
with exactly-zero coefficients are never stored.
"""

from __future__ import annotations

import itertools
import math
import re
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import DomainError, UsageError

_EXACT_TYPES = (int, Fraction)


def _is_exact(c) -> bool:
    return isinstance(c, _EXACT_TYPES)


def _coef_is_zero(c) -> bool:
    return _is_exact(c) and c == 0


class SparsePoly:
    """A sparse polynomial in ``num_vars`` variables.

    ``terms`` maps exponent tuples (length num_vars, nonnegative ints)
    to coefficients (int, Fraction, or float).
    """

    __slots__ = ("num_vars", "terms")

    def __init__(self, num_vars: int, terms: dict | None = None):
        self.num_vars = int(num_vars)
        clean = {}
        for exps, c in (terms or {}).items():
            if _coef_is_zero(c) or c == 0.0:
                continue
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.num_vars or any(e < 0 for e in exps):
                raise UsageError(f"bad exponent vector {exps} for {self.num_vars} vars")
            clean[exps] = c
        self.terms = clean

    # -- constructors ------------------------------------------------

    @classmethod
    def zero(cls, num_vars: int) -> "SparsePoly":
        return cls(num_vars, {})

    @classmethod
    def constant(cls, num_vars: int, c) -> "SparsePoly":
        return cls(num_vars, {tuple([0] * num_vars): c})

    @classmethod
    def variable(cls, i: int, num_vars: int) -> "SparsePoly":
        e = [0] * num_vars
        e[i] = 1
        return cls(num_vars, {tuple(e): 1})

    # -- structure ---------------------------------------------------

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    def is_zero(self) -> bool:
        return not self.terms

    def has_exact_coefficients(self) -> bool:
        return all(_is_exact(c) for c in self.terms.values())

    def homogeneous_part(self, deg: int) -> "SparsePoly":
        return SparsePoly(
            self.num_vars, {e: c for e, c in self.terms.items() if sum(e) == deg}
        )

    def max_abs_coef(self) -> float:
        if not self.terms:
            return 0.0
        return max(abs(float(c)) for c in self.terms.values())

    # -- arithmetic ----------------------------------------------------

    def _binop(self, other, sign) -> "SparsePoly":
        if isinstance(other, (int, float, Fraction)):
            other = SparsePoly.constant(self.num_vars, other)
        if self.num_vars != other.num_vars:
            raise UsageError("polynomials over different variable counts")
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + sign * c
        return SparsePoly(self.num_vars, out)

    def __add__(self, other):
        return self._binop(other, 1)

    def __sub__(self, other):
        return self._binop(other, -1)

    def __neg__(self):
        return SparsePoly(self.num_vars, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, float, Fraction)):
            return SparsePoly(
                self.num_vars, {e: c * other for e, c in self.terms.items()}
            )
        if self.num_vars != other.num_vars:
            raise UsageError("polynomials over different variable counts")
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return SparsePoly(self.num_vars, out)

    __rmul__ = __mul__
    __radd__ = __add__

    def __pow__(self, k: int):
        if k < 0:
            raise UsageError("negative power")
        result = SparsePoly.constant(self.num_vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def partial(self, i: int) -> "SparsePoly":
        """d/dx_i."""
        out = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            f = list(e)
            f[i] -= 1
            out[tuple(f)] = out.get(tuple(f), 0) + c * e[i]
        return SparsePoly(self.num_vars, out)

    # -- evaluation ----------------------------------------------------

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        """Evaluate at one point.  Exact when both the coefficients and
        the point are ints/Fractions, float otherwise."""
        if len(x) != self.num_vars:
            raise UsageError(f"point has {len(x)} coords, poly has {self.num_vars} vars")
        exact_point = all(_is_exact(v) for v in x)
        if exact_point and self.has_exact_coefficients():
            total = Fraction(0)
            for e, c in self.terms.items():
                m = Fraction(c)
                for v, k in zip(x, e):
                    if k:
                        m *= Fraction(v) ** k
                total += m
            return int(total) if total.denominator == 1 else total
        return float(self.eval_many(np.asarray(x, dtype=np.float64)[None, :])[0])

    def eval_many(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at each row of ``points`` (float path, jitted kernel)."""
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if points.shape[1] != self.num_vars:
            raise UsageError("point dimension mismatch")
        if not self.terms:
            return np.zeros(points.shape[0])
        exps, coefs = self._exp_matrix()
        return _kernels.evaluate_many(points, exps, coefs)

    def _exp_matrix(self):
        keys = sorted(self.terms)
        exps = np.array(keys, dtype=np.int64).reshape(len(keys), self.num_vars)
        coefs = np.array([float(self.terms[k]) for k in keys])
        return exps, coefs

    def gradient(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return np.array([float(self.partial(i).eval_many(x[None, :])[0])
                         for i in range(self.num_vars)])

    # -- shifting ------------------------------------------------------

    def shift(self, x) -> "SparsePoly":
        """The polynomial y |-> p(x + y), expanded binomially.

        Exact when x and the coefficients are exact; this is the
        workhorse behind localization and must not lose cancellation
        information, hence no float shortcuts here.
        """
        if len(x) != self.num_vars:
            raise UsageError("shift point dimension mismatch")
        out: dict = {}
        for e, c in self.terms.items():
            support = [i for i, k in enumerate(e) if k > 0]
            ranges = [range(e[i] + 1) for i in support]
            for js in itertools.product(*ranges):
                coef = c
                f = [0] * self.num_vars
                for i, j in zip(support, js):
                    k = e[i]
                    if j < k:
                        xv = x[i]
                        if xv == 0:
                            coef = 0
                            break
                        coef = coef * math.comb(k, j) * (xv ** (k - j))
                    f[i] = j
                if coef == 0:
                    continue
                key = tuple(f)
                out[key] = out.get(key, 0) + coef
        return SparsePoly(self.num_vars, out)

    def prune(self, tol: float) -> "SparsePoly":
        """Drop coefficients with |c| <= tol (used on float-contaminated
        polynomials; exact coefficients below tol are dropped too, by
        design — callers choose tol=0 to keep exact arithmetic exact)."""
        if tol == 0:
            return self
        return SparsePoly(
            self.num_vars,
            {e: c for e, c in self.terms.items() if abs(float(c)) > tol},
        )

    # -- serialization ---------------------------------------------------

    def to_json_dict(self) -> dict:
        terms = []
        for e in sorted(self.terms):
            c = self.terms[e]
            if isinstance(c, Fraction) and c.denominator != 1:
                cj = {"num": c.numerator, "den": c.denominator}
            elif isinstance(c, Fraction):
                cj = int(c)
            else:
                cj = c
            terms.append({"exps": list(e), "coef": cj})
        return {"num_vars": self.num_vars, "terms": terms}

    @classmethod
    def from_json_dict(cls, d: dict) -> "SparsePoly":
        try:
            n = int(d["num_vars"])
            terms = {}
            for t in d["terms"]:
                c = t["coef"]
                if isinstance(c, dict):
                    c = Fraction(int(c["num"]), int(c["den"]))
                elif isinstance(c, float) and c.is_integer():
                    c = int(c)
                terms[tuple(int(e) for e in t["exps"])] = c
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"malformed polynomial JSON: {exc}") from exc
        return cls(n, terms)

    def __repr__(self) -> str:  # pragma: no cover
        if not self.terms:
            return "0"
        bits = []
        for e in sorted(self.terms):
            mono = " ".join(
                f"x{i + 1}" + (f"^{k}" if k > 1 else "")
                for i, k in enumerate(e)
                if k
            )
            bits.append(f"{self.terms[e]} {mono}".strip())
        return " + ".join(bits)


# ---------------------------------------------------------------------------
# parsing

_TERM_RE = re.compile(r"[+-]?[^+-]+")
_FACTOR_RE = re.compile(r"x(\d+)(?:\^(\d+))?$")


def parse_poly(text: str, num_vars: int | None = None) -> SparsePoly:
    """Parse monomial strings like ``"2 x1^2 x3 - x2 x3^2"``.

    Terms are separated by + or -, factors by whitespace; an optional
    leading numeric factor may be an integer, a decimal, or a ratio
    like 3/4.  Variables are x1..xn; ``num_vars`` defaults to the
    largest index seen.
    """
    text = text.strip()
    if not text:
        raise UsageError("empty polynomial string")
    raw_terms = []
    for m in _TERM_RE.finditer(text):
        chunk = m.group(0).strip()
        if chunk in ("+", "-", ""):
            raise UsageError(f"dangling sign in {text!r}")
        sign = 1
        if chunk[0] == "+":
            chunk = chunk[1:].strip()
        elif chunk[0] == "-":
            sign = -1
            chunk = chunk[1:].strip()
        coef: int | Fraction | float = sign
        exps: dict[int, int] = {}
        for factor in chunk.split():
            fm = _FACTOR_RE.match(factor)
            if fm:
                idx = int(fm.group(1)) - 1
                if idx < 0:
                    raise UsageError(f"variable indices start at x1: {factor!r}")
                exps[idx] = exps.get(idx, 0) + int(fm.group(2) or 1)
            else:
                try:
                    if "/" in factor:
                        num, den = factor.split("/")
                        coef = coef * Fraction(int(num), int(den))
                    elif "." in factor or "e" in factor.lower():
                        coef = coef * float(factor)
                    else:
                        coef = coef * int(factor)
                except ValueError as exc:
                    raise UsageError(f"cannot parse factor {factor!r}") from exc
        raw_terms.append((exps, coef))
    n = num_vars
    if n is None:
        n = max((max(e) + 1 for e, _ in raw_terms if e), default=0)
    terms: dict = {}
    for exps, coef in raw_terms:
        if exps and max(exps) >= n:
            raise UsageError(f"variable x{max(exps) + 1} exceeds num_vars={n}")
        key = tuple(exps.get(i, 0) for i in range(n))
        terms[key] = terms.get(key, 0) + coef
    return SparsePoly(n, terms)


# ---------------------------------------------------------------------------
# standard families

def product_poly(d: int) -> SparsePoly:
    """x1 * x2 * ... * xd."""
    return SparsePoly(d, {tuple([1] * d): 1})


def elementary_symmetric(d: int, l: int) -> SparsePoly:
    """e_l in d variables."""
    if not 0 <= l <= d:
        raise UsageError(f"e_{l} undefined in {d} variables")
    terms = {}
    for subset in itertools.combinations(range(d), l):
        e = [0] * d
        for i in subset:
            e[i] = 1
        terms[tuple(e)] = 1
    return SparsePoly(d, terms)


def monomials_of_degree(num_vars: int, degree: int) -> list:
    """Exponent tuples of total degree ``degree``, graded-lex order
    (descending powers of the first variable first)."""
    if num_vars < 1 or degree < 0:
        raise UsageError("need num_vars >= 1 and degree >= 0")
    if num_vars == 1:
        return [(degree,)]
    out = []
    for first in range(degree, -1, -1):
        for rest in monomials_of_degree(num_vars - 1, degree - first):
            out.append((first,) + rest)
    return out


def ut_index(i: int, j: int, d: int) -> int:
    """Position of entry (i,j), i<=j, in row-major upper-triangle order."""
    if i > j:
        i, j = j, i
    return i * d - i * (i - 1) // 2 + (j - i)


def determinant_polynomial(d: int) -> SparsePoly:
    """det of a symmetric d x d matrix, in the d(d+1)/2 upper-triangle
    variables x_ij (plain coordinates, NOT the sqrt2-scaled svec ones,
    so that coefficients stay exact integers)."""
    n = d * (d + 1) // 2
    terms: dict = {}
    for perm in itertools.permutations(range(d)):
        sign = _perm_sign(perm)
        e = [0] * n
        for i in range(d):
            e[ut_index(i, perm[i], d)] += 1
        key = tuple(e)
        terms[key] = terms.get(key, 0) + sign
    return SparsePoly(n, terms)


def hankel_determinant_polynomial(d: int) -> SparsePoly:
    """det of the d x d Hankel matrix H[i,j] = h_{i+j} in 2d-1 variables."""
    n = 2 * d - 1
    terms: dict = {}
    for perm in itertools.permutations(range(d)):
        sign = _perm_sign(perm)
        e = [0] * n
        for i in range(d):
            e[i + perm[i]] += 1
        key = tuple(e)
        terms[key] = terms.get(key, 0) + sign
    return SparsePoly(n, terms)


def _perm_sign(perm) -> int:
    seen = [False] * len(perm)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = perm[i]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def sym_matrix_to_ut(x: np.ndarray) -> np.ndarray:
    """Plain upper-triangle coordinates of a symmetric matrix (the
    variable order of determinant_polynomial)."""
    x = np.asarray(x)
    d = x.shape[0]
    iu = np.triu_indices(d)
    return np.asarray(x[iu])


def ut_to_sym_matrix(v: np.ndarray, d: int) -> np.ndarray:
    out = np.zeros((d, d))
    iu = np.triu_indices(d)
    out[iu] = v
    return out + out.T - np.diag(np.diag(out))
