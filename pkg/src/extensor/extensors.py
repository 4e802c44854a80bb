"""Linear maps between multiform subspaces and their operator toolkit.

An extensor is stored as a dictionary of grade blocks.  Block ``(q, p)``
maps the grade-``p`` coefficients of the argument (lexicographic blade
order) to grade-``q`` coefficients of the image.  A (1,1)-extensor is the
single block ``(1, 1)`` whose column ``j`` holds the image of ``e^j``.

Most operations accept an optional :class:`ReciprocalPair`.  They evaluate
their defining sums over that pair, so results obtained with different
pairs can be compared to test basis independence.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np

from .algebra import (
    Algebra,
    Multiform,
    ReciprocalPair,
    algebra,
    canonical_dot,
    clifford_mul,
    left_contract,
    tilde,
    wedge,
    wedge_all,
)
from .errors import DimensionError, DomainError, SingularExtensorError

SINGULAR_TOL = 1e-12
NORMALITY_TOL = 1e-10


def _grade_tuple(grades: Iterable[int] | int) -> tuple[int, ...]:
    if isinstance(grades, (int, np.integer)):
        return (int(grades),)
    out = tuple(sorted(set(int(g) for g in grades)))
    if not out:
        raise DomainError("a grade set must not be empty")
    return out


@dataclass(frozen=True, eq=False)
class Extensor:
    algebra: Algebra
    domain: tuple[int, ...]
    codomain: tuple[int, ...]
    blocks: Mapping[tuple[int, int], np.ndarray]

    def __post_init__(self):
        alg = self.algebra
        domain = _grade_tuple(self.domain)
        codomain = _grade_tuple(self.codomain)
        for k in domain + codomain:
            alg.check_grade(k)
        blocks = {}
        for (q, p), m in self.blocks.items():
            if p not in domain or q not in codomain:
                raise DomainError(f"block ({q},{p}) lies outside the declared grade sets")
            arr = np.array(m, dtype=np.float64)
            shape = (alg.blades_of_grade(q).size, alg.blades_of_grade(p).size)
            if arr.shape != shape:
                raise DimensionError(f"block ({q},{p}) needs shape {shape}, got {arr.shape}")
            arr.setflags(write=False)
            blocks[(q, p)] = arr
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "codomain", codomain)
        object.__setattr__(self, "blocks", blocks)

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def is_one_one(self) -> bool:
        return self.domain == (1,) and self.codomain == (1,)

    # construction -------------------------------------------------------
    @classmethod
    def from_matrix(cls, matrix, alg: Algebra | None = None) -> "Extensor":
        """A (1,1)-extensor whose column ``j`` is the image of ``e^j``."""
        m = np.asarray(matrix, dtype=np.float64)
        alg = alg or algebra(m.shape[0])
        return cls(alg, (1,), (1,), {(1, 1): m})

    @classmethod
    def from_function(
        cls,
        alg: Algebra,
        domain: Iterable[int] | int,
        codomain: Iterable[int] | int,
        func: Callable[[Multiform], Multiform],
    ) -> "Extensor":
        """Tabulate a linear function on the fiducial blades of ``domain``."""
        domain = _grade_tuple(domain)
        codomain = _grade_tuple(codomain)
        blocks = {}
        for p in domain:
            cols = []
            for b in alg.blades_of_grade(p):
                c = np.zeros(alg.size)
                c[b] = 1.0
                cols.append(func(Multiform(alg, c)).coeffs)
            image = np.array(cols).T
            for q in codomain:
                blocks[(q, p)] = image[alg.blades_of_grade(q)]
        return cls(alg, domain, codomain, blocks)

    @classmethod
    def identity(cls, alg: Algebra, grades: Iterable[int] | int = 1) -> "Extensor":
        grades = _grade_tuple(grades)
        return cls(alg, grades, grades, {(k, k): np.eye(alg.blades_of_grade(k).size) for k in grades})

    @classmethod
    def zero(cls, alg: Algebra, domain=1, codomain=1) -> "Extensor":
        return cls(alg, domain, codomain, {})

    def block(self, q: int, p: int) -> np.ndarray:
        m = self.blocks.get((q, p))
        if m is None:
            return np.zeros((self.algebra.blades_of_grade(q).size, self.algebra.blades_of_grade(p).size))
        return m

    @property
    def matrix(self) -> np.ndarray:
        """Dense matrix over the domain and codomain blades, grade-major."""
        return np.block([[self.block(q, p) for p in self.domain] for q in self.codomain])

    # action ---------------------------------------------------------------
    def __call__(self, x: Multiform) -> Multiform:
        return apply(self, x)

    def __matmul__(self, other: "Extensor") -> "Extensor":
        return compose(self, other)

    def __add__(self, other: "Extensor") -> "Extensor":
        return _combine(self, other, 1.0)

    def __sub__(self, other: "Extensor") -> "Extensor":
        return _combine(self, other, -1.0)

    def __mul__(self, scale: float) -> "Extensor":
        return Extensor(self.algebra, self.domain, self.codomain, {k: m * scale for k, m in self.blocks.items()})

    __rmul__ = __mul__

    def __truediv__(self, scale: float) -> "Extensor":
        return self * (1.0 / scale)

    def __neg__(self) -> "Extensor":
        return self * -1.0

    def allclose(self, other: "Extensor", rtol: float = 1e-10, atol: float = 1e-10) -> bool:
        keys = set(self.blocks) | set(other.blocks)
        return all(np.allclose(self.block(*k), other.block(*k), rtol=rtol, atol=atol) for k in keys)

    def __repr__(self) -> str:
        return f"Extensor(n={self.dim}, domain={list(self.domain)}, codomain={list(self.codomain)})"

    # serialization --------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "domain": list(self.domain),
            "codomain": list(self.codomain),
            "matrix": self.matrix.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "Extensor":
        alg = algebra(int(data["dim"]))
        domain = _grade_tuple(data["domain"])
        codomain = _grade_tuple(data["codomain"])
        dense = np.asarray(data["matrix"], dtype=np.float64)
        rows = np.cumsum([0] + [alg.blades_of_grade(q).size for q in codomain])
        cols = np.cumsum([0] + [alg.blades_of_grade(p).size for p in domain])
        if dense.shape != (rows[-1], cols[-1]):
            raise DimensionError(f"matrix shape {dense.shape} does not match grades, expected {(rows[-1], cols[-1])}")
        blocks = {}
        for i, q in enumerate(codomain):
            for j, p in enumerate(domain):
                m = dense[rows[i]:rows[i + 1], cols[j]:cols[j + 1]]
                if np.any(m):
                    blocks[(q, p)] = m
        return cls(alg, domain, codomain, blocks)

    @classmethod
    def from_json(cls, text: str) -> "Extensor":
        return cls.from_dict(json.loads(text))


def _combine(a: Extensor, b: Extensor, sign: float) -> Extensor:
    if a.dim != b.dim:
        raise DimensionError("extensors of different dimension")
    blocks = {k: a.block(*k) + sign * b.block(*k) for k in set(a.blocks) | set(b.blocks)}
    return Extensor(a.algebra, set(a.domain) | set(b.domain), set(a.codomain) | set(b.codomain), blocks)


def apply(t: Extensor, x: Multiform) -> Multiform:
    if x.dim != t.dim:
        raise DimensionError(f"extensor of dimension {t.dim} applied to a dimension {x.dim} multiform")
    alg = t.algebra
    outside = ~np.isin(alg.grades, t.domain)
    tol = 1e-12 * (1.0 + x.norm())
    if np.any(np.abs(x.coeffs[outside]) > tol):
        raise DomainError(f"argument has grades {sorted(x.grades_present(tol))} outside domain {list(t.domain)}")
    out = np.zeros(alg.size)
    for (q, p), m in t.blocks.items():
        out[alg.blades_of_grade(q)] += m @ x.coeffs[alg.blades_of_grade(p)]
    return Multiform(alg, out)


def compose(t: Extensor, u: Extensor) -> Extensor:
    """``t`` after ``u``."""
    if t.dim != u.dim:
        raise DimensionError("extensors of different dimension")
    blocks: dict[tuple[int, int], np.ndarray] = {}
    for (r, q), mt in t.blocks.items():
        for (q2, p), mu in u.blocks.items():
            if q2 == q:
                blocks[(r, p)] = blocks.get((r, p), 0) + mt @ mu
    return Extensor(t.algebra, u.domain, t.codomain, blocks)


def _pair(t: Extensor, pair: ReciprocalPair | None) -> ReciprocalPair:
    pair = pair or ReciprocalPair.fiducial(t.dim)
    if pair.dim != t.dim:
        raise DimensionError("pair and extensor dimensions differ")
    return pair


def _require_one_one(t: Extensor) -> None:
    if not t.is_one_one:
        raise DomainError(f"operation needs a (1,1)-extensor, got domain {t.domain} codomain {t.codomain}")


def adjoint(t: Extensor, pair: ReciprocalPair | None = None) -> Extensor:
    """The extensor ``t^dagger`` with ``t(X).Y = X.t^dagger(Y)``."""
    if pair is None:
        return Extensor(t.algebra, t.codomain, t.domain, {(p, q): m.T for (q, p), m in t.blocks.items()})
    pair = _pair(t, pair)
    alg = t.algebra
    upper = pair.upper_blades(alg)
    lower = pair.lower_blades(alg)
    index_sets = [J for J in upper if len(J) in t.domain]
    images = {J: apply(t, upper[J]) for J in index_sets}

    def action(y: Multiform) -> Multiform:
        out = Multiform.zero(alg)
        for J in index_sets:
            out = out + lower[J] * canonical_dot(images[J], y)
        return out

    return Extensor.from_function(alg, t.codomain, t.domain, action)


def sym_antisym_parts(t: Extensor) -> tuple[Extensor, Extensor]:
    _require_one_one(t)
    ta = adjoint(t)
    return (t + ta) * 0.5, (t - ta) * 0.5


def extension(t: Extensor, pair: ReciprocalPair | None = None) -> Extensor:
    """Grade-preserving extension acting factor by factor on wedges of 1-forms."""
    _require_one_one(t)
    pair = _pair(t, pair)
    alg = t.algebra
    upper = pair.upper_blades(alg)
    lower_images = [apply(t, v) for v in pair.lower_vectors(alg)]
    image_blades = {J: wedge_all([lower_images[j] for j in J], alg) for J in upper}

    def action(x: Multiform) -> Multiform:
        out = Multiform.zero(alg)
        for J, up in upper.items():
            coeff = canonical_dot(x, up)
            if coeff:
                out = out + image_blades[J] * coeff
        return out

    grades = range(alg.dim + 1)
    full = Extensor.from_function(alg, grades, grades, action)
    return Extensor(alg, grades, grades, {(k, k): full.block(k, k) for k in grades})


def trace(t: Extensor, pair: ReciprocalPair | None = None) -> float:
    _require_one_one(t)
    pair = _pair(t, pair)
    alg = t.algebra
    return float(sum(canonical_dot(apply(t, up), low) for up, low in zip(pair.upper_vectors(alg), pair.lower_vectors(alg))))


def biform(t: Extensor, pair: ReciprocalPair | None = None) -> Multiform:
    _require_one_one(t)
    pair = _pair(t, pair)
    alg = t.algebra
    out = Multiform.zero(alg)
    for up, low in zip(pair.upper_vectors(alg), pair.lower_vectors(alg)):
        out = out + wedge(apply(t, up), low)
    return out


def determinant(t: Extensor, pair: ReciprocalPair | None = None) -> float:
    """Scalar ratio between the extended image of a pseudoscalar and the pseudoscalar."""
    _require_one_one(t)
    pair = _pair(t, pair)
    alg = t.algebra
    image = wedge_all([apply(t, up) for up in pair.upper_vectors(alg)], alg)
    return canonical_dot(image, wedge_all(pair.lower_vectors(alg), alg))


def inverse(t: Extensor) -> Extensor:
    """Inverse through the pseudoscalar duality formula."""
    _require_one_one(t)
    det = determinant(t)
    if abs(det) <= SINGULAR_TOL:
        raise SingularExtensorError(f"extensor is singular (det = {det:.3e})", det)
    alg = t.algebra
    tau = Multiform.pseudoscalar(alg)
    tau_inv = tilde(tau) / canonical_dot(tau, tau)
    ext_adj = extension(adjoint(t))

    def action(a: Multiform) -> Multiform:
        return clifford_mul(apply(ext_adj, clifford_mul(a, tau)), tau_inv) / det

    return Extensor.from_function(alg, 1, 1, action)


def generalization(t: Extensor, pair: ReciprocalPair | None = None) -> Extensor:
    """Derivation extending ``t`` to all grades by the Leibniz rule."""
    _require_one_one(t)
    pair = _pair(t, pair)
    alg = t.algebra
    terms = [(apply(t, up), low) for up, low in zip(pair.upper_vectors(alg), pair.lower_vectors(alg))]

    def action(x: Multiform) -> Multiform:
        out = Multiform.zero(alg)
        for image, low in terms:
            out = out + wedge(image, left_contract(low, x))
        return out

    grades = range(alg.dim + 1)
    full = Extensor.from_function(alg, grades, grades, action)
    return Extensor(alg, grades, grades, {(k, k): full.block(k, k) for k in grades})


def is_normal(t: Extensor, tol: float = NORMALITY_TOL) -> bool:
    plus, minus = sym_antisym_parts(t)
    gap = compose(plus, minus) - compose(minus, plus)
    scale = 1.0 + max(np.abs(t.block(1, 1)).max(), 0.0) ** 2
    return bool(np.abs(gap.block(1, 1)).max() <= tol * scale)


def random_extensor(alg: Algebra, rng: np.random.Generator, domain: int = 1, codomain: int = 1) -> Extensor:
    """Entries uniform in [-1, 1]."""
    shape = (alg.blades_of_grade(codomain).size, alg.blades_of_grade(domain).size)
    return Extensor(alg, domain, codomain, {(codomain, domain): rng.uniform(-1.0, 1.0, size=shape)})


def random_pair(alg: Algebra, rng: np.random.Generator, max_condition: float = 1e3) -> ReciprocalPair:
    """Random reciprocal pair whose Gram matrix has bounded condition number."""
    while True:
        basis = rng.uniform(-1.0, 1.0, size=(alg.dim, alg.dim))
        if np.linalg.cond(basis @ basis.T) <= max_condition:
            return ReciprocalPair.from_basis(basis)
