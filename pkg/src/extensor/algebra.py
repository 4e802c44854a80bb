"""Canonical Clifford algebra of multiforms.

A multiform over an n-dimensional space is stored as a dense vector of
2**n real coefficients.  Coefficient ``i`` belongs to the basis blade whose
index set is the bit pattern of ``i``: bit ``k`` set means the 1-form
``e_(k+1)`` is a factor.  Factors inside a blade are always in ascending
order, so ``0b101`` is ``e1^e3``.

The fiducial basis is declared orthonormal under the canonical scalar
product, which makes the reciprocal basis coincide with it.  All product
signs come from counting the transpositions needed to sort the
concatenated factor lists.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache
from numbers import Real
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionError, GradeRangeError, InvalidPairError

MIN_DIM = 2
MAX_DIM = 12
DEFAULT_DIM = 4
RECIPROCITY_TOL = 1e-12
DENSE_TENSOR_MAX_DIM = 6


def _popcount(values: np.ndarray) -> np.ndarray:
    counts = np.zeros_like(values)
    v = values.copy()
    while np.any(v):
        counts += v & 1
        v >>= 1
    return counts


class Algebra:
    """Blade bookkeeping and product tables for one dimension ``n``.

    Instances are shared: use :func:`algebra` to obtain one.
    """

    def __init__(self, dim: int):
        if not isinstance(dim, (int, np.integer)) or not MIN_DIM <= dim <= MAX_DIM:
            raise DimensionError(f"dimension must be an integer in [{MIN_DIM}, {MAX_DIM}], got {dim!r}")
        self.dim = int(dim)
        self.size = 1 << self.dim
        idx = np.arange(self.size, dtype=np.int64)
        self.grades = _popcount(idx)
        self.grades.setflags(write=False)
        self._grade_blades = {}
        for k in range(self.dim + 1):
            masks = [sum(1 << i for i in combo) for combo in itertools.combinations(range(self.dim), k)]
            arr = np.array(masks, dtype=np.int64)
            arr.setflags(write=False)
            self._grade_blades[k] = arr
        # Orthonormality of the fiducial basis is a construction invariant.
        gram = np.eye(self.dim)
        assert np.array_equal(gram, gram.T) and np.allclose(gram @ gram, np.eye(self.dim))

    def __repr__(self) -> str:
        return f"Algebra(dim={self.dim})"

    def __reduce__(self):
        return (algebra, (self.dim,))

    def blades_of_grade(self, k: int) -> np.ndarray:
        """Blade indices of grade ``k`` in lexicographic order of their factor lists."""
        self.check_grade(k)
        return self._grade_blades[k]

    def blades_of_grades(self, grades: Iterable[int]) -> np.ndarray:
        return np.concatenate([self.blades_of_grade(k) for k in sorted(set(grades))])

    def check_grade(self, k: int) -> None:
        if not isinstance(k, (int, np.integer)) or not 0 <= k <= self.dim:
            raise GradeRangeError(f"grade {k!r} outside 0..{self.dim}")

    @cached_property
    def sign_table(self) -> np.ndarray:
        """``sign_table[a, b]`` is the sign of ``e_a e_b`` relative to blade ``a ^ b``."""
        idx = np.arange(self.size, dtype=np.int64)
        swaps = np.zeros((self.size, self.size), dtype=np.int8)
        for k in range(self.dim):
            higher = (_popcount(idx >> (k + 1)) & 1).astype(np.int8)[:, None]
            swaps ^= ((idx >> k) & 1).astype(np.int8)[None, :] & higher
        table = (1 - 2 * swaps).astype(np.int8)
        table.setflags(write=False)
        return table

    @cached_property
    def xor_table(self) -> np.ndarray:
        idx = np.arange(self.size, dtype=np.int64)
        table = idx[:, None] ^ idx[None, :]
        table.setflags(write=False)
        return table

    def product_row(self, kind: str, blade: int) -> np.ndarray:
        """Signed coefficients of ``e_blade (op) e_b`` for every ``b``, zero where the product vanishes."""
        idx = np.arange(self.size, dtype=np.int64)
        common = idx & blade
        if kind == "clifford":
            keep = None
        elif kind == "wedge":
            keep = common == 0
        elif kind == "left":
            keep = common == blade
        elif kind == "right":
            keep = common == idx
        else:
            raise ValueError(f"unknown product {kind!r}")
        row = self.sign_table[blade].astype(np.float64)
        return row if keep is None else np.where(keep, row, 0.0)

    def product_tensor(self, kind: str) -> np.ndarray | None:
        """Dense structure constants ``T[k, i, j]`` for small algebras, else ``None``."""
        if self.dim > DENSE_TENSOR_MAX_DIM:
            return None
        cache = self.__dict__.setdefault("_tensors", {})
        if kind not in cache:
            tensor = np.zeros((self.size, self.size, self.size))
            for i in range(self.size):
                row = self.product_row(kind, i)
                tensor[self.xor_table[i], i, np.arange(self.size)] = row
            tensor.setflags(write=False)
            cache[kind] = tensor
        return cache[kind]

    def label(self, blade: int) -> str:
        factors = [i + 1 for i in range(self.dim) if blade >> i & 1]
        if not factors:
            return "1"
        if self.dim < 10:
            return "e" + "".join(str(f) for f in factors)
        return "e" + "_".join(str(f) for f in factors)

    def parse_label(self, label: str) -> int:
        if label in ("1", "e", ""):
            return 0
        if not re.fullmatch(r"e[0-9_]+", label):
            raise ValueError(f"bad blade label {label!r}")
        body = label[1:]
        if "_" in body or self.dim >= 10:
            factors = [int(p) for p in body.split("_") if p]
        else:
            factors = [int(c) for c in body]
        if any(f < 1 or f > self.dim for f in factors):
            raise ValueError(f"blade label {label!r} out of range for dim {self.dim}")
        if factors != sorted(set(factors)):
            raise ValueError(f"blade label {label!r} must list distinct ascending factors")
        return sum(1 << (f - 1) for f in factors)


@lru_cache(maxsize=None)
def algebra(dim: int = DEFAULT_DIM) -> Algebra:
    return Algebra(dim)


def _bilinear(kind: str, x: "Multiform", y: "Multiform") -> "Multiform":
    alg = _same_algebra(x, y)
    tensor = alg.product_tensor(kind)
    if tensor is not None:
        return Multiform(alg, (tensor @ y.coeffs) @ x.coeffs)
    xor = alg.xor_table
    out = np.zeros(alg.size)
    yc = y.coeffs
    for i in np.flatnonzero(x.coeffs):
        out[xor[i]] += x.coeffs[i] * alg.product_row(kind, int(i)) * yc
    return Multiform(alg, out)


def _same_algebra(x: "Multiform", y: "Multiform") -> Algebra:
    if x.algebra.dim != y.algebra.dim:
        raise DimensionError(f"operands have dimensions {x.algebra.dim} and {y.algebra.dim}")
    return x.algebra


@dataclass(frozen=True, eq=False)
class Multiform:
    """An immutable element of the exterior algebra with dense storage."""

    algebra: Algebra
    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=np.float64)
        if arr.shape != (self.algebra.size,):
            raise DimensionError(f"expected {self.algebra.size} coefficients, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls, alg: Algebra) -> "Multiform":
        return cls(alg, np.zeros(alg.size))

    @classmethod
    def scalar(cls, alg: Algebra, value: float) -> "Multiform":
        c = np.zeros(alg.size)
        c[0] = value
        return cls(alg, c)

    @classmethod
    def blade(cls, alg: Algebra, *factors: int, coeff: float = 1.0) -> "Multiform":
        """Wedge of fiducial 1-forms given by 1-based indices, in the given order."""
        out = cls.scalar(alg, coeff)
        for f in factors:
            if not 1 <= f <= alg.dim:
                raise GradeRangeError(f"basis index {f} outside 1..{alg.dim}")
            out = out ^ cls.basis_vector(alg, f)
        return out

    @classmethod
    def basis_vector(cls, alg: Algebra, index: int) -> "Multiform":
        c = np.zeros(alg.size)
        c[1 << (index - 1)] = 1.0
        return cls(alg, c)

    @classmethod
    def vector(cls, alg: Algebra, components: Sequence[float]) -> "Multiform":
        comps = np.asarray(components, dtype=np.float64)
        if comps.shape != (alg.dim,):
            raise DimensionError(f"expected {alg.dim} components, got shape {comps.shape}")
        c = np.zeros(alg.size)
        c[1 << np.arange(alg.dim)] = comps
        return cls(alg, c)

    @classmethod
    def from_grade(cls, alg: Algebra, k: int, values: Sequence[float]) -> "Multiform":
        """Build a homogeneous k-form from coefficients in lexicographic blade order."""
        blades = alg.blades_of_grade(k)
        vals = np.asarray(values, dtype=np.float64)
        if vals.shape != blades.shape:
            raise DimensionError(f"grade {k} needs {blades.size} coefficients, got {vals.shape}")
        c = np.zeros(alg.size)
        c[blades] = vals
        return cls(alg, c)

    @classmethod
    def pseudoscalar(cls, alg: Algebra) -> "Multiform":
        c = np.zeros(alg.size)
        c[-1] = 1.0
        return cls(alg, c)

    # inspection ---------------------------------------------------------
    @property
    def dim(self) -> int:
        return self.algebra.dim

    def grade_values(self, k: int) -> np.ndarray:
        return self.coeffs[self.algebra.blades_of_grade(k)]

    def vector_part(self) -> np.ndarray:
        return self.coeffs[1 << np.arange(self.dim)].copy()

    def scalar_part(self) -> float:
        return float(self.coeffs[0])

    def grades_present(self, tol: float = 0.0) -> set[int]:
        nz = np.abs(self.coeffs) > tol
        return set(int(g) for g in np.unique(self.algebra.grades[nz]))

    def is_homogeneous(self, k: int, tol: float = 0.0) -> bool:
        return self.grades_present(tol) <= {k}

    def norm(self) -> float:
        return float(np.sqrt(self.coeffs @ self.coeffs))

    def allclose(self, other: "Multiform", rtol: float = 1e-12, atol: float = 1e-12) -> bool:
        _same_algebra(self, other)
        return bool(np.allclose(self.coeffs, other.coeffs, rtol=rtol, atol=atol))

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Real):
            return self + Multiform.scalar(self.algebra, float(other))
        if not isinstance(other, Multiform):
            return NotImplemented
        _same_algebra(self, other)
        return Multiform(self.algebra, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return Multiform(self.algebra, -self.coeffs)

    def __sub__(self, other):
        if isinstance(other, Real):
            other = Multiform.scalar(self.algebra, float(other))
        if not isinstance(other, Multiform):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Real):
            return Multiform(self.algebra, self.coeffs * float(other))
        if isinstance(other, Multiform):
            return clifford_mul(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Real):
            return Multiform(self.algebra, self.coeffs * float(other))
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Real):
            return Multiform(self.algebra, self.coeffs / float(other))
        return NotImplemented

    def __xor__(self, other):
        if isinstance(other, Multiform):
            return wedge(self, other)
        return NotImplemented

    def __lshift__(self, other):
        """``x << y`` is the left contraction of ``y`` by ``x``."""
        if isinstance(other, Multiform):
            return left_contract(self, other)
        return NotImplemented

    def __rshift__(self, other):
        """``x >> y`` is the right contraction of ``x`` by ``y``."""
        if isinstance(other, Multiform):
            return right_contract(self, other)
        return NotImplemented

    def __repr__(self) -> str:
        terms = [f"{v:+.6g}*{self.algebra.label(i)}" for i, v in enumerate(self.coeffs) if v != 0.0]
        return f"Multiform(n={self.dim}: {' '.join(terms) or '0'})"

    # serialization ------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "coeffs": {self.algebra.label(int(i)): float(self.coeffs[i]) for i in np.flatnonzero(self.coeffs)},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "Multiform":
        alg = algebra(int(data["dim"]))
        c = np.zeros(alg.size)
        for label, value in data.get("coeffs", {}).items():
            c[alg.parse_label(label)] += float(value)
        return cls(alg, c)

    @classmethod
    def from_json(cls, text: str) -> "Multiform":
        return cls.from_dict(json.loads(text))


def k_part(x: Multiform, k: int) -> Multiform:
    """Projection onto grade ``k``."""
    x.algebra.check_grade(k)
    return Multiform(x.algebra, np.where(x.algebra.grades == k, x.coeffs, 0.0))


def grades_part(x: Multiform, grades: Iterable[int]) -> Multiform:
    keep = np.isin(x.algebra.grades, list(grades))
    return Multiform(x.algebra, np.where(keep, x.coeffs, 0.0))


def hat(x: Multiform) -> Multiform:
    """Grade involution."""
    sign = np.where(x.algebra.grades % 2 == 0, 1.0, -1.0)
    return Multiform(x.algebra, sign * x.coeffs)


def tilde(x: Multiform) -> Multiform:
    """Reversion."""
    g = x.algebra.grades
    sign = np.where((g * (g - 1) // 2) % 2 == 0, 1.0, -1.0)
    return Multiform(x.algebra, sign * x.coeffs)


def wedge(x: Multiform, y: Multiform) -> Multiform:
    return _bilinear("wedge", x, y)


def clifford_mul(x: Multiform, y: Multiform) -> Multiform:
    return _bilinear("clifford", x, y)


def left_contract(x: Multiform, y: Multiform) -> Multiform:
    """``x`` contracted onto ``y`` from the left, dual to ``x~ ^ z``."""
    return _bilinear("left", x, y)


def right_contract(x: Multiform, y: Multiform) -> Multiform:
    """``x`` contracted by ``y`` from the right, dual to ``z ^ y~``."""
    return _bilinear("right", x, y)


def canonical_dot(x: Multiform, y: Multiform) -> float:
    _same_algebra(x, y)
    return float(x.coeffs @ y.coeffs)


def commutator(x: Multiform, y: Multiform) -> Multiform:
    """Half the difference of the two Clifford orderings."""
    return (clifford_mul(x, y) - clifford_mul(y, x)) * 0.5


def wedge_all(factors: Iterable[Multiform], alg: Algebra | None = None) -> Multiform:
    out = None
    for f in factors:
        out = f if out is None else wedge(out, f)
    if out is None:
        if alg is None:
            raise ValueError("empty wedge needs an algebra")
        return Multiform.scalar(alg, 1.0)
    return out


# reciprocal pairs ---------------------------------------------------------


@dataclass(frozen=True)
class ReciprocalPair:
    """Two bases ``upper[j]`` and ``lower[j]`` of 1-forms with ``upper[j].lower[k] = delta``.

    Rows of ``upper`` and ``lower`` hold fiducial components.
    """

    upper: np.ndarray
    lower: np.ndarray

    def __post_init__(self):
        up = np.array(self.upper, dtype=np.float64)
        low = np.array(self.lower, dtype=np.float64)
        if up.ndim != 2 or up.shape[0] != up.shape[1] or up.shape != low.shape:
            raise InvalidPairError(f"pair shapes {up.shape} and {low.shape} are not square and equal")
        if not np.allclose(up @ low.T, np.eye(up.shape[0]), rtol=0, atol=RECIPROCITY_TOL):
            raise InvalidPairError("Gram product of the pair differs from the identity")
        object.__setattr__(self, "upper", up)
        object.__setattr__(self, "lower", low)

    @property
    def dim(self) -> int:
        return self.upper.shape[0]

    @classmethod
    def fiducial(cls, dim: int) -> "ReciprocalPair":
        return cls(np.eye(dim), np.eye(dim))

    @classmethod
    def from_basis(cls, basis: np.ndarray) -> "ReciprocalPair":
        """Complete a basis (rows) with its reciprocal basis."""
        basis = np.asarray(basis, dtype=np.float64)
        return cls(basis, np.linalg.inv(basis).T)

    def upper_vectors(self, alg: Algebra) -> list[Multiform]:
        return [Multiform.vector(alg, row) for row in self.upper]

    def lower_vectors(self, alg: Algebra) -> list[Multiform]:
        return [Multiform.vector(alg, row) for row in self.lower]

    def upper_blades(self, alg: Algebra) -> dict[tuple[int, ...], Multiform]:
        return _blades(self.upper_vectors(alg), alg)

    def lower_blades(self, alg: Algebra) -> dict[tuple[int, ...], Multiform]:
        return _blades(self.lower_vectors(alg), alg)


def _blades(vectors: list[Multiform], alg: Algebra) -> dict[tuple[int, ...], Multiform]:
    out: dict[tuple[int, ...], Multiform] = {(): Multiform.scalar(alg, 1.0)}
    for k in range(1, alg.dim + 1):
        for combo in itertools.combinations(range(alg.dim), k):
            out[combo] = wedge(out[combo[:-1]], vectors[combo[-1]])
    return out


def expand(x: Multiform, pair: ReciprocalPair, side: str = "upper") -> dict[tuple[int, ...], float]:
    """Coefficients of ``x`` over ascending collective indices.

    With ``side="upper"`` the values are ``x . e^J`` and ``x`` is rebuilt
    from them along the lower blades ``e_J``; ``side="lower"`` swaps roles.
    Summing over ascending ``J`` absorbs the ``1/k!`` of an unrestricted sum.
    """
    if pair.dim != x.dim:
        raise DimensionError(f"pair of dimension {pair.dim} used with a dimension {x.dim} multiform")
    blades = pair.upper_blades(x.algebra) if side == "upper" else pair.lower_blades(x.algebra)
    return {J: canonical_dot(x, b) for J, b in blades.items()}


def rebuild(coefficients: Mapping[tuple[int, ...], float], pair: ReciprocalPair, alg: Algebra, side: str = "upper") -> Multiform:
    """Inverse of :func:`expand` for the same ``side``."""
    blades = pair.lower_blades(alg) if side == "upper" else pair.upper_blades(alg)
    out = Multiform.zero(alg)
    for J, value in coefficients.items():
        out = out + blades[J] * value
    return out
