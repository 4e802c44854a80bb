"""Finite-difference calculus of multiform functions and extensor functionals."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .algebra import (
    Algebra,
    Multiform,
    ReciprocalPair,
    canonical_dot,
    clifford_mul,
    grades_part,
    left_contract,
    right_contract,
    wedge,
)
from .errors import DimensionError
from .extensors import Extensor, apply, extension

EPS = np.finfo(float).eps
STAR_TAGS = ("clifford", "wedge", "dot", "lcontract", "rcontract")


@dataclass(frozen=True)
class FDConfig:
    """Finite-difference settings.

    ``step`` is the first-derivative step; when ``None`` it is chosen as
    ``cbrt(eps) * (1 + |x|)`` at the evaluation point.  ``step2`` is the
    step of the outer derivative in nested differentiation and defaults to
    the square root of the inner step.
    """

    step: float | None = None
    step2: float | None = None
    scheme: str = "richardson"
    nested: bool = False

    def __post_init__(self):
        if self.scheme not in ("central", "richardson"):
            raise ValueError(f"unknown finite-difference scheme {self.scheme!r}")
        if self.step is not None and not self.step > 0:
            raise ValueError("step must be positive")
        if self.step2 is not None and not self.step2 > 0:
            raise ValueError("step2 must be positive")
        if self.step is not None and self.step2 is not None and self.step2 < self.step:
            raise ValueError("step2 must not be smaller than step")

    def step_at(self, scale: float) -> float:
        if self.step is not None:
            return self.step
        base = np.cbrt(EPS) * (1.0 + scale)
        return float(np.sqrt(base)) if self.nested else float(base)

    def outer(self) -> "FDConfig":
        """Configuration for the outer derivative of a nested pair."""
        if self.step2 is not None:
            return FDConfig(step=self.step2, scheme=self.scheme, nested=True)
        if self.step is not None:
            return FDConfig(step=float(np.sqrt(self.step)), scheme=self.scheme, nested=True)
        return FDConfig(scheme=self.scheme, nested=True)


DEFAULT_FD = FDConfig()


def difference(func: Callable[[float], object], x0: float, step: float, scheme: str):
    """Central difference of a real-parameter function, optionally Richardson-extrapolated.

    Works for any value type supporting ``+``, ``-`` and scalar division.
    """

    def central(h: float):
        return (func(x0 + h) - func(x0 - h)) / (2.0 * h)

    if scheme == "central":
        return central(step)
    coarse = central(step)
    fine = central(step / 2.0)
    return (fine * 4.0 - coarse) / 3.0


def real_derivative(func: Callable[[float], object], lam0: float, fd: FDConfig = DEFAULT_FD):
    """Derivative of a multiform (or scalar) function of a real variable."""
    return difference(func, lam0, fd.step_at(abs(lam0)), fd.scheme)


@dataclass(frozen=True)
class MultiformFunction:
    """A multiform function together with the grades its argument ranges over."""

    domain: tuple[int, ...]
    eval: Callable[[Multiform], object]

    def __call__(self, x: Multiform):
        return self.eval(x)


def as_function(func, domain: Iterable[int] | None, alg: Algebra) -> MultiformFunction:
    if isinstance(func, MultiformFunction):
        return func
    grades = tuple(range(alg.dim + 1)) if domain is None else tuple(sorted(set(domain)))
    return MultiformFunction(grades, func)


def project_to_domain(a: Multiform, domain: Iterable[int]) -> Multiform:
    """The part of a direction living in the domain grades."""
    return grades_part(a, domain)


def directional_derivative(func, x: Multiform, direction: Multiform, fd: FDConfig = DEFAULT_FD, domain=None):
    """``A . d_X F`` as the derivative of ``F(X + s <A>_X)`` at ``s = 0``."""
    f = as_function(func, domain, x.algebra)
    if direction.dim != x.dim:
        raise DimensionError("direction and point have different dimensions")
    a = project_to_domain(direction, f.domain)
    return difference(lambda s: f(x + a * s), 0.0, fd.step_at(x.norm()), fd.scheme)


def _star(tag: str, left: Multiform, right) -> Multiform:
    if not isinstance(right, Multiform):
        right = Multiform.scalar(left.algebra, float(right))
    if tag == "clifford":
        return clifford_mul(left, right)
    if tag == "wedge":
        return wedge(left, right)
    if tag == "dot":
        return Multiform.scalar(left.algebra, canonical_dot(left, right))
    if tag == "lcontract":
        return left_contract(left, right)
    if tag == "rcontract":
        return right_contract(left, right)
    raise ValueError(f"unknown product {tag!r}; expected one of {STAR_TAGS}")


def _index_pairs(alg: Algebra, domain: Sequence[int], pair: ReciprocalPair | None):
    pair = pair or ReciprocalPair.fiducial(alg.dim)
    upper = pair.upper_blades(alg)
    lower = pair.lower_blades(alg)
    return [(upper[J], lower[J]) for J in upper if len(J) in domain]


def derivative_star(func, x: Multiform, star_tag: str = "clifford", fd: FDConfig = DEFAULT_FD, domain=None, pair: ReciprocalPair | None = None) -> Multiform:
    """``d_X * F``: sum over ascending index sets of ``e^J * (e_J . d_X F)``."""
    f = as_function(func, domain, x.algebra)
    out = Multiform.zero(x.algebra)
    for up, low in _index_pairs(x.algebra, f.domain, pair):
        out = out + _star(star_tag, up, directional_derivative(f, x, low, fd))
    return out


def derivative(func, x: Multiform, fd: FDConfig = DEFAULT_FD, domain=None, pair: ReciprocalPair | None = None) -> Multiform:
    return derivative_star(func, x, "clifford", fd, domain, pair)


def t_distorted_derivative(func, x: Multiform, t: Extensor, star_tag: str = "clifford", fd: FDConfig = DEFAULT_FD, domain=None, pair: ReciprocalPair | None = None) -> Multiform:
    """The ``t``-distortion of ``d_X *``: the upper blades pass through the extension of ``t``."""
    f = as_function(func, domain, x.algebra)
    ext = extension(t)
    out = Multiform.zero(x.algebra)
    for up, low in _index_pairs(x.algebra, f.domain, pair):
        out = out + _star(star_tag, apply(ext, up), directional_derivative(f, x, low, fd))
    return out


# functionals ---------------------------------------------------------------


@dataclass(frozen=True)
class ExtensorFunctional:
    """``t -> F(t(X^1), ..., t(X^k))`` for fixed anchors ``X^i`` and a generator ``F``."""

    anchors: tuple[Multiform, ...]
    generator: Callable[..., object]

    def __call__(self, t: Extensor):
        return self.generator(*[apply(t, anchor) for anchor in self.anchors])

    def slot(self, index: int, images: Sequence[Multiform]) -> Callable[[Multiform], object]:
        """The generator as a function of slot ``index`` with the other slots frozen."""

        def partial(x: Multiform):
            args = list(images)
            args[index] = x
            return self.generator(*args)

        return partial


def _slot_partials(functional: ExtensorFunctional, t: Extensor, fd: FDConfig) -> list[Multiform]:
    images = [apply(t, anchor) for anchor in functional.anchors]
    partials = []
    for i in range(len(images)):
        f = MultiformFunction(t.codomain, functional.slot(i, images))
        partials.append(derivative(f, images[i], fd))
    return partials


def functional_directional(functional: ExtensorFunctional, t: Extensor, direction: Multiform, fd: FDConfig = DEFAULT_FD) -> Multiform:
    """``A . d_t F[t] = sum_i (A . X^i) d_{t(X^i)} F``."""
    out = Multiform.zero(t.algebra)
    for anchor, partial in zip(functional.anchors, _slot_partials(functional, t, fd)):
        weight = canonical_dot(direction, anchor)
        if weight:
            out = out + partial * weight
    return out


def functional_derivative(functional: ExtensorFunctional, t: Extensor, star_tag: str = "clifford", fd: FDConfig = DEFAULT_FD) -> Multiform:
    """``d_t * F[t] = sum_i X^i * d_{t(X^i)} F``."""
    out = Multiform.zero(t.algebra)
    for anchor, partial in zip(functional.anchors, _slot_partials(functional, t, fd)):
        out = out + _star(star_tag, anchor, partial)
    return out


def variational(functional: Callable[[Extensor], float], t: Extensor, w: Extensor, fd: FDConfig = DEFAULT_FD) -> float:
    """Derivative of ``F[t + s w]`` at ``s = 0``."""
    scale = float(np.abs(t.matrix).max()) if t.blocks else 0.0
    return difference(lambda s: functional(t + w * s), 0.0, fd.step_at(scale), fd.scheme)
