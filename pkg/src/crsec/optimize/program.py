"""Convex programs over a flat real variable vector.

A program maximizes a linear objective subject to smooth convex constraints
f_i(x) <= 0 drawn from a fixed set of families. Each family knows its value,
gradient, Hessian and domain, so the barrier solver never needs to look inside.
Block values accept a single point (shape (n,)) or a batch of rows (shape (N, n)).
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import ClassVar, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..utils.exceptions import InvalidDimensionError

Number = Union[int, float]


@dataclass(frozen=True, eq=False)
class LinearForm:
    """coef . x + const over the program variables."""

    coef: np.ndarray
    const: float = 0.0

    def __add__(self, other: Union["LinearForm", Number]) -> "LinearForm":
        if isinstance(other, LinearForm):
            return LinearForm(self.coef + other.coef, self.const + other.const)
        return LinearForm(self.coef, self.const + float(other))

    __radd__ = __add__

    def __neg__(self) -> "LinearForm":
        return LinearForm(-self.coef, -self.const)

    def __sub__(self, other: Union["LinearForm", Number]) -> "LinearForm":
        return self + (-other)

    def __rsub__(self, other: Number) -> "LinearForm":
        return (-self) + other

    def __mul__(self, scalar: Number) -> "LinearForm":
        return LinearForm(self.coef * float(scalar), self.const * float(scalar))

    __rmul__ = __mul__

    def is_constant(self) -> bool:
        return not np.any(self.coef)

    def evaluate(self, x: np.ndarray):
        return np.asarray(x) @ self.coef + self.const


class VariableLayout:
    """Ordered named slots of the flat variable vector.

    Slots listed in ``fixed`` are not decision variables; :meth:`var` returns them
    as constants so builders can treat fixed and free symbols alike.
    """

    def __init__(
        self,
        entries: Sequence[Tuple[str, int]],
        fixed: Optional[Dict[str, float]] = None,
    ):
        self._slices: Dict[str, slice] = {}
        offset = 0
        for name, size in entries:
            if name in self._slices:
                raise ValueError(f"duplicate variable {name!r}")
            self._slices[name] = slice(offset, offset + size)
            offset += size
        self.size = offset
        self.fixed: Dict[str, float] = dict(fixed or {})

    def __contains__(self, name: str) -> bool:
        return name in self._slices or name in self.fixed

    def __iter__(self) -> Iterator[Tuple[str, slice]]:
        return iter(self._slices.items())

    def names(self) -> List[str]:
        return list(self._slices)

    def has_free(self, name: str) -> bool:
        return name in self._slices

    def slot(self, name: str) -> slice:
        return self._slices[name]

    def zeros(self) -> np.ndarray:
        return np.zeros(self.size)

    def var(self, name: str, index: int = 0) -> LinearForm:
        """Scalar symbol as a linear form (constant when fixed)."""
        coef = np.zeros(self.size)
        if name in self._slices:
            coef[self._slices[name].start + index] = 1.0
            return LinearForm(coef)
        if name in self.fixed:
            return LinearForm(coef, float(self.fixed[name]))
        raise KeyError(f"unknown variable {name!r}")

    def selector(self, name: str) -> np.ndarray:
        """Matrix S with S @ x = x[slot(name)]."""
        sl = self._slices[name]
        S = np.zeros((sl.stop - sl.start, self.size))
        S[np.arange(sl.stop - sl.start), np.arange(sl.start, sl.stop)] = 1.0
        return S

    @classmethod
    def scalars(cls, *names: str) -> "VariableLayout":
        """Layout of plain scalar variables."""
        return cls([(name, 1) for name in names])


class ConstraintBlock(ABC):
    """One smooth convex constraint f(x) <= 0."""

    kind: ClassVar[str] = "block"
    label: str

    @abstractmethod
    def value(self, x: np.ndarray):
        """f at a point or at each row of a batch."""

    @abstractmethod
    def gradient(self, x: np.ndarray) -> np.ndarray:
        """Gradient of f at a point."""

    @abstractmethod
    def hessian(self, x: np.ndarray) -> np.ndarray:
        """Hessian of f at a point."""

    def hessian_vector(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self.hessian(x) @ v

    def in_domain(self, x: np.ndarray):
        return np.ones(np.shape(x)[:-1], dtype=bool) if np.ndim(x) > 1 else True

    @property
    def is_affine(self) -> bool:
        return False

    def describe(self) -> str:
        return ""


@dataclass(frozen=True, eq=False)
class AffineBlock(ConstraintBlock):
    """a . x + b <= 0"""

    kind: ClassVar[str] = "affine"
    label: str
    a: np.ndarray
    b: float

    def value(self, x):
        return np.asarray(x) @ self.a + self.b

    def gradient(self, x):
        return self.a.copy()

    def hessian(self, x):
        return np.zeros((self.a.shape[0], self.a.shape[0]))

    def hessian_vector(self, x, v):
        return np.zeros_like(self.a)

    @property
    def is_affine(self) -> bool:
        return True


@dataclass(frozen=True, eq=False)
class QuadraticBlock(ConstraintBlock):
    """||M x + c||^2 + a . x + b <= 0"""

    kind: ClassVar[str] = "quadratic"
    label: str
    M: np.ndarray
    c: np.ndarray
    a: np.ndarray
    b: float

    def _residual(self, x):
        return np.asarray(x) @ self.M.T + self.c

    def value(self, x):
        r = self._residual(x)
        return np.sum(r * r, axis=-1) + np.asarray(x) @ self.a + self.b

    def gradient(self, x):
        return 2.0 * self.M.T @ self._residual(x) + self.a

    def hessian(self, x):
        return 2.0 * self.M.T @ self.M

    def hessian_vector(self, x, v):
        return 2.0 * self.M.T @ (self.M @ v)

    def describe(self) -> str:
        return f"rows={self.M.shape[0]}"


@dataclass(frozen=True, eq=False)
class PowerBallBlock(QuadraticBlock):
    """||x[slots]||^2 <= radius2"""

    kind: ClassVar[str] = "power-ball"

    @classmethod
    def ball(cls, label: str, selector: np.ndarray, radius2: float) -> "PowerBallBlock":
        n = selector.shape[1]
        return cls(
            label=label,
            M=selector,
            c=np.zeros(selector.shape[0]),
            a=np.zeros(n),
            b=-float(radius2),
        )


@dataclass(frozen=True, eq=False)
class QuadOverLinearBlock(ConstraintBlock):
    """||M x + c||^2 / (d . x + e) + a . x + b <= 0 on d . x + e > 0"""

    kind: ClassVar[str] = "quad-over-linear"
    label: str
    M: np.ndarray
    c: np.ndarray
    d: np.ndarray
    e: float
    a: np.ndarray
    b: float

    def _parts(self, x):
        x = np.asarray(x)
        return x @ self.M.T + self.c, x @ self.d + self.e

    def in_domain(self, x):
        _, s = self._parts(x)
        return s > 0

    def value(self, x):
        r, s = self._parts(x)
        lin = np.asarray(x) @ self.a + self.b
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.sum(r * r, axis=-1) / s + lin
        return np.where(s > 0, val, np.inf)

    def gradient(self, x):
        r, s = self._parts(x)
        return 2.0 * self.M.T @ r / s - (r @ r) / s ** 2 * self.d + self.a

    def hessian(self, x):
        r, s = self._parts(x)
        B = self.M - np.outer(r, self.d) / s
        return 2.0 / s * B.T @ B

    def hessian_vector(self, x, v):
        r, s = self._parts(x)
        Bv = self.M @ v - r * (self.d @ v) / s
        return 2.0 / s * (self.M.T @ Bv - self.d * (r @ Bv) / s)

    def describe(self) -> str:
        return f"rows={self.M.shape[0]}"


@dataclass(frozen=True, eq=False)
class ExponentialBlock(ConstraintBlock):
    """scale * 2^(d . x + e) + a . x + b <= 0"""

    kind: ClassVar[str] = "exponential"
    label: str
    d: np.ndarray
    e: float
    a: np.ndarray
    b: float
    scale: float = 1.0

    def _power(self, x):
        return self.scale * np.exp2(np.asarray(x) @ self.d + self.e)

    def value(self, x):
        return self._power(x) + np.asarray(x) @ self.a + self.b

    def gradient(self, x):
        return self._power(x) * np.log(2.0) * self.d + self.a

    def hessian(self, x):
        return self._power(x) * np.log(2.0) ** 2 * np.outer(self.d, self.d)

    def hessian_vector(self, x, v):
        return self._power(x) * np.log(2.0) ** 2 * (self.d @ v) * self.d


@dataclass(frozen=True, eq=False)
class ConvexProgram:
    """maximize objective . x + objective_constant  s.t.  f_i(x) <= 0."""

    layout: VariableLayout
    objective: np.ndarray
    blocks: Tuple[ConstraintBlock, ...]
    label: str = "program"
    objective_constant: float = 0.0
    meta: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = self.layout.size
        if self.objective.shape != (n,):
            raise InvalidDimensionError(
                f"objective has shape {self.objective.shape}, expected ({n},)"
            )

    @property
    def n_vars(self) -> int:
        return self.layout.size

    @property
    def n_constraints(self) -> int:
        return len(self.blocks)

    def objective_value(self, x: np.ndarray) -> float:
        return float(np.asarray(x) @ self.objective + self.objective_constant)

    def constraint_values(self, x: np.ndarray) -> np.ndarray:
        return np.array([blk.value(x) for blk in self.blocks], dtype=float)

    def in_domain(self, x: np.ndarray) -> bool:
        return all(bool(np.all(blk.in_domain(x))) for blk in self.blocks)

    def max_violation(self, x: np.ndarray) -> float:
        """Largest positive constraint value (0 when feasible)."""
        if not self.blocks:
            return 0.0
        return float(max(0.0, np.max(self.constraint_values(x))))

    def is_strictly_feasible(self, x: np.ndarray) -> bool:
        if not self.blocks:
            return True
        return self.in_domain(x) and bool(np.all(self.constraint_values(x) < 0.0))

    def dump(self) -> str:
        """Text listing of variables, objective and constraint blocks."""
        lines = [f"program {self.label}"]
        for key, value in self.meta.items():
            lines.append(f"# {key}: {value}")
        lines.append(f"variables {self.n_vars}")
        for name, sl in self.layout:
            lines.append(f"  [{sl.start}:{sl.stop}] {name}")
        for name, value in self.layout.fixed.items():
            lines.append(f"  fixed {name} = {value!r}")

        terms = []
        for name, sl in self.layout:
            for k, coef in enumerate(self.objective[sl]):
                if coef:
                    suffix = f"[{k}]" if sl.stop - sl.start > 1 else ""
                    terms.append(f"{coef:+g}*{name}{suffix}")
        lines.append("maximize " + (" ".join(terms) if terms else "0"))

        lines.append(f"constraints {self.n_constraints}")
        for blk in self.blocks:
            extra = blk.describe()
            lines.append(f"  {blk.kind:<16} {blk.label}" + (f"  {extra}" if extra else ""))
        return "\n".join(lines) + "\n"
