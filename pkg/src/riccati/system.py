"""k-periodic coefficient data for x_{n+1} = (a_n x_n + b_n)/(c_n x_n + d_n)."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .mobius import Matrix2
from .numeric import check_compatible, format_scalar, is_zero, parse_scalar, to_exact


class InvalidSystemError(ValueError):
    """Coefficients violate c_n != 0 or a_n d_n - b_n c_n != 0."""


def _norm(x):
    return x if isinstance(x, float) else to_exact(x)


@dataclass(frozen=True)
class PeriodicSystem:
    a: tuple
    b: tuple
    c: tuple
    d: tuple

    def __post_init__(self):
        cols = []
        for name in "abcd":
            col = tuple(_norm(x) for x in getattr(self, name))
            object.__setattr__(self, name, col)
            cols.append(col)
        k = len(self.a)
        if k < 1 or any(len(col) != k for col in cols):
            raise InvalidSystemError("coefficient lists must share a length k >= 1")
        check_compatible(*self.a, *self.b, *self.c, *self.d)
        for n in range(k):
            m = self.matrix(n)
            if is_zero(m.c, m.scale):
                raise InvalidSystemError(f"c_{n} = 0")
            if is_zero(m.det, m.scale**2):
                raise InvalidSystemError(f"a_{n} d_{n} - b_{n} c_{n} = 0")

    @classmethod
    def from_matrices(cls, matrices: Sequence[Matrix2]) -> PeriodicSystem:
        return cls(
            tuple(m.a for m in matrices),
            tuple(m.b for m in matrices),
            tuple(m.c for m in matrices),
            tuple(m.d for m in matrices),
        )

    @classmethod
    def from_rows(cls, rows, mode: str = "exact") -> PeriodicSystem:
        """Build from [[[a, b], [c, d]], ...] with scalars in string form."""
        return cls.from_matrices([Matrix2.from_rows(r, mode) for r in rows])

    @classmethod
    def from_records(cls, records, mode: str = "exact") -> PeriodicSystem:
        """Build from [{"a": .., "b": .., "c": .., "d": ..}, ...]."""
        try:
            cols = [
                tuple(parse_scalar(rec[name], mode) for rec in records)
                for name in "abcd"
            ]
        except KeyError as exc:
            raise InvalidSystemError(f"coefficient record missing {exc}") from None
        except (TypeError, ValueError) as exc:
            raise InvalidSystemError(str(exc)) from None
        return cls(*cols)

    @property
    def k(self) -> int:
        return len(self.a)

    @property
    def mode(self) -> str:
        return "float" if isinstance(self.a[0], float) else "exact"

    def matrix(self, n: int) -> Matrix2:
        i = n % self.k
        return Matrix2(self.a[i], self.b[i], self.c[i], self.d[i])

    @property
    def matrices(self) -> list[Matrix2]:
        return [self.matrix(i) for i in range(self.k)]

    def step(self, n: int):
        """The map applied at step n (i.e. f_{A_n})."""
        return self.matrix(n)

    def is_b_zero(self) -> bool:
        return all(is_zero(x) for x in self.b)

    def to_float(self) -> PeriodicSystem:
        if self.mode == "float":
            return self
        return PeriodicSystem(*(tuple(float(x) for x in col) for col in (self.a, self.b, self.c, self.d)))

    def to_json(self):
        return [
            {name: format_scalar(getattr(self, name)[i]) for name in "abcd"}
            for i in range(self.k)
        ]


def system_from_ints(*rows) -> PeriodicSystem:
    """Shorthand: system_from_ints([[1, 0], [1, 1]], ...)."""
    return PeriodicSystem.from_matrices(
        [Matrix2(*(Fraction(x) for x in (r[0][0], r[0][1], r[1][0], r[1][1]))) for r in rows]
    )
