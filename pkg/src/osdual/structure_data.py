"""Structure constants of tube-type Hermitian symmetric spaces.

All arithmetic is exact (:class:`fractions.Fraction`).  For a tube-type
space of rank ``r`` with common root multiplicity ``d``::

    gamma = r
    rho   = r (1 + (r - 1) d / 2)
    L_pos = -gamma (r - 1) d / 2
    L_pos + rho = r
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .errors import InvalidRankError


class TubeFamily(str, Enum):
    SU_nn = "SU_nn"
    SOstar_4n = "SOstar_4n"
    Sp_nR = "Sp_nR"
    SO_k2 = "SO_k2"
    E7_minus25 = "E7_minus25"


# (r, d) as functions of the family parameter; read-only reference data.
# SOstar_4n is listed with r = 2n so that the reflection constants agree with
# the complementary-series table below.
_RANK_DATA = {
    TubeFamily.SU_nn: lambda n: (n, 2),
    TubeFamily.Sp_nR: lambda n: (n, 1),
    TubeFamily.SOstar_4n: lambda n: (2 * n, 4),
    TubeFamily.SO_k2: lambda k: (2, k - 2),
    TubeFamily.E7_minus25: lambda _: (3, 8),
}


@dataclass(frozen=True)
class TubeConstants:
    family: TubeFamily
    rank_param: int
    r: int
    d: int
    gamma: int
    rho: Fraction
    l_pos: Fraction

    @property
    def l_pos_plus_rho(self) -> Fraction:
        return self.l_pos + self.rho


def _validate(family: TubeFamily, rank_param):
    if family is TubeFamily.E7_minus25:
        if rank_param not in (None, 1):
            raise InvalidRankError("E7(-25) has no rank parameter")
        return 1
    if not isinstance(rank_param, int) or isinstance(rank_param, bool):
        raise InvalidRankError(f"rank parameter must be an integer, got {rank_param!r}")
    minimum = 3 if family is TubeFamily.SO_k2 else 1
    if rank_param < minimum:
        raise InvalidRankError(f"{family.value} needs rank parameter >= {minimum}, got {rank_param}")
    return rank_param


def rank_data(family, rank_param=None) -> tuple[int, int]:
    family = TubeFamily(family)
    return _RANK_DATA[family](_validate(family, rank_param))


def tube_constants(family, rank_param=None) -> TubeConstants:
    family = TubeFamily(family)
    param = _validate(family, rank_param)
    r, d = _RANK_DATA[family](param)
    gamma = r
    half_d = Fraction(d, 2)
    rho = r * (1 + (r - 1) * half_d)
    l_pos = -gamma * (r - 1) * half_d
    return TubeConstants(family, param, r, d, gamma, rho, l_pos)


def wallach_condition(c: TubeConstants, nu: Fraction) -> bool:
    """``(nu - rho) / gamma <= -(r - 1) d / 2``, the scalar form of ``nu - rho <= L_pos``."""
    return (Fraction(nu) - c.rho) / c.gamma <= -Fraction((c.r - 1) * c.d, 2)


@dataclass(frozen=True)
class Affine:
    """``a + b n`` with rational coefficients."""

    a: Fraction
    b: Fraction = Fraction(0)

    def __call__(self, n) -> Fraction:
        return self.a + self.b * n

    def le_for_all_n(self, other: "Affine", n_min: int = 1) -> bool:
        """``self(n) <= other(n)`` for every integer ``n >= n_min``."""
        return self(n_min) <= other(n_min) and self.b <= other.b

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        a = "" if self.a == 0 else f"{'+' if self.a > 0 else '-'}{abs(self.a)}"
        b = "" if self.b == 1 else str(self.b)
        return f"{b}n{a}"


@dataclass(frozen=True)
class CayleyRow:
    algebra: str
    family: TubeFamily
    param: Affine | None  # family parameter as a function of n; None for E7
    R: Affine  # complementary-series constant, reference data

    def constants(self, n: int) -> TubeConstants:
        return tube_constants(self.family, None if self.param is None else int(self.param(n)))

    def l_pos_plus_rho(self) -> Affine:
        """Exact affine form in ``n``, fitted from two evaluations and checked on a third."""
        v1, v2, v3 = (self.constants(n).l_pos_plus_rho for n in (1, 2, 3))
        form = Affine(2 * v1 - v2, v2 - v1)
        if form(3) != v3:
            raise ArithmeticError(f"L_pos + rho is not affine in n for {self.algebra}")
        return form


_F = Fraction
CAYLEY_ROWS = (
    CayleyRow("su(2n+1,2n+1)", TubeFamily.SU_nn, Affine(_F(1), _F(2)), Affine(_F(1), _F(2))),
    CayleyRow("su(2n,2n)", TubeFamily.SU_nn, Affine(_F(0), _F(2)), Affine(_F(0))),
    CayleyRow("so*(4n)", TubeFamily.SOstar_4n, Affine(_F(0), _F(1)), Affine(_F(0), _F(1))),
    CayleyRow("sp(2n,R)", TubeFamily.Sp_nR, Affine(_F(0), _F(2)), Affine(_F(0), _F(1))),
    CayleyRow("sp(2n+1,R)", TubeFamily.Sp_nR, Affine(_F(1), _F(2)), Affine(_F(0))),
    CayleyRow("so(4n+2,2)", TubeFamily.SO_k2, Affine(_F(2), _F(4)), Affine(_F(2))),
    CayleyRow("so(2n+1,2)", TubeFamily.SO_k2, Affine(_F(1), _F(2)), Affine(_F(1))),
    CayleyRow("so(4n,2)", TubeFamily.SO_k2, Affine(_F(0), _F(4)), Affine(_F(0))),
    CayleyRow("e7(-25)", TubeFamily.E7_minus25, None, Affine(_F(3))),
)


@dataclass(frozen=True)
class CayleyEntry:
    algebra: str
    R: Affine
    l_pos_plus_rho: Affine
    holds: bool


def cayley_table() -> list[CayleyEntry]:
    """Symbolic rows ``(g, R, L_pos + rho)`` with the check ``R <= L_pos + rho`` for all ``n >= 1``."""
    out = []
    for row in CAYLEY_ROWS:
        lp = row.l_pos_plus_rho()
        out.append(CayleyEntry(row.algebra, row.R, lp, row.R.le_for_all_n(lp)))
    return out


CSV_COLUMNS = ("family", "rank_param", "r", "d", "R", "l_pos", "rho", "l_pos_plus_rho")


def table_rows(n: int = 1) -> list[dict]:
    """Numeric rows of the table at a given ``n``; ``family`` holds the Lie algebra label."""
    rows = []
    for row in CAYLEY_ROWS:
        c = row.constants(n)
        rows.append({
            "family": row.algebra,
            "rank_param": c.rank_param,
            "r": c.r,
            "d": c.d,
            "R": row.R(n),
            "l_pos": c.l_pos,
            "rho": c.rho,
            "l_pos_plus_rho": c.l_pos_plus_rho,
        })
    return rows


def table_csv(n: int = 1) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in table_rows(n):
        writer.writerow({k: str(v) for k, v in row.items()})
    return buf.getvalue()
