"""Exact K-theory and cohomology arithmetic for the local surface.

X is the total space of the canonical bundle over the projective plane.  Its
rational cohomology is Q[J]/J^3 with J the hyperplane class pulled back from
the zero section.  K-classes are integer triples in one of five registered
frames; compact-type classes live on the zero section and pair with pulled
back classes by Riemann-Roch on the plane.  Everything here is exact: Fraction
coefficients, integer matrices, no floating point (central_charge is the one
exception since it consumes complex period values).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .errors import BasisError, IntegralityError

__all__ = [
    "CohClass",
    "Basis",
    "KClass",
    "J",
    "ONE",
    "TODD_P2",
    "todd_X",
    "line_bundle_class",
    "tensor",
    "chern",
    "basis_change",
    "change_of_basis_matrix",
    "euler_pairing_bk",
    "chi_p2",
    "euler_form_compact",
    "central_charge",
    "brane_basis",
    "charge_basis",
    "exceptional_collection",
    "mirror_collection",
    "pairing_table",
]


def _frac(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("CohClass is exact; pass int, Fraction, or string")
    return Fraction(x)


@dataclass(frozen=True)
class CohClass:
    """Element a0 + a1*J + a2*J^2 of Q[J]/J^3."""

    a0: Fraction = Fraction(0)
    a1: Fraction = Fraction(0)
    a2: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a0", _frac(self.a0))
        object.__setattr__(self, "a1", _frac(self.a1))
        object.__setattr__(self, "a2", _frac(self.a2))

    def __add__(self, other: "CohClass") -> "CohClass":
        return CohClass(self.a0 + other.a0, self.a1 + other.a1, self.a2 + other.a2)

    def __sub__(self, other: "CohClass") -> "CohClass":
        return CohClass(self.a0 - other.a0, self.a1 - other.a1, self.a2 - other.a2)

    def __neg__(self) -> "CohClass":
        return CohClass(-self.a0, -self.a1, -self.a2)

    def __mul__(self, other):
        if isinstance(other, CohClass):
            # degree >= 3 parts die against J^3 = 0
            return CohClass(
                self.a0 * other.a0,
                self.a0 * other.a1 + self.a1 * other.a0,
                self.a0 * other.a2 + self.a1 * other.a1 + self.a2 * other.a0,
            )
        c = _frac(other)
        return CohClass(self.a0 * c, self.a1 * c, self.a2 * c)

    __rmul__ = __mul__

    def dual(self) -> "CohClass":
        """Involution induced by dualizing sheaves: flips the sign in odd degree."""
        return CohClass(self.a0, -self.a1, self.a2)

    def integral(self) -> Fraction:
        """Integration over the zero-section plane (J^2 has volume 1)."""
        return self.a2


ONE = CohClass(1, 0, 0)
J = CohClass(0, 1, 0)

# Todd class of the plane, 1 + (3/2)J + J^2
TODD_P2 = CohClass(1, Fraction(3, 2), 1)


def todd_X() -> CohClass:
    """Todd class of the threefold: c1 vanishes, and td = 1 + c2/12 with
    c2 read off from c(T_plane) * c(O(-3)) = (1 + 3J + 3J^2)(1 - 3J)."""
    return CohClass(1, 0, Fraction(-1, 2))


class Basis(str, Enum):
    """Registered coordinate frames for K-classes."""

    LINE_BUNDLE = "line_bundle"   # [O], [O(-1)], [O(-2)]
    BRANE = "brane"               # point, shifted line, [O(-2)]
    EXCEPTIONAL = "exceptional"   # O, T(-1), O(1)
    CHARGE = "charge"             # [O], [O(1)]-[O], point  (dual to brane)
    MIRROR = "mirror"             # exceptional collection twisted by O(-2)


@dataclass(frozen=True)
class KClass:
    basis: Basis
    coords: tuple[int, int, int]

    def __post_init__(self):
        object.__setattr__(self, "basis", Basis(self.basis))
        c = tuple(self.coords)
        if len(c) != 3 or not all(isinstance(v, int) for v in c):
            raise BasisError(f"coords must be an integer triple, got {self.coords!r}")
        object.__setattr__(self, "coords", c)


# columns are the frame's basis vectors written in line-bundle coordinates
_FRAME_TO_LB = {
    Basis.LINE_BUNDLE: ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    Basis.BRANE: ((1, 0, 0), (-2, 1, 0), (1, -1, 1)),
    Basis.EXCEPTIONAL: ((1, 3, 3), (0, -1, -3), (0, 0, 1)),
    Basis.CHARGE: ((1, 2, 1), (0, -3, -2), (0, 1, 1)),
    Basis.MIRROR: ((0, -1, 0), (0, 3, 1), (1, 0, 0)),
}

# Exceptional <-> brane conversion is pinned to the expansion matrix whose
# columns express the brane classes in the exceptional collection (so as a
# coordinate map it sends brane coords to exceptional coords), and its inverse.
_BRANE_TO_EXC = ((1, -3, 6), (-1, 2, -3), (1, -1, 1))
_EXC_TO_BRANE = ((1, 3, 3), (2, 5, 3), (1, 2, 1))


def _mat_vec(m, v):
    return tuple(sum(m[i][j] * v[j] for j in range(3)) for i in range(3))


def _mat_mul(a, b):
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3))
        for i in range(3)
    )


def _det3(m) -> int:
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _inv3(m):
    """Inverse of a unimodular integer matrix, exactly (adjugate over det)."""
    d = _det3(m)
    if d not in (1, -1):
        raise BasisError(f"frame matrix must be unimodular, det = {d}")
    cof = [[0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            r = [k for k in range(3) if k != i]
            c = [k for k in range(3) if k != j]
            minor = (m[r[0]][c[0]] * m[r[1]][c[1]] - m[r[0]][c[1]] * m[r[1]][c[0]])
            cof[i][j] = (-1) ** (i + j) * minor
    # adjugate = transpose of the cofactor matrix
    return tuple(tuple(cof[j][i] * d for j in range(3)) for i in range(3))


_LB_TO_FRAME = {b: _inv3(m) for b, m in _FRAME_TO_LB.items()}


def change_of_basis_matrix(source: Basis, target: Basis):
    """Integer matrix applied to coordinate triples by basis_change."""
    source = Basis(source)
    target = Basis(target)
    if (source, target) == (Basis.EXCEPTIONAL, Basis.BRANE):
        return _EXC_TO_BRANE
    if (source, target) == (Basis.BRANE, Basis.EXCEPTIONAL):
        return _BRANE_TO_EXC
    return _mat_mul(_LB_TO_FRAME[target], _FRAME_TO_LB[source])


def basis_change(k: KClass, target: Basis) -> KClass:
    """Rewrite k in the target frame by the registered unimodular matrix."""
    if not isinstance(k, KClass):
        raise BasisError(f"expected KClass, got {type(k).__name__}")
    target = Basis(target)
    m = change_of_basis_matrix(k.basis, target)
    return KClass(target, _mat_vec(m, k.coords))


def _lb_coords(k: KClass) -> tuple[int, int, int]:
    if k.basis not in _FRAME_TO_LB:
        raise BasisError(f"unknown basis tag {k.basis!r}")
    return _mat_vec(_FRAME_TO_LB[k.basis], k.coords)


def line_bundle_class(n: int) -> KClass:
    """K-class of O(n) in line-bundle coordinates, any integer n.

    Works in Z[t]/(1-t)^3 with t the class of O(-1): negative twists are
    powers of t, positive twists are powers of t^{-1} = 3 - 3t + t^2.
    """
    if n == 0:
        poly = (1, 0, 0)
    elif n < 0:
        poly = _poly_pow((0, 1, 0), -n)
    else:
        poly = _poly_pow((3, -3, 1), n)
    return KClass(Basis.LINE_BUNDLE, poly)


def _poly_mul(p, q):
    """Product in Z[t]/(1-t)^3, coefficients (c0, c1, c2)."""
    full = [0] * 5
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            full[i + j] += a * b
    # t^3 = 1 - 3t + 3t^2, t^4 = 3 - 8t + 6t^2
    c0 = full[0] + full[3] + 3 * full[4]
    c1 = full[1] - 3 * full[3] - 8 * full[4]
    c2 = full[2] + 3 * full[3] + 6 * full[4]
    return (c0, c1, c2)


def _poly_pow(p, n):
    out = (1, 0, 0)
    for _ in range(n):
        out = _poly_mul(out, p)
    return out


def tensor(a: KClass, b: KClass) -> KClass:
    """Product of K-classes, returned in line-bundle coordinates."""
    return KClass(Basis.LINE_BUNDLE, _poly_mul(_lb_coords(a), _lb_coords(b)))


def chern(k: KClass) -> CohClass:
    """Chern character: exp(nJ) on O(n) truncated at J^3, extended linearly."""
    a, b, c = _lb_coords(k)
    # ch O = 1, ch O(-1) = 1 - J + J^2/2, ch O(-2) = 1 - 2J + 2J^2
    return CohClass(a + b + c, -b - 2 * c, Fraction(b, 2) + 2 * c)


def _as_int(x: Fraction, what: str) -> int:
    if x.denominator != 1:
        raise IntegralityError(f"{what} produced non-integer value {x}")
    return int(x)


def euler_pairing_bk(b: KClass, e: KClass) -> int:
    """Pairing of a zero-section class b with a pulled-back class e:
    the plane Euler characteristic of their product, by Riemann-Roch."""
    val = (chern(b) * chern(e) * TODD_P2).integral()
    return _as_int(val, "euler_pairing_bk")


def chi_p2(f: KClass, g: KClass) -> int:
    """One-sided Euler characteristic chi(F, G) on the plane:
    integral of ch(F)^dual * ch(G) * td."""
    val = (chern(f).dual() * chern(g) * TODD_P2).integral()
    return _as_int(val, "chi_p2")


def euler_form_compact(b1: KClass, b2: KClass) -> int:
    """Euler form between compactly supported classes on the threefold:
    chi(F, G) - chi(G, F), each side on the plane.  Antisymmetric."""
    return chi_p2(b1, b2) - chi_p2(b2, b1)


def charge_basis() -> list[KClass]:
    """Pulled-back classes dual to the brane basis under euler_pairing_bk."""
    return [KClass(Basis.CHARGE, tuple(1 if j == i else 0 for j in range(3)))
            for i in range(3)]


def brane_basis() -> list[KClass]:
    """Compactly supported basis: point, line twisted by O(-1), [O(-2)]."""
    return [KClass(Basis.BRANE, tuple(1 if j == i else 0 for j in range(3)))
            for i in range(3)]


def exceptional_collection() -> list[KClass]:
    """The strong exceptional collection O, T(-1), O(1) on the plane."""
    return [KClass(Basis.EXCEPTIONAL, tuple(1 if j == i else 0 for j in range(3)))
            for i in range(3)]


def mirror_collection() -> list[KClass]:
    """The exceptional collection twisted by O(-2): O(-2), T(-3), O(-1)."""
    return [KClass(Basis.MIRROR, tuple(1 if j == i else 0 for j in range(3)))
            for i in range(3)]


def central_charge(f: KClass, w) -> complex:
    """Linear pairing of a compact class with the solution triple w.

    Z(f) = sum_i w_i * euler_pairing_bk(f, e_i) over the charge basis, so the
    three brane classes pick out w_0, w_1, w_2 respectively.
    """
    w0, w1, w2 = (complex(v) for v in w)
    es = charge_basis()
    return (w0 * euler_pairing_bk(f, es[0])
            + w1 * euler_pairing_bk(f, es[1])
            + w2 * euler_pairing_bk(f, es[2]))


def pairing_table() -> list[list[int]]:
    """3x3 table euler_pairing_bk(brane_i, charge_j); the duality statement
    says this is the identity matrix."""
    bs = brane_basis()
    es = charge_basis()
    return [[euler_pairing_bk(b, e) for e in es] for b in bs]
