"""Finite-dimensional Z x Z/2-graded superspaces and graded linear maps.

Includes the standard constructions (tensor, parity shift, dual, hom,
Frobenius twist of the grading) and the shift spaces Sh_r with their
degree-raising maps rho_s.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .linalg import FpMatrix, check_prime

EVEN = 0
ODD = 1


@dataclass(frozen=True)
class BasisElement:
    name: str
    zdeg: int
    parity: int

    def __post_init__(self):
        if self.parity not in (EVEN, ODD):
            raise ValueError(f"parity must be 0 or 1, got {self.parity}")


@dataclass(frozen=True)
class SuperSpace:
    basis: tuple

    def __post_init__(self):
        names = [b.name for b in self.basis]
        if len(set(names)) != len(names):
            raise ValueError("basis names must be unique")

    @staticmethod
    def from_elements(elems):
        return SuperSpace(tuple(elems))

    @property
    def dim(self):
        return len(self.basis)

    def dims_by_parity(self):
        ev = sum(1 for b in self.basis if b.parity == EVEN)
        return (ev, self.dim - ev)

    def index(self, name):
        for i, b in enumerate(self.basis):
            if b.name == name:
                return i
        raise KeyError(name)

    def parities(self):
        return [b.parity for b in self.basis]

    def zdegs(self):
        return [b.zdeg for b in self.basis]

    def indices_of_parity(self, parity):
        return [i for i, b in enumerate(self.basis) if b.parity == parity]

    def is_zero(self):
        return self.dim == 0


ZERO_SPACE = SuperSpace(())


def make_space(names, zdegs, parities):
    return SuperSpace(tuple(BasisElement(n, z, pi) for n, z, pi in zip(names, zdegs, parities)))


def k_super(m, n):
    """k^{m|n}: m even and n odd generators, all in Z-degree 0."""
    elems = [BasisElement(f"e{i}", 0, EVEN) for i in range(m)]
    elems += [BasisElement(f"o{i}", 0, ODD) for i in range(n)]
    return SuperSpace(tuple(elems))


def tensor(v, w):
    """Graded tensor product; basis ordered with the V index major."""
    elems = []
    for a in v.basis:
        for b in w.basis:
            elems.append(BasisElement(f"{a.name}*{b.name}", a.zdeg + b.zdeg, (a.parity + b.parity) % 2))
    return SuperSpace(tuple(elems))


def parity_shift(v):
    """The parity change Pi applied to objects: flip parities, mark names."""
    return SuperSpace(tuple(BasisElement(f"pi({b.name})", b.zdeg, 1 - b.parity) for b in v.basis))


def frobenius_twist_space(v, r, p):
    """Scale all Z-degrees by p^r; parities are unchanged."""
    if r < 0:
        raise ValueError("twist order must be >= 0")
    if r == 0:
        return v
    q = p ** r
    return SuperSpace(tuple(BasisElement(f"{b.name}^({r})", b.zdeg * q, b.parity) for b in v.basis))


def dual_space(v):
    return SuperSpace(tuple(BasisElement(f"{b.name}^*", -b.zdeg, b.parity) for b in v.basis))


def hom_space(v, w):
    """Hom_k(V, W) with matrix-unit basis E(i,j), (target, source) lexicographic."""
    elems = []
    for i, bw in enumerate(w.basis):
        for j, bv in enumerate(v.basis):
            elems.append(
                BasisElement(f"E({i},{j})", bw.zdeg - bv.zdeg, (bw.parity + bv.parity) % 2)
            )
    return SuperSpace(tuple(elems))


def build_Sh(p, r):
    """The p^r-dimensional purely even space with zdeg(sh_i) = i."""
    check_prime(p)
    if r < 1:
        raise ValueError("r must be >= 1")
    return SuperSpace(tuple(BasisElement(f"sh_{i}", i, EVEN) for i in range(p ** r)))


def base_p_digit(i, s, p):
    return (i // p ** s) % p


@dataclass(frozen=True)
class LinearMapSS:
    """A homogeneous linear map: matrix[i, j] = coefficient of target_i in image of source_j."""

    source: SuperSpace
    target: SuperSpace
    matrix: FpMatrix
    parity: int
    zshift: int

    def __post_init__(self):
        if self.matrix.shape != (self.target.dim, self.source.dim):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match "
                f"({self.target.dim}, {self.source.dim})"
            )
        self.validate()

    def validate(self):
        for (i, j), _ in self.matrix.nonzero_items():
            bt = self.target.basis[i]
            bs = self.source.basis[j]
            if (bt.parity - bs.parity) % 2 != self.parity:
                raise ValueError(f"entry ({i},{j}) violates parity {self.parity}")
            if bt.zdeg - bs.zdeg != self.zshift:
                raise ValueError(f"entry ({i},{j}) violates zshift {self.zshift}")

    def compose(self, other):
        """self after other."""
        if other.target != self.source:
            raise ValueError("composition spaces do not match")
        return LinearMapSS(
            other.source,
            self.target,
            self.matrix @ other.matrix,
            (self.parity + other.parity) % 2,
            self.zshift + other.zshift,
        )

    def apply_index(self, j):
        """Image of the j-th basis vector as {target index: coeff}."""
        return {i: self.matrix.get(i, j) for i in range(self.target.dim) if self.matrix.get(i, j)}


def rho(p, r, s):
    """The map on Sh_r raising the s-th base-p digit: sh_i -> sh_{i+p^s}."""
    if not (0 <= s < r):
        raise ValueError(f"rho index s={s} out of range for r={r}")
    sh = build_Sh(p, r)
    q = p ** r
    m = FpMatrix.zeros(p, q, q)
    for i in range(q):
        if base_p_digit(i, s, p) <= p - 2:
            m.set(i + p ** s, i, 1)
    return LinearMapSS(sh, sh, m, EVEN, p ** s)


def map_on_tensor_with_identity(f, u):
    """f tensor 1_U as a LinearMapSS from source x U to target x U.

    Valid as written because the identity factor is even, so no Koszul sign
    appears regardless of the parity of f.
    """
    src = tensor(f.source, u)
    tgt = tensor(f.target, u)
    du = u.dim
    m = FpMatrix.zeros(f.matrix.p, tgt.dim, src.dim)
    for (i, j), v in f.matrix.nonzero_items():
        for k in range(du):
            m.set(i * du + k, j * du + k, v)
    return LinearMapSS(src, tgt, m, f.parity, f.zshift)


def relabel_map(f, new_source, new_target):
    """Transport a map along basis relabelings that keep order, parity, zdeg offsets."""
    if new_source.dim != f.source.dim or new_target.dim != f.target.dim:
        raise ValueError("relabel dimension mismatch")
    zshift = None
    for (i, j), _ in f.matrix.nonzero_items():
        zshift = new_target.basis[i].zdeg - new_source.basis[j].zdeg
        break
    if zshift is None:
        zshift = f.zshift
    par = None
    for (i, j), _ in f.matrix.nonzero_items():
        par = (new_target.basis[i].parity - new_source.basis[j].parity) % 2
        break
    if par is None:
        par = f.parity
    return LinearMapSS(new_source, new_target, f.matrix, par, zshift)


_SPACE_RE = re.compile(r"^k\^\{(\d+)\|(\d+)\}$")
_SH_RE = re.compile(r"^Sh\((\d+)\)$")
_PISH_RE = re.compile(r"^PiSh\((\d+)\)$")


def parse_space(text, p):
    """Parse the CLI space grammar: k^{m|n}, Sh(r), PiSh(r)."""
    text = text.strip()
    m = _SPACE_RE.match(text)
    if m:
        return k_super(int(m.group(1)), int(m.group(2)))
    m = _SH_RE.match(text)
    if m:
        return build_Sh(p, int(m.group(1)))
    m = _PISH_RE.match(text)
    if m:
        return parity_shift(build_Sh(p, int(m.group(1))))
    raise ValueError(f"cannot parse space spec {text!r}")
