"""The morphism calculus of divided powers of Hom spaces.

An element of the degree-n divided power of Hom(V, W) is stored as a GF(p)
combination of monomials in matrix units.  Composition, the action on
symmetric powers, and the induced map on Frobenius twists are all computed
through the identification with symmetric-group-equivariant maps between
tensor powers, with Koszul signs throughout.
"""

from __future__ import annotations

from functools import lru_cache

from .errors import BudgetExceededError
from .linalg import FpMatrix
from .powers import (
    PowerKind,
    PowerMonomial,
    SignedTensor,
    lift_from_power,
    power_basis,
    project_checked,
    sort_with_sign,
    _distinct_arrangements,
    arrangement_sign,
)
from .superspace import (
    EVEN,
    ODD,
    LinearMapSS,
    SuperSpace,
    frobenius_twist_space,
    hom_space,
    tensor,
)

hom_space = lru_cache(maxsize=None)(hom_space)


class GammaElement:
    """A combination of divided-power monomials in the matrix units of Hom(V, W).

    terms maps an exponent tuple ((unit index, exponent), ...) to a nonzero
    residue mod p.  Unit index i*dim(V)+j encodes the map sending the j-th
    basis vector of V to the i-th basis vector of W.
    """

    __slots__ = ("source", "target", "n", "p", "terms")

    def __init__(self, source, target, n, p, terms=None):
        self.source = source
        self.target = target
        self.n = n
        self.p = p
        self.terms = terms if terms is not None else {}

    # -- bookkeeping --------------------------------------------------

    @property
    def hom(self):
        return hom_space(self.source, self.target)

    def unit_pair(self, idx):
        return divmod(idx, self.source.dim)

    def add_term(self, exps, coeff):
        c = (self.terms.get(exps, 0) + coeff) % self.p
        if c:
            self.terms[exps] = c
        else:
            self.terms.pop(exps, None)

    def is_zero(self):
        return not self.terms

    def copy(self):
        return GammaElement(self.source, self.target, self.n, self.p, dict(self.terms))

    def scaled(self, c):
        c %= self.p
        out = GammaElement(self.source, self.target, self.n, self.p)
        for k, v in self.terms.items():
            out.add_term(k, v * c)
        return out

    def __add__(self, other):
        if (self.source, self.target, self.n, self.p) != (other.source, other.target, other.n, other.p):
            raise ValueError("cannot add elements of different morphism spaces")
        out = self.copy()
        for k, v in other.terms.items():
            out.add_term(k, v)
        return out

    def __sub__(self, other):
        return self + other.scaled(self.p - 1)

    def __eq__(self, other):
        return (
            isinstance(other, GammaElement)
            and (self.source, self.target, self.n, self.p) == (other.source, other.target, other.n, other.p)
            and self.terms == other.terms
        )

    def items(self):
        return sorted(self.terms.items())

    def monomial_parity(self, exps):
        par = self.hom.parities()
        return sum(e * par[i] for i, e in exps) % 2

    def monomial_bigrade(self, exps):
        """(sum of target z-degrees, sum of source z-degrees) of a monomial."""
        tz = self.target.zdegs()
        sz = self.source.zdegs()
        t = s = 0
        for idx, e in exps:
            i, j = self.unit_pair(idx)
            t += e * tz[i]
            s += e * sz[j]
        return (t, s)

    def parity(self):
        pars = {self.monomial_parity(k) for k in self.terms}
        if len(pars) > 1:
            raise ValueError("element is not parity homogeneous")
        return pars.pop() if pars else EVEN

    def bigrades(self):
        return sorted({self.monomial_bigrade(k) for k in self.terms})

    def split_by_source_degree(self):
        """Components keyed by total source z-degree."""
        out = {}
        for exps, c in self.terms.items():
            _, s = self.monomial_bigrade(exps)
            out.setdefault(s, GammaElement(self.source, self.target, self.n, self.p)).add_term(exps, c)
        return out

    def __repr__(self):
        return f"GammaElement(n={self.n}, {len(self.terms)} monomials)"

    def pretty(self):
        hom = self.hom
        bits = []
        for exps, c in self.items():
            mono = ".".join(
                hom.basis[i].name + (f"^{e}" if e > 1 else "") for i, e in exps
            )
            bits.append(f"{c}*{mono}")
        return " + ".join(bits) if bits else "0"


def zero_element(source, target, n, p):
    return GammaElement(source, target, n, p)


def gamma_monomial(source, target, n, p, unit_exps, coeff=1):
    """Build c * product of gamma_{e}(unit) from ((i, j), e) pairs."""
    counts = {}
    for (i, j), e in unit_exps:
        idx = i * source.dim + j
        counts[idx] = counts.get(idx, 0) + e
    exps = tuple(sorted(counts.items()))
    out = GammaElement(source, target, n, p)
    hom = out.hom
    for idx, e in exps:
        if hom.basis[idx].parity == ODD and e > 1:
            return out  # dies by admissibility
    if sum(e for _, e in exps) != n:
        raise ValueError("total exponent does not match degree")
    out.add_term(exps, coeff)
    return out


def _even_multiset_expansion(n, items, p, budget=None):
    """gamma_n of a sum of even generators: all exponent assignments.

    items is a list of (unit index, scalar).  Returns {exps: coeff}.
    """
    out = {}
    k = len(items)

    def rec(pos, rem, acc, coeff):
        if budget is not None and len(out) > budget:
            raise BudgetExceededError("divided power expansion", len(out), budget)
        if pos == k:
            if rem == 0:
                exps = tuple(sorted(acc))
                out[exps] = (out.get(exps, 0) + coeff) % p
            return
        idx, scal = items[pos]
        if pos == k - 1:
            es = [rem]
        else:
            es = range(rem + 1)
        for e in es:
            c = coeff * pow(scal, e, p) % p
            if c:
                rec(pos + 1, rem - e, acc + [(idx, e)] if e else acc, c)

    rec(0, n, [], 1)
    return {k2: v for k2, v in out.items() if v}


def identity_element(space, n, p, budget=None):
    """gamma_n of the identity map of the space."""
    d = space.dim
    items = [(i * d + i, 1) for i in range(d)]
    el = GammaElement(space, space, n, p)
    for exps, c in _even_multiset_expansion(n, items, p, budget).items():
        el.add_term(exps, c)
    return el


def element_from_map(f, n, p, budget=None):
    """gamma_n(f) for an even linear map f, expanded over its matrix units."""
    if f.parity != EVEN:
        raise ValueError("divided powers of odd maps are not defined here")
    items = []
    for (i, j), v in sorted(f.matrix.nonzero_items()):
        items.append((i * f.source.dim + j, v))
    el = GammaElement(f.source, f.target, n, p)
    for exps, c in _even_multiset_expansion(n, items, p, budget).items():
        el.add_term(exps, c)
    return el


def element_product(a, b, budget=None):
    """Divided-power product of two elements of the same Hom space."""
    if (a.source, a.target, a.p) != (b.source, b.target, b.p):
        raise ValueError("product requires the same Hom space")
    from .powers import power_product

    hom = a.hom
    out = GammaElement(a.source, a.target, a.n + b.n, a.p)
    for ea, ca in a.terms.items():
        ma = PowerMonomial(PowerKind.DIV, hom, ea)
        for eb, cb in b.terms.items():
            mb = PowerMonomial(PowerKind.DIV, hom, eb)
            for m, c in power_product(ma, mb, a.p).items():
                out.add_term(m.exps, ca * cb * c)
                if budget is not None and len(out.terms) > budget:
                    raise BudgetExceededError("gamma product", len(out.terms), budget)
    return out


def phi_d(f, d, n, p, budget=None):
    """The convolution component gamma_d(f) * gamma_{n-d}(1) for an even map f."""
    if f.parity != EVEN:
        raise ValueError("convolution components require an even map")
    if d < 0:
        raise ValueError("d must be >= 0")
    if d > n:
        return zero_element(f.source, f.target, n, p)
    left = element_from_map(f, d, p, budget)
    right = identity_element(f.source, n - d, p, budget)
    return element_product(left, right, budget)


def differential_element(p, r, n, rho_maps, budget=None):
    """The degree-n component of the p-differential: sum of (rho_{r-1-s})_{p^s}."""
    out = None
    for s in range(r):
        term = phi_d(rho_maps[r - 1 - s], p ** s, n, p, budget)
        out = term if out is None else out + term
    return out


# ---------------------------------------------------------------------------
# expansion and recognition


def expand_to_invariant_tensor(el, check=False):
    t = SignedTensor(el.hom, el.n, el.p)
    for exps, c in el.terms.items():
        m = PowerMonomial(PowerKind.DIV, el.hom, exps)
        t = t + lift_from_power(m, el.p).scaled(c)
    if check:
        from .powers import act_sigma

        n = el.n
        for k in range(n - 1):
            sigma = list(range(n))
            sigma[k], sigma[k + 1] = sigma[k + 1], sigma[k]
            if act_sigma(t, tuple(sigma)) != t:
                raise ValueError("expansion is not invariant")
    return t


def recognize_invariant_tensor(t, source, target, n):
    el = GammaElement(source, target, n, t.p)
    for m, c in project_checked(PowerKind.DIV, t).items():
        el.add_term(m.exps, c)
    return el


def group_by_target_profile(f):
    """Index the monomials of f by the multiset of their unit target indices."""
    dim_u = f.source.dim
    out = {}
    for f_exps, cf in f.terms.items():
        profile = {}
        for idx, e in f_exps:
            i, _ = divmod(idx, dim_u)
            profile[i] = profile.get(i, 0) + e
        out.setdefault(tuple(sorted(profile.items())), []).append((f_exps, cf))
    return out


def compose(g, f, check_spaces=True, f_grouped=None):
    """Composition in the divided-power Hom calculus: g after f.

    Expanding both sides over arrangements of their factor multisets, the
    factorwise composite of maps carries the Koszul sign for odd factors of g
    passing odd factors of f.  Only arrangements whose composite lands on a
    sorted tuple are recorded; those coefficients determine the invariant
    result.  The targets of f must match the sources of g as multisets for a
    monomial pair to contribute, so f is indexed by that profile; pass
    f_grouped (from group_by_target_profile) to reuse the index.
    """
    if g.n != f.n:
        raise ValueError(f"degree mismatch: {g.n} vs {f.n}")
    if check_spaces and g.source != f.target:
        raise ValueError("middle spaces do not match")
    p = g.p
    n = g.n
    dim_u = f.source.dim
    dim_v = f.target.dim
    g_par = g.hom.parities()
    f_par = f.hom.parities()
    out = GammaElement(f.source, g.target, n, p)
    if f_grouped is None:
        f_grouped = group_by_target_profile(f)
    for g_exps, cg in g.terms.items():
        # group the factors of g by their source index in V
        g_by_src = {}
        for idx, e in g_exps:
            i, j = divmod(idx, dim_v)
            g_by_src.setdefault(j, {})[idx] = e
        g_profile = tuple(sorted((j, sum(cnt.values())) for j, cnt in g_by_src.items()))
        for f_exps, cf in f_grouped.get(g_profile, ()):
            f_seq = []
            for idx, e in f_exps:
                f_seq.extend([idx] * e)
            base = (cg * cf) % p
            for s in _cached_arrangements(tuple(f_seq)):
                sign_s = arrangement_sign(PowerKind.DIV, s, f_par)
                _compose_assign(
                    out, s, sign_s * base, g_by_src, g_par, f_par, dim_u, dim_v, n
                )
    out_par = out.hom.parities()
    for exps in out.terms:
        for idx, e in exps:
            if e > 1 and out_par[idx] == ODD:
                raise AssertionError("inadmissible monomial survived composition")
    return out


@lru_cache(maxsize=None)
def _cached_arrangements(seq):
    return _distinct_arrangements(seq)


def _compose_assign(out, s, coeff, g_by_src, g_par, f_par, dim_u, dim_v, n):
    """Backtracking over assignments of g's factors to the positions of s."""
    p = out.p
    # remaining multiset of g factors, keyed by source index
    remaining = {j: dict(cnt) for j, cnt in g_by_src.items()}
    s_pairs = [divmod(idx, dim_u) for idx in s]  # (target in V, source in U)
    t_seq = [0] * n
    comp_seq = [0] * n

    def rec(k, acc):
        if k == n:
            # sign of t as an arrangement of g's multiset, and the Koszul
            # sign for composing tensors of maps factorwise
            sgn = _arr_sign_partial(t_seq, g_par)
            kz = 0
            for a in range(n):
                if f_par[s[a]] == EVEN:
                    continue
                for b in range(a + 1, n):
                    kz += g_par[t_seq[b]] * f_par[s[a]]
            total = (acc * sgn * (-1) ** kz) % p
            if total:
                out.add_term(_seq_to_exps(comp_seq), total)
            return
        a_k, b_k = s_pairs[k]
        pool = remaining.get(a_k)
        if not pool:
            return
        lower = comp_seq[k - 1] if k else -1
        for t_idx in sorted(pool):
            if pool[t_idx] == 0:
                continue
            c_k, _ = divmod(t_idx, dim_v)
            comp_idx = c_k * dim_u + b_k
            if comp_idx < lower:
                continue
            pool[t_idx] -= 1
            t_seq[k] = t_idx
            comp_seq[k] = comp_idx
            rec(k + 1, acc)
            pool[t_idx] += 1

    rec(0, coeff)


def _arr_sign_partial(seq, parities):
    s = 0
    n = len(seq)
    for a in range(n):
        if parities[seq[a]] == EVEN:
            continue
        for b in range(a + 1, n):
            if parities[seq[b]] == ODD and seq[a] > seq[b]:
                s += 1
    return (-1) ** s


def _seq_to_exps(seq):
    counts = {}
    for i in seq:
        counts[i] = counts.get(i, 0) + 1
    return tuple(sorted(counts.items()))


def compose_power(el, k):
    """k-fold composition of an endomorphism-type element with itself."""
    if k < 1:
        raise ValueError("power must be >= 1")
    out = el
    for _ in range(k - 1):
        out = compose(el, out)
    return out


def compose_slow(g, f):
    """Reference composition through full double expansion; for tests."""
    p = g.p
    n = g.n
    tg = expand_to_invariant_tensor(g)
    tf = expand_to_invariant_tensor(f)
    dim_u = f.source.dim
    dim_v = f.target.dim
    g_par = g.hom.parities()
    f_par = f.hom.parities()
    out_t = SignedTensor(hom_space(f.source, g.target), n, p)
    for tkey, tc in tg.terms.items():
        for skey, sc in tf.terms.items():
            comp = []
            ok = True
            for a in range(n):
                ci, cj = divmod(tkey[a], dim_v)
                ai, aj = divmod(skey[a], dim_u)
                if cj != ai:
                    ok = False
                    break
                comp.append(ci * dim_u + aj)
            if not ok:
                continue
            kz = 0
            for a in range(n):
                for b in range(a + 1, n):
                    kz += g_par[tkey[b]] * f_par[skey[a]]
            out_t.add_term(tuple(comp), tc * sc * (-1) ** kz)
    return recognize_invariant_tensor(out_t, f.source, g.target, n)


# ---------------------------------------------------------------------------
# functorial actions


def apply_sym_matrix(el, n=None):
    """Matrix of the induced map on symmetric powers, in power-basis order."""
    n = el.n if n is None else n
    if n != el.n:
        raise ValueError("degree mismatch")
    src_basis = power_basis(PowerKind.SYM, n, el.source)
    tgt_basis = power_basis(PowerKind.SYM, n, el.target)
    tgt_index = {m.exps: k for k, m in enumerate(tgt_basis)}
    p = el.p
    dim_v = el.source.dim
    src_par = el.source.parities()
    tgt_par = el.target.parities()
    g_par = el.hom.parities()
    mat = FpMatrix.zeros(p, len(tgt_basis), len(src_basis))
    for col, mono in enumerate(src_basis):
        rep = mono.factor_sequence()
        for g_exps, cg in el.terms.items():
            g_by_src = {}
            for idx, e in g_exps:
                i, j = divmod(idx, dim_v)
                g_by_src.setdefault(j, {})[idx] = e
            _sym_assign(
                mat, col, rep, g_by_src, cg, p, dim_v, src_par, tgt_par, g_par, tgt_index
            )
    return mat


def _sym_assign(mat, col, rep, g_by_src, coeff, p, dim_v, src_par, tgt_par, g_par, tgt_index):
    n = len(rep)
    t_seq = [0] * n
    out_seq = [0] * n

    def rec(k):
        if k == n:
            sgn = _arr_sign_partial(t_seq, g_par)
            kz = 0
            for a in range(n):
                for b in range(a + 1, n):
                    kz += g_par[t_seq[b]] * src_par[rep[a]]
            srt, ssign = sort_with_sign(PowerKind.SYM, out_seq, tgt_par)
            if srt is None:
                return
            key = _seq_to_exps(srt)
            row = tgt_index.get(key)
            if row is None:
                return
            total = (coeff * sgn * ssign * (-1) ** kz) % p
            if total:
                mat.set(row, col, (mat.get(row, col) + total) % p)
            return
        pool = g_by_src.get(rep[k])
        if not pool:
            return
        for t_idx in sorted(pool):
            if pool[t_idx] == 0:
                continue
            c_k, _ = divmod(t_idx, dim_v)
            pool[t_idx] -= 1
            t_seq[k] = t_idx
            out_seq[k] = c_k
            rec(k + 1)
            pool[t_idx] += 1

    rec(0)


def apply_sym_block(el, src_monos, tgt_pos, rows):
    """Matrix of the induced symmetric-power map on a selected graded piece.

    src_monos are the column monomials; tgt_pos maps exponent tuples to row
    indices; images landing outside tgt_pos are dropped (they must be zero
    when the element is degree homogeneous across the chosen pieces).
    """
    p = el.p
    dim_v = el.source.dim
    src_par = el.source.parities()
    tgt_par = el.target.parities()
    g_par = el.hom.parities()
    mat = FpMatrix.zeros(p, rows, len(src_monos))
    for col, mono in enumerate(src_monos):
        rep = mono.factor_sequence()
        for g_exps, cg in el.terms.items():
            g_by_src = {}
            for idx, e in g_exps:
                i, j = divmod(idx, dim_v)
                g_by_src.setdefault(j, {})[idx] = e
            _sym_assign(
                mat, col, rep, g_by_src, cg, p, dim_v, src_par, tgt_par, g_par, tgt_pos
            )
    return mat


def apply_sym(el):
    """The induced map on symmetric powers as a graded linear map."""
    mat = apply_sym_matrix(el)
    src = _sym_power_space(el.source, el.n)
    tgt = _sym_power_space(el.target, el.n)
    parity = el.parity()
    zshifts = {t - s for (t, s) in el.bigrades()}
    if len(zshifts) > 1:
        raise ValueError("element is not z-homogeneous")
    zshift = zshifts.pop() if zshifts else 0
    return LinearMapSS(src, tgt, mat, parity, zshift)


@lru_cache(maxsize=None)
def _sym_power_space(space, n):
    from .superspace import BasisElement

    elems = []
    for m in power_basis(PowerKind.SYM, n, space):
        elems.append(BasisElement(m.label(), m.zdeg, m.parity))
    return SuperSpace(tuple(elems))


def apply_frobenius(el, r):
    """Induced map on r-th Frobenius twists; kills all but gamma_{p^r}(even unit).

    Returns the matrix from twist(V) to twist(W) in the twisted bases.
    """
    p = el.p
    if el.n != p ** r:
        raise ValueError(f"degree {el.n} is not p^r = {p ** r}")
    hom = el.hom
    mat = FpMatrix.zeros(p, el.target.dim, el.source.dim)
    for exps, c in el.terms.items():
        if len(exps) != 1:
            continue
        idx, e = exps[0]
        if e != p ** r or hom.basis[idx].parity != EVEN:
            continue
        i, j = el.unit_pair(idx)
        mat.set(i, j, (mat.get(i, j) + c) % p)
    return mat


def frobenius_spaces(el, r):
    return (
        frobenius_twist_space(el.source, r, el.p),
        frobenius_twist_space(el.target, r, el.p),
    )


def tensor_with_identity(el, u, budget=None):
    """Extend each matrix unit by the identity of u: the parameterized morphism."""
    p = el.p
    new_src = tensor(el.source, u)
    new_tgt = tensor(el.target, u)
    du = u.dim
    u_par = u.parities()
    out = GammaElement(new_src, new_tgt, el.n, p)
    hom = el.hom
    for exps, c in el.terms.items():
        factors = []  # one {exps: coeff} per gamma factor
        dead = False
        for idx, e in exps:
            i, j = el.unit_pair(idx)
            unit_parity = hom.basis[idx].parity
            images = []
            for k in range(du):
                new_idx = (i * du + k) * new_src.dim + (j * du + k)
                images.append((new_idx, 1))
            if unit_parity == EVEN:
                expansion = _even_multiset_expansion(e, images, p, budget)
            else:
                # odd units occur with exponent one; gamma_1 is linear
                expansion = {((new_idx, 1),): coeff for new_idx, coeff in images}
            if not expansion:
                dead = True
                break
            factors.append(expansion)
        if dead:
            continue
        combo = {(): 1}
        from .powers import power_product

        new_hom = hom_space(new_src, new_tgt)
        for fac in factors:
            nxt = {}
            for e1, c1 in combo.items():
                m1 = PowerMonomial(PowerKind.DIV, new_hom, e1)
                for e2, c2 in fac.items():
                    m2 = PowerMonomial(PowerKind.DIV, new_hom, e2)
                    for m, cc in power_product(m1, m2, p).items():
                        v = (nxt.get(m.exps, 0) + c1 * c2 * cc) % p
                        if v:
                            nxt[m.exps] = v
                        else:
                            nxt.pop(m.exps, None)
            combo = nxt
            if budget is not None and len(combo) > budget:
                raise BudgetExceededError("tensor_with_identity", len(combo), budget)
        for e2, c2 in combo.items():
            out.add_term(e2, c * c2)
    return out


def tensor_identity_left(el, w, budget=None):
    """Extend each matrix unit by the identity of w on the left.

    A unit f picks up the sign (-1)^{parity(f) * parity(w_k)} on the k-th
    summand, from f passing the left tensor factor.
    """
    p = el.p
    new_src = tensor(w, el.source)
    new_tgt = tensor(w, el.target)
    dsrc = el.source.dim
    dtgt = el.target.dim
    w_par = w.parities()
    out = GammaElement(new_src, new_tgt, el.n, p)
    hom = el.hom
    from .powers import power_product

    new_hom = hom_space(new_src, new_tgt)
    for exps, c in el.terms.items():
        factors = []
        for idx, e in exps:
            i, j = el.unit_pair(idx)
            unit_parity = hom.basis[idx].parity
            images = []
            for k in range(w.dim):
                new_idx = (k * dtgt + i) * new_src.dim + (k * dsrc + j)
                sign = (-1) ** (unit_parity * w_par[k]) % p
                images.append((new_idx, sign))
            if unit_parity == EVEN:
                factors.append(_even_multiset_expansion(e, images, p, budget))
            else:
                factors.append({((new_idx, 1),): coeff for new_idx, coeff in images})
        combo = {(): 1}
        for fac in factors:
            nxt = {}
            for e1, c1 in combo.items():
                m1 = PowerMonomial(PowerKind.DIV, new_hom, e1)
                for e2, c2 in fac.items():
                    m2 = PowerMonomial(PowerKind.DIV, new_hom, e2)
                    for m, cc in power_product(m1, m2, p).items():
                        v = (nxt.get(m.exps, 0) + c1 * c2 * cc) % p
                        if v:
                            nxt[m.exps] = v
                        else:
                            nxt.pop(m.exps, None)
            combo = nxt
            if budget is not None and len(combo) > budget:
                raise BudgetExceededError("tensor_identity_left", len(combo), budget)
        for e2, c2 in combo.items():
            out.add_term(e2, c * c2)
    return out


def relabel_element(el, new_source, new_target):
    """Transport along index-preserving relabelings of source and target bases.

    Valid when the relabeling preserves the parity of every occupied unit up
    to a global flip on both sides, so all sorting and Koszul bookkeeping is
    unchanged.
    """
    if new_source.dim != el.source.dim or new_target.dim != el.target.dim:
        raise ValueError("relabel dimension mismatch")
    out = GammaElement(new_source, new_target, el.n, el.p, dict(el.terms))
    old_par = el.hom.parities()
    new_par = out.hom.parities()
    for exps in el.terms:
        for idx, e in exps:
            if old_par[idx] != new_par[idx]:
                raise ValueError("relabeling changes a unit parity")
            if e > 1 and new_par[idx] == ODD:
                raise ValueError("relabeling breaks admissibility")
    return out


# ---------------------------------------------------------------------------
# bigraded pieces


def monomials_with_bigrade(source, target, n, p, tgt_sum, src_sum, budget=None):
    """All admissible monomials of the Hom power with the given degree sums."""
    hom = hom_space(source, target)
    dim = hom.dim
    tz = target.zdegs()
    sz = source.zdegs()
    par = hom.parities()
    dim_v = source.dim
    unit_t = [tz[i // dim_v] for i in range(dim)]
    unit_s = [sz[i % dim_v] for i in range(dim)]
    # suffix bounds for pruning
    INF = float("inf")
    min_t = [INF] * (dim + 1)
    max_t = [-INF] * (dim + 1)
    min_s = [INF] * (dim + 1)
    max_s = [-INF] * (dim + 1)
    for i in range(dim - 1, -1, -1):
        min_t[i] = min(min_t[i + 1], unit_t[i])
        max_t[i] = max(max_t[i + 1], unit_t[i])
        min_s[i] = min(min_s[i + 1], unit_s[i])
        max_s[i] = max(max_s[i + 1], unit_s[i])
    out = []

    def rec(idx, rem, t_need, s_need, acc):
        if rem == 0:
            if t_need == 0 and s_need == 0:
                out.append(tuple(acc))
                if budget is not None and len(out) > budget:
                    raise BudgetExceededError("bigraded piece", len(out), budget)
            return
        if idx == dim:
            return
        if min_t[idx] != INF:
            if not (rem * min_t[idx] <= t_need <= rem * max_t[idx]):
                return
            if not (rem * min_s[idx] <= s_need <= rem * max_s[idx]):
                return
        cap = 1 if par[idx] == ODD else rem
        for e in range(min(cap, rem), -1, -1):
            if e:
                acc.append((idx, e))
                rec(idx + 1, rem - e, t_need - e * unit_t[idx], s_need - e * unit_s[idx], acc)
                acc.pop()
            else:
                rec(idx + 1, rem, t_need, s_need, acc)

    rec(0, n, tgt_sum, src_sum, [])
    return out
