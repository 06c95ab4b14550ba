"""The p-complexes B_n(r) = S^n(Sh_r tensor -) with differential built from
convolution components of the shift maps, their evaluation at test spaces,
the algebra-generator cocycles, and computational verification of the
concentration theorem for their cohomology and its contraction corollary."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import BudgetExceededError
from .linalg import FpMatrix, hstack, matmul
from .pcomplex import (
    PComplex,
    cohomology,
    contract,
    decompose_cyclic,
)
from .powers import (
    PowerKind,
    PowerMonomial,
    binom_mod,
    monomial_from_counts,
    power_basis,
    power_product,
)
from .superspace import (
    EVEN,
    ODD,
    BasisElement,
    SuperSpace,
    build_Sh,
    parity_shift,
    rho,
    tensor,
)

DEFAULT_BUDGET = 20_000

SUPPORTED_BUILD = {(3, 1), (3, 2), (5, 1), (5, 2)}


def _check_build_args(p, r):
    if (p, r) not in SUPPORTED_BUILD:
        raise ValueError(f"(p, r) = {(p, r)} outside the supported set {sorted(SUPPORTED_BUILD)}")


# ---------------------------------------------------------------------------
# convolution action on symmetric power monomials


def phi_images_on_tensor(param_map, u_dim):
    """Generator images of f tensor 1_U, as {gen index: (image index, coeff)}."""
    images = {}
    for (i, j), v in param_map.matrix.nonzero_items():
        for k in range(u_dim):
            images[j * u_dim + k] = (i * u_dim + k, v)
    return images


def convolution_apply(images, d, mono, p):
    """Apply the degree-d convolution component of an even map to a monomial.

    images sends a generator index to (image index, coefficient) or is
    missing when the generator dies.  Returns {exps tuple: coeff}.
    """
    space = mono.space
    par = space.parities()
    gens = list(mono.exps)
    live = [k for k, (g, e) in enumerate(gens) if g in images]
    out = {}

    def emit(lvec, coeff):
        counts = {}
        odd_seq = []
        c = coeff
        for (g, e), l in zip(gens, lvec):
            a = e - l
            if a:
                if par[g] == ODD:
                    odd_seq.append(g)
                else:
                    counts[g] = counts.get(g, 0) + a
            if l:
                g2, scal = images[g]
                c = c * pow(scal, l, p) % p
                if par[g2] == ODD:
                    odd_seq.append(g2)
                else:
                    counts[g2] = counts.get(g2, 0) + l
        # odd factors each occur once; sort them, tracking the Koszul sign
        inv = 0
        for a_ in range(len(odd_seq)):
            for b_ in range(a_ + 1, len(odd_seq)):
                if odd_seq[a_] == odd_seq[b_]:
                    return
                if odd_seq[a_] > odd_seq[b_]:
                    inv += 1
        for o in odd_seq:
            counts[o] = 1
        c = c * (-1) ** inv % p
        if not c:
            return
        exps = tuple(sorted(counts.items()))
        v = (out.get(exps, 0) + c) % p
        if v:
            out[exps] = v
        else:
            out.pop(exps, None)

    lvec = [0] * len(gens)

    def rec(pos, rem, coeff):
        if rem == 0:
            emit(lvec, coeff)
            return
        if pos == len(live):
            return
        k = live[pos]
        g, e = gens[k]
        top = min(e, rem)
        for l in range(top, -1, -1):
            c = coeff * binom_mod(e, l, p) % p if l else coeff
            if c:
                lvec[k] = l
                rec(pos + 1, rem - l, c)
        lvec[k] = 0

    rec(0, d, 1)
    return out


def convolution_apply_oracle(images, d, mono, p):
    """Coproduct-route evaluation of the same component, for cross-checks.

    Splits the monomial, applies the full algebra action of the map to the
    degree-d part, and multiplies back.
    """
    from .powers import coproduct_component

    n = mono.degree
    space = mono.space
    if d > n:
        return {}
    out = {}
    for (left, right), c0 in coproduct_component(mono, n - d, d, p):
        # S^d(f) on the right factor: every factor mapped
        img = {right.exps: 1}
        done = {}
        for exps, c1 in img.items():
            seq = []
            coeff = c1
            dead = False
            for g, e in exps:
                if g not in images:
                    dead = True
                    break
                g2, scal = images[g]
                coeff = coeff * pow(scal, e, p) % p
                seq.append((g2, e))
            if dead or not coeff:
                continue
            combo = {(): 1}
            for g2, e in seq:
                m2 = monomial_from_counts(PowerKind.SYM, space, {g2: e})
                nxt = {}
                for ee, cc in combo.items():
                    m1 = PowerMonomial(PowerKind.SYM, space, ee)
                    for m3, c3 in power_product(m1, m2, p).items():
                        v = (nxt.get(m3.exps, 0) + cc * c3) % p
                        if v:
                            nxt[m3.exps] = v
                        else:
                            nxt.pop(m3.exps, None)
                combo = nxt
            for ee, cc in combo.items():
                v = (done.get(ee, 0) + coeff * cc) % p
                if v:
                    done[ee] = v
                else:
                    done.pop(ee, None)
        for ee, cc in done.items():
            m_l = left
            m_r = PowerMonomial(PowerKind.SYM, space, ee)
            for m4, c4 in power_product(m_l, m_r, p).items():
                v = (out.get(m4.exps, 0) + c0 * cc * c4) % p
                if v:
                    out[m4.exps] = v
                else:
                    out.pop(m4.exps, None)
    return out


# ---------------------------------------------------------------------------
# building the complexes


@dataclass
class PowerComplexData:
    """A built p-complex of symmetric powers plus its monomial bookkeeping."""

    p: int
    r: int
    n: int
    param: SuperSpace
    space: SuperSpace  # param tensor U
    complex: PComplex
    index: dict  # zdeg -> {exps: position}
    monomials: dict  # zdeg -> [PowerMonomial]

    def monomial_position(self, mono):
        return self.index[mono.zdeg][mono.exps]


def build_power_pcomplex(p, r, n, param, param_maps, u, budget=DEFAULT_BUDGET):
    """S^n(param tensor U) with differential sum of (param_maps[r-1-s])_{p^s}."""
    w = tensor(param, u)
    # cheap pigeonhole bound before enumerating anything: some graded piece
    # must exceed the budget once the total dimension is large enough
    ev, od = w.dims_by_parity()
    from .powers import dim_formula_sym

    total = dim_formula_sym(n, ev, od)
    n_degrees = n * max((b.zdeg for b in w.basis), default=0) + 1
    if total > budget * n_degrees:
        raise BudgetExceededError("total symmetric power dimension", total, budget * n_degrees)
    by_z = {}
    for m in power_basis(PowerKind.SYM, n, w):
        by_z.setdefault(m.zdeg, []).append(m)
    for z, monos in by_z.items():
        if len(monos) > budget:
            raise BudgetExceededError(f"graded piece at degree {z}", len(monos), budget)
    spaces = {}
    index = {}
    for z, monos in by_z.items():
        spaces[z] = SuperSpace(tuple(BasisElement(m.label(), z, m.parity) for m in monos))
        index[z] = {m.exps: k for k, m in enumerate(monos)}
    alpha = p ** (r - 1)
    images_list = [
        (phi_images_on_tensor(param_maps[r - 1 - s], u.dim), p ** s) for s in range(r)
    ]
    diffs = {}
    for z, monos in sorted(by_z.items()):
        tgt = by_z.get(z + alpha)
        if tgt is None:
            continue
        mat = FpMatrix.zeros(p, len(tgt), len(monos))
        tpos = index[z + alpha]
        for col, m in enumerate(monos):
            for images, d in images_list:
                for exps, c in convolution_apply(images, d, m, p).items():
                    row = tpos.get(exps)
                    if row is None:
                        raise AssertionError("differential left the expected graded piece")
                    mat.set(row, col, (mat.get(row, col) + c) % p)
        if not mat.is_zero():
            diffs[z] = mat
    cx = PComplex(p, alpha, spaces, diffs)
    return PowerComplexData(p, r, n, param, w, cx, index, by_z)


def formal_differential(p, r, n, budget=None):
    """The degree-n differential as an element of the divided Hom power."""
    from .gamma import differential_element

    _check_build_args(p, r)
    return differential_element(p, r, n, [rho(p, r, s) for s in range(r)], budget)


def build_B(n, r, u, p=3, budget=DEFAULT_BUDGET, validate=True):
    """The p-complex of the degree-n symmetric power of Sh_r tensor U."""
    _check_build_args(p, r)
    if n < 0:
        raise ValueError("polynomial degree must be >= 0")
    sh = build_Sh(p, r)
    maps = [rho(p, r, s) for s in range(r)]
    data = build_power_pcomplex(p, r, n, sh, maps, u, budget)
    if validate:
        data.complex.validate_p_differential()
    return data


def build_B_bar(n, r, u, p=3, budget=DEFAULT_BUDGET, validate=True):
    """Same construction with the parity-shifted parameter space.

    The terms returned here are the underlying symmetric powers; the extra
    global parity flip of the wrapped complex is applied by callers that
    need it.
    """
    _check_build_args(p, r)
    sh = build_Sh(p, r)
    shbar = parity_shift(sh)
    base_maps = [rho(p, r, s) for s in range(r)]
    from .superspace import relabel_map

    maps = [relabel_map(f, shbar, shbar) for f in base_maps]
    data = build_power_pcomplex(p, r, n, shbar, maps, u, budget)
    if validate:
        data.complex.validate_p_differential()
    return data


# ---------------------------------------------------------------------------
# generator cocycles


def eta_images(n, r, u, p=3, budget=DEFAULT_BUDGET, space=None):
    """All degree-n products of generator images: cocycles representing the
    cohomology of the built complex.

    Returns a list of ({exps: coeff}, zdeg, parity) with n counted in the
    twisted generators, i.e. polynomial degree n * p^r downstairs.
    """
    _check_build_args(p, r)
    sh = build_Sh(p, r)
    w = space if space is not None else tensor(sh, u)
    q = p ** r
    u_tw_elems = tuple(
        BasisElement(f"{b.name}^({r})", 0 if b.parity == EVEN else q * (q - 1) // 2, b.parity)
        for b in u.basis
    )
    u_tw = SuperSpace(u_tw_elems)
    out = []
    for m in power_basis(PowerKind.SYM, n, u_tw):
        combo = {(): 1}
        for uidx, e in m.exps:
            b = u.basis[uidx]
            if b.parity == EVEN:
                piece = {((0 * u.dim + uidx, q * e),): 1}
            else:
                piece = {tuple((i * u.dim + uidx, 1) for i in range(q)): 1}
            nxt = {}
            for e1, c1 in combo.items():
                m1 = PowerMonomial(PowerKind.SYM, w, e1)
                for e2, c2 in piece.items():
                    m2 = PowerMonomial(PowerKind.SYM, w, e2)
                    for m3, c3 in power_product(m1, m2, p).items():
                        v = (nxt.get(m3.exps, 0) + c1 * c2 * c3) % p
                        if v:
                            nxt[m3.exps] = v
                        else:
                            nxt.pop(m3.exps, None)
            combo = nxt
        out.append((combo, m.zdeg, m.parity))
    return out


def expected_theorem_dims(n, r, u, p):
    """Theorem-side cohomology of B_n(r)(U): {degree: (even, odd)}.

    Nonzero only when p^r divides n; the degree ell * binom(p^r, 2) summand
    has dimension dim S^{m-ell}(U_even) * binom(dim U_odd, ell) in parity
    ell mod 2, where m = n / p^r.
    """
    q = p ** r
    if n % q:
        return {}
    m = n // q
    dim0, dim1 = u.dims_by_parity()
    out = {}
    for ell in range(0, m + 1):
        from .powers import multiset_coeff

        d = multiset_coeff(dim0, m - ell) * math.comb(dim1, ell)
        if d:
            deg = ell * (q * (q - 1) // 2)
            pair = (d, 0) if ell % 2 == 0 else (0, d)
            out[deg] = tuple(x + y for x, y in zip(out.get(deg, (0, 0)), pair))
    return out


@dataclass
class VerificationReport:
    ok: bool
    checks: list = field(default_factory=list)
    first_failure: str | None = None

    def add(self, name, passed, detail=""):
        self.checks.append((name, passed, detail))
        if not passed:
            self.ok = False
            if self.first_failure is None:
                self.first_failure = f"{name}: {detail}"

    def summary(self):
        lines = [f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({d})" if d else "") for name, ok, d in self.checks]
        return "\n".join(lines)


def verify_theorem_B(n, r, u, p=3, budget=DEFAULT_BUDGET, slices=None):
    """Check normality, concentration, dimensions, and generator spanning
    for the degree-n complex on the test space u."""
    report = VerificationReport(ok=True)
    data = build_B(n, r, u, p, budget)
    cx = data.complex
    q = p ** r
    dec = decompose_cyclic(cx)
    report.add("normal", dec.is_normal(), f"block lengths {sorted({ln for (_, ln, _) in dec.blocks})}")
    expected = expected_theorem_dims(n, r, u, p)
    slices = list(range(1, p)) if slices is None else list(slices)
    for s in slices:
        row = cohomology(cx, s)
        for deg in sorted(set(row) | set(expected)):
            got = row.get(deg, (0, 0))
            want = expected.get(deg, (0, 0))
            if got != want:
                report.add(f"H_[{s}]^{deg}", False, f"got {got}, want {want}")
                return report
        report.add(f"H_[{s}] table", True)
    if n % q == 0:
        m = n // q
        images = eta_images(m, r, u, p, budget, space=data.space)
        by_deg = {}
        for combo, zdeg, parity in images:
            if combo:
                by_deg.setdefault(zdeg, []).append(combo)
        for deg, combos in sorted(by_deg.items()):
            piece = data.monomials.get(deg, [])
            pos = data.index.get(deg, {})
            vecs = []
            for combo in combos:
                vec = [0] * len(piece)
                for exps, c in combo.items():
                    vec[pos[exps]] = c
                vecs.append(vec)
            dmat = cx.diff(deg)
            vmat = FpMatrix.zeros(p, len(piece), len(vecs))
            for k, v in enumerate(vecs):
                for i, x in enumerate(v):
                    if x:
                        vmat.set(i, k, x)
            cocycle = matmul(dmat, vmat).is_zero()
            report.add(f"eta cocycles deg {deg}", cocycle)
            src = deg - (p - 1) * cx.alpha
            img = cx.iterated_diff(src, p - 1).image_basis()
            ker_rank = cx.dim(deg) - cx.diff(deg).rank()
            spans = hstack([img, vmat]).rank() == ker_rank
            report.add(f"eta classes span deg {deg}", spans)
    return report


def build_T(n, r, u, p=3, budget=DEFAULT_BUDGET):
    """Contraction of the degree-(p^r n) complex: an ordinary cochain complex."""
    data = build_B(p ** r * n, r, u, p, budget)
    return contract(data.complex, 1, 0), data


def verify_corollary_T(n, r, u, p=3, budget=DEFAULT_BUDGET):
    report = VerificationReport(ok=True)
    t, data = build_T(n, r, u, p, budget)
    q = p ** r
    expected_b = expected_theorem_dims(q * n, r, u, p)
    # translate: summand at B-degree ell*binom(q,2) appears in T-degree ell*(q-1)
    expected_t = {}
    for ell in range(0, n + 1):
        bdeg = ell * (q * (q - 1) // 2)
        if bdeg in expected_b:
            expected_t[ell * (q - 1)] = expected_b[bdeg]
    top = max([d for d in t.degrees()], default=0)
    for ell in range(0, top + 2):
        got = t.cohomology_dims(ell)
        want = expected_t.get(ell, (0, 0))
        if got != want:
            report.add(f"H^{ell}(T)", False, f"got {got}, want {want}")
            return report
    report.add("H(T) table", True)
    bound = 2 * n * (q - 1)
    tail_ok = all(t.dim(ell) == 0 for ell in t.degrees() if ell > bound)
    report.add("vanishing bound", tail_ok, f"T^ell = 0 for ell > {bound}")
    return report


# ---------------------------------------------------------------------------
# bigrading diagnostic (r >= 2)


def bigrade(data):
    """Split degrees as (deg', deg'') from the base-p digits of the shifts.

    Returns {zdeg: [(deg', deg'') per monomial]} plus the two partial
    differentials as matrices, checking they commute.
    """
    p = data.p
    r = data.r
    if r < 2:
        raise ValueError("the bigrading needs r >= 2")
    u_dim = data.space.dim // data.param.dim
    per_term = {}
    for z, monos in data.monomials.items():
        rows = []
        for m in monos:
            d2 = 0
            for g, e in m.exps:
                sh_idx = g // u_dim
                d2 += e * (sh_idx % p)
            rows.append((m.zdeg - d2, d2))
        per_term[z] = rows
    # d'' = (rho_0)_{p^{r-1}}; d' = rest
    sh = data.param
    from .superspace import relabel_map

    base = rho(p, r, 0)
    rho0 = relabel_map(base, sh, sh) if sh.basis[0].name != "sh_0" else base
    images = phi_images_on_tensor(rho0, u_dim)
    alpha = p ** (r - 1)
    d2_mats = {}
    for z, monos in sorted(data.monomials.items()):
        tgt = data.monomials.get(z + alpha)
        if tgt is None:
            continue
        mat = FpMatrix.zeros(p, len(tgt), len(monos))
        tpos = data.index[z + alpha]
        for col, m in enumerate(monos):
            for exps, c in convolution_apply(images, p ** (r - 1), m, p).items():
                mat.set(tpos[exps], col, c)
        d2_mats[z] = mat
    d1_mats = {}
    for z in data.monomials:
        full = data.complex.diff(z)
        part = d2_mats.get(z)
        d1_mats[z] = full - part if part is not None else full
    # commutation on evaluated matrices
    for z in sorted(data.monomials):
        a = _get(d1_mats, data, z + alpha) @ _get(d2_mats, data, z)
        b = _get(d2_mats, data, z + alpha) @ _get(d1_mats, data, z)
        if a != b:
            raise AssertionError(f"d' and d'' do not commute at degree {z}")
    return per_term, d1_mats, d2_mats


def _get(mats, data, z):
    m = mats.get(z)
    if m is not None:
        return m
    alpha = data.complex.alpha
    return FpMatrix.zeros(data.p, data.complex.dim(z + alpha), data.complex.dim(z))


# ---------------------------------------------------------------------------
# the one-dimensional purely odd oracle (auxiliary complex on nilpotent
# truncated polynomial generators)


def build_D_complex(n, p):
    """Tensor power of k[x]/(x^p) with the sum-of-raises differential."""
    from itertools import product as iproduct

    terms = {}
    index = {}
    for b in iproduct(range(p), repeat=n):
        z = sum(b)
        lst = terms.setdefault(z, [])
        index[b] = (z, len(lst))
        lst.append(b)
    spaces = {
        z: SuperSpace(tuple(BasisElement("x" + "".join(map(str, b)), z, EVEN) for b in lst))
        for z, lst in terms.items()
    }
    diffs = {}
    for z, lst in sorted(terms.items()):
        tgt = terms.get(z + 1)
        if tgt is None:
            continue
        mat = FpMatrix.zeros(p, len(tgt), len(lst))
        for col, b in enumerate(lst):
            for i in range(n):
                if b[i] < p - 1:
                    nb = b[:i] + (b[i] + 1,) + b[i + 1:]
                    _, row = index[nb]
                    mat.set(row, col, (mat.get(row, col) + 1) % p)
        diffs[z] = mat
    return PComplex(p, 1, spaces, diffs), index


def d_oracle_maps(n, p):
    """The comparison maps between the auxiliary complex and B_n(1)(k^{0|1}).

    Returns (D complex, C data, varphi, psi, s) where varphi and psi are
    {degree: FpMatrix} and s is the signed symmetrizer on D.
    """
    import itertools

    from .superspace import k_super

    if not (1 <= n < p):
        raise ValueError("the averaging map needs 1 <= n < p")
    dcx, dindex = build_D_complex(n, p)
    cdata = build_B(n, 1, k_super(0, 1), p)
    ccx = cdata.complex
    varphi = {}
    psi = {}
    for z in dcx.degrees():
        dn = dcx.dim(z)
        cn = ccx.dim(z)
        vp = FpMatrix.zeros(p, cn, dn)
        ps = FpMatrix.zeros(p, dn, cn)
        dlist = [b for b in dindex if sum(b) == z]
        dlist.sort(key=lambda b: dindex[b][1])
        cpos = cdata.index.get(z, {})
        for col, b in enumerate(dlist):
            # product w_{b_1} ... w_{b_n} in the exterior part
            seen = set()
            dup = False
            inv = 0
            for a_ in range(n):
                if b[a_] in seen:
                    dup = True
                    break
                seen.add(b[a_])
                for b_ in range(a_ + 1, n):
                    if b[a_] > b[b_]:
                        inv += 1
            if dup:
                continue
            exps = tuple(sorted((i, 1) for i in b))
            row = cpos.get(exps)
            if row is None:
                continue
            vp.set(row, col, (-1) ** inv % p)
        for ccol, m in enumerate(cdata.monomials.get(z, [])):
            seq = [g for g, e in m.exps for _ in range(e)]
            key = tuple(seq)
            if key in dindex:
                _, drow = dindex[key]
                ps.set(drow, ccol, 1)
        varphi[z] = vp
        psi[z] = ps
    # signed symmetrizer
    s_maps = {}
    inv_nfact = pow(math.factorial(n) % p, p - 2, p)
    for z in dcx.degrees():
        dlist = [b for b in dindex if sum(b) == z]
        dlist.sort(key=lambda b: dindex[b][1])
        dn = dcx.dim(z)
        mat = FpMatrix.zeros(p, dn, dn)
        for col, b in enumerate(dlist):
            for sigma in itertools.permutations(range(n)):
                sgn = 1
                for a_ in range(n):
                    for b_ in range(a_ + 1, n):
                        if sigma[a_] > sigma[b_]:
                            sgn = -sgn
                nb = tuple(b[sigma[i]] for i in range(n))
                _, row = dindex[nb]
                mat.set(row, col, (mat.get(row, col) + sgn * inv_nfact) % p)
        s_maps[z] = mat
    return dcx, cdata, varphi, psi, s_maps
