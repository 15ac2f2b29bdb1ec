"""Bigraded cdga models from compactification data, and formality witnesses.

Given a smooth compactification with divisor components D_1..D_s, the
model places H^{2k-q}(D_I) with |I| = q - k in bidegree (k, q); the twist
makes that summand pure of weight q.  The differential sums signed Gysin
maps that drop one component; the product restricts both factors to the
union and cups, with the sign (-1)^{(q-n)q'} sgn(I, I').  Kernel and
cokernel witnesses extract zero-differential cdgas in the two purity
regimes (weights 2k resp. k) together with the comparison morphism and
an exact check that it is an r-quasi-isomorphism.

Compactification data is explicit input built by the provided
constructors (marked projective lines and their Kunneth products); no
resolution of singularities is attempted.  All checks are exact matrix
identities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from stratiform.exactalg import Matrix

INF = math.inf

Bidegree = tuple[int, int]
Sparse = dict[int, Fraction]


class DatumError(ValueError):
    """Structurally unusable compactification datum (missing or misshapen map)."""


class ModelPurityError(RuntimeError):
    """Witness extraction refused: model cohomology off the required column."""

    def __init__(self, kind: str, witnesses: Sequence[Bidegree]):
        self.witnesses = tuple(witnesses)
        super().__init__(
            "%s extraction refused; nonzero cohomology at (degree, weight) %s"
            % (kind, list(self.witnesses))
        )


class MorphismError(ValueError):
    """A map of models violates a cdga morphism identity."""


class ClosureError(RuntimeError):
    """A witness subspace or quotient fails to close under the product."""


def shuffle_sign(i_set: Iterable[int], j_set: Iterable[int]) -> int:
    """Sign of the permutation sorting (I ascending, I' ascending) together.

    Caller guarantees disjointness; the model product returns zero on
    overlapping index sets before consulting this sign.
    """
    a, b = sorted(i_set), sorted(j_set)
    inversions = sum(1 for x in a for y in b if x > y)
    return -1 if inversions % 2 else 1


def _sorted_subset(i_set: Iterable[int]) -> tuple[int, ...]:
    out = tuple(sorted(int(i) for i in i_set))
    if len(set(out)) != len(out):
        raise ValueError("repeated component index in %r" % (out,))
    return out


class CompactificationDatum:
    """Cohomology of the divisor strata with restriction, Gysin and cup data.

    `cohomology` maps a sorted component tuple I to {degree: dim} for
    H^*(D_I), with D_() the ambient compact variety; absent keys or
    degrees mean zero.  `restrictions[(I, j)][p]` is the one-step
    restriction H^p(D_I) -> H^p(D_{I+j}); longer restrictions compose in
    increasing component order and functoriality is checked by validate().
    `gysins[(I, i)][p]` maps H^p(D_I) -> H^{p+2}(D_{I-i}).  `cups[I][(p, p')]`
    holds sparse structure constants {(a, b): {c: coeff}}.
    """

    def __init__(
        self,
        components: int,
        cohomology: Mapping,
        restrictions: Mapping | None = None,
        gysins: Mapping | None = None,
        cups: Mapping | None = None,
    ):
        self.components = int(components)
        self.cohomology = {}
        for i_set, dims in cohomology.items():
            key = _sorted_subset(i_set)
            clean = {int(p): int(d) for p, d in dims.items() if d}
            if clean:
                self.cohomology[key] = clean
        self.restrictions = {
            (_sorted_subset(i_set), int(j)): {int(p): blk for p, blk in blocks.items()}
            for (i_set, j), blocks in (restrictions or {}).items()
        }
        self.gysins = {
            (_sorted_subset(i_set), int(i)): {int(p): blk for p, blk in blocks.items()}
            for (i_set, i), blocks in (gysins or {}).items()
        }
        self.cups = {_sorted_subset(i_set): dict(table) for i_set, table in (cups or {}).items()}
        self._restriction_cache: dict = {}

    # -- dimensions ------------------------------------------------------

    def dim(self, i_set: Sequence[int], p: int) -> int:
        return self.cohomology.get(tuple(sorted(i_set)), {}).get(p, 0)

    def degrees(self, i_set: Sequence[int]) -> tuple[int, ...]:
        return tuple(sorted(self.cohomology.get(tuple(sorted(i_set)), {})))

    def subsets(self) -> tuple[tuple[int, ...], ...]:
        return tuple(sorted(self.cohomology, key=lambda s: (len(s), s)))

    # -- maps --------------------------------------------------------------

    def _step(self, i_set: tuple[int, ...], j: int, p: int) -> Matrix:
        src, tgt = self.dim(i_set, p), self.dim(i_set + (j,), p)
        if src == 0 or tgt == 0:
            return Matrix.zero(tgt, src)
        block = self.restrictions.get((i_set, j), {}).get(p)
        if block is None:
            raise DatumError(
                "missing restriction for I=%r, j=%d, degree %d" % (i_set, j, p)
            )
        if block.shape != (tgt, src):
            raise DatumError(
                "restriction for I=%r, j=%d, degree %d has shape %r, expected %r"
                % (i_set, j, p, block.shape, (tgt, src))
            )
        return block

    def restriction(self, i_set: Sequence[int], j_set: Sequence[int], p: int) -> Matrix:
        """Composite restriction H^p(D_I) -> H^p(D_J) along sorted steps."""
        i_key, j_key = tuple(sorted(i_set)), tuple(sorted(j_set))
        if not set(i_key) <= set(j_key):
            raise ValueError("restriction requires I inside J")
        cache_key = (i_key, j_key, p)
        cached = self._restriction_cache.get(cache_key)
        if cached is not None:
            return cached
        src = self.dim(i_key, p)
        current = Matrix.identity(src)
        cur = i_key
        for j in sorted(set(j_key) - set(i_key)):
            if self.dim(cur, p) == 0:
                current = Matrix.zero(self.dim(j_key, p), src)
                break
            step = self._step(cur, j, p)
            current = step @ current
            cur = tuple(sorted(cur + (j,)))
        if current.shape != (self.dim(j_key, p), src):
            current = Matrix.zero(self.dim(j_key, p), src)
        self._restriction_cache[cache_key] = current
        return current

    def gysin(self, i_set: Sequence[int], i: int, p: int) -> Matrix:
        """Gysin map H^p(D_I) -> H^{p+2}(D_{I-i}) for i in I."""
        i_key = tuple(sorted(i_set))
        if i not in i_key:
            raise ValueError("Gysin index must lie in the component set")
        tgt_key = tuple(x for x in i_key if x != i)
        src, tgt = self.dim(i_key, p), self.dim(tgt_key, p + 2)
        if src == 0 or tgt == 0:
            return Matrix.zero(tgt, src)
        block = self.gysins.get((i_key, i), {}).get(p)
        if block is None:
            raise DatumError("missing Gysin map for I=%r, i=%d, degree %d" % (i_key, i, p))
        if block.shape != (tgt, src):
            raise DatumError(
                "Gysin map for I=%r, i=%d, degree %d has shape %r, expected %r"
                % (i_key, i, p, block.shape, (tgt, src))
            )
        return block

    def cup_entries(self, i_set: Sequence[int], p: int, p2: int) -> dict:
        return self.cups.get(tuple(sorted(i_set)), {}).get((p, p2), {})

    # -- validation ----------------------------------------------------------

    def validate(self) -> list[str]:
        """Functoriality of restrictions and cup-product axioms per stratum."""
        issues = []
        for i_key in self.subsets():
            remaining = [j for j in range(1, self.components + 1) if j not in i_key]
            for a_pos in range(len(remaining)):
                for b_pos in range(a_pos + 1, len(remaining)):
                    j1, j2 = remaining[a_pos], remaining[b_pos]
                    for p in self.degrees(i_key):
                        try:
                            via1 = self._compose_steps(i_key, (j1, j2), p)
                            via2 = self._compose_steps(i_key, (j2, j1), p)
                        except DatumError as err:
                            issues.append(str(err))
                            continue
                        if via1 != via2:
                            issues.append(
                                "restrictions from I=%r through %d and %d do not commute at degree %d"
                                % (i_key, j1, j2, p)
                            )
            issues.extend(self._check_cup(i_key))
        return issues

    def _compose_steps(self, i_key, js, p) -> Matrix:
        src = self.dim(i_key, p)
        cur, mat = i_key, Matrix.identity(src)
        for j in js:
            if self.dim(cur, p) == 0:
                tgt = tuple(sorted(set(i_key) | set(js)))
                return Matrix.zero(self.dim(tgt, p), src)
            mat = self._step(cur, j, p) @ mat
            cur = tuple(sorted(cur + (j,)))
        return mat

    def _cup_vec(self, i_key, p, a, p2, b) -> Sparse:
        out: Sparse = {}
        for c, v in self.cup_entries(i_key, p, p2).get((a, b), {}).items():
            out[c] = out.get(c, Fraction(0)) + Fraction(v)
        return {c: v for c, v in out.items() if v}

    def _check_cup(self, i_key) -> list[str]:
        issues = []
        degrees = self.degrees(i_key)
        basis = [(p, a) for p in degrees for a in range(self.dim(i_key, p))]
        for p, a in basis:
            for p2, b in basis:
                left = self._cup_vec(i_key, p, a, p2, b)
                right = self._cup_vec(i_key, p2, b, p, a)
                sign = (-1) ** (p * p2)
                if left != {c: sign * v for c, v in right.items()}:
                    issues.append(
                        "cup product on D_%r not graded-commutative at (%d,%d)x(%d,%d)"
                        % (i_key, p, a, p2, b)
                    )
        for p, a in basis:
            for p2, b in basis:
                ab = self._cup_vec(i_key, p, a, p2, b)
                for p3, c in basis:
                    left: Sparse = {}
                    for m, v in ab.items():
                        for t, w in self._cup_vec(i_key, p + p2, m, p3, c).items():
                            left[t] = left.get(t, Fraction(0)) + v * w
                    bc = self._cup_vec(i_key, p2, b, p3, c)
                    right: Sparse = {}
                    for m, v in bc.items():
                        for t, w in self._cup_vec(i_key, p, a, p2 + p3, m).items():
                            right[t] = right.get(t, Fraction(0)) + v * w
                    if {k: v for k, v in left.items() if v} != {k: v for k, v in right.items() if v}:
                        issues.append(
                            "cup product on D_%r not associative at (%d,%d),(%d,%d),(%d,%d)"
                            % (i_key, p, a, p2, b, p3, c)
                        )
        return issues


def negate_gysin_block(cd: CompactificationDatum, i_set, i: int, p: int) -> CompactificationDatum:
    """Copy of the datum with one degree block of one Gysin map negated."""
    gysins = {key: dict(blocks) for key, blocks in cd.gysins.items()}
    key = (tuple(sorted(i_set)), i)
    if key not in gysins or p not in gysins[key]:
        raise KeyError("no Gysin block to negate at %r degree %d" % (key, p))
    gysins[key][p] = -gysins[key][p]
    return CompactificationDatum(cd.components, cd.cohomology, cd.restrictions, gysins, cd.cups)


# -- the bigraded model ----------------------------------------------------


class BigradedModel:
    """A finite bigraded cdga: spaces M^k_q, differential, sparse product.

    `spaces` maps (k, q) to a tuple of basis labels; `diff[(k, q)]` is the
    matrix of d: M^k_q -> M^{k+1}_q; `products[((k,q),(k',q'))][(a, b)]`
    is the sparse result vector in M^{k+k'}_{q+q'}.
    """

    def __init__(
        self,
        spaces: Mapping[Bidegree, Sequence],
        diff: Mapping[Bidegree, Matrix],
        products: Mapping[tuple[Bidegree, Bidegree], Mapping],
    ):
        self.spaces = {kq: tuple(labels) for kq, labels in spaces.items() if labels}
        self.diff = dict(diff)
        self.products = {
            key: {ab: dict(vec) for ab, vec in table.items() if vec}
            for key, table in products.items()
        }

    def dim(self, kq: Bidegree) -> int:
        return len(self.spaces.get(kq, ()))

    def bidegrees(self) -> tuple[Bidegree, ...]:
        return tuple(sorted(self.spaces))

    def total_dimension(self) -> int:
        return sum(len(v) for v in self.spaces.values())

    def max_degree(self) -> int:
        return max((k for (k, _) in self.spaces), default=0)

    def weights(self) -> tuple[int, ...]:
        return tuple(sorted({q for (_, q) in self.spaces}))

    def differential(self, kq: Bidegree) -> Matrix:
        stored = self.diff.get(kq)
        if stored is not None:
            return stored
        k, q = kq
        return Matrix.zero(self.dim((k + 1, q)), self.dim(kq))

    def diff_vec(self, kq: Bidegree, vec: Mapping[int, Fraction]) -> Sparse:
        mat = self.differential(kq)
        out: Sparse = {}
        for j, c in vec.items():
            if c == 0:
                continue
            for i in range(mat.nrows):
                v = mat.rows[i][j]
                if v:
                    out[i] = out.get(i, Fraction(0)) + c * v
        return {i: v for i, v in out.items() if v}

    def mult_basis(self, kq1: Bidegree, a: int, kq2: Bidegree, b: int) -> Sparse:
        return dict(self.products.get((kq1, kq2), {}).get((a, b), {}))

    def mult_vec(self, kq1: Bidegree, v1: Mapping, kq2: Bidegree, v2: Mapping) -> Sparse:
        out: Sparse = {}
        table = self.products.get((kq1, kq2), {})
        for a, ca in v1.items():
            if ca == 0:
                continue
            for b, cb in v2.items():
                if cb == 0:
                    continue
                for c, v in table.get((a, b), {}).items():
                    out[c] = out.get(c, Fraction(0)) + ca * cb * v
        return {c: v for c, v in out.items() if v}


def build_model(cd: CompactificationDatum) -> BigradedModel:
    """Assemble the model of the complement from a compactification datum.

    The summand for (I, degree p) sits in bidegree (k, q) = (p + |I|,
    p + 2|I|); negative p never occurs, so degenerate summands are
    excluded structurally.  Raises DatumError when a required map is
    missing or the datum fails validation.
    """
    issues = cd.validate()
    if issues:
        raise DatumError("; ".join(issues))
    spaces: dict[Bidegree, list] = {}
    for i_key in cd.subsets():
        for p in cd.degrees(i_key):
            k, q = p + len(i_key), p + 2 * len(i_key)
            labels = spaces.setdefault((k, q), [])
            for j in range(cd.dim(i_key, p)):
                labels.append((i_key, p, j))
    index: dict[Bidegree, dict] = {
        kq: {lab: i for i, lab in enumerate(labels)} for kq, labels in spaces.items()
    }

    diff: dict[Bidegree, Matrix] = {}
    for kq, labels in spaces.items():
        k, q = kq
        target = spaces.get((k + 1, q))
        if not target:
            continue
        columns = []
        for (i_key, p, j) in labels:
            col = [Fraction(0)] * len(target)
            for i in i_key:
                rest = tuple(x for x in i_key if x != i)
                gys = cd.gysin(i_key, i, p)
                if gys.nrows == 0:
                    continue
                sign = (-1) ** q * shuffle_sign((i,), rest)
                for t in range(gys.nrows):
                    v = gys.rows[t][j]
                    if v:
                        pos = index[(k + 1, q)][(rest, p + 2, t)]
                        col[pos] += sign * v
            columns.append(col)
        diff[kq] = Matrix.from_columns(columns, nrows=len(target))

    products: dict[tuple[Bidegree, Bidegree], dict] = {}
    for kq1, labels1 in spaces.items():
        for kq2, labels2 in spaces.items():
            k3, q3 = kq1[0] + kq2[0], kq1[1] + kq2[1]
            target = spaces.get((k3, q3))
            if not target:
                continue
            table: dict = {}
            for a, (i1, p1, j1) in enumerate(labels1):
                for b, (i2, p2, j2) in enumerate(labels2):
                    if set(i1) & set(i2):
                        continue
                    union = tuple(sorted(i1 + i2))
                    sign = (-1) ** (len(i1) * kq2[1]) * shuffle_sign(i1, i2)
                    res1 = cd.restriction(i1, union, p1)
                    res2 = cd.restriction(i2, union, p2)
                    vec: Sparse = {}
                    for a2 in range(res1.nrows):
                        ca = res1.rows[a2][j1]
                        if ca == 0:
                            continue
                        for b2 in range(res2.nrows):
                            cb = res2.rows[b2][j2]
                            if cb == 0:
                                continue
                            for c, v in cd.cup_entries(union, p1, p2).get((a2, b2), {}).items():
                                pos = index[(k3, q3)][(union, p1 + p2, c)]
                                vec[pos] = vec.get(pos, Fraction(0)) + sign * ca * cb * v
                    vec = {c: v for c, v in vec.items() if v}
                    if vec:
                        table[(a, b)] = vec
            if table:
                products[(kq1, kq2)] = table
    return BigradedModel(spaces, diff, products)


# -- axioms and cohomology -------------------------------------------------


@dataclass(frozen=True)
class AxiomReport:
    violations: tuple[tuple[str, str], ...]

    @property
    def passed(self) -> bool:
        return not self.violations

    def axioms_failing(self) -> tuple[str, ...]:
        return tuple(sorted({name for name, _ in self.violations}))


def verify_cdga_axioms(model: BigradedModel) -> AxiomReport:
    """d o d = 0, Leibniz, associativity and graded commutativity,
    each as exact identities over all basis tuples."""
    violations: list[tuple[str, str]] = []

    for kq in model.bidegrees():
        k, q = kq
        second = model.differential((k + 1, q)) @ model.differential(kq)
        if not second.is_zero():
            violations.append(("d_squared", "d o d nonzero on M^%d_%d" % (k, q)))

    bidegs = model.bidegrees()
    for kq1 in bidegs:
        for kq2 in bidegs:
            for a in range(model.dim(kq1)):
                for b in range(model.dim(kq2)):
                    prod = model.mult_basis(kq1, a, kq2, b)
                    lhs = model.diff_vec((kq1[0] + kq2[0], kq1[1] + kq2[1]), prod)
                    da = model.diff_vec(kq1, {a: Fraction(1)})
                    rhs = model.mult_vec((kq1[0] + 1, kq1[1]), da, kq2, {b: Fraction(1)})
                    db = model.diff_vec(kq2, {b: Fraction(1)})
                    sign = (-1) ** kq1[0]
                    for c, v in model.mult_vec(kq1, {a: Fraction(1)}, (kq2[0] + 1, kq2[1]), db).items():
                        rhs[c] = rhs.get(c, Fraction(0)) + sign * v
                    rhs = {c: v for c, v in rhs.items() if v}
                    if lhs != rhs:
                        violations.append(
                            (
                                "leibniz",
                                "Leibniz fails for basis pair (%r, %d) x (%r, %d)"
                                % (kq1, a, kq2, b),
                            )
                        )

    for kq1 in bidegs:
        for kq2 in bidegs:
            for a in range(model.dim(kq1)):
                for b in range(model.dim(kq2)):
                    ab = model.mult_basis(kq1, a, kq2, b)
                    ba = model.mult_basis(kq2, b, kq1, a)
                    sign = (-1) ** (kq1[0] * kq2[0])
                    if ab != {c: sign * v for c, v in ba.items()}:
                        violations.append(
                            (
                                "graded_commutativity",
                                "commutativity fails for (%r, %d) x (%r, %d)" % (kq1, a, kq2, b),
                            )
                        )

    for kq1 in bidegs:
        for kq2 in bidegs:
            kq12 = (kq1[0] + kq2[0], kq1[1] + kq2[1])
            for kq3 in bidegs:
                kq23 = (kq2[0] + kq3[0], kq2[1] + kq3[1])
                for a in range(model.dim(kq1)):
                    for b in range(model.dim(kq2)):
                        ab = model.mult_basis(kq1, a, kq2, b)
                        for c in range(model.dim(kq3)):
                            left = model.mult_vec(kq12, ab, kq3, {c: Fraction(1)})
                            bc = model.mult_basis(kq2, b, kq3, c)
                            right = model.mult_vec(kq1, {a: Fraction(1)}, kq23, bc)
                            if left != right:
                                violations.append(
                                    (
                                        "associativity",
                                        "associativity fails for (%r,%d),(%r,%d),(%r,%d)"
                                        % (kq1, a, kq2, b, kq3, c),
                                    )
                                )
    return AxiomReport(tuple(violations))


def cohomology_of_model(model: BigradedModel) -> dict[Bidegree, int]:
    """dim H^k(M_q) per (degree, weight), nonzero entries only."""
    out: dict[Bidegree, int] = {}
    for kq in model.bidegrees():
        k, q = kq
        d_out = model.differential(kq)
        d_in = model.differential((k - 1, q))
        h = model.dim(kq) - d_out.rank() - d_in.rank()
        if h:
            out[kq] = h
    return out


def _independent_columns(vectors: list, length: int) -> list:
    chosen: list = []
    for v in vectors:
        candidate = Matrix.from_columns(chosen + [v], nrows=length)
        if candidate.rank() == len(chosen) + 1:
            chosen.append(v)
    return chosen


class _ColumnCohomology:
    """Representatives and quotient coordinates for one (k, q) column."""

    def __init__(self, model: BigradedModel, kq: Bidegree):
        n = model.dim(kq)
        k, q = kq
        d_out = model.differential(kq)
        cocycles = [list(v) for v in d_out.right_kernel()] if n else []
        d_in = model.differential((k - 1, q))
        boundaries = [list(d_in.column(j)) for j in range(d_in.ncols)]
        self.length = n
        self.boundary_basis = _independent_columns(boundaries, n)
        reps: list = []
        for v in cocycles:
            candidate = Matrix.from_columns(self.boundary_basis + reps + [v], nrows=n)
            if candidate.rank() == len(self.boundary_basis) + len(reps) + 1:
                reps.append(v)
        self.representatives = reps
        self._solve_matrix = Matrix.from_columns(self.boundary_basis + reps, nrows=n)

    @property
    def dim(self) -> int:
        return len(self.representatives)

    def coordinates(self, vec: Sequence[Fraction]) -> tuple[Fraction, ...]:
        if self.length == 0:
            return ()
        sol = self._solve_matrix.solve(list(vec))
        if sol is None:
            raise ValueError("vector is not a cocycle class representative")
        return tuple(sol[len(self.boundary_basis):])


# -- morphisms and quasi-isomorphisms --------------------------------------


class CdgaMorphism:
    """A weight-preserving map of bigraded models, given by blocks per
    bidegree; missing blocks are zero."""

    def __init__(self, source: BigradedModel, target: BigradedModel, blocks: Mapping[Bidegree, Matrix]):
        self.source = source
        self.target = target
        self.blocks = dict(blocks)

    def block(self, kq: Bidegree) -> Matrix:
        stored = self.blocks.get(kq)
        if stored is not None:
            return stored
        return Matrix.zero(self.target.dim(kq), self.source.dim(kq))

    def apply(self, kq: Bidegree, vec: Mapping[int, Fraction]) -> Sparse:
        mat = self.block(kq)
        out: Sparse = {}
        for j, c in vec.items():
            if c == 0:
                continue
            for i in range(mat.nrows):
                v = mat.rows[i][j]
                if v:
                    out[i] = out.get(i, Fraction(0)) + c * v
        return {i: v for i, v in out.items() if v}

    def violations(self) -> list[str]:
        out = []
        for kq, mat in self.blocks.items():
            want = (self.target.dim(kq), self.source.dim(kq))
            if mat.shape != want:
                out.append("block at %r has shape %r, expected %r" % (kq, mat.shape, want))
        if out:
            return out
        degrees = set(self.source.bidegrees()) | set(self.target.bidegrees())
        for kq in sorted(degrees):
            k, q = kq
            left = self.block((k + 1, q)) @ self.source.differential(kq)
            right = self.target.differential(kq) @ self.block(kq)
            if left != right:
                out.append("differential compatibility fails at %r" % (kq,))
        for kq1 in self.source.bidegrees():
            for kq2 in self.source.bidegrees():
                kq3 = (kq1[0] + kq2[0], kq1[1] + kq2[1])
                for a in range(self.source.dim(kq1)):
                    fa = self.apply(kq1, {a: Fraction(1)})
                    for b in range(self.source.dim(kq2)):
                        lhs = self.apply(kq3, self.source.mult_basis(kq1, a, kq2, b))
                        fb = self.apply(kq2, {b: Fraction(1)})
                        rhs = self.target.mult_vec(kq1, fa, kq2, fb)
                        if lhs != rhs:
                            out.append(
                                "product compatibility fails for (%r, %d) x (%r, %d)"
                                % (kq1, a, kq2, b)
                            )
        return out


@dataclass(frozen=True)
class QuasiIsoVerdict:
    """Exact ranks of the induced maps on cohomology, per total degree."""

    r: float
    ok: bool
    per_degree: tuple[tuple[int, int, int, int], ...]  # (k, h_src, h_tgt, rank)
    failures: tuple[str, ...]


def check_r_quasi_iso(f: CdgaMorphism, r: float) -> QuasiIsoVerdict:
    """Verdict: induced cohomology maps are isomorphisms for k <= r and
    injective for k = r + 1.  Raises MorphismError when f is not a cdga
    morphism, naming the violated identity."""
    problems = f.violations()
    if problems:
        raise MorphismError(problems[0])
    weights = sorted({q for (_, q) in set(f.source.bidegrees()) | set(f.target.bidegrees())})
    max_k = max(
        [k for (k, _) in f.source.bidegrees()] + [k for (k, _) in f.target.bidegrees()],
        default=0,
    )
    per_degree = []
    failures = []
    for k in range(max_k + 2):
        h_src = h_tgt = rank_total = 0
        iso = True
        injective = True
        for q in weights:
            src = _ColumnCohomology(f.source, (k, q))
            tgt = _ColumnCohomology(f.target, (k, q))
            h_src += src.dim
            h_tgt += tgt.dim
            if src.dim == 0 and tgt.dim == 0:
                continue
            cols = []
            for rep in src.representatives:
                image = f.block((k, q)).apply(rep)
                cols.append(list(tgt.coordinates(image)))
            induced = Matrix.from_columns(cols, nrows=tgt.dim)
            rk = induced.rank()
            rank_total += rk
            if rk != src.dim:
                injective = False
            if not (rk == src.dim == tgt.dim):
                iso = False
        per_degree.append((k, h_src, h_tgt, rank_total))
        if k <= r and not iso:
            failures.append("not an isomorphism on H^%d" % k)
        if r != INF and k == r + 1 and not injective:
            failures.append("not injective on H^%d" % k)
    return QuasiIsoVerdict(r, not failures, tuple(per_degree), tuple(failures))


# -- formality witnesses ------------------------------------------------------


@dataclass(frozen=True)
class FormalityWitness:
    """A zero-differential sub- or quotient-cdga with its comparison map."""

    kind: str
    model: BigradedModel
    morphism: CdgaMorphism
    quasi_iso: QuasiIsoVerdict


def extract_kernel_model(model: BigradedModel, r: float) -> FormalityWitness:
    """Sub-cdga K^k = ker(M^k_{2k} -> M^{k+1}_{2k}) in the weight-2k regime.

    Requires H^k(M_q) = 0 for q != 2k and k <= r; refuses otherwise with
    the witnesses.  The inclusion into the model is checked to be a cdga
    morphism and an r-quasi-isomorphism.
    """
    cohom = cohomology_of_model(model)
    bad = sorted(kq for kq, h in cohom.items() if h and kq[1] != 2 * kq[0] and kq[0] <= r)
    if bad:
        raise ModelPurityError("kernel model", bad)
    kernels: dict[int, list] = {}
    for k in range(model.max_degree() + 1):
        kq = (k, 2 * k)
        if model.dim(kq) == 0:
            continue
        basis = [list(v) for v in model.differential(kq).right_kernel()]
        if basis:
            kernels[k] = basis
    spaces = {
        (k, 2 * k): tuple("K^%d_%d" % (k, j) for j in range(len(basis)))
        for k, basis in kernels.items()
    }
    solve_mats = {
        k: Matrix.from_columns(basis, nrows=model.dim((k, 2 * k)))
        for k, basis in kernels.items()
    }
    products: dict = {}
    for k1, basis1 in kernels.items():
        for k2, basis2 in kernels.items():
            k3 = k1 + k2
            if k3 not in kernels:
                # the product of cocycles must vanish if K^{k3} is trivial
                for a, va in enumerate(basis1):
                    for b, vb in enumerate(basis2):
                        prod = model.mult_vec(
                            (k1, 2 * k1), dict(enumerate(va)), (k2, 2 * k2), dict(enumerate(vb))
                        )
                        if prod:
                            raise ClosureError(
                                "kernel product escapes at K^%d x K^%d pair (%d, %d)"
                                % (k1, k2, a, b)
                            )
                continue
            table: dict = {}
            for a, va in enumerate(basis1):
                for b, vb in enumerate(basis2):
                    prod = model.mult_vec(
                        (k1, 2 * k1), dict(enumerate(va)), (k2, 2 * k2), dict(enumerate(vb))
                    )
                    dense = [Fraction(0)] * model.dim((k3, 2 * k3))
                    for c, v in prod.items():
                        dense[c] = v
                    sol = solve_mats[k3].solve(dense)
                    if sol is None:
                        raise ClosureError(
                            "kernel product escapes at K^%d x K^%d pair (%d, %d)"
                            % (k1, k2, a, b)
                        )
                    vec = {c: v for c, v in enumerate(sol) if v}
                    if vec:
                        table[(a, b)] = vec
            if table:
                products[((k1, 2 * k1), (k2, 2 * k2))] = table
    witness_model = BigradedModel(spaces, {}, products)
    blocks = {(k, 2 * k): solve_mats[k] for k in kernels}
    inclusion = CdgaMorphism(witness_model, model, blocks)
    verdict = check_r_quasi_iso(inclusion, r)
    return FormalityWitness("kernel", witness_model, inclusion, verdict)


def extract_cokernel_model(model: BigradedModel, r: float) -> FormalityWitness:
    """Quotient cdga C^k = M^k_k / d(M^{k-1}_k) in the weight-k regime.

    Requires H^k(M_q) = 0 for q != k and k <= r + 1.  The projection from
    the model is checked to be a cdga morphism and an r-quasi-isomorphism;
    products of boundaries with anything must project to zero, otherwise
    the induced product is ill-defined and extraction fails.
    """
    cohom = cohomology_of_model(model)
    bound = r if r == INF else r + 1
    bad = sorted(kq for kq, h in cohom.items() if h and kq[1] != kq[0] and kq[0] <= bound)
    if bad:
        raise ModelPurityError("cokernel model", bad)
    data: dict[int, _ColumnCohomology] = {}
    for k in range(model.max_degree() + 1):
        kq = (k, k)
        if model.dim(kq) == 0:
            continue
        # M^{k+1}_k vanishes structurally, so every vector is a cocycle
        data[k] = _ColumnCohomology(model, kq)
    spaces = {
        (k, k): tuple("C^%d_%d" % (k, j) for j in range(col.dim))
        for k, col in data.items()
        if col.dim
    }
    projections: dict[Bidegree, Matrix] = {}
    for k, col in data.items():
        if not col.dim:
            continue
        n = model.dim((k, k))
        cols = []
        for j in range(n):
            e = [Fraction(0)] * n
            e[j] = Fraction(1)
            cols.append(list(col.coordinates(e)))
        projections[(k, k)] = Matrix.from_columns(cols, nrows=col.dim)

    # well-definedness: boundaries must multiply into boundaries
    for k, col in data.items():
        for u in col.boundary_basis:
            for k2, col2 in data.items():
                k3 = k + k2
                if k3 not in data or not data[k3].dim:
                    continue
                n2 = model.dim((k2, k2))
                for j in range(n2):
                    prod = model.mult_vec(
                        (k, k), dict(enumerate(u)), (k2, k2), {j: Fraction(1)}
                    )
                    dense = [Fraction(0)] * model.dim((k3, k3))
                    for c, v in prod.items():
                        dense[c] = v
                    if any(x for x in data[k3].coordinates(dense)):
                        raise ClosureError(
                            "boundary times basis vector survives in C^%d (from C^%d x C^%d)"
                            % (k3, k, k2)
                        )

    products: dict = {}
    for k1, col1 in data.items():
        for k2, col2 in data.items():
            k3 = k1 + k2
            if not col1.dim or not col2.dim or k3 not in data or not data[k3].dim:
                continue
            table: dict = {}
            for a, ra in enumerate(col1.representatives):
                for b, rb in enumerate(col2.representatives):
                    prod = model.mult_vec(
                        (k1, k1), dict(enumerate(ra)), (k2, k2), dict(enumerate(rb))
                    )
                    dense = [Fraction(0)] * model.dim((k3, k3))
                    for c, v in prod.items():
                        dense[c] = v
                    vec = {c: v for c, v in enumerate(data[k3].coordinates(dense)) if v}
                    if vec:
                        table[(a, b)] = vec
            if table:
                products[((k1, k1), (k2, k2))] = table
    witness_model = BigradedModel(spaces, {}, products)
    surjection = CdgaMorphism(model, witness_model, projections)
    verdict = check_r_quasi_iso(surjection, r)
    return FormalityWitness("cokernel", witness_model, surjection, verdict)


# -- builders -----------------------------------------------------------------


def _unit_cup(dims: Mapping[int, int]) -> dict:
    """Cup table where degree 0 is one-dimensional and acts as the unit."""
    table: dict = {}
    for p, d in dims.items():
        if d == 0:
            continue
        table[(0, p)] = {(0, a): {a: Fraction(1)} for a in range(d)}
        if p != 0:
            table[(p, 0)] = {(a, 0): {a: Fraction(1)} for a in range(d)}
    return table


def builder_point() -> CompactificationDatum:
    """X a point, no divisor: the unit for Kunneth products."""
    return CompactificationDatum(0, {(): {0: 1}}, {}, {}, {(): _unit_cup({0: 1})})


def builder_projective_line_marked(s: int) -> CompactificationDatum:
    """The projective line with s disjoint marked points.

    All strata are the line or points; the Gysin map of each point sends
    its class to the degree-2 generator, restrictions in degree 0 are
    identities, and intersections of two or more points are empty.
    """
    if s < 0:
        raise ValueError("number of marked points must be nonnegative")
    cohomology: dict = {(): {0: 1, 2: 1}}
    restrictions: dict = {}
    gysins: dict = {}
    cups: dict = {(): _unit_cup({0: 1, 2: 1})}
    for i in range(1, s + 1):
        cohomology[(i,)] = {0: 1}
        restrictions[((), i)] = {0: Matrix([[1]])}
        gysins[((i,), i)] = {0: Matrix([[1]])}
        cups[(i,)] = _unit_cup({0: 1})
    return CompactificationDatum(s, cohomology, restrictions, gysins, cups)


def _tensor_basis(cd1, cd2, i1, i2, p) -> list[tuple[int, int, int, int]]:
    out = []
    for p1 in cd1.degrees(i1):
        p2 = p - p1
        d1, d2 = cd1.dim(i1, p1), cd2.dim(i2, p2)
        for a1 in range(d1):
            for a2 in range(d2):
                out.append((p1, p2, a1, a2))
    return out


def kunneth_product(cd1: CompactificationDatum, cd2: CompactificationDatum) -> CompactificationDatum:
    """Product datum: divisor components of the first factor crossed with
    the second variety, then the first variety crossed with components of
    the second.  Cohomology, restrictions, Gysin maps and cups are graded
    tensors with Koszul signs."""
    s1, s2 = cd1.components, cd2.components

    def split(i_key):
        left = tuple(i for i in i_key if i <= s1)
        right = tuple(i - s1 for i in i_key if i > s1)
        return left, right

    subsets = []
    for i1 in cd1.subsets():
        for i2 in cd2.subsets():
            key = tuple(sorted(i1 + tuple(j + s1 for j in i2)))
            subsets.append((key, i1, i2))

    cohomology: dict = {}
    basis_cache: dict = {}
    for key, i1, i2 in subsets:
        dims: dict[int, int] = {}
        degs1, degs2 = cd1.degrees(i1), cd2.degrees(i2)
        for p1 in degs1:
            for p2 in degs2:
                d = cd1.dim(i1, p1) * cd2.dim(i2, p2)
                if d:
                    dims[p1 + p2] = dims.get(p1 + p2, 0) + d
        if dims:
            cohomology[key] = dims
            for p in dims:
                basis_cache[(key, p)] = _tensor_basis(cd1, cd2, i1, i2, p)

    def basis(key, p):
        return basis_cache.get((key, p), [])

    restrictions: dict = {}
    gysins: dict = {}
    for key, i1, i2 in subsets:
        if key not in cohomology:
            continue
        for j in range(1, s1 + s2 + 1):
            if j in key:
                continue
            tgt_key = tuple(sorted(key + (j,)))
            if tgt_key not in cohomology:
                continue
            t1, t2 = split(tgt_key)
            blocks: dict[int, Matrix] = {}
            for p in cohomology[key]:
                src_basis = basis(key, p)
                tgt_basis = basis(tgt_key, p)
                if not src_basis or not tgt_basis:
                    continue
                rows = [[Fraction(0)] * len(src_basis) for _ in tgt_basis]
                if j <= s1:
                    step = {
                        p1: cd1.restriction(i1, t1, p1)
                        for p1 in cd1.degrees(i1)
                    }
                    for col, (p1, p2, a1, a2) in enumerate(src_basis):
                        mat = step[p1]
                        for row, (q1, q2, b1, b2) in enumerate(tgt_basis):
                            if q1 == p1 and q2 == p2 and b2 == a2 and mat.nrows > b1:
                                rows[row][col] = mat.rows[b1][a1]
                else:
                    step = {
                        p2: cd2.restriction(i2, t2, p2)
                        for p2 in cd2.degrees(i2)
                    }
                    for col, (p1, p2, a1, a2) in enumerate(src_basis):
                        mat = step[p2]
                        for row, (q1, q2, b1, b2) in enumerate(tgt_basis):
                            if q1 == p1 and q2 == p2 and b1 == a1 and mat.nrows > b2:
                                rows[row][col] = mat.rows[b2][a2]
                blocks[p] = Matrix(rows, ncols=len(src_basis))
            if blocks:
                restrictions[(key, j)] = blocks
        for i in key:
            tgt_key = tuple(x for x in key if x != i)
            if tgt_key not in cohomology:
                continue
            t1, t2 = split(tgt_key)
            blocks = {}
            for p in cohomology[key]:
                src_basis = basis(key, p)
                tgt_basis = basis(tgt_key, p + 2)
                if not src_basis or not tgt_basis:
                    continue
                rows = [[Fraction(0)] * len(src_basis) for _ in tgt_basis]
                if i <= s1:
                    for col, (p1, p2, a1, a2) in enumerate(src_basis):
                        mat = cd1.gysin(i1, i, p1)
                        for row, (q1, q2, b1, b2) in enumerate(tgt_basis):
                            if q1 == p1 + 2 and q2 == p2 and b2 == a2 and mat.nrows > b1:
                                rows[row][col] = mat.rows[b1][a1]
                else:
                    for col, (p1, p2, a1, a2) in enumerate(src_basis):
                        mat = cd2.gysin(i2, i - s1, p2)
                        for row, (q1, q2, b1, b2) in enumerate(tgt_basis):
                            if q1 == p1 and q2 == p2 + 2 and b1 == a1 and mat.nrows > b2:
                                rows[row][col] = mat.rows[b2][a2]
                blocks[p] = Matrix(rows, ncols=len(src_basis))
            if blocks:
                gysins[(key, i)] = blocks

    cups: dict = {}
    for key, i1, i2 in subsets:
        if key not in cohomology:
            continue
        table: dict = {}
        degrees = sorted(cohomology[key])
        for p in degrees:
            for p2 in degrees:
                entries: dict = {}
                for a, (pa1, pa2, a1, a2) in enumerate(basis(key, p)):
                    for b, (pb1, pb2, b1, b2) in enumerate(basis(key, p2)):
                        sign = (-1) ** (pa2 * pb1)
                        c1 = cd1.cup_entries(i1, pa1, pb1).get((a1, b1), {})
                        c2 = cd2.cup_entries(i2, pa2, pb2).get((a2, b2), {})
                        if not c1 or not c2:
                            continue
                        vec: Sparse = {}
                        target_basis = basis(key, p + p2)
                        lookup = {lab: idx for idx, lab in enumerate(target_basis)}
                        for t1_idx, v1 in c1.items():
                            for t2_idx, v2 in c2.items():
                                pos = lookup.get((pa1 + pb1, pa2 + pb2, t1_idx, t2_idx))
                                if pos is None:
                                    continue
                                vec[pos] = vec.get(pos, Fraction(0)) + sign * v1 * v2
                        vec = {c: v for c, v in vec.items() if v}
                        if vec:
                            entries[(a, b)] = vec
                if entries:
                    table[(p, p2)] = entries
        if table:
            cups[key] = table
    return CompactificationDatum(s1 + s2, cohomology, restrictions, gysins, cups)


# -- localization ------------------------------------------------------------


@dataclass(frozen=True)
class LocalizedBetti:
    """Graded dimensions of the complement of a point, with weights."""

    dims: tuple[int, ...]
    weights: tuple[int, ...]


def localization_betti(betti_of_x: Sequence[int], d: int) -> LocalizedBetti:
    """Betti numbers of X minus a point from those of compact X.

    The localization sequence keeps b_k for k <= 2d - 1 and kills the top
    class, because the Gysin map of the point hits the fundamental class;
    each degree is then pure of weight k.
    """
    dims = tuple(int(b) for b in betti_of_x)
    if d < 1:
        raise ValueError("complex dimension must be at least 1")
    if len(dims) != 2 * d + 1:
        raise ValueError("expected graded dimensions up to degree 2d")
    if any(b < 0 for b in dims):
        raise ValueError("negative graded dimension")
    if dims[0] != 1 or dims[-1] != 1:
        raise ValueError("need b_0 = 1 and b_{2d} = 1 for a connected compact variety")
    out = dims[:-1] + (0,)
    return LocalizedBetti(out, tuple(range(len(out))))
