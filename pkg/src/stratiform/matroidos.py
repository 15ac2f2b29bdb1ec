"""Linear matroids, lattices of flats, and Orlik-Solomon algebras.

The matroid of a list of rational vectors drives everything: flats are
enumerated by closure, the Moebius function is computed by the defining
recursion, and the Orlik-Solomon algebra is realized on its no-broken-
circuit basis with straightening along circuit boundary relations.
Affine intersection posets of hyperplane arrangements live here too,
since their local data are matroids of normal vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from stratiform.exactalg import Matrix, vector

OSElement = dict[tuple[int, ...], Fraction]


class LinearMatroid:
    """Matroid of a multiset of rational vectors.

    Parallel and repeated vectors are kept as distinct elements; the rank
    of a subset is the matrix rank of the corresponding vectors.
    """

    def __init__(self, vectors: Iterable[Sequence], labels: Sequence[int] | None = None):
        vecs = tuple(vector(v) for v in vectors)
        if vecs:
            width = len(vecs[0])
            if any(len(v) != width for v in vecs):
                raise ValueError("vectors of unequal length")
            self.ambient_dim = width
        else:
            self.ambient_dim = 0
        self.vectors = vecs
        self.labels = tuple(labels) if labels is not None else tuple(range(len(vecs)))
        if len(self.labels) != len(vecs):
            raise ValueError("one label per vector required")
        self._rank_cache: dict[frozenset[int], int] = {}
        self._circuits: tuple[frozenset[int], ...] | None = None

    @property
    def size(self) -> int:
        return len(self.vectors)

    @property
    def ground(self) -> range:
        return range(self.size)

    def rank_of(self, subset: Iterable[int]) -> int:
        key = frozenset(subset)
        cached = self._rank_cache.get(key)
        if cached is None:
            rows = [list(self.vectors[i]) for i in sorted(key)]
            cached = Matrix(rows, ncols=self.ambient_dim).rank() if rows else 0
            self._rank_cache[key] = cached
        return cached

    @property
    def full_rank(self) -> int:
        return self.rank_of(self.ground)

    def is_independent(self, subset: Iterable[int]) -> bool:
        subset = frozenset(subset)
        return self.rank_of(subset) == len(subset)

    def closure(self, subset: Iterable[int]) -> frozenset[int]:
        subset = frozenset(subset)
        r = self.rank_of(subset)
        return frozenset(
            e for e in self.ground
            if e in subset or self.rank_of(subset | {e}) == r
        )

    def circuits(self) -> tuple[frozenset[int], ...]:
        """Minimal dependent subsets; circuit size is at most rank + 1."""
        if self._circuits is None:
            found: list[frozenset[int]] = []
            for size in range(1, self.full_rank + 2):
                for combo in combinations(self.ground, size):
                    s = frozenset(combo)
                    if any(c <= s for c in found):
                        continue
                    if not self.is_independent(s):
                        found.append(s)
            self._circuits = tuple(found)
        return self._circuits


def build_matroid(vectors: Iterable[Sequence], labels: Sequence[int] | None = None) -> LinearMatroid:
    return LinearMatroid(vectors, labels)


# -- lattice of flats ---------------------------------------------------


class FlatLattice:
    """All flats of a matroid with ranks, covers and Moebius values."""

    def __init__(self, matroid: LinearMatroid):
        self.matroid = matroid
        bottom = matroid.closure(())
        flats = {bottom}
        frontier = [bottom]
        while frontier:
            new = []
            for f in frontier:
                for e in matroid.ground:
                    if e in f:
                        continue
                    g = matroid.closure(f | {e})
                    if g not in flats:
                        flats.add(g)
                        new.append(g)
            frontier = new
        self.flats = tuple(sorted(flats, key=lambda f: (matroid.rank_of(f), sorted(f))))
        self.rank_of = {f: matroid.rank_of(f) for f in self.flats}
        self.bottom = bottom
        self.top = self.flats[-1] if self.flats else bottom
        self.mobius = self._mobius()
        self.covers = tuple(
            (f, g)
            for f in self.flats
            for g in self.flats
            if f < g and self.rank_of[g] == self.rank_of[f] + 1
        )

    @property
    def rank(self) -> int:
        return self.rank_of[self.top]

    def flats_of_rank(self, k: int) -> tuple[frozenset[int], ...]:
        return tuple(f for f in self.flats if self.rank_of[f] == k)

    def _mobius(self) -> dict[frozenset[int], int]:
        mob: dict[frozenset[int], int] = {}
        for f in self.flats:  # sorted by rank, so all g < f come first
            if f == self.bottom:
                mob[f] = 1
            else:
                mob[f] = -sum(mob[g] for g in self.flats if g < f)
        return mob


def flat_lattice(matroid: LinearMatroid) -> FlatLattice:
    return FlatLattice(matroid)


def local_component_dims(lattice: FlatLattice) -> dict[frozenset[int], int]:
    """Dimension of the local component at each flat: |mu(bottom, flat)|."""
    return {f: abs(m) for f, m in lattice.mobius.items()}


def characteristic_polynomial(lattice: FlatLattice) -> tuple[int, ...]:
    """Coefficients, ascending in t, of sum_X mu(X) t^(rank - rank X)."""
    r = lattice.rank
    coeffs = [0] * (r + 1)
    for f in lattice.flats:
        coeffs[r - lattice.rank_of[f]] += lattice.mobius[f]
    return tuple(coeffs)


def whitney_numbers(lattice: FlatLattice) -> tuple[int, ...]:
    """|w_k| for k = 0..rank: unsigned sums of mu over flats of rank k."""
    r = lattice.rank
    out = [0] * (r + 1)
    for f in lattice.flats:
        out[lattice.rank_of[f]] += abs(lattice.mobius[f])
    return tuple(out)


# -- Orlik-Solomon algebra ----------------------------------------------


def shuffle_sign_tuples(a: Sequence[int], b: Sequence[int]) -> int:
    """Sign of the permutation sorting (a ascending, b ascending) together."""
    inversions = sum(1 for x in a for y in b if x > y)
    return -1 if inversions % 2 else 1


def nbc_basis(
    matroid: LinearMatroid, order: Sequence[int] | None = None
) -> dict[int, tuple[tuple[int, ...], ...]]:
    """No-broken-circuit subsets graded by size.

    `order` is a precedence list of element ids (default: input order);
    a broken circuit is a circuit minus its first element in that order.
    Monomials are returned as id tuples sorted ascending by id.
    """
    order = tuple(order) if order is not None else tuple(matroid.ground)
    if sorted(order) != list(matroid.ground):
        raise ValueError("order must be a permutation of the ground set")
    position = {e: i for i, e in enumerate(order)}
    broken = [
        frozenset(c) - {min(c, key=position.__getitem__)}
        for c in matroid.circuits()
    ]
    out: dict[int, list[tuple[int, ...]]] = {0: [()]}

    def extend(current: tuple[int, ...], current_set: frozenset[int]):
        start = current[-1] + 1 if current else 0
        for e in range(start, matroid.size):
            cand = current_set | {e}
            if not matroid.is_independent(cand):
                continue
            if any(b <= cand for b in broken):
                continue
            mono = current + (e,)
            out.setdefault(len(mono), []).append(mono)
            extend(mono, cand)

    extend((), frozenset())
    return {k: tuple(sorted(v)) for k, v in out.items()}


class OSAlgebra:
    """Orlik-Solomon algebra on the NBC basis of a linear matroid.

    Elements are dicts mapping ascending id tuples to coefficients.
    Products are straightened via the circuit boundary relations toward
    lexicographically smaller monomials; monomials with dependent support
    vanish.
    """

    def __init__(self, matroid: LinearMatroid):
        self.matroid = matroid
        self.nbc = nbc_basis(matroid)
        self._nbc_sets = {frozenset(m) for ms in self.nbc.values() for m in ms}
        self._reduce_cache: dict[tuple[int, ...], OSElement] = {}

    def degree_dims(self) -> tuple[int, ...]:
        top = max(self.nbc)
        return tuple(len(self.nbc.get(k, ())) for k in range(top + 1))

    def local_dims(self) -> dict[frozenset[int], int]:
        """Number of NBC monomials whose support closes to each flat."""
        lattice = flat_lattice(self.matroid)
        counts = {f: 0 for f in lattice.flats}
        for monos in self.nbc.values():
            for m in monos:
                counts[self.matroid.closure(m)] += 1
        return counts

    def _reduce(self, mono: tuple[int, ...]) -> OSElement:
        """Expand a monomial with independent ascending support in the NBC basis."""
        if frozenset(mono) in self._nbc_sets:
            return {mono: Fraction(1)}
        cached = self._reduce_cache.get(mono)
        if cached is not None:
            return dict(cached)
        support = frozenset(mono)
        broken = None
        circuit = None
        for c in self.matroid.circuits():
            b = frozenset(c) - {min(c)}
            if b <= support:
                broken, circuit = b, sorted(c)
                break
        assert broken is not None, "non-NBC independent set must contain a broken circuit"
        rest = tuple(e for e in mono if e not in broken)
        sgn_br = shuffle_sign_tuples(sorted(broken), rest)
        result: OSElement = {}
        for j in range(1, len(circuit)):
            dropped = circuit[:j] + circuit[j + 1:]
            term_support = frozenset(dropped) | frozenset(rest)
            if len(term_support) < len(dropped) + len(rest):
                continue  # overlap kills the term
            if not self.matroid.is_independent(term_support):
                continue
            sign = (-1) ** (j + 1) * sgn_br * shuffle_sign_tuples(dropped, rest)
            term = tuple(sorted(term_support))
            for nbc_mono, coeff in self._reduce(term).items():
                result[nbc_mono] = result.get(nbc_mono, Fraction(0)) + sign * coeff
        result = {m: c for m, c in result.items() if c != 0}
        self._reduce_cache[mono] = dict(result)
        return result

    def reduce_monomial(self, mono: Sequence[int]) -> OSElement:
        """Normal form of e_mono, for mono a tuple of distinct ids (any order)."""
        mono = tuple(mono)
        if len(set(mono)) != len(mono):
            return {}
        ascending = tuple(sorted(mono))
        sign = _permutation_sign(mono)
        if not self.matroid.is_independent(frozenset(mono)):
            return {}
        return {m: sign * c for m, c in self._reduce(ascending).items()}

    def multiply(self, a: Mapping, b: Mapping) -> OSElement:
        result: OSElement = {}
        for ma, ca in a.items():
            for mb, cb in b.items():
                if set(ma) & set(mb):
                    continue
                sign = shuffle_sign_tuples(ma, mb)
                merged = tuple(sorted(ma + mb))
                for m, c in self.reduce_monomial(merged).items():
                    result[m] = result.get(m, Fraction(0)) + sign * Fraction(ca) * Fraction(cb) * c
        return {m: c for m, c in result.items() if c != 0}


def _permutation_sign(seq: Sequence[int]) -> int:
    inversions = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inversions += 1
    return -1 if inversions % 2 else 1


def os_algebra(matroid: LinearMatroid) -> OSAlgebra:
    return OSAlgebra(matroid)


def os_product(algebra: OSAlgebra, a: Mapping, b: Mapping) -> OSElement:
    return algebra.multiply(a, b)


# -- affine intersection posets ------------------------------------------


@dataclass(frozen=True)
class AffineFlat:
    """A nonempty intersection of hyperplanes, canonically keyed.

    `key` is the reduced row echelon form of the augmented system [A | b]
    cutting the flat out; `hyperplanes` lists the input hyperplanes that
    contain it.
    """

    key: tuple[tuple[Fraction, ...], ...]
    codim: int
    dim: int
    hyperplanes: frozenset[int]

    @property
    def name(self) -> str:
        if not self.key:
            return "ambient"
        return ";".join(
            "(%s|%s)" % (",".join(str(x) for x in row[:-1]), row[-1]) for row in self.key
        )


class AffinePoset:
    """Intersection poset of an affine hyperplane arrangement.

    Ordered by reverse inclusion with the ambient space at the bottom.
    Every stratum is an affine space: cohomology is one dimension in
    degree 0, weight 0.
    """

    def __init__(self, ambient_dim: int, flats: Sequence[AffineFlat]):
        self.ambient_dim = ambient_dim
        self.flats = tuple(sorted(flats, key=lambda f: (f.codim, f.key)))
        self._index = {f.key: i for i, f in enumerate(self.flats)}
        self.mobius = self._mobius()
        n = len(self.flats)
        rel = {
            (i, j)
            for i in range(n)
            for j in range(n)
            if i != j and self.leq(i, j)
        }
        self.covers = tuple(
            sorted(
                (i, j)
                for (i, j) in rel
                if not any((i, k) in rel and (k, j) in rel for k in range(n))
            )
        )

    def leq(self, i: int, j: int) -> bool:
        """flats[i] <= flats[j]: the stratum of j is inside the stratum of i."""
        fi, fj = self.flats[i], self.flats[j]
        if fi.codim > fj.codim:
            return False
        if not fi.key:
            return True
        stacked = Matrix([list(r) for r in fj.key] + [list(r) for r in fi.key])
        return stacked.rank() == fj.codim

    def _mobius(self) -> dict[int, int]:
        order = sorted(range(len(self.flats)), key=lambda i: self.flats[i].codim)
        mob: dict[int, int] = {}
        for i in order:
            below = [j for j in order if j != i and self.leq(j, i)]
            mob[i] = 1 if not below else -sum(mob[j] for j in below)
        return mob

    def flats_of_codim(self, q: int) -> tuple[AffineFlat, ...]:
        return tuple(f for f in self.flats if f.codim == q)

    @property
    def max_codim(self) -> int:
        return max((f.codim for f in self.flats), default=0)


def _canonical_affine_key(rows: list[list[Fraction]], n: int) -> tuple[tuple[Fraction, ...], ...]:
    red, pivots = Matrix(rows, ncols=n + 1).rref()
    return tuple(red.rows[i] for i in range(len(pivots)))


def affine_intersection_poset(
    ambient_dim: int, hyperplanes: Sequence[tuple[Sequence, object]]
) -> AffinePoset:
    """Poset of nonempty intersections of affine hyperplanes {a.x = c}.

    Hyperplanes are (normal, constant) pairs with rational entries and a
    nonzero normal.  Deduplication is by the canonical echelon form of
    the defining system; empty intersections are dropped.
    """
    n = ambient_dim
    eqs = []
    for normal, c in hyperplanes:
        row = [Fraction(x) for x in normal]
        if len(row) != n:
            raise ValueError("normal of wrong length")
        if all(x == 0 for x in row):
            raise ValueError("hyperplane needs a nonzero normal")
        eqs.append(row + [Fraction(c)])

    def containing(key) -> frozenset[int]:
        out = set()
        base = [list(r) for r in key]
        base_rank = len(key)
        for j, eq in enumerate(eqs):
            stacked = Matrix(base + [eq], ncols=n + 1)
            if stacked.rank() == base_rank:
                out.add(j)
        return frozenset(out)

    ambient_key: tuple = ()
    flats: dict[tuple, AffineFlat] = {
        ambient_key: AffineFlat(ambient_key, 0, n, containing(ambient_key))
    }
    frontier = [ambient_key]
    while frontier:
        new = []
        for key in frontier:
            flat = flats[key]
            for j, eq in enumerate(eqs):
                if j in flat.hyperplanes:
                    continue
                rows = [list(r) for r in key] + [list(eq)]
                m_aug = Matrix(rows, ncols=n + 1)
                r_aug = m_aug.rank()
                r_coef = Matrix([row[:-1] for row in rows], ncols=n).rank()
                if r_aug != r_coef:
                    continue  # inconsistent: empty intersection
                new_key = _canonical_affine_key(rows, n)
                if new_key not in flats:
                    flats[new_key] = AffineFlat(new_key, r_aug, n - r_aug, containing(new_key))
                    new.append(new_key)
        frontier = new
    return AffinePoset(n, tuple(flats.values()))


def poset_characteristic_polynomial(poset: AffinePoset) -> tuple[int, ...]:
    """Coefficients, ascending in t, of sum_X mu(X) t^(dim X)."""
    coeffs = [0] * (poset.ambient_dim + 1)
    for i, f in enumerate(poset.flats):
        coeffs[f.dim] += poset.mobius[i]
    return tuple(coeffs)


def poset_whitney_numbers(poset: AffinePoset) -> tuple[int, ...]:
    """|w_q| by codimension q: unsigned Moebius sums over codim-q flats."""
    out = [0] * (poset.max_codim + 1)
    for i, f in enumerate(poset.flats):
        out[f.codim] += abs(poset.mobius[i])
    return tuple(out)
