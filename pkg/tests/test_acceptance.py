"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -s` to see the lines as they
print.  All comparisons are exact (rational arithmetic, tolerance 0).
"""

import io
import math
import sys
import time
from fractions import Fraction
from itertools import product

from stratiform.cli import main as cli_main
from stratiform.exactalg import hermite_basis
from stratiform.leraymodel import (
    StrataData,
    Stratum,
    assemble_e2,
    betti_and_poincare,
    degeneration_by_weights,
    strata_data_from_hyperplanes,
    strata_data_from_toric,
)
from stratiform.matroidos import (
    build_matroid,
    characteristic_polynomial,
    flat_lattice,
    poset_whitney_numbers,
    affine_intersection_poset,
)
from stratiform.morganmodel import (
    build_model,
    builder_point,
    builder_projective_line_marked,
    cohomology_of_model,
    extract_cokernel_model,
    extract_kernel_model,
    kunneth_product,
    localization_betti,
    negate_gysin_block,
    verify_cdga_axioms,
)
from stratiform.toriclayers import ToricHypersurface, build_layer_poset, mod1

F = Fraction
INF = math.inf


def _report(num, desc, budget_seconds, body):
    start = time.monotonic()
    try:
        body()
    except BaseException:
        print("ACCEPTANCE %d FAIL %s" % (num, desc))
        raise
    elapsed = time.monotonic() - start
    assert elapsed < budget_seconds, "criterion %d exceeded %ss (%.2fs)" % (
        num,
        budget_seconds,
        elapsed,
    )
    print("ACCEPTANCE %d PASS %s (%.2fs)" % (num, desc, elapsed))


# -- criterion 1 -----------------------------------------------------------


def test_criterion_1_torus_cohomology():
    def body():
        model = build_model(builder_projective_line_marked(2))
        assert cohomology_of_model(model) == {(0, 0): 1, (1, 2): 1}

    _report(1, "H(C*) from the 2-marked projective line: dims (1,1), weights (0,2)", 1.0, body)


# -- criterion 2 -----------------------------------------------------------


def _braid_hyperplanes(n):
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            v = [0] * n
            v[i], v[j] = 1, -1
            out.append((tuple(v), 0))
    return out


def _generic_lines(count):
    # y = i x + i^2: pairwise non-parallel, no three concurrent
    return [((i, -1), -i * i) for i in range(1, count + 1)]


def test_criterion_2_hyperplane_whitney_oracle():
    def body():
        central = {
            "boolean-1": [((1,), 0)],
            "boolean-2": [((1, 0), 0), ((0, 1), 0)],
            "boolean-3": [((1, 0, 0), 0), ((0, 1, 0), 0), ((0, 0, 1), 0)],
            "boolean-4": [
                ((1, 0, 0, 0), 0),
                ((0, 1, 0, 0), 0),
                ((0, 0, 1, 0), 0),
                ((0, 0, 0, 1), 0),
            ],
            "braid-3": _braid_hyperplanes(3),
            "braid-4": _braid_hyperplanes(4),
            "concurrent-3": [((1, 0), 0), ((0, 1), 0), ((1, 1), 0)],
        }
        for name, hyps in central.items():
            n = len(hyps[0][0])
            betti = betti_and_poincare(assemble_e2(strata_data_from_hyperplanes(n, hyps))).betti
            lat = flat_lattice(build_matroid([v for v, _ in hyps]))
            coeffs = characteristic_polynomial(lat)
            r = lat.rank
            whitney = tuple(abs(coeffs[r - k]) for k in range(r + 1))
            assert betti == whitney, name
        for count in (3, 4, 5):
            lines = _generic_lines(count)
            betti = betti_and_poincare(assemble_e2(strata_data_from_hyperplanes(2, lines))).betti
            whitney = poset_whitney_numbers(affine_intersection_poset(2, lines))
            assert betti == whitney, "generic-%d" % count
        braid3 = betti_and_poincare(
            assemble_e2(strata_data_from_hyperplanes(3, _braid_hyperplanes(3)))
        )
        assert braid3.poincare == "1 + 3t + 2t^2"

    _report(2, "hyperplane Betti numbers equal unsigned Whitney coefficients", 5.0, body)


# -- criterion 3 -----------------------------------------------------------


def _reduce_mod_lattice(basis, v):
    work = [int(x) for x in v]
    for row in basis:
        p = next((j for j, x in enumerate(row) if x), None)
        if p is None:
            continue
        q = work[p] // row[p]
        if q:
            work = [x - q * y for x, y in zip(work, row)]
    return tuple(work)


def _brute_force_components(n, equations, grid):
    chis = [tuple(chi) for chi, _ in equations]
    ts = [mod1(t) for _, t in equations]
    col_lattice = hermite_basis([[chis[i][j] for i in range(len(chis))] for j in range(n)])
    signatures = set()
    for point in product(range(grid), repeat=n):
        w = [F(a, grid) for a in point]
        residues = []
        for chi, t in zip(chis, ts):
            val = sum(F(c) * x for c, x in zip(chi, w)) - t
            if val.denominator != 1:
                residues = None
                break
            residues.append(int(val))
        if residues is None:
            continue
        signatures.add(_reduce_mod_lattice(col_lattice, residues))
    return len(signatures)


def test_criterion_3_toric_small_cases():
    def body():
        b1 = betti_and_poincare(
            assemble_e2(strata_data_from_toric(1, [ToricHypersurface((1,), F(0))]))
        ).betti
        assert b1 == (1, 2)
        b2 = betti_and_poincare(
            assemble_e2(strata_data_from_toric(1, [ToricHypersurface((2,), F(0))]))
        ).betti
        assert b2 == (1, 3)
        coord = [ToricHypersurface((1, 0), F(0)), ToricHypersurface((0, 1), F(0))]
        table = assemble_e2(strata_data_from_toric(2, coord))
        assert table.entries == {
            (0, 0): {0: 1},
            (1, 0): {2: 2},
            (2, 0): {4: 1},
            (0, 1): {2: 2},
            (1, 1): {4: 2},
            (0, 2): {4: 1},
        }
        assert betti_and_poincare(table).poincare == "1 + 4t + 4t^2"

        instances = [
            (1, [((2,), F(0))], 2),
            (1, [((3,), F(1, 2))], 12),
            (1, [((4,), F(1, 3))], 24),
            (2, [((2, 4), F(1, 2))], 4),
            (2, [((2, 0), F(0)), ((0, 3), F(1, 2))], 6),
            (2, [((1, 1), F(0)), ((1, -1), F(0))], 4),
            (2, [((3, 0), F(1, 6))], 18),
            (3, [((1, 1, 0), F(0)), ((0, 1, 1), F(1, 2)), ((2, 0, 0), F(0))], 4),
            (3, [((2, 0, 0), F(1, 6)), ((0, 1, 1), F(0))], 12),
        ]
        from stratiform.toriclayers import layers_from_equations

        for n, eqs, grid in instances:
            engine = len(layers_from_equations(n, eqs))
            assert engine == _brute_force_components(n, eqs, grid), (n, eqs)

    _report(3, "toric Betti tables and brute-force component counts", 10.0, body)


# -- criterion 4 -----------------------------------------------------------


DIM1_ARRANGEMENTS = [
    [((1,), F(0))],
    [((2,), F(0))],
    [((1,), F(0)), ((1,), F(1, 2))],
    [((3,), F(0)), ((1,), F(0))],
    [((2,), F(0)), ((3,), F(0))],
    [((4,), F(1, 2))],
    [((2,), F(0)), ((2,), F(1, 2)), ((1,), F(1, 4))],
    [((1,), F(0)), ((1,), F(1, 5)), ((1,), F(2, 5)), ((1,), F(3, 5)), ((1,), F(4, 5))],
]


def _leray_graded(ambient_dim, hyps):
    betti = betti_and_poincare(assemble_e2(strata_data_from_toric(ambient_dim, hyps))).betti
    return {(k, 2 * k): b for k, b in enumerate(betti) if b}


def test_criterion_4_cross_engine():
    def body():
        for eqs in DIM1_ARRANGEMENTS:
            hyps = [ToricHypersurface(chi, t, i) for i, (chi, t) in enumerate(eqs)]
            points = len(build_layer_poset(1, hyps).by_codim(1))
            leray = _leray_graded(1, hyps)
            morgan = cohomology_of_model(build_model(builder_projective_line_marked(points + 2)))
            assert leray == morgan, eqs
        for eqs in DIM1_ARRANGEMENTS[:4]:
            hyps1 = [ToricHypersurface(chi, t, i) for i, (chi, t) in enumerate(eqs)]
            points = len(build_layer_poset(1, hyps1).by_codim(1))
            crossed = [
                ToricHypersurface(chi + (0,), t, i) for i, (chi, t) in enumerate(eqs)
            ] + [
                ToricHypersurface((0,) + chi, t, len(eqs) + i)
                for i, (chi, t) in enumerate(eqs)
            ]
            leray = _leray_graded(2, crossed)
            factor = builder_projective_line_marked(points + 2)
            morgan = cohomology_of_model(build_model(kunneth_product(factor, factor)))
            assert leray == morgan, eqs

    _report(4, "cross-engine (degree, weight) dimensions agree", 10.0, body)


# -- criterion 5 -----------------------------------------------------------


def test_criterion_5_cdga_axiom_suite():
    def body():
        cd2 = builder_projective_line_marked(2)
        cd3 = builder_projective_line_marked(3)
        cd4 = builder_projective_line_marked(4)
        cd5 = builder_projective_line_marked(5)
        builders = {
            "line-0": builder_projective_line_marked(0),
            "line-1": builder_projective_line_marked(1),
            "line-2": cd2,
            "line-3": cd3,
            "line-4": cd4,
            "line-5": cd5,
            "square-2": kunneth_product(cd2, cd2),
            "square-3": kunneth_product(cd3, cd3),
            "square-4": kunneth_product(cd4, cd4),
            "square-5": kunneth_product(cd5, cd5),
            "mixed": kunneth_product(cd2, builder_projective_line_marked(0)),
        }
        for name, cd in builders.items():
            model = build_model(cd)
            assert model.total_dimension() <= 60, name
            assert verify_cdga_axioms(model).passed, name

        # fault injections must be detected
        square = builders["square-2"]
        full_flip = verify_cdga_axioms(build_model(negate_gysin_block(square, (1, 3), 1, 0)))
        assert not full_flip.passed and "d_squared" in full_flip.axioms_failing()
        block_flip = verify_cdga_axioms(
            build_model(negate_gysin_block(builders["mixed"], (1,), 1, 0))
        )
        assert block_flip.axioms_failing() == ("leibniz",)
        assert any("basis pair" in desc for _, desc in block_flip.violations)

    _report(5, "cdga axioms pass on all builders; Gysin sign flips detected", 30.0, body)


# -- criterion 6 -----------------------------------------------------------


def test_criterion_6_formality_witnesses():
    def body():
        cd2 = builder_projective_line_marked(2)
        weight_2k = [builder_projective_line_marked(s) for s in (1, 2, 3, 4, 5)]
        weight_2k.append(kunneth_product(cd2, cd2))
        for cd in weight_2k:
            model = build_model(cd)
            witness = extract_kernel_model(model, INF)
            assert witness.quasi_iso.ok
            assert witness.morphism.violations() == []
        compact = [
            builder_projective_line_marked(0),
            kunneth_product(
                builder_projective_line_marked(0), builder_projective_line_marked(0)
            ),
            builder_point(),
        ]
        for cd in compact:
            model = build_model(cd)
            witness = extract_cokernel_model(model, INF)
            assert witness.quasi_iso.ok
            assert witness.morphism.violations() == []

    _report(6, "kernel witnesses on weight-2k builders, cokernel on compact ones", 30.0, body)


# -- criterion 7 -----------------------------------------------------------


def test_criterion_7_degeneration_soundness():
    def body():
        passing_tables = [
            assemble_e2(strata_data_from_toric(1, [ToricHypersurface((2,), F(0))])),
            assemble_e2(
                strata_data_from_toric(
                    2, [ToricHypersurface((1, 0), F(0)), ToricHypersurface((0, 1), F(0))]
                )
            ),
            assemble_e2(strata_data_from_hyperplanes(3, _braid_hyperplanes(3))),
            assemble_e2(strata_data_from_hyperplanes(2, _generic_lines(4))),
        ]
        for table in passing_tables:
            report = degeneration_by_weights(table)
            assert report.degenerate
            for (_, p, q, w_src, w_tgt) in report.forced_zero:
                assert w_src == 2 * (p + q) and w_tgt == w_src + 2
        synthetic = StrataData(
            (
                Stratum("ambient", 0, ((0, 1, 0),), 1),
                Stratum("impure", 1, ((1, 1, 3),), 1),
            )
        )
        report = degeneration_by_weights(assemble_e2(synthetic))
        assert report.verdict == "unknown"

    _report(7, "weight argument certifies degeneration; impure tables refused", 5.0, body)


# -- criterion 8 -----------------------------------------------------------


def test_criterion_8_localization():
    def body():
        assert localization_betti((1, 0, 2, 0, 1), 2).dims == (1, 0, 2, 0, 0)
        assert localization_betti((1, 0, 1), 1).dims == (1, 0, 0)

    _report(8, "point-removal Betti bookkeeping exact", 1.0, body)


# -- criterion 9 -----------------------------------------------------------


def _invoke(argv):
    buf = io.StringIO()
    old = sys.stdout
    sys.stdout = buf
    try:
        code = cli_main(argv)
    finally:
        sys.stdout = old
    return code, buf.getvalue()


def test_criterion_9_cli_determinism(tmp_path):
    def body():
        toric_a = tmp_path / "ta.arr"
        toric_b = tmp_path / "tb.arr"
        toric_a.write_text("toric 2\neq 1 0 : 0/1\neq 0 1 : 0/1\neq 1 1 : 1/2\n")
        toric_b.write_text("toric 2\neq 1 1 : 1/2\neq 1 0 : 0/1\neq 0 1 : 0/1\n")
        hyp_a = tmp_path / "ha.arr"
        hyp_b = tmp_path / "hb.arr"
        hyp_a.write_text("hyperplane 2\neq 1 0 : 0/1\neq 0 1 : 0/1\neq 1 1 : 0/1\n")
        hyp_b.write_text("hyperplane 2\neq 1 1 : 0/1\neq 0 1 : 0/1\neq 1 0 : 0/1\n")
        commands = [["strata"], ["poset"], ["e2"], ["betti"], ["purity"], ["certificate"]]
        for fmt in ("text", "kv"):
            for cmd in commands:
                for pair in ((toric_a, toric_b), (hyp_a, hyp_b)):
                    first, second = pair
                    run1 = _invoke(cmd + [str(first), "--format", fmt])
                    run1_again = _invoke(cmd + [str(first), "--format", fmt])
                    run2 = _invoke(cmd + [str(second), "--format", fmt])
                    assert run1 == run1_again, (cmd, fmt, "rerun")
                    assert run1 == run2, (cmd, fmt, "permutation")
        selftest1 = _invoke(["model-selftest"])
        selftest2 = _invoke(["model-selftest"])
        assert selftest1 == selftest2 and selftest1[0] == 0

    _report(9, "CLI output byte-identical across runs and input permutations", 60.0, body)
