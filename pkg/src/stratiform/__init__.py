"""Exact models for the cohomology of arrangement complements.

The package computes weight-graded rational cohomology of complements of
hyperplane and toric arrangements, checks the purity of strata, and
produces machine-checkable formality certificates via bigraded cdga
models built from compactification data.
"""

from stratiform.exactalg import (
    Matrix,
    SmithDecomposition,
    hermite_basis,
    kernel_basis,
    rank,
    saturate,
    smith_normal_form,
    torsion_invariants,
)
from stratiform.toriclayers import (
    Layer,
    LayerPoset,
    ToricHypersurface,
    build_layer_poset,
    intersect_hypersurfaces,
    layer_cohomology,
    local_subarrangement,
)
from stratiform.matroidos import (
    AffinePoset,
    FlatLattice,
    LinearMatroid,
    OSAlgebra,
    affine_intersection_poset,
    build_matroid,
    characteristic_polynomial,
    flat_lattice,
    local_component_dims,
    nbc_basis,
    os_algebra,
    os_product,
)
from stratiform.leraymodel import (
    FormalityCertificate,
    LerayTable,
    PurityReport,
    StrataData,
    Stratum,
    assemble_e2,
    betti_and_poincare,
    degeneration_by_weights,
    formality_certificate,
    purity_hypothesis_check,
    strata_data_from_hyperplanes,
    strata_data_from_toric,
)
from stratiform.morganmodel import (
    BigradedModel,
    CdgaMorphism,
    CompactificationDatum,
    FormalityWitness,
    build_model,
    builder_point,
    builder_projective_line_marked,
    check_r_quasi_iso,
    cohomology_of_model,
    extract_cokernel_model,
    extract_kernel_model,
    kunneth_product,
    localization_betti,
    shuffle_sign,
    verify_cdga_axioms,
)

__version__ = "0.1.0"
