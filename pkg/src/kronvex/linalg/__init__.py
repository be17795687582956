from kronvex.linalg.core import (
    ComplexMatrix,
    ConvergenceError,
    SchurResult,
    SvdResult,
    as_matrix,
    eigenvalues,
    frobenius_norm,
    haar_unitaries,
    haar_unitary,
    hermitian_eigenvalues,
    inner_product,
    kron,
    kron_sum,
    kron_sum_batch,
    schur_triangularize,
    singular_values,
    svd,
    sylvester_apply,
    top_singular_triplets,
    unvec,
    vec,
)

__all__ = [
    "ComplexMatrix",
    "ConvergenceError",
    "SchurResult",
    "SvdResult",
    "as_matrix",
    "eigenvalues",
    "frobenius_norm",
    "haar_unitaries",
    "haar_unitary",
    "hermitian_eigenvalues",
    "inner_product",
    "kron",
    "kron_sum",
    "kron_sum_batch",
    "schur_triangularize",
    "singular_values",
    "svd",
    "sylvester_apply",
    "top_singular_triplets",
    "unvec",
    "vec",
]
