from .intset import (
    IntSet,
    LinearForm,
    dilate,
    evaluate_form,
    form_size,
    minkowski_sum,
    naive_form,
    normalize_set,
    validate_normalized_form,
)

__all__ = [
    "IntSet",
    "LinearForm",
    "dilate",
    "evaluate_form",
    "form_size",
    "minkowski_sum",
    "naive_form",
    "normalize_set",
    "validate_normalized_form",
]
