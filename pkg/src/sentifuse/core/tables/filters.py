from typing import Any, Literal, NamedTuple, Sequence, cast

import polars as pl

FilterOperator = Literal[
    "=",
    "!=",
    "<",
    "<=",
    ">",
    ">=",
    "in",
    "not in",
]


class Filter(NamedTuple):
    column: str
    operator: FilterOperator
    value: Any


InputFilters = Sequence[Filter] | Sequence[Sequence[Filter]]
NormalizedFilters = list[list[Filter]]


def normalize_filters(filters: InputFilters | None) -> NormalizedFilters:
    """
    Normalize filters to a list of lists of filters: each inner list is a
    conjunction (AND) and the outer list a disjunction (OR) of them.

    The empty filter list is treated as no filters rather than as an empty
    disjunction.
    """

    if filters is None or len(filters) == 0:
        return []
    elif all(isinstance(f, Filter) for f in filters):
        filters = cast(Sequence[Filter], filters)
        return [list(filters)]
    else:
        filters = cast(Sequence[Sequence[Filter]], filters)
        return [list(f) for f in filters]


def pl_all(exprs: Sequence[pl.Expr]) -> pl.Expr:
    assert len(exprs) > 0

    result = exprs[0]
    for expr in exprs[1:]:
        result = result & expr

    return result


def pl_any(exprs: Sequence[pl.Expr]) -> pl.Expr:
    assert len(exprs) > 0

    result = exprs[0]
    for expr in exprs[1:]:
        result = result | expr

    return result


def filter_to_expr(f: Filter) -> pl.Expr:
    column = pl.col(f.column)
    if f.operator == "=":
        return column == f.value
    elif f.operator == "!=":
        return column != f.value
    elif f.operator == "<":
        return column < f.value
    elif f.operator == ">":
        return column > f.value
    elif f.operator == "<=":
        return column <= f.value
    elif f.operator == ">=":
        return column >= f.value
    elif f.operator == "in":
        return column.is_in(f.value)
    elif f.operator == "not in":
        return ~column.is_in(f.value)
    else:
        raise ValueError(f"Unsupported operator {f.operator}")


def filters_to_expr(filters: NormalizedFilters) -> pl.Expr | None:
    conjunctions = [pl_all([filter_to_expr(f) for f in filter_set]) for filter_set in filters if filter_set]
    if not conjunctions:
        return None

    return pl_any(conjunctions)
