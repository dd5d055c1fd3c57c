#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

import math
from decimal import Decimal
from fractions import Fraction
from typing import Any, Iterable, List, Optional, Tuple, TypeVar, Union

T = TypeVar("T")
Weight = Union[float, Fraction]

FLOAT_TOL_SCALE = 1e-9


def x2weight(what_to_convert: Any, exact: bool = False) -> Weight:
    """
    Converts `what_to_convert` to whatever the active arithmetic understands as a
    weight. In exact mode that is a `Fraction` (strings like "1/4", "0.5" or
    "3" are parsed without going through binary floating point), otherwise it is
    a python `float`.

    Non-finite values are rejected in both modes.
    """

    if isinstance(what_to_convert, bytes):
        what_to_convert = what_to_convert.decode()

    if exact:
        if isinstance(what_to_convert, float):
            if not math.isfinite(what_to_convert):
                raise ValueError("weight is not finite: {!r}".format(what_to_convert))
            return Fraction(what_to_convert)
        if isinstance(what_to_convert, str):
            what_to_convert = what_to_convert.strip()
        try:
            return Fraction(what_to_convert)
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError("not a weight: {!r}".format(what_to_convert)) from e

    if isinstance(what_to_convert, str) and "/" in what_to_convert:
        num, _, den = what_to_convert.partition("/")
        try:
            value = float(Fraction(int(num), int(den)))
        except ZeroDivisionError as e:
            raise ValueError("not a weight: {!r}".format(what_to_convert)) from e
    else:
        value = float(what_to_convert)
    if not math.isfinite(value):
        raise ValueError("weight is not finite: {!r}".format(what_to_convert))
    return value


def str2bounds(bounds: Union[str, bytes], exact: bool = False) -> Tuple[Weight, Weight]:
    """
    converts "lo,hi" (the `--bounds` flag) into a pair of weights, you could do

        InputStructure.uniform(drivers, *str2bounds("0,1"))
    """
    text = bounds.decode() if isinstance(bounds, bytes) else bounds
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    if len(parts) != 2:
        raise ValueError("bounds must look like 'lo,hi', got {!r}".format(text))
    lo, hi = (x2weight(p, exact) for p in parts)
    if lo > hi:
        raise ValueError("lower bound {} exceeds upper bound {}".format(lo, hi))
    return lo, hi


def weight_sum(values: Iterable[Weight]) -> Weight:
    """Exact sum for fractions, correctly rounded sum for floats."""
    values = list(values)
    if any(isinstance(v, Fraction) for v in values):
        return sum(values, Fraction(0))
    return math.fsum(values)


def default_tolerance(max_abs: Weight, exact: bool) -> Weight:
    if exact:
        return Fraction(0)
    return FLOAT_TOL_SCALE * (1.0 + float(max_abs))


def is_float_exact(value: Fraction) -> bool:
    """True when `value` survives a round trip through a binary64 float."""
    try:
        return Fraction(float(value)) == value
    except OverflowError:
        return False


def weight2json(value: Weight) -> Union[int, float, str]:
    """
    Serializes a weight for json: integers stay integers, floats keep their
    shortest round-tripping repr, fractions that are not representable as a
    float are written as "p/q" strings.
    """
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return value.numerator
        if is_float_exact(value):
            return float(value)
        return "{}/{}".format(value.numerator, value.denominator)
    if isinstance(value, int):
        return value
    return float(value)


def json2weight(value: Union[int, float, str, Decimal], exact: bool) -> Weight:
    """
    Inverse of `weight2json`. Decimal numbers always go through float first:
    `weight2json` only writes a fraction as a number when it is float-exact.
    """
    if isinstance(value, Decimal):
        value = float(value)
    return x2weight(value, exact)


def format_weight(value: Weight) -> str:
    """shortest text that parses back to the same weight."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        if is_float_exact(value):
            return repr(float(value))
        return "{}/{}".format(value.numerator, value.denominator)
    return repr(float(value))


def natural_key(label: str) -> Tuple[int, Union[int, str]]:
    """sort key placing integer labels first, numerically, then the rest."""
    try:
        return (0, int(label))
    except ValueError:
        return (1, label)


def percent(numerator: int, denominator: int) -> str:
    if denominator == 0:
        return ""
    return "{:.2f}".format(100.0 * numerator / denominator)


def parse_numbers(text: str) -> List[str]:
    """splits csv or whitespace separated numbers, ignoring `#` comments."""
    tokens: List[str] = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(t for t in line.replace(",", " ").split() if t)
    return tokens


def unwrap(obj: Optional[T], msg="object was None") -> T:
    if obj is None:
        raise ValueError(msg)
    return obj
