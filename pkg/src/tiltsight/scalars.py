from __future__ import annotations

import random
import re
from typing import Any

from sympy import isprime
from sympy.polys.domains import FF, QQ
from sympy.polys.domains.domain import Domain


FIELD_RE = re.compile(r"^\s*(?:F_?p|GF|FF)\s*[:(]\s*(\d+)\s*\)?\s*$", re.IGNORECASE)
RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")
MAX_PRIME = 2**31


def field_from_label(label: str | None) -> Domain:
    """Resolve "Q", "Fp:p" or "Fp(p)" to a sympy domain."""
    text = (label or "Q").strip()
    if text.upper() in {"Q", "QQ"}:
        return QQ
    match = FIELD_RE.match(text)
    if not match:
        raise ValueError(f"unknown field {label!r}; expected Q or Fp:p")
    prime = int(match.group(1))
    if prime > MAX_PRIME or not isprime(prime):
        raise ValueError(f"field characteristic must be a prime at most 2^31, got {prime}")
    return FF(prime)


def field_label(field: Domain) -> str:
    if field.is_QQ:
        return "Q"
    return f"Fp:{field.characteristic()}"


def parse_scalar(field: Domain, value: Any) -> Any:
    if isinstance(value, int):
        return field.convert(value)
    match = RATIONAL_RE.match(str(value))
    if not match:
        raise ValueError(f"bad scalar {value!r}; expected an integer or a/b")
    numerator = int(match.group(1))
    denominator = int(match.group(2) or 1)
    if denominator == 0:
        raise ValueError(f"zero denominator in {value!r}")
    return field.convert(numerator) / field.convert(denominator)


def format_scalar(field: Domain, value: Any) -> str:
    if field.is_QQ:
        numerator = int(field.numer(value))
        denominator = int(field.denom(value))
        return str(numerator) if denominator == 1 else f"{numerator}/{denominator}"
    prime = field.characteristic()
    return str(int(field.to_int(value)) % prime)


def random_scalar(field: Domain, rng: random.Random, bound: int = 3) -> Any:
    if field.is_QQ:
        return field.convert(rng.randint(-bound, bound))
    return field.convert(rng.randrange(field.characteristic()))


def field_elements(field: Domain) -> list[Any]:
    """All elements of a finite field, in residue order."""
    if field.is_QQ:
        raise ValueError("the rationals cannot be enumerated")
    return [field.convert(value) for value in range(field.characteristic())]
