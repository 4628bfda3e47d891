from __future__ import annotations

import json
from collections import Counter
from pathlib import Path
from typing import Any

import networkx as nx

from tiltsight.morita import MoritaContext, arrow_multiset
from tiltsight.orbit import ClusterCategory
from tiltsight.quotient import QuotientCategory
from tiltsight.scalars import field_label


def write_json(path: Path, payload: Any) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, ensure_ascii=False, sort_keys=True) + "\n", encoding="utf-8")


def write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _quote(value: Any) -> str:
    return '"' + str(value).replace('"', '\\"') + '"'


def _dot_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return _quote(value)


def quiver_to_dot(graph: nx.MultiDiGraph, name: str) -> str:
    """Nodes and edges in sorted order; τ edges are dashed."""
    lines = [f"digraph {_quote(name)} {{"]
    for node in sorted(graph.nodes):
        attributes = graph.nodes[node]
        rendered = ", ".join(f"{key}={_dot_value(attributes[key])}" for key in sorted(attributes))
        lines.append(f"  {_quote(node)}" + (f" [{rendered}]" if rendered else "") + ";")
    edges = sorted((source, target, data.get("kind", "arrow")) for source, target, data in graph.edges(data=True))
    for source, target, kind in edges:
        style = " [style=dashed]" if kind == "tau" else ""
        lines.append(f"  {_quote(source)} -> {_quote(target)}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def objects_payload(category: ClusterCategory) -> dict[str, Any]:
    rows = []
    for obj in category.objects:
        row = obj.to_json(category.n)
        row["shift"] = category.shift_object(obj.name)
        row["tau"] = category.tau_object(obj.name)
        rows.append(row)
    return {
        "schema": "tiltsight.objects.v1",
        "n": category.n,
        "d": category.d,
        "field": field_label(category.field),
        "count": len(rows),
        "objects": rows,
    }


def objects_text(payload: dict[str, Any]) -> str:
    lines = [f"A_{payload['n']}, d={payload['d']}: {payload['count']} indecomposables"]
    for row in payload["objects"]:
        a, b = row["lift"]["interval"]
        lines.append(f"{row['name']:<10} M[{a},{b}][{row['lift']['shift']}]  [1]-> {row['shift']:<10} τ-> {row['tau']}")
    return "\n".join(lines) + "\n"


def homs_payload(quotient: QuotientCategory) -> dict[str, Any]:
    return {
        "schema": "tiltsight.homs.v1",
        "n": quotient.category.n,
        "d": quotient.d,
        "M": quotient.summands,
        "forced": quotient.forced,
        "surviving": quotient.surviving(),
        "projectives": quotient.projectives(),
        "injectives": quotient.injectives(),
        "frobenius": quotient.frobenius_check(),
        "homs": quotient.hom_table(),
    }


def homs_text(payload: dict[str, Any]) -> str:
    lines = [f"quotient by {'+'.join(payload['M'])}: {len(payload['surviving'])} indecomposables, Frobenius={payload['frobenius']}"]
    for pair, dims in sorted(payload["homs"].items()):
        if any(dims.values()):
            lines.append(f"{pair:<20} " + " ".join(f"H^{degree}={size}" for degree, size in sorted(dims.items(), key=lambda item: -int(item[0]))))
    return "\n".join(lines) + "\n"


def lambda_payload(ctx: MoritaContext, presentation_match: tuple[int, ...] | None | bool = False) -> dict[str, Any]:
    algebra = ctx.algebra
    payload = {
        "schema": "tiltsight.lambda.v1",
        "M": ctx.summands,
        "vertices": {vertex: name for vertex, name in zip(algebra.vertices, ctx.summands)},
        "graded_dims": {str(degree): size for degree, size in sorted(algebra.graded_dims().items())},
        "algebra": algebra.to_json(),
    }
    if presentation_match is not False:
        payload["presentation_match"] = list(presentation_match) if presentation_match is not None else None
    return payload


def golden_observation(category: ClusterCategory, quotient: QuotientCategory, ctx: MoritaContext | None = None) -> dict[str, Any]:
    graph = quotient.ar_quiver()
    observed = {
        "n": category.n,
        "d": category.d,
        "M": quotient.summands,
        "objects": len(category.objects),
        "quotient_vertices": sorted(graph.nodes),
        "quotient_arrows": [list(edge) for edge in arrow_multiset(graph)],
        "projectives": quotient.projectives(),
        "injectives": quotient.injectives(),
        "frobenius": quotient.frobenius_check(),
    }
    if ctx is not None:
        observed["lambda_dims"] = {str(degree): size for degree, size in ctx.algebra.graded_dims().items()}
    return observed


def golden_diff(expected: dict[str, Any], observed: dict[str, Any]) -> list[str]:
    """Differences on the keys the golden file records; arrows compare as multisets."""
    diffs = []
    for key in sorted(expected):
        if key == "schema" or key not in observed:
            continue
        want, got = expected[key], observed[key]
        if key == "quotient_arrows":
            want = Counter(tuple(edge) for edge in want)
            got = Counter(tuple(edge) for edge in got)
            if want != got:
                missing = sorted((want - got).elements())
                extra = sorted((got - want).elements())
                diffs.append(f"quotient_arrows: missing {missing}, unexpected {extra}")
            continue
        if key in {"quotient_vertices", "projectives", "injectives", "M"}:
            want, got = sorted(want), sorted(got)
        if want != got:
            diffs.append(f"{key}: expected {want!r}, got {got!r}")
    return diffs
