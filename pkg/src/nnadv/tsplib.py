"""TSPLIB-style text serialization of instances.

Lp metrics with p in {1, 2, inf} map to the MAN_2D / EUC_2D / MAX_2D
edge weight types; the hop-count metric is exported as an EXPLICIT full
matrix (with the node coordinates kept so the unit graph can be rebuilt).
The COMMENT line carries the family level, landmark indices and scale as
``k=<int|-> l=<idx> m=<idx> s=<int>``; coordinates are printed with
enough digits to reconstruct x/scale exactly.
"""
from __future__ import annotations

import math

from .family import Instance, build_unit_graph
from .metrics import GraphicMetric, LpMetric, ScaledPoint

_WEIGHT_TYPE = {1.0: "MAN_2D", 2.0: "EUC_2D", math.inf: "MAX_2D"}


def dumps_tsplib(instance: Instance, name: str | None = None) -> str:
    """Serialize an instance; rejects Lp metrics the format cannot name."""
    metric = instance.metric
    if isinstance(metric, GraphicMetric):
        weight_type = "EXPLICIT"
    else:
        weight_type = _WEIGHT_TYPE.get(float(metric.p))
        if weight_type is None:
            raise ValueError(f"p = {metric.p} has no TSPLIB edge weight type")
    if name is None:
        k = instance.family_k
        name = f"nnadv-k{k}" if k is not None else f"nnadv-n{instance.n}"

    k_text = "-" if instance.family_k is None else str(instance.family_k)
    lines = [
        f"NAME: {name}",
        f"COMMENT: k={k_text} l={instance.landmark_l} m={instance.landmark_m} s={instance.scale}",
        "TYPE: TSP",
        f"DIMENSION: {instance.n}",
        f"EDGE_WEIGHT_TYPE: {weight_type}",
    ]
    if weight_type == "EXPLICIT":
        lines.append("EDGE_WEIGHT_FORMAT: FULL_MATRIX")
    lines.append("NODE_COORD_SECTION")
    for i, c in enumerate(instance.cities):
        lines.append(f"{i + 1} {c.x / instance.scale!r} {c.y / instance.scale!r}")
    if weight_type == "EXPLICIT":
        lines.append("EDGE_WEIGHT_SECTION")
        for i in range(instance.n):
            row = metric.row(i)
            lines.append(" ".join(str(int(v)) for v in row))
    lines.append("EOF")
    return "\n".join(lines) + "\n"


def _parse_comment(comment: str) -> dict[str, str]:
    fields = {}
    for token in comment.split():
        if "=" in token:
            key, value = token.split("=", 1)
            fields[key] = value
    return fields


def loads_tsplib(text: str) -> Instance:
    """Parse the TSPLIB-style format written by :func:`dumps_tsplib`."""
    headers: dict[str, str] = {}
    coords: list[tuple[float, float]] = []
    matrix: list[list[int]] = []
    section = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line == "EOF":
            continue
        if line in ("NODE_COORD_SECTION", "EDGE_WEIGHT_SECTION"):
            section = line
            continue
        if section is None and ":" in line:
            key, value = line.split(":", 1)
            headers[key.strip().upper()] = value.strip()
            continue
        if section == "NODE_COORD_SECTION":
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"bad coordinate line: {raw!r}")
            coords.append((float(parts[1]), float(parts[2])))
        elif section == "EDGE_WEIGHT_SECTION":
            matrix.append([int(v) for v in line.split()])
        else:
            raise ValueError(f"unexpected line outside any section: {raw!r}")

    n = int(headers["DIMENSION"])
    if len(coords) != n:
        raise ValueError(f"DIMENSION says {n} cities but {len(coords)} coordinates given")
    weight_type = headers.get("EDGE_WEIGHT_TYPE", "")
    meta = _parse_comment(headers.get("COMMENT", ""))
    scale = int(meta.get("s", "1"))
    landmark_l = int(meta.get("l", "0"))
    landmark_m = int(meta.get("m", "0"))
    family_k = None if meta.get("k", "-") == "-" else int(meta["k"])

    cities = tuple(ScaledPoint(round(x * scale), round(y * scale)) for x, y in coords)

    if weight_type in ("MAN_2D", "EUC_2D", "MAX_2D"):
        p = {"MAN_2D": 1.0, "EUC_2D": 2.0, "MAX_2D": math.inf}[weight_type]
        metric: LpMetric | GraphicMetric = LpMetric(p)
    elif weight_type == "EXPLICIT":
        if len(matrix) != n or any(len(row) != n for row in matrix):
            raise ValueError("EXPLICIT weights must form a full n x n matrix")
        for i in range(n):
            if matrix[i][i] != 0:
                raise ValueError(f"matrix diagonal must be zero (row {i})")
            for j in range(i + 1, n):
                if matrix[i][j] != matrix[j][i]:
                    raise ValueError(f"matrix is not symmetric at ({i}, {j})")
        probe = Instance(cities=cities, scale=scale, landmark_l=landmark_l, landmark_m=landmark_m)
        graph = build_unit_graph(probe)
        metric = GraphicMetric(n, graph.edges)
        check_rows = range(n) if n <= 600 else range(0, n, max(1, n // 16))
        for i in check_rows:
            row = metric.row(i)
            if [int(v) for v in row] != matrix[i]:
                raise ValueError(f"matrix row {i} does not match the unit-grid hop counts")
    else:
        raise ValueError(f"unknown EDGE_WEIGHT_TYPE {weight_type!r}")

    return Instance(
        cities=cities,
        scale=scale,
        metric=metric,
        landmark_l=landmark_l,
        landmark_m=landmark_m,
        family_k=family_k,
    )
