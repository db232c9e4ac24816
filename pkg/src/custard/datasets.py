"""Converters from common raw graph distributions to edge/label files.

Each converter takes raw text and returns ``(edge_lines, label_lines)``
ready to be written as the whitespace-delimited files the loader reads.
Downloading is left to the caller; see scripts/fetch_datasets.py.
"""

from __future__ import annotations

import re
from pathlib import Path


def convert_content_cites(content_text: str, cites_text: str) -> tuple[list[str], list[str]]:
    """Citation-network format: ``.content`` rows are ``<id> <features...> <class>``,
    ``.cites`` rows are ``<cited> <citing>``."""
    labels = []
    for line in content_text.splitlines():
        fields = line.split()
        if len(fields) >= 2:
            labels.append(f"{fields[0]} {fields[-1]}")
    edges = []
    for line in cites_text.splitlines():
        fields = line.split()
        if len(fields) == 2:
            edges.append(f"{fields[0]} {fields[1]}")
    return edges, labels


def convert_gml(gml_text: str, label_key: str = "value") -> tuple[list[str], list[str]]:
    """Minimal GML reader: node blocks with ``id`` and a label attribute,
    edge blocks with ``source`` and ``target``."""
    edges = []
    labels = []
    for kind, body in re.findall(r"(node|edge)\s*\[(.*?)\]", gml_text, flags=re.S):
        attrs = dict(re.findall(r"(\w+)\s+(\"[^\"]*\"|\S+)", body))
        if kind == "node":
            if "id" not in attrs:
                raise ValueError("GML node block without id")
            if label_key in attrs:
                labels.append(f"{attrs['id']} {attrs[label_key].strip(chr(34))}")
        else:
            if "source" not in attrs or "target" not in attrs:
                raise ValueError("GML edge block without source/target")
            edges.append(f"{attrs['source']} {attrs['target']}")
    return edges, labels


def convert_csv_pair(edges_csv: str, targets_csv: str, target_column: str) -> tuple[list[str], list[str]]:
    """Comma-separated distributions: an edge file with two id columns and a
    target file whose ``target_column`` holds the class."""
    edge_rows = edges_csv.splitlines()
    edges = []
    for line in edge_rows[1:]:  # header row
        parts = [p.strip() for p in line.split(",")]
        if len(parts) >= 2 and parts[0] and parts[1]:
            edges.append(f"{parts[0]} {parts[1]}")
    target_rows = targets_csv.splitlines()
    header = [h.strip() for h in target_rows[0].split(",")]
    try:
        id_idx = header.index("id")
        class_idx = header.index(target_column)
    except ValueError:
        raise ValueError(f"target file needs 'id' and {target_column!r} columns") from None
    labels = []
    for line in target_rows[1:]:
        parts = [p.strip() for p in line.split(",")]
        if len(parts) > max(id_idx, class_idx) and parts[id_idx]:
            label = parts[class_idx].replace(" ", "_")
            labels.append(f"{parts[id_idx]} {label}")
    return edges, labels


def write_dataset(name: str, edges: list[str], labels: list[str], out_dir: str | Path) -> tuple[Path, Path]:
    """Write converted lines as ``<name>.edges`` and ``<name>.labels``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    edges_path = out / f"{name}.edges"
    labels_path = out / f"{name}.labels"
    edges_path.write_text("\n".join(edges) + "\n", encoding="utf-8")
    labels_path.write_text("\n".join(labels) + "\n", encoding="utf-8")
    return edges_path, labels_path
