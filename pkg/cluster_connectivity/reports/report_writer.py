"""
Report Writer Module
====================
Writes clusterings, edge lists and reports.

Architecture:
- Every file is written to a temporary sibling and renamed into place, so
  an interrupted run never leaves a truncated output
- Cluster ids are renumbered from 0; when the source labels are not all
  integers a "<output>.labels.tsv" sidecar maps new ids to source labels
- JSON reports use a fixed key order; CSV tables carry a header row

Data Flow:
  Graph / Partition / report dicts → ReportWriter → atomic files
"""

import csv
import io
import json
import logging
import os
import tempfile
from pathlib import Path

from cluster_connectivity.core.graph import edgelist_lines

logger = logging.getLogger(__name__)


def _is_integer_label(label):
    try:
        int(label)
    except (TypeError, ValueError):
        return False
    return True


class ReportWriter:
    """
    Write toolkit outputs atomically.

    Responsibilities:
    - JSON reports and CSV tables
    - Clustering files with an optional label sidecar
    - Edge-list files
    """

    def __init__(self, config=None):
        """
        Args:
            config: Optional dict with:
                - indent: JSON indentation (default 2)
                - label_sidecar: Emit label sidecars (default True)
        """
        config = config or {}
        self.indent = config.get("indent", 2)
        self.label_sidecar = config.get("label_sidecar", True)
        self.written = []

    def write_text(self, path, text):
        """Write text to path via a temporary file in the same directory."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
        try:
            with os.fdopen(fd, "w", newline="") as f:
                f.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        self.written.append(path)
        logger.info(f"Saved: {path}")
        return path

    def write_json(self, path, data):
        return self.write_text(path, json.dumps(data, indent=self.indent) + "\n")

    def write_csv(self, path, rows, columns):
        """
        Args:
            rows: Iterable of dicts
            columns: Column order; missing or None values become empty cells
        """
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if row.get(k) is None else row.get(k)) for k in columns})
        return self.write_text(path, buffer.getvalue())

    def write_clustering(self, path, g, p, source_labels=None):
        """
        Write "node<TAB>cluster" lines in node order.

        Args:
            g: Graph naming the nodes
            p: Partition of g's nodes
            source_labels: Optional source label per cluster of p, for the sidecar
        """
        ids = g.external_ids
        text = "".join(f"{ids[i]}\t{c}\n" for i, c in enumerate(p.assignment.tolist()))
        self.write_text(path, text)
        if self.label_sidecar and source_labels is not None:
            present = [label for label in source_labels if label is not None]
            if present and not all(_is_integer_label(label) for label in present):
                sidecar = Path(str(path) + ".labels.tsv")
                lines = "".join(
                    f"{cid}\t{'' if label is None else label}\n" for cid, label in enumerate(source_labels)
                )
                self.write_text(sidecar, lines)
        return Path(path)

    def write_edgelist(self, path, g):
        return self.write_text(path, "".join(line + "\n" for line in edgelist_lines(g)))
