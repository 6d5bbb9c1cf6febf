"""
Annotation output - JSON Lines records of every annotated document.

One record per tuple: ``{"doc": ..., "view": ..., "cols": {...}}``. Records
are ordered by document id, then view name, then the canonical tuple order,
so two runs over the same corpus produce byte-identical files whatever the
thread count or partition scenario.
"""

import json
from pathlib import Path
from typing import Any, Dict, Iterator, Mapping, Union

from ..models.annotations import AnnotationSet


def annotation_records(annotations: Mapping[str, Mapping[str, AnnotationSet]]) -> Iterator[Dict[str, Any]]:
    for doc_id in sorted(annotations):
        views = annotations[doc_id]
        for view in sorted(views):
            for cols in views[view].row_dicts():
                yield {"doc": doc_id, "view": view, "cols": cols}


def write_annotations_jsonl(
    annotations: Mapping[str, Mapping[str, AnnotationSet]],
    path: Union[str, Path],
) -> int:
    """Write the records to ``path``; returns how many were written."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", encoding="utf-8") as handle:
        for record in annotation_records(annotations):
            handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
            count += 1
    return count


def view_counts(annotations: Mapping[str, Mapping[str, AnnotationSet]]) -> Dict[str, int]:
    """Total tuples per view across the corpus."""
    counts: Dict[str, int] = {}
    for views in annotations.values():
        for view, result in views.items():
            counts[view] = counts.get(view, 0) + len(result)
    return dict(sorted(counts.items()))
