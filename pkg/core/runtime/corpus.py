"""
Corpus ingestion.

A corpus is either a directory of ``.txt`` files (document id = file name)
or a JSON Lines file of ``{"id": ..., "text": ...}`` records. Unreadable
documents are returned as failed items so a run can report them and carry
on with the rest.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Union

from loguru import logger
from pydantic import BaseModel, ValidationError

from ..exceptions import CorpusNotFoundError
from ..models.annotations import Document


class CorpusRecord(BaseModel):
    id: str
    text: str


@dataclass(frozen=True)
class CorpusItem:
    doc_id: str
    document: Optional[Document] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.document is not None


def _read_directory(path: Path) -> List[CorpusItem]:
    items = []
    for file in sorted(path.glob("*.txt")):
        try:
            text = file.read_bytes().decode("utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            logger.warning(f"Cannot read document {file.name}: {exc}")
            items.append(CorpusItem(file.name, error=f"unreadable: {exc}"))
            continue
        items.append(CorpusItem(file.name, Document(file.name, text)))
    return items


def _read_jsonl(path: Path) -> List[CorpusItem]:
    items = []
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise CorpusNotFoundError(f"{path} ({exc})")
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = CorpusRecord.model_validate(json.loads(line))
        except (ValueError, ValidationError) as exc:
            doc_id = f"line:{number}"
            logger.warning(f"Malformed corpus record at {path.name}:{number}: {exc}")
            items.append(CorpusItem(doc_id, error=f"malformed record: {exc}"))
            continue
        items.append(CorpusItem(record.id, Document(record.id, record.text)))
    return items


def load_corpus(path: Union[str, Path]) -> List[CorpusItem]:
    """Read every document of a corpus directory or JSON Lines file."""
    path = Path(path)
    if path.is_dir():
        items = _read_directory(path)
    elif path.is_file():
        items = _read_jsonl(path)
    else:
        raise CorpusNotFoundError(str(path))
    failed = sum(1 for item in items if not item.ok)
    logger.info(f"Loaded corpus {path}: {len(items) - failed} documents, {failed} unreadable")
    return items


def corpus_from_documents(documents: Iterable[Document]) -> List[CorpusItem]:
    return [CorpusItem(doc.id, doc) for doc in documents]


def write_corpus_jsonl(documents: Iterable[Document], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        for doc in documents:
            handle.write(json.dumps({"id": doc.id, "text": doc.text}, ensure_ascii=False) + "\n")
    return path
