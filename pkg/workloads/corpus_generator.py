"""
Synthetic corpus generator.

Documents are built from sentence templates filled with names, phone
numbers, e-mail addresses, organizations, amounts and dates, then cut to the
requested size. Text is ASCII, so a document's byte size equals its length.
Output depends only on the seed.
"""

import random
from typing import List, Sequence, Tuple, Union

from core.exceptions import ConfigError
from core.models.annotations import Document

DOC_SIZES = (128, 256, 2048)

FIRST_NAMES = ["Anna", "James", "Maria", "Robert", "Linda", "David", "Susan", "Michael", "Karen", "Thomas"]
LAST_NAMES = ["Smith", "Miller", "Garcia", "Brown", "Wilson", "Taylor", "Moore", "Clark", "Lewis", "Young"]
ORG_NAMES = ["Acme", "Globex", "Initech", "Umbrella", "Hooli", "Vandelay", "Stark", "Wayne", "Tyrell", "Cyberdyne"]
ORG_SUFFIXES = ["Inc", "Corp", "Ltd", "Group", "Labs"]
CITIES = ["Boston", "Denver", "Austin", "Seattle", "Chicago", "Portland", "Atlanta", "Phoenix"]
DEAL_VERBS = ["reported", "raised", "paid", "earned", "invested"]
DOMAINS = ["com", "org", "net"]

TEMPLATES = [
    "{first} {last} can be reached at {phone} or {email}. ",
    "Call {first} {last} on {phone} before the end of the week. ",
    "{org} {suffix} {verb} {money} on {date} in {city}. ",
    "In {quarter} the board of {org} {suffix} said revenue was up and costs were down. ",
    "The office of {org} {suffix} is in {city} and the team has a site at www.{site}.{tld} for details. ",
    "It is said that the plan for the year was made in {city} with the help of the staff. ",
    "{first} {last} of {org} {suffix} will meet the press in {city} on {date}. ",
    "Write to {email} or dial ({area}) {exchange}-{line} for the latest filings. ",
]


def _fill(rng: random.Random, template: str) -> str:
    first = rng.choice(FIRST_NAMES)
    last = rng.choice(LAST_NAMES)
    org = rng.choice(ORG_NAMES)
    area, exchange, line = rng.randint(200, 999), rng.randint(200, 999), rng.randint(0, 9999)
    return template.format(
        first=first,
        last=last,
        org=org,
        suffix=rng.choice(ORG_SUFFIXES),
        city=rng.choice(CITIES),
        verb=rng.choice(DEAL_VERBS),
        phone=f"{area}-{exchange}-{line:04d}",
        area=area,
        exchange=exchange,
        line=f"{line:04d}",
        email=f"{first.lower()}.{last.lower()}@{org.lower()}.{rng.choice(DOMAINS)}",
        money=f"${rng.randint(1, 999)},{rng.randint(0, 999):03d}.{rng.randint(0, 99):02d}",
        date=f"20{rng.randint(10, 29)}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}",
        quarter=f"Q{rng.randint(1, 4)} 20{rng.randint(10, 29)}",
        site=org.lower(),
        tld=rng.choice(DOMAINS[:2]),
    )


def generate_text(rng: random.Random, size: int) -> str:
    parts: List[str] = []
    length = 0
    while length < size:
        sentence = _fill(rng, rng.choice(TEMPLATES))
        parts.append(sentence)
        length += len(sentence)
    return "".join(parts)[:size]


def generate_corpus(
    count: int,
    doc_size: Union[int, Tuple[int, int]] = 256,
    seed: int = 0,
    id_prefix: str = "doc",
) -> List[Document]:
    """``count`` documents of ``doc_size`` bytes, or sizes drawn from an inclusive (low, high) range."""
    if count < 0:
        raise ConfigError(f"document count must not be negative, got {count}")
    if isinstance(doc_size, int):
        low = high = doc_size
    else:
        low, high = doc_size
    if low < 1 or high < low:
        raise ConfigError(f"invalid document size {doc_size}")
    rng = random.Random(seed)
    width = len(str(max(count - 1, 0)))
    documents = []
    for index in range(count):
        size = low if low == high else rng.randint(low, high)
        documents.append(Document(f"{id_prefix}-{index:0{width}d}", generate_text(rng, size)))
    return documents


def generate_size_sweep(count: int, sizes: Sequence[int] = DOC_SIZES, seed: int = 0) -> List[Document]:
    """``count`` documents per size, ids prefixed with the size."""
    documents: List[Document] = []
    for size in sizes:
        documents.extend(generate_corpus(count, size, seed + size, id_prefix=f"s{size}"))
    return documents
