"""
Shared fixtures: small rule programs, their compiled graphs and documents.
"""

import pytest

from core.aql import compile_aql
from core.models.annotations import Document
from core.partitioner import load_capabilities

# Two extractions joined, then projected: a five-node graph.
CAPS_NUMBERS = """
create view Caps as extract regex /[A-Z][a-z]+/ on D.text as name from Document D;
create view Num as extract regex /[0-9]+/ on D.text as num from Document D;
create view CapNum as select * from Caps c, Num n where Follows(c.name, n.num, 1, 3);
create view Named as select p.name from CapNum p;
output view Named;
"""

SINGLE_REGEX = """
create view Caps as extract regex /[A-Z][a-z]+/ on D.text from Document D;
output view Caps;
"""

# A union feeding a join: the union's interleaved output must be re-sorted.
UNION_JOIN = """
create view A as extract regex /a+/ on D.text from Document D;
create view B as extract regex /b+/ on D.text from Document D;
create view AB as (select * from A x) union all (select * from B y);
create view C as extract regex /c+/ on D.text from Document D;
create view J as select * from AB u, C c where Follows(u.match, c.match, 0, 10);
output view J;
"""

CITIES = """
create dictionary Cities as ('new york', 'york', 'boston');
create view City as extract dictionary Cities on D.text as city from Document D;
create view Cap as extract regex /[A-Z][a-z]+/ on D.text as word from Document D;
create view Both as (select * from City x) union all (select * from City y);
create view Clean as consolidate Both;
output view Clean;
output view Cap;
"""

# The long A match ends after several B matches that start later.
OUT_OF_ORDER = """
create view A as extract regex /x[a-z]*y/ on D.text from Document D;
create view B as extract regex /a/ on D.text from Document D;
create view AB as (select * from A p) union all (select * from B q);
create view C as extract regex /z/ on D.text from Document D;
create view J as select * from AB u, C c where Follows(u.match, c.match, 0, 10);
output view J;
"""

SAMPLE_TEXTS = [
    "Alice 42 and Bob 7 went to Room 101.",
    "nothing to see here",
    "",
    "Flight 9 left New York for Boston at Gate 12; York 3 was closed.",
    "aaa b c aab cc ba ca",
]


@pytest.fixture
def caps_numbers_graph():
    return compile_aql(CAPS_NUMBERS)


@pytest.fixture
def single_regex_graph():
    return compile_aql(SINGLE_REGEX)


@pytest.fixture
def union_join_graph():
    return compile_aql(UNION_JOIN)


@pytest.fixture
def cities_graph():
    return compile_aql(CITIES)


@pytest.fixture
def documents():
    return [Document(f"d{index}", text) for index, text in enumerate(SAMPLE_TEXTS)]


@pytest.fixture
def default_caps():
    return load_capabilities("default")


@pytest.fixture
def all_caps():
    return load_capabilities("all")


@pytest.fixture
def caps_numbers_source():
    return CAPS_NUMBERS


@pytest.fixture
def single_regex_source():
    return SINGLE_REGEX


@pytest.fixture
def out_of_order_graph():
    return compile_aql(OUT_OF_ORDER)
