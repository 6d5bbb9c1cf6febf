"""
Relational-heavy workload (T5).

Matching short function words is cheap, but chaining two proximity self-joins
over them grows with the cube of the matches per document, so the relational
operators dominate the profile at every document size.
"""

from typing import List

from ..base_workload import Workload, WorkloadCategory

CLAUSES = r"""
create dictionary FunctionWords as
  ('a', 'an', 'and', 'are', 'at', 'by', 'for', 'has', 'in', 'is', 'it',
   'of', 'on', 'or', 'that', 'the', 'to', 'was', 'were', 'will', 'with');

create view Fn as
  extract dictionary FunctionWords on D.text as fn from Document D;

create view Pair as
  select * from Fn f, Fn g where Follows(f.fn, g.fn, 0, 80);

create view Triple as
  select * from Pair p, Fn h where Follows(p.fn_1, h.fn, 0, 80);

create view Clause as
  select * from Triple t where SpanLengthGreaterThan(t.fn_1, 1) and not Overlaps(t.fn, t.fn_2);

output view Clause;
"""


class ClauseWorkload(Workload):
    """Chains of three nearby function words (T5)."""

    def get_workload_name(self) -> str:
        return "T5"

    def get_workload_description(self) -> str:
        return "function word chains"

    def get_category(self) -> WorkloadCategory:
        return WorkloadCategory.RELATIONAL

    def get_query(self) -> str:
        return CLAUSES


def get_workload_instances() -> List[Workload]:
    return [ClauseWorkload()]
