"""
Extraction-heavy workloads (T1 to T4).

Most of their time goes into regular expression and dictionary matching over
the raw text; the relational part only combines a handful of spans.
"""

from typing import List

from ..base_workload import Workload, WorkloadCategory

PERSON_PHONE = r"""
-- People mentioned together with a phone number.
create dictionary FirstNames as
  ('Anna', 'James', 'Maria', 'Robert', 'Linda', 'David', 'Susan', 'Michael', 'Karen', 'Thomas');

create view First as
  extract dictionary FirstNames on D.text as first from Document D;

create view Capitalized as
  extract regex /[A-Z][a-z]+/ on D.text as last from Document D;

create view Person as
  select * from First f, Capitalized c where Follows(f.first, c.last, 1, 1);

create view Phone as
  extract regex /\d{3}-\d{3}-\d{4}/ on D.text as phone from Document D;

create view PersonPhone as
  select * from Person p, Phone n where Follows(p.last, n.phone, 0, 40);

output view PersonPhone;
"""

ORGANIZATION = r"""
-- Two capitalized words ending in a company suffix.
create dictionary OrgSuffix as ('Inc', 'Corp', 'Ltd', 'Group', 'Labs');

create view Suffix as
  extract dictionary OrgSuffix on D.text as suffix from Document D;

create view CapPair as
  extract regex /[A-Z][a-z]+ [A-Z][a-z]+/ on D.text as name from Document D;

create view Org as
  select * from CapPair w, Suffix s where Contains(w.name, s.suffix);

create view OrgName as
  select o.name from Org o;

create view LongOrg as
  select * from OrgName o where SpanLengthGreaterThan(o.name, 3);

output view LongOrg;
"""

CONTACT = r"""
-- Any way of getting in touch: e-mail, phone or web site.
create view Email as
  extract regex /[a-z]+\.[a-z]+@[a-z]+\.(com|org|net)/ on D.text as contact from Document D;

create view Phone as
  extract regex /\(\d{3}\) \d{3}-\d{4}|\d{3}-\d{3}-\d{4}/ on D.text as contact from Document D;

create view Site as
  extract regex /www\.[a-z]+\.(com|org)/ on D.text as contact from Document D;

create view Contact as
  (select * from Email e) union all (select * from Phone p) union all (select * from Site s);

create view ContactClean as consolidate Contact;

output view ContactClean;
"""

FINANCIAL = r"""
-- Money amounts tied to a reporting verb and a date, fiscal quarters and the
-- other figures a filing quotes.
create dictionary DealVerbs as ('reported', 'raised', 'paid', 'earned', 'invested');

create view Verb as
  extract dictionary DealVerbs on D.text as verb from Document D;

create view Money as
  extract regex /\$\d+(,\d{3})*(\.\d\d)?/ on D.text as amount from Document D;

create view Date as
  extract regex /\d{4}-\d\d-\d\d/ on D.text as day from Document D;

create view Quarter as
  extract regex /Q[1-4] \d{4}/ on D.text as quarter from Document D;

create view Deal as
  select * from Verb v, Money m where Follows(v.verb, m.amount, 1, 20);

create view DatedDeal as
  select * from Deal d, Date t where Follows(d.amount, t.day, 0, 40);

create view Percent as
  extract regex /\d+(\.\d+)? ?%/ on D.text as figure from Document D;

create view Currency as
  extract regex /(USD|EUR|GBP|JPY|CHF) \d+(\.\d\d)?/ on D.text as figure from Document D;

create view FiscalYear as
  extract regex /FY ?\d\d(\d\d)?/ on D.text as figure from Document D;

create view Shares as
  extract regex /\d+ (million |billion )?shares/ on D.text as figure from Document D;

create view BasisPoints as
  extract regex /\d+ (bps|basis points)/ on D.text as figure from Document D;

create view Multiple as
  extract regex /\d+(\.\d+)?x/ on D.text as figure from Document D;

create view Ticker as
  extract regex /(NYSE|NASDAQ|LSE): ?[A-Z]{1,5}/ on D.text as figure from Document D;

create view MonthDay as
  extract regex /(Jan|Feb|Mar|Apr|May|Jun|Jul|Aug|Sep|Oct|Nov|Dec)[a-z]*\.? \d\d?/ on D.text as figure from Document D;

create view Year as
  extract regex /(19|20)\d\d/ on D.text as figure from Document D;

create view PerShare as
  extract regex /\$\d+(\.\d\d)? per share/ on D.text as figure from Document D;

create view Figure as
  (select * from Percent a) union all (select * from Currency b) union all (select * from FiscalYear c)
  union all (select * from Shares d) union all (select * from BasisPoints e) union all (select * from Multiple f)
  union all (select * from Ticker g) union all (select * from MonthDay h) union all (select * from Year i)
  union all (select * from PerShare j);

-- Amounts of a million or more written with every thousands group. The group
-- count needs more automaton states than the default accelerator budget, so
-- this view stays on the host under every offload scenario.
create view LargeAmount as
  extract regex /\$\d{1,3}(,\d{3}){2,99}/ on D.text as amount from Document D;

output view DatedDeal;
output view Quarter;
output view Figure;
output view LargeAmount;
"""


class _ExtractionWorkload(Workload):
    def __init__(self, name: str, description: str, query: str):
        self._name = name
        self._description = description
        self._query = query

    def get_workload_name(self) -> str:
        return self._name

    def get_workload_description(self) -> str:
        return self._description

    def get_category(self) -> WorkloadCategory:
        return WorkloadCategory.EXTRACTION

    def get_query(self) -> str:
        return self._query


def get_workload_instances() -> List[Workload]:
    return [
        _ExtractionWorkload("T1", "person names near phone numbers", PERSON_PHONE),
        _ExtractionWorkload("T2", "organizations with a company suffix", ORGANIZATION),
        _ExtractionWorkload("T3", "contact details, consolidated", CONTACT),
        _ExtractionWorkload("T4", "dated deals, quarters and quoted figures", FINANCIAL),
    ]
