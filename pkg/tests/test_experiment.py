import json

from starq.experiment import (NO_LIFT, NON_OPO_LIFT, OPO_LIFT, SKIPPED,
                              AuditReport, opo_audit)
from starq.jets import NABLA_PHI
from starq.star import build_star


def test_audit_of_orderable_gauge_star(sym_star3):
    report = opo_audit(sym_star3)
    assert report.all_orderable
    statuses = {audit.level: audit.status for audit in report.levels}
    assert statuses == {0: OPO_LIFT, 1: OPO_LIFT, 2: OPO_LIFT, 3: OPO_LIFT}
    # the audit names the diagrams used by each lift
    level3 = next(a for a in report.levels if a.level == 3)
    assert level3.combination and level3.diagrams


def test_audit_detects_non_orderable_gauge():
    pivot = build_star(NABLA_PHI, 2, opo_gauge_limit=0)
    assert pivot.gauges[2] == "pivot"
    report = opo_audit(pivot)
    level2 = next(a for a in report.levels if a.level == 2)
    assert level2.status == NO_LIFT
    assert not report.all_orderable


def test_audit_skips_heavy_levels(x3_star4=None):
    star = build_star(NABLA_PHI, 2)
    report = opo_audit(star, max_factors=1)
    statuses = {a.level: a.status for a in report.levels}
    assert statuses[2] == SKIPPED
    assert report.all_orderable  # skip is not a failure


def test_audit_report_serializes(sym_star3):
    report = opo_audit(sym_star3)
    data = report.to_json()
    blob = json.dumps(data)
    assert data["allOrderable"] is True
    assert len(data["levels"]) == 4
    assert blob  # fully JSON-serializable
