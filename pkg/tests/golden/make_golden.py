"""Regenerate the frozen reference values in this directory.

anchors.json holds oracle (256-bit mpmath) values computed straight from the
definitions; audit_seed42.json is the default audit report, whose violated
statuses are all oracle-confirmed. Run from the repository root:

    python3 tests/golden/make_golden.py
"""

from __future__ import annotations

import io
import json
from pathlib import Path

from meanaudit import oracle as O
from meanaudit.claims import get_claim, oracle_eval
from meanaudit.cli import run

HERE = Path(__file__).resolve().parent
E = O.ctx().e


def s(x):
    return O.ctx().nstr(x, 30)


def anchors():
    ctx, mp = O.ctx(), O.mp
    one, e = mp(1), E
    out = {
        "identric_1_e": s(O.I(one, e)),
        "logarithmic_1_e": s(O.L(one, e)),
        "lehmer_2_1_e": s(O.lehmer(mp(2), one, e)),
        "power_dlog_1_e_t1": s(O.diff_family("power", 1, one, e, 1)),
        "weighted_dlog_4_2_p1_w1": s(O.diff_family("weighted", 1, mp(4), mp(2), 1, p=mp(1))),
        "power_plain_d2_1_e_p2": s(O.diff_family("power", 2, one, e, 2, log=False)),
        "power_plain_d2_1_e_pm2": s(O.diff_family("power", -2, one, e, 2, log=False)),
    }
    l1, l2, l3 = (O.lehmer(mp(k), one, e) for k in (1, 2, 3))
    out["lehmer_three_term_1_e_c2"] = s(l2 * l2 - l1 * l3)
    j1, j2, j3 = (O.alzer(mp(k), one, mp(2)) for k in (1, 2, 3))
    out["alzer_paper_three_term_1_2_c2"] = s(j2 * j2 - j1 * j3)
    margins = {}
    for cid in ("T1.1", "T1.2", "T1.3", "T2.1", "T2.2", "T2.3", "T3.1", "T3.2", "T3.3", "TT-L", "TT-J"):
        c = get_claim(cid)
        w = oracle_eval(c, dict(c.anchor))
        margins[cid] = {"point": dict(c.anchor), "lhs": repr(w.lhs_value), "rhs": repr(w.rhs_value), "margin": repr(w.margin)}
    out["claim_anchors"] = margins
    return out


def main():
    (HERE / "anchors.json").write_text(json.dumps(anchors(), indent=2) + "\n")
    buf = io.StringIO()
    code = run(["claims-audit", "--seed", "42", "--format", "json"], stdout=buf)
    assert code == 2, code
    (HERE / "audit_seed42.json").write_text(buf.getvalue())


if __name__ == "__main__":
    main()
