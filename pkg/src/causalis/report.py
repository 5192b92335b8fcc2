"""JSON and table rendering of causal accounts and repertoires.

The JSON layout is shared by engine output and oracle predictions, so the
two can be diffed directly. Key order is fixed and links come sorted by
direction and then occurrence members, which makes the text stable:
parsing it and dumping again with ``dumps`` gives identical bytes.
"""

import json

from .engine import CausalAccount, CausalLink, LinkAnalysis
from .network import INPUT, OUTPUT, CausalNetwork, all_states
from .repertoire import Repertoire


def _occ_dict(net: CausalNetwork, occ) -> dict:
    return net.labels(occ.slice, occ.members, occ.states)


def analysis_to_dict(net: CausalNetwork, a: LinkAnalysis) -> dict:
    return {
        "candidate": _occ_dict(net, a.candidate),
        "alpha": a.alpha,
        "rho": a.rho,
        "mip": a.mip.to_list(net) if a.mip is not None else None,
    }


def link_to_dict(net: CausalNetwork, link: CausalLink) -> dict:
    return {
        "direction": link.direction,
        "occurrence": _occ_dict(net, link.occurrence),
        "alpha": link.alpha_max,
        "status": link.status,
        "candidates": [analysis_to_dict(net, a) for a in link.candidates],
    }


def account_to_dict(net: CausalNetwork, account: CausalAccount) -> dict:
    t = account.transition
    links = sorted(account.links, key=lambda l: (l.direction, l.occurrence.members))
    return {
        "transition": {
            "before": net.labels(INPUT, range(len(net.inputs)), t.before),
            "after": net.labels(OUTPUT, range(len(net.outputs)), t.after),
        },
        "links": [link_to_dict(net, l) for l in links],
    }


def dumps(data) -> str:
    """Canonical JSON text used for every machine-readable output."""
    return json.dumps(data, indent=2, ensure_ascii=False, allow_nan=True)


def _label(d: dict) -> str:
    return ",".join(f"{k}={v}" for k, v in d.items()) if d else "{}"


def _table(header: list, rows: list) -> str:
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    out = []
    for row in [header] + rows:
        out.append("  ".join(str(x).ljust(w) for x, w in zip(row, widths)).rstrip())
    return "\n".join(out)


def link_rows(net: CausalNetwork, links) -> list:
    rows = []
    for link in links:
        d = link_to_dict(net, link)
        cands = " | ".join(_label(c["candidate"]) for c in d["candidates"]) or "-"
        rows.append([d["direction"], _label(d["occurrence"]), f"{d['alpha']:.3f}", d["status"], cands])
    return rows


def account_table(net: CausalNetwork, account: CausalAccount) -> str:
    d = account_to_dict(net, account)
    head = f"transition {_label(d['transition']['before'])} -> {_label(d['transition']['after'])}"
    links = sorted(account.links, key=lambda l: (l.direction, l.occurrence.members))
    if not links:
        return head + "\n(no causal links)"
    body = _table(["direction", "occurrence", "alpha", "status", "actual"], link_rows(net, links))
    return head + "\n" + body


def link_table(net: CausalNetwork, link: CausalLink) -> str:
    return _table(["direction", "occurrence", "alpha", "status", "actual"], link_rows(net, [link]))


def repertoire_to_dict(net: CausalNetwork, r: Repertoire) -> dict:
    return r.to_dict(net)


def repertoire_table(net: CausalNetwork, r: Repertoire, reference: Repertoire = None) -> str:
    """One row per purview state; ``reference`` adds a second probability column."""
    variables = net.variables(r.purview.slice)
    names = [variables[m].name for m in r.purview.members]
    header = names + ["p"] + (["unconstrained"] if reference is not None else [])
    rows = []
    for state in all_states(r.cards):
        row = [variables[m].states[s] for m, s in zip(r.purview.members, state)]
        row.append(f"{r.prob_of(state):.3f}")
        if reference is not None:
            row.append(f"{reference.prob_of(state):.3f}")
        rows.append(row)
    return _table(header, rows)
