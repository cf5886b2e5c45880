"""Reference potentials and exact comparison against the construction.

Each JSON file under goldens/ records one potential as a list of
(coefficient, monomial) pairs.  Monomial keys are t1..t{l+1} with
integer (possibly negative) exponents plus an optional key E for powers
of e^{t^{l+1}}.  The bare coordinate t^{l+1} appears with its own key,
so the files describe the complete potential, not just its ring part.

Comparison is exact on rationals.  Terms that are polynomial in the
flat coordinates with total degree at most two are discarded from both
sides first: such terms are the usual additive ambiguity of a potential
and the construction pins them to zero.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Dict, List, Tuple

from .frobenius import FrobeniusData, frobenius_data
from .laurent import QQ, rat

GOLDEN_DIR = os.path.join(os.path.dirname(__file__), "goldens")

TermKey = Tuple[Tuple[int, ...], int]   # t-exponents (length l+1), E-exponent


def golden_ids() -> List[str]:
    names = [f[:-5] for f in os.listdir(GOLDEN_DIR) if f.endswith(".json")]
    return sorted(names)


def load_golden(gid: str) -> dict:
    path = os.path.join(GOLDEN_DIR, gid + ".json")
    if not os.path.exists(path):
        raise KeyError("unknown reference potential %r" % gid)
    with open(path) as fh:
        return json.load(fh)


def golden_terms(doc: dict) -> Dict[TermKey, QQ]:
    n = doc["l"] + 1
    out: Dict[TermKey, QQ] = {}
    for coeff, mono in doc["terms"]:
        exps = [0] * n
        e_exp = 0
        for name, p in mono.items():
            if name == "E":
                e_exp = p
            else:
                exps[int(name[1:]) - 1] = p
        key = (tuple(exps), e_exp)
        assert key not in out, "duplicate monomial in %s" % doc["id"]
        out[key] = rat(str(coeff))
    return out


def constructed_terms(data: FrobeniusData) -> Dict[TermKey, QQ]:
    """Full potential of a constructed case in the golden key format."""
    n = data.l + 1
    out: Dict[TermKey, QQ] = {}
    for exps, coeff in data.potential.terms.items():
        key = (tuple(exps[:data.l]) + (0,), exps[data.l])
        out[key] = coeff
    bare = [0] * n
    bare[data.k - 1] = 2
    bare[n - 1] = 1
    out[(tuple(bare), 0)] = data.bare_coefficient
    return out


def _drop_quadratic(terms: Dict[TermKey, QQ]) -> Dict[TermKey, QQ]:
    out = {}
    for (exps, e_exp), coeff in terms.items():
        if e_exp == 0 and all(x >= 0 for x in exps) and sum(exps) <= 2:
            continue
        out[(exps, e_exp)] = coeff
    return out


@dataclass
class GoldenReport:
    gid: str
    l: int
    k: int
    m: int
    matched: int
    missing: List[TermKey]        # golden terms absent from the construction
    extra: List[TermKey]          # constructed terms absent from the golden
    wrong: List[Tuple[TermKey, QQ, QQ]]   # key, golden coeff, constructed

    @property
    def ok(self) -> bool:
        return not (self.missing or self.extra or self.wrong)


def compare_golden(gid: str) -> GoldenReport:
    doc = load_golden(gid)
    want = _drop_quadratic(golden_terms(doc))
    data = frobenius_data(doc["l"], doc["k"], doc["m"])
    got = _drop_quadratic(constructed_terms(data))
    if "euler" in doc:
        assert tuple(rat(str(x)) for x in doc["euler"]) == data.euler
    missing = sorted(k for k in want if k not in got)
    extra = sorted(k for k in got if k not in want)
    wrong = sorted((k, want[k], got[k])
                   for k in want if k in got and want[k] != got[k])
    matched = sum(1 for k in want if k in got and want[k] == got[k])
    return GoldenReport(gid, doc["l"], doc["k"], doc["m"],
                        matched, missing, extra, wrong)
