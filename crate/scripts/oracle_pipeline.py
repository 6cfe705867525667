"""Reference pipeline used to produce the golden ingest files.

Written from the behavioural contract, not from the Rust sources: brute
force gazetteer (every entry at every position), pattern rules expanded
into all optional variants, greedy overlap resolution, population, and
incremental TF-IDF with hierarchy expansion.

Usage: python3 scripts/oracle_pipeline.py [count] > crates/service/tests/data/golden_ingest.json
"""

import json
import math
import sys
import unicodedata
from collections import deque
from datetime import date
from itertools import product
from pathlib import Path

import regex

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "crates" / "core" / "data"
CORPUS = ROOT / "crates" / "service" / "tests" / "data" / "corpus100.json"
GAMMA = 0.5


# ---------- knowledge base ----------

concepts = {}      # id -> (layer, parents)
individuals = {}   # id -> (layer, label, types)
for layer in ["upper", "domain", "lexical", "corpus"]:
    doc = json.loads((DATA / "ontology" / f"{layer}.json").read_text())
    for c in doc.get("concepts", []):
        concepts[c["id"]] = (layer, list(c.get("parents", [])))
    for i in doc.get("individuals", []):
        individuals[i["id"]] = (layer, i["label"], list(i["types"]))


def ancestor_distances(c):
    dist = {c: 0}
    queue = deque([c])
    while queue:
        x = queue.popleft()
        for p in concepts[x][1]:
            if p not in dist:
                dist[p] = dist[x] + 1
                queue.append(p)
    return dist


def instances(c):
    return sorted(i for i, (_, _, types) in individuals.items()
                  if any(c in ancestor_distances(t) for t in types))


# ---------- tokens ----------

def tokenize(text):
    chars = list(text)
    out = []
    i = 0
    while i < len(chars):
        c = chars[i]
        if c.isspace():
            i += 1
            continue
        start = i
        if c.isalpha():
            i += 1
            while i < len(chars):
                if chars[i].isalpha():
                    i += 1
                elif chars[i] in "'’" and i + 1 < len(chars) and chars[i + 1].isalpha():
                    i += 2
                else:
                    break
            kind = "word"
        elif c.isnumeric():
            while i < len(chars) and chars[i].isnumeric():
                i += 1
            kind = "number"
        else:
            i += 1
            kind = "punct" if unicodedata.category(c).startswith("P") else "symbol"
        out.append(("".join(chars[start:i]), start, i, kind))
    return out


def normalize(s):
    return " ".join(s.lower().split())


# ---------- gazetteer ----------

lexicon = json.loads((DATA / "lexicon.json").read_text())


def target_of(t):
    if t in concepts:
        return t, None
    return individuals[t][2][0], t


def gazetteer(doc_id, toks):
    out = []
    i = 0
    while i < len(toks):
        best = None
        for pos, e in enumerate(lexicon):
            surf = [t[0] for t in tokenize(e["surface"])]
            window = [t[0] for t in toks[i:i + len(surf)]]
            if len(window) < len(surf):
                continue
            cs = e.get("caseSensitive", False)
            same = window == surf if cs else [w.lower() for w in window] == [s.lower() for s in surf]
            if same and (best is None or len(surf) > best[0]):
                best = (len(surf), pos)
        if best is None:
            i += 1
            continue
        n, pos = best
        concept, ind = target_of(lexicon[pos]["target"])
        out.append(dict(docId=doc_id, span=[toks[i][1], toks[i + n - 1][2]], concept=concept,
                        individual=ind, source="gazetteer", ruleName=None, normalizedValue=None,
                        _priority=(1, 0)))
        i += n
    return out


# ---------- patterns ----------

rules = json.loads((DATA / "rules.json").read_text())
MONTHS = {"janvier": 1, "février": 2, "fevrier": 2, "mars": 3, "avril": 4, "mai": 5, "juin": 6,
          "juillet": 7, "août": 8, "aout": 8, "septembre": 9, "octobre": 10, "novembre": 11,
          "décembre": 12, "decembre": 12}


def atom_ok(m, tok):
    if "literal" in m:
        return tok[0] == m["literal"]
    if "kind" in m:
        return tok[3] == m["kind"]
    return regex.fullmatch(m["regex"], tok[0]) is not None


def variants(pattern):
    slots = [[m["optional"], []] if "optional" in m else [[m]] for m in pattern]
    for choice in product(*slots):
        yield [a for part in choice for a in part]


def norm_date(toks):
    y = m = d = None
    for text, _, _, kind in toks:
        if kind == "number" and len(text) == 4:
            y = int(text)
        elif kind == "number" and len(text) <= 2:
            d = int(text)
        elif kind == "word" and text.lower() in MONTHS:
            m = MONTHS[text.lower()]
    if y is None:
        return None
    if m is not None and d is not None:
        try:
            return date(y, m, d).isoformat()
        except ValueError:
            return None
    if m is not None:
        return f"{y:04d}-{m:02d}"
    return None if d is not None else f"{y:04d}"


def patterns(doc_id, toks):
    out = []
    for start in range(len(toks)):
        for r in rules:
            ends = [start + len(v) for v in variants(r["pattern"])
                    if v and start + len(v) <= len(toks)
                    and all(atom_ok(a, toks[start + k]) for k, a in enumerate(v))]
            if not ends:
                continue
            end = max(ends)
            nv = None
            if r["action"].get("normalizer") == "date":
                nv = norm_date(toks[start:end])
                if nv is None:
                    continue
            out.append(dict(docId=doc_id, span=[toks[start][1], toks[end - 1][2]],
                            concept=r["action"]["concept"], individual=None, source="pattern",
                            ruleName=r["name"], normalizedValue=nv, _priority=(0, r["priority"]),
                            _create=r["action"].get("createIndividual", False)))
    return out


def resolve(cands):
    def key(c):
        s, e = c["span"]
        return (-(e - s), 0 if c["individual"] else 1, (-c["_priority"][0], -c["_priority"][1]),
                s, c["ruleName"] or "", c["concept"], c["individual"] or "", c["normalizedValue"] or "")
    kept = []
    for c in sorted(cands, key=key):
        if all(c["span"][1] <= k["span"][0] or k["span"][1] <= c["span"][0] for k in kept):
            kept.append(c)
    return sorted(kept, key=lambda c: tuple(c["span"]))


# ---------- population ----------

def slug(key):
    out = ""
    for ch in key:
        if ch.isalnum():
            out += ch
        elif not out.endswith("_"):
            out += "_"
    return out.strip("_")


def populate(text, anns):
    new = []
    for a in anns:
        if a["source"] != "pattern" or a["individual"] or not a.get("_create"):
            continue
        surface = text[a["span"][0]:a["span"][1]]
        key = normalize(surface)
        found = [i for i in instances(a["concept"]) if normalize(individuals[i][1]) == key]
        if found:
            a["individual"] = found[0]
            continue
        layer = concepts[a["concept"]][0]
        base = f"{layer}:{slug(key)}"
        ident, n = base, 2
        while ident in individuals:
            ident, n = f"{base}_{n}", n + 1
        individuals[ident] = (layer, " ".join(surface.split()), [a["concept"]])
        lexicon.append({"surface": " ".join(surface.split()), "target": ident})
        new.append(ident)
        a["individual"] = ident
    return new


# ---------- index ----------

N = 0
df = {}
vectors = {}


def round12(x):
    return float(f"{x:.11e}")


def counts_of(anns):
    counts = {}
    for a in anns:
        layer = concepts[a["concept"]][0]
        if layer not in ("upper", "domain") or a["normalizedValue"] is not None:
            continue
        dist = ancestor_distances(a["concept"])
        if "upper:Temporal" in dist:
            continue
        for c, d in dist.items():
            counts[c] = counts.get(c, 0.0) + GAMMA ** d
    return counts


def add(doc_id, counts):
    global N
    n = N + 1
    vec = {}
    for t, c in counts.items():
        d = df.get(t, 0) + 1
        w = (1 + math.log(c)) * math.log(n / d)
        if w > 0:
            vec[t] = round12(w)
    for t in vec:
        df[t] = df.get(t, 0) + 1
    N = n
    vectors[doc_id] = vec


def main():
    count = int(sys.argv[1]) if len(sys.argv) > 1 else 12
    docs = json.loads(CORPUS.read_text())[:count]
    golden = []
    for doc in docs:
        text = doc["title"] + "\n" + doc["body"]
        toks = tokenize(text)
        anns = resolve(gazetteer(doc["id"], toks) + patterns(doc["id"], toks))
        new = populate(text, anns)
        add(doc["id"], counts_of(anns))
        clean = [{k: v for k, v in a.items() if not k.startswith("_")} for a in anns]
        golden.append({"id": doc["id"], "annotations": clean,
                       "report": {"annotations": len(anns), "newIndividuals": new, "indexN": N}})
    print(json.dumps({"articles": golden, "index": {"N": N, "df": df, "vectors": vectors}},
                     ensure_ascii=False, indent=1, sort_keys=True))


main()
