# Copyright 2026 The umlsqa Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the committed test fixtures. Output is deterministic."""

import json
import os
import random
from xml.sax.saxutils import escape

HERE = os.path.dirname(os.path.abspath(__file__))

DIRECT_HEAD = "Only return the medical terminologies contained in the input question.\n"
INDIRECT_HEAD = "Return medical terminologies related to the input question.\n"
BODY = (
    "Please return in JSON format.\n"
    "Output Format:\n"
    "{\n"
    '  "medical terminologies": ["<name>", "<name>"]\n'
    "}\n"
    "Please only return the JSON format information.\n"
    "Input: {question}\n"
    "Output:"
)


def prompt(head, question):
    return head + BODY.replace("{question}", question)


def write_json(path, obj, indent=2):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f, indent=indent, ensure_ascii=False)
        f.write("\n")


def write_lines(path, objs):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for o in objs:
            f.write(json.dumps(o, ensure_ascii=False) + "\n")


def slug(key):
    out, sep = "", False
    for c in key.lower():
        if not (c.isascii() and c.isalnum()):
            sep = bool(out)
            continue
        if sep:
            out += "_"
        sep = False
        out += c
    return out or "_"


# --- UMLS ------------------------------------------------------------------

CONCEPTS = {
    "C0001403": "Addison Disease",
    "C0038454": "Cerebrovascular accident",
    "C0018801": "Heart failure",
    "C0011849": "Diabetes Mellitus",
    "C0004057": "Aspirin",
    "C0021403": "Influenza virus vaccine",
    "C0020538": "Hypertensive disease",
    "C0001623": "Adrenal insufficiency",
    "C1704436": "Peripheral Arterial Diseases",
    "C0149931": "Migraine Disorders",
}

SEARCHES = {
    "Addison Disease": ["C0001403", "C0001623"],
    "stroke": ["C0038454"],
    "Cerebrovascular accident": ["C0038454"],
    "heart failure": ["C0018801"],
    "diabetes": ["C0011849"],
    "diabetes mellitus": ["C0011849"],
    "aspirin": ["C0004057"],
    "flu shot": ["C0021403"],
    "influenza vaccine": ["C0021403"],
    "hypertension": ["C0020538"],
    "high blood pressure": ["C0020538"],
    "adrenal insufficiency": ["C0001623", "C0001403"],
    "peripheral arterial disease": ["C1704436"],
    "migraines": ["C0149931"],
    "PAD": [],
    "xyzzy syndrome": [],
}
# Search by CUI, as `umls concept` does to recover the preferred name.
for cui in CONCEPTS:
    SEARCHES[cui] = [cui]

DEFINITIONS = {
    # Non-English first, then lower-priority English, then MSH: MSH wins.
    "C0001403": [
        ("MSHGER", "Eine Erkrankung der Nebennierenrinde."),
        ("CSP", "chronic adrenocortical insufficiency with hyperpigmentation."),
        ("NCI", "A rare disorder in which the adrenal glands do not make enough hormones."),
        ("MSH", "An adrenal disease characterized by the progressive destruction of the "
                "ADRENAL CORTEX, resulting in insufficient production of ALDOSTERONE and "
                "HYDROCORTISONE."),
    ],
    # No MSH: NCI wins over earlier CSP.
    "C0038454": [
        ("CSP", "sudden loss of neurologic function due to vascular disease."),
        ("MSHSPA", "Deterioracion neurologica de origen vascular."),
        ("NCI", "A sudden loss of neurological function secondary to hemorrhage or "
                "ischemia in the brain parenchyma due to a vascular event."),
    ],
    # No listed source: response order among English ones.
    "C0018801": [
        ("MSHPOR", "Insuficiencia cardiaca."),
        ("CSP", "inability of the heart to pump blood at an adequate rate."),
        ("MEDLINEPLUS", "Heart failure means your heart is not pumping as well as it should."),
    ],
    # Only translated sources: no definition.
    "C0011849": [
        ("MSHSPA", "Enfermedad metabolica caracterizada por hiperglucemia."),
        ("MSHFRE", "Maladie metabolique caracterisee par une hyperglycemie."),
        ("MDRJPN", "糖尿病"),
    ],
    "C0004057": [
        ("NCI", "An orally administered non-steroidal antiinflammatory agent."),
        ("MSH", "The prototypical analgesic used in the treatment of mild to moderate pain."),
    ],
    "C0021403": [
        ("MSH", "Vaccines or candidate vaccines used to prevent infection with influenza "
                "viruses."),
    ],
    "C0020538": [
        ("ICF", "Functions of maintaining blood pressure above normal."),
        ("NCI", "Blood pressure that is abnormally high."),
        ("MSH", "Persistently high systemic arterial BLOOD PRESSURE."),
    ],
    "C0001623": [
        ("ICF", "Functions of the adrenal glands producing too little hormone."),
        ("CSP", "hypofunction of the adrenal cortex."),
    ],
    "C1704436": [],
    "C0149931": [
        ("MSH", "A class of disabling primary headache disorders, characterized by "
                "recurrent unilateral pulsatile headaches."),
    ],
}

SMALL_RELATIONS = {
    "C0001403": [
        ("RN", "has_finding", "Hyperpigmentation", "C0162834", "MSH"),
        ("RO", "", "Adrenal insufficiency", "C0001623", "MSH"),
        ("RO", "has_finding", "Hyperpigmentation", "C0162834", "SNOMEDCT_US"),
        ("RO", "may_be_treated_by", "Hydrocortisone", "C0020268", "MED-RT"),
        ("RO", "may_be_treated_by", "Fludrocortisone", "C0016315", "MED-RT"),
        ("RB", "", "Adrenal Gland Diseases", "C0001621", "MSH"),
    ],
    "C0038454": [
        ("RO", "has_finding_site", "Brain structure", "C0006104", "SNOMEDCT_US"),
        ("RO", "may_be_prevented_by", "Aspirin", "C0004057", "MED-RT"),
        ("RB", "", "Cerebrovascular Disorders", "C0007820", "MSH"),
    ],
    "C0018801": [
        ("RO", "has_finding_site", "Heart structure", "C0018787", "SNOMEDCT_US"),
        ("RO", "may_be_treated_by", "Furosemide", "C0016860", "MED-RT"),
    ],
    "C0011849": [
        ("RO", "may_be_treated_by", "Insulin", "C0021641", "MED-RT"),
        ("RO", "may_be_treated_by", "Metformin", "C0025598", "MED-RT"),
        ("RN", "", "Diabetes Mellitus, Type 2", "C0011860", "MSH"),
    ],
    "C0021403": [
        ("RO", "may_prevent", "Influenza", "C0021400", "MED-RT"),
    ],
    "C0020538": [
        ("RO", "may_be_treated_by", "Lisinopril", "C0065374", "MED-RT"),
        ("RO", "may_be_treated_by", "Amlodipine", "C0051696", "MED-RT"),
    ],
    "C0001623": [
        ("RN", "", "Addison Disease", "C0001403", "MSH"),
    ],
    "C1704436": [
        ("RO", "may_be_treated_by", "Cilostazol", "C0055729", "MED-RT"),
    ],
    "C0149931": [
        ("RO", "may_be_treated_by", "Sumatriptan", "C0128660", "MED-RT"),
    ],
}


def relation_entry(rel, add, name, cui, sab):
    return {
        "relationLabel": rel,
        "additionalRelationLabel": add,
        "relatedIdName": name,
        "relatedId": "https://uts-ws.nlm.nih.gov/rest/content/2024AA/CUI/" + cui,
        "rootSource": sab,
    }


def aspirin_relations():
    """120 entries over 4 pages of 30, with duplicates early on."""
    rng = random.Random(20260101)
    labels = ["may_treat", "may_prevent", "has_contraindicated_drug", "has_ingredient",
              "isa", "has_mechanism_of_action", "has_physiologic_effect"]
    entries = []
    for i in range(120):
        label = labels[i % len(labels)]
        entries.append((
            "RO", label, "Related concept %03d" % i, "C%07d" % (9000000 + i),
            rng.choice(["MED-RT", "RXNORM", "SNOMEDCT_US", "MSH"])))
    # Duplicates of (label, name) inside the first 25; they must not count.
    entries[3] = ("RO",) + entries[1][1:3] + ("C9999001", "RXNORM")
    entries[10] = ("RO",) + entries[0][1:3] + ("C9999002", "SNOMEDCT_US")
    entries[11] = ("RO",) + entries[2][1:3] + ("C9999003", "MSH")
    return entries


def fixture(dirname, kind, key, body, page=1):
    if kind == "search":
        path = os.path.join(dirname, "search", slug(key) + ".json")
    elif kind == "definitions":
        path = os.path.join(dirname, "definitions", key + ".json")
    else:
        path = os.path.join(dirname, "relations", "%s.p%d.json" % (key, page))
    write_json(path, {"query": {"kind": kind, "key": key, "page": page}, "body": body})


def write_umls(dirname):
    for term, cuis in SEARCHES.items():
        if cuis:
            results = [{"ui": c, "rootSource": "MTH", "uri": "", "name": CONCEPTS[c]}
                       for c in cuis]
        else:
            results = [{"ui": "NONE", "name": "NO RESULTS"}]
        fixture(dirname, "search", term,
                {"pageSize": 25, "pageNumber": 1, "result": {"classType": "searchResults",
                                                             "results": results}})
    for cui, defs in DEFINITIONS.items():
        body = {"pageSize": 25, "pageNumber": 1, "pageCount": 1,
                "result": [{"classType": "Definition", "sourceOriginated": True,
                            "rootSource": s, "value": v} for s, v in defs]}
        fixture(dirname, "definitions", cui, body)
    for cui, rels in SMALL_RELATIONS.items():
        fixture(dirname, "relations", cui,
                {"pageSize": 25, "pageNumber": 1, "pageCount": 1,
                 "result": [relation_entry(*r) for r in rels]})
    big = aspirin_relations()
    for page in range(4):
        chunk = big[page * 30:(page + 1) * 30]
        fixture(dirname, "relations", "C0004057",
                {"pageSize": 30, "pageNumber": page + 1, "pageCount": 4,
                 "result": [relation_entry(*r) for r in chunk]}, page=page + 1)


# --- corpus and scripted LLM ------------------------------------------------

QUESTIONS = [
    ("Q01", "What are the early symptoms of Addison Disease?",
     ["Addison Disease"], ["Addison Disease", "adrenal insufficiency"],
     ["Early symptoms of Addison disease include fatigue, muscle weakness, weight "
      "loss and darkening of the skin."]),
    ("Q02", "Can a stroke cause memory loss?",
     ["stroke"], ["stroke", "Cerebrovascular accident"],
     ["Yes. A stroke can damage brain areas involved in memory, causing memory loss.",
      "Memory problems are common after a stroke."]),
    ("Q03", "Do I need a flu shot if I have heart failure and diabetes?",
     ["flu shot", "heart failure", "diabetes"],
     ["influenza vaccine", "heart failure", "diabetes mellitus"],
     ["Yes. People with heart failure or diabetes should get a yearly flu vaccine."]),
    ("Q04", "Is it safe to take aspirin every day?",
     ["aspirin", "Aspirin ", "ASPIRIN"], ["aspirin", "stroke"],
     ["Daily aspirin can prevent heart attack and stroke in some people but raises the "
      "risk of bleeding; ask your doctor first."]),
    ("Q05", "How is PAD treated?",
     ["PAD"], ["peripheral arterial disease"],
     ["Peripheral artery disease is treated with exercise, quitting smoking, medicines "
      "such as cilostazol, and sometimes surgery."]),
    ("Q06", "What foods should I avoid with hypertension?",
     ["hypertension"], ["hypertension", "high blood pressure"],
     ["Limit salt, processed foods, alcohol and saturated fat if you have high blood "
      "pressure."]),
    ("Q07", "Why do my migraines get worse at night?",
     ["migraines"], ["migraines"],
     ["Sleep problems, missed medication and hormonal changes can make migraines worse "
      "at night."]),
    ("Q08", "Can adrenal insufficiency come back after treatment?",
     ["adrenal insufficiency"], ["adrenal insufficiency", "Addison Disease"],
     ["Primary adrenal insufficiency usually needs lifelong hormone replacement."]),
    ("Q09", "I was told I have xyzzy syndrome, what should I do?",
     ["xyzzy syndrome"], None,
     ["Ask your doctor to explain the diagnosis and the treatment options."]),
    ("Q10", "Does diabetes raise the risk of stroke?",
     ["diabetes", "stroke"], ["diabetes mellitus", "Cerebrovascular accident"],
     ["Yes. Diabetes roughly doubles the risk of stroke."]),
]


def write_pipeline(dirname):
    corpus = [{"id": qid, "question": q, "reference_answers": refs,
               "source_tag": "fixture"} for qid, q, _, _, refs in QUESTIONS]
    write_lines(os.path.join(dirname, "corpus.jsonl"), corpus)
    rules = []
    for qid, q, direct, indirect, _ in QUESTIONS:
        rules.append({"match": prompt(DIRECT_HEAD, q),
                      "response": "```json\n" + json.dumps(
                          {"medical terminologies": direct}, indent=2) + "\n```"})
        rules.append({"match": prompt(INDIRECT_HEAD, q),
                      "response": "Sure! " + json.dumps({"medical terminologies": indirect})
                      if indirect is not None else
                      "I am unable to identify medical terminologies."})
    write_json(os.path.join(dirname, "script.json"), {"rules": rules, "echo": True})
    write_json(os.path.join(dirname, "config.json"), {
        "llm": {"type": "scripted", "file": "script.json"},
        "umls": {"type": "fixtures", "dir": "../umls"},
        "systems": [
            {"model_id": "scripted-llm", "augmentation": "none", "seed": 7},
            {"model_id": "scripted-llm", "augmentation": "direct+umls", "seed": 7},
            {"model_id": "scripted-llm", "augmentation": "indirect+umls", "seed": 7},
        ],
        "relation_cap": 25,
        "workers": 3,
        "extraction_retries": 2,
        "retry": {"http_attempts": 1, "initial_backoff_ms": 1},
        "embedder": {"type": "stub", "dim": 4096},
    })
    with open(os.path.join(dirname, "ids_subset.txt"), "w") as f:
        f.write("# three-question subset\nQ03\nQ01\nQ10\n")


# --- extraction wrappings ---------------------------------------------------

T = ["heart failure", "diabetes", "flu shot"]
OBJ = json.dumps({"medical terminologies": T})
OBJ_PRETTY = json.dumps({"medical terminologies": T}, indent=2)

ADVERSARIAL = [
    ("plain", OBJ, T),
    ("fence_json", "```json\n" + OBJ_PRETTY + "\n```", T),
    ("fence_bare", "```\n" + OBJ_PRETTY + "\n```", T),
    ("prose_before", "Here are the terms you asked for:\n" + OBJ, T),
    ("prose_after", OBJ + "\nThese are the main medical concepts in the question.", T),
    ("prose_both", "Sure!\n\n" + OBJ_PRETTY + "\n\nLet me know if you need more.", T),
    ("extra_keys", json.dumps({"question_type": "treatment", "medical terminologies": T,
                               "confidence": 0.9}), T),
    ("nested", json.dumps({"result": {"medical terminologies": T}}), T),
    ("decoy_object_first", 'Context: {"note": "no terms here"}\nAnswer: ' + OBJ, T),
    ("braces_in_strings", json.dumps({"medical terminologies": ["IL-{6}", "a}b{c"]}),
     ["IL-{6}", "a}b{c"]),
    ("escaped_quotes", json.dumps({"medical terminologies": ['"sugar" diabetes', "flu"]}),
     ['"sugar" diabetes', "flu"]),
    ("output_prefix", "Output: " + OBJ, T),
    ("crlf_whitespace", OBJ_PRETTY.replace("\n", "\r\n    "), T),
    ("unicode", json.dumps({"medical terminologies": ["Sjögren syndrome", "Ménière disease"]},
                           ensure_ascii=False),
     ["Sjögren syndrome", "Ménière disease"]),
    ("stray_close_brace", "Note: } ignore that\n" + OBJ, T),
    ("two_objects_first_wins",
     OBJ + "\nAlternatively:\n" + json.dumps({"medical terminologies": ["other"]}), T),
    ("fence_then_bullets", "```json\n" + OBJ + "\n```\n- heart failure: a condition\n"
     "- diabetes: a disease {chronic}", T),
    ("empty_list", 'No terms found. {"medical terminologies": []}', []),
    ("padded_elements", json.dumps({"medical terminologies": ["  heart failure ", "",
                                                              "\tdiabetes", "   "]}),
     ["heart failure", "diabetes"]),
    ("unicode_escapes", '{"medical terminologies": ["\\u00e9czema", "flu\\nshot"]}',
     ["éczema", "flu\nshot"]),
]


def write_extraction(dirname):
    write_lines(os.path.join(dirname, "adversarial.jsonl"),
                [{"name": n, "raw": r, "expected": e} for n, r, e in ADVERSARIAL])


# --- win-rate judgments -----------------------------------------------------

# Majority outcome counts per dimension, as (augmented, tie, baseline).
TARGET = {
    "factuality": (8, 6, 6),
    "relevance": (5, 12, 3),
    "readability": (8, 3, 9),
    "completeness": (11, 5, 4),
}


def votes_for(outcome, rng):
    """Three reviewer outcomes whose majority (ties -> tie) is `outcome`."""
    others = [o for o in ("augmented", "tie", "baseline") if o != outcome]
    if outcome == "tie":
        patterns = [["tie"] * 3, ["tie", "tie", rng.choice(others)],
                    ["augmented", "baseline", "tie"]]
    else:
        patterns = [[outcome] * 3, [outcome, outcome, rng.choice(others)]]
    v = list(rng.choice(patterns))
    rng.shuffle(v)
    return v


def write_winrate(dirname):
    rng = random.Random(42)
    questions = ["W%02d" % i for i in range(1, 21)]
    per_q = {q: {} for q in questions}
    for dim, (aug, tie, base) in TARGET.items():
        outcomes = ["augmented"] * aug + ["tie"] * tie + ["baseline"] * base
        rng.shuffle(outcomes)
        for q, o in zip(questions, outcomes):
            per_q[q][dim] = votes_for(o, rng)
    write_json(os.path.join(dirname, "votes.json"), {
        "reviewers": 3,
        "questions": [{"question_id": q, "votes": per_q[q]} for q in questions],
    })


# --- synthetic TREC XML -----------------------------------------------------

def write_trec(path):
    rng = random.Random(7)
    topics = ["diabetes", "stroke", "asthma", "migraine", "hypertension", "arthritis",
              "eczema", "anemia", "influenza", "gout"]
    parts = ['<?xml version="1.0" encoding="UTF-8"?>',
             "<LiveQA_Medical_TestQuestions>"]
    for i in range(1, 105):
        topic = topics[i % len(topics)]
        qid = "TQ%d" % i
        msg = "My mother has %s & I want to know <how> to help her. Case %d?" % (topic, i)
        parts.append('  <NLM-QUESTION qid="%s">' % qid)
        parts.append("    <ORIGINAL-QUESTION>")
        parts.append("      <SUBJECT>%s</SUBJECT>" % escape(topic))
        # Every 13th question has an empty MESSAGE to exercise the fallbacks.
        parts.append("      <MESSAGE>%s</MESSAGE>" % ("" if i % 13 == 0 else escape(msg)))
        parts.append("    </ORIGINAL-QUESTION>")
        parts.append("    <NIST-PARAPHRASE>How to help someone with %s?</NIST-PARAPHRASE>"
                     % topic)
        parts.append("    <NLM-SUMMARY>%s care</NLM-SUMMARY>" % topic)
        parts.append("    <REFERENCEANSWERS>")
        for a in range(1 + rng.randrange(3)):
            parts.append('      <REFANSWER aid="%d"><ANSWER>Answer %d for %s about %s.'
                         "</ANSWER><AnswerURL>https://medlineplus.gov/%s.html</AnswerURL>"
                         "</REFANSWER>" % (a + 1, a + 1, qid, topic, topic))
        parts.append("    </REFERENCEANSWERS>")
        parts.append("  </NLM-QUESTION>")
    parts.append("</LiveQA_Medical_TestQuestions>")
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(parts) + "\n")


def main():
    write_umls(os.path.join(HERE, "umls"))
    write_pipeline(os.path.join(HERE, "pipeline"))
    write_extraction(os.path.join(HERE, "extraction"))
    write_winrate(os.path.join(HERE, "winrate"))
    write_trec(os.path.join(HERE, "trec", "synthetic_liveqa.xml"))


if __name__ == "__main__":
    main()
