#!/usr/bin/env python3
"""Regenerates data/toy_corpus.jsonl, the small bundled corpus used by the
pipeline tests: 200 section headers across 25 documents, 60 of them with
topical body text."""

import json
import random
import sys

rng = random.Random(20190101)

ACADEMIC_SKELETONS = [
    ["Abstract", "1. Introduction", "2. Related Work", "3. Approach", "3.1 Model Architecture",
     "4. Experiments", "4.1 Datasets", "5. Conclusion"],
    ["Abstract", "1 Introduction", "2 Background", "3 Methodology", "4 Results and Discussion",
     "5 Future Work", "Acknowledgements", "References"],
    ["Abstract", "I. INTRODUCTION", "II. RELATED WORKS", "III. PROPOSED METHOD", "IV. EVALUATION",
     "V. CONCLUSIONS", "References", "Appendix"],
    ["1. Introduction", "2. Preliminaries", "3. Main Results", "3.1. Proof of Theorem 1",
     "3.2. Proof of Lemma 2", "4. Discussion", "Acknowledgments", "References"],
    ["Abstract", "1 Introduction", "2 Contribution", "3 Implementation", "4 Experimental Results",
     "5 Related Work", "6 Conclusion", "References"],
]

RFP_SKELETONS = [
    ["1. Introduction", "2. General Information", "3. Background", "4. Statement of Work",
     "5. Requirements", "6. Deliverables", "7. Contract Administration", "8. Contract Clauses"],
    ["Introduction", "Background", "Scope of Work", "Technical Requirements", "Deliverables",
     "Contract Clauses", "Conclusion", "Appendix A"],
]

TOPICS = {
    "cs.CL": ("language", "parsing", "corpus", "token", "translation", "syntax", "lexicon", "sentence",
              "grammar", "annotation", "entity", "tagger"),
    "math.PR": ("probability", "martingale", "theorem", "measure", "lemma", "variance", "stochastic",
                "process", "convergence", "brownian", "markov", "bound"),
    "q-bio": ("protein", "gene", "cell", "sequence", "expression", "enzyme", "tissue", "mutation",
              "receptor", "genome", "pathway", "molecule"),
}
CONTRACT = ("vendor", "contract", "proposal", "payment", "schedule", "award", "offeror", "compliance",
            "invoice", "liability", "warranty", "insurance")
FILLER = ("the", "of", "and", "we", "in", "this", "a", "is", "to", "for", "with", "our")


def body(vocab, n):
    words = []
    for _ in range(n):
        if rng.random() < 0.35:
            words.append(rng.choice(FILLER))
        else:
            words.append(rng.choice(vocab))
    text = " ".join(words)
    return text[0].upper() + text[1:] + "."


def main(path):
    docs = []
    categories = list(TOPICS)
    for i in range(20):
        cat = categories[i % 3]
        headers = ACADEMIC_SKELETONS[i % len(ACADEMIC_SKELETONS)]
        level = lambda h: "subsection" if h.split(" ")[0].count(".") >= 1 and h[0].isdigit() and \
            len(h.split(" ")[0].strip(".").split(".")) > 1 else "top"
        hs = [{"level": level(h), "text": h} for h in headers]
        sections = [{"header": hs[k], "body": body(TOPICS[cat], rng.randint(40, 70))} for k in (1, 3)]
        docs.append({"doc_id": f"arxiv-{i:03d}", "doc_type": "academic", "category": cat,
                     "headers": hs, "sections": sections})
    for i in range(5):
        headers = RFP_SKELETONS[i % len(RFP_SKELETONS)]
        hs = [{"level": "top", "text": h} for h in headers]
        sections = [{"header": hs[k], "body": body(CONTRACT, rng.randint(40, 70))} for k in (0, 3, 5, 7)]
        docs.append({"doc_id": f"rfp-{i:03d}", "doc_type": "rfp", "category": None,
                     "headers": hs, "sections": sections})
    with open(path, "w", encoding="utf-8") as f:
        for d in docs:
            f.write(json.dumps(d, sort_keys=True) + "\n")
    n_headers = sum(len(d["headers"]) for d in docs)
    n_sections = sum(len(d["sections"]) for d in docs)
    print(f"{len(docs)} documents, {n_headers} headers, {n_sections} sections", file=sys.stderr)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/toy_corpus.jsonl")
