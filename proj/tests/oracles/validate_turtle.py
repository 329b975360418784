#!/usr/bin/env python3
"""Parse Turtle files with rdflib and compare each against an N-Triples dump.

usage: validate_turtle.py FILE.ttl FILE.nt [FILE.ttl FILE.nt ...]
Exit status 0 when every Turtle file parses and is isomorphic to its N-Triples
counterpart.
"""
import sys

from rdflib import Graph
from rdflib.compare import isomorphic


def main(argv):
    if len(argv) < 2 or len(argv) % 2:
        print("usage: validate_turtle.py FILE.ttl FILE.nt [...]", file=sys.stderr)
        return 2
    ok = True
    for ttl, nt in zip(argv[0::2], argv[1::2]):
        try:
            g = Graph().parse(ttl, format="turtle")
        except Exception as e:  # rdflib raises several parser exception types
            print(f"{ttl}: parse error: {e}")
            ok = False
            continue
        ref = Graph().parse(nt, format="nt")
        same = isomorphic(g, ref)
        print(f"{ttl}: {len(g)} triples, isomorphic={same}")
        ok = ok and same
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
