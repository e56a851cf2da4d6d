"""Counts orderings of the murderer chronology that respect every precedence edge.

Exhaustive: every permutation of the ten events is checked.
"""
import itertools
import time

NODES = ["E1", "E2", "E3", "E4", "E5a", "E5b", "E6", "E7", "E8", "E9"]
EDGES = [
    ("E1", "E2"), ("E2", "E3"),
    ("E4", "E5a"), ("E4", "E5b"),
    ("E5a", "E6"), ("E5b", "E7"),
    ("E6", "E8"), ("E7", "E8"),
    ("E8", "E9"),
]


def main():
    start = time.time()
    total = 0
    accepted = 0
    for perm in itertools.permutations(NODES):
        total += 1
        pos = {e: i for i, e in enumerate(perm)}
        if all(pos[a] < pos[b] for a, b in EDGES):
            accepted += 1
    print(f"permutations={total} accepted={accepted} seconds={time.time() - start:.1f}")


if __name__ == "__main__":
    main()
