"""The maximal p-sum is not monotone in the size of individual entries.

Shrinking the middle entry of (5, -2, 5) to -1 raises s_2 from 8 to 9, because
the best partition merges all three entries in both cases.
"""
import numpy as np

from frontrack.pvar import max_p_sum, p_variation_seq


def main():
    for seq in ((5, -2, 5), (5, -1, 5), (5, -3, 5), (5, -6, 5)):
        print(f"s_2{seq} = {max_p_sum(seq, 2.0):.6f}")
    # the same effect seen as p-variation of a path
    path = np.cumsum([0, 5, -2, 5])
    print(f"2-variation of path {path.tolist()}: {p_variation_seq(path, 2.0):.6f}")
    for p in (1.0, 1.5, 2.0, 3.0):
        print(f"p={p}: s_p(5,-2,5)={max_p_sum((5, -2, 5), p):.6f}  s_p(5,-1,5)={max_p_sum((5, -1, 5), p):.6f}")


if __name__ == "__main__":
    main()
