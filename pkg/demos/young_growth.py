"""Growth of the p-variation in the linearly degenerate 3x3 example.

Each period multiplies the small wave by a fixed factor while the large waves
keep their size, so the p-variation over one time unit outgrows any bound of
the form C * Vp(0).
"""
from frontrack.young import YoungPattern, growth_factor, period_table, vp_growth_report


def main():
    beta = 0.2
    print(f"growth factor per period at beta={beta}: {growth_factor(beta):.6f}")
    print(" period   alpha_j        beta_j    Vp")
    for j, a, b, vp in period_table(YoungPattern.build(alpha=1e-3, beta=beta), 8):
        print(f"{j:7d}   {a:.6e}   {b:.4f}    {vp:.6f}")
    for n in (4, 16, 64):
        rep = vp_growth_report(0.1, n, 1.25)
        print(f"n={n:3d}: Vp(0)={rep.vp_initial:.4e} Vp(unit)={rep.vp_final_unit:.4e} "
              f"lower bound={rep.lower_bound:.4e} ratio={rep.ratio:.3g} exceeds={rep.exceeds_bound}")


if __name__ == "__main__":
    main()
