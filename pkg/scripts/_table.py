"""Shared table printer for the replication scripts."""

from collections import defaultdict


def print_table(summary, methods):
    cells = defaultdict(dict)
    for row in summary:
        cells[(tuple(row.mu_minus), row.m)][row.method] = row
    header = f"{'mu_minus':<12}{'m':>6}  " + "".join(f"{m:>18}" for m in methods)
    print(header)
    print("-" * len(header))
    for (mu, m), by_method in cells.items():
        line = f"{str(list(mu)):<12}{'' if m is None else m:>6}  "
        for name in methods:
            row = by_method.get(name)
            if row is None:
                line += f"{'':>18}"
                continue
            mark = "*" if row.best_or_equivalent else " "
            flag = "!" if row.flagged else " "
            line += f"{100 * row.mean_accuracy:>9.2f} ±{100 * row.std_accuracy:5.2f}{mark}{flag}"
        print(line)
    print("\n* best or not significantly worse (Welch, 5%)   ! half or more trials failed")
