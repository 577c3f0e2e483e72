"""Regenerates the CSV fixtures used by the CLI tests (stdlib only)."""
import math
import random
from pathlib import Path

HERE = Path(__file__).parent


def write(name, header, rows, comment):
    with open(HERE / name, "w") as f:
        f.write(f"# {comment}\n")
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(f"{v:.16e}" for v in row) + "\n")


def noise_only():
    rng = random.Random(20240601)
    n = 200
    rows = [[i / n, 2.0 + rng.gauss(0.0, 1.0)] for i in range(1, n + 1)]
    write("noise_only.csv", ["t", "x0"], rows, "constant 2 plus standard normal noise, n = 200")


def step_variance():
    rng = random.Random(7)
    n, m, brk = 500, 10, 300
    rows = []
    for i in range(1, n + 1):
        scale = 1.0 if i <= brk else 2.0
        row = [i / n]
        for j in range(m):
            x = j / (m - 1)
            row.append(math.sin(2 * math.pi * x) + (i / n) ** 2 + scale * rng.gauss(0.0, 0.5))
        rows.append(row)
    header = ["t"] + [f"x{j}" for j in range(m)]
    write("step_variance.csv", header, rows, "noise level doubles after observation 300 of 500")


if __name__ == "__main__":
    noise_only()
    step_variance()
