"""Reference external-model process speaking the prediction line protocol.

Serves a log-link GLM so wire-protocol clients can be exercised end to end:

    python -m xshap.extern_stub --alpha 0.3 --beta 1.0,-2.0

Useful both as a test double and as a template for bridging real models.
"""

from __future__ import annotations

import argparse
import math
import sys


def serve_glm(alpha: float, betas: list[float], stdin=None, stdout=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout

    def say(line: str) -> None:
        stdout.write(line + "\n")
        stdout.flush()

    hello = stdin.readline().strip()
    if hello != "XSHAP-PROTO 1":
        print(f"unsupported handshake: {hello!r}", file=sys.stderr)
        return 1
    say("OK")
    while True:
        line = stdin.readline()
        if line == "" or line.strip() == "BYE":
            return 0
        parts = line.split()
        if len(parts) != 3 or parts[0] != "PREDICT":
            print(f"unexpected request: {line.strip()!r}", file=sys.stderr)
            return 1
        n, m = int(parts[1]), int(parts[2])
        if m != len(betas):
            print(f"expected {len(betas)} features, got {m}", file=sys.stderr)
            return 1
        for _ in range(n):
            cells = stdin.readline().strip().split(",")
            score = alpha
            for beta, cell in zip(betas, cells):
                score += beta * float(cell)
            say(repr(math.exp(score)))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--alpha", type=float, required=True, help="intercept")
    parser.add_argument("--beta", required=True, help="comma-separated coefficients")
    args = parser.parse_args(argv)
    betas = [float(b) for b in args.beta.split(",")]
    return serve_glm(args.alpha, betas)


if __name__ == "__main__":
    sys.exit(main())
