#!/usr/bin/env python3
"""Independent recomputation of the model reference outputs.

Reads models/canonical.json and inputs/stress.json and regenerates
tests/golden/model_refs.json in pure python: plain float inference, the
squared-activation approximation, and the exact integer fixed-point pipeline
(64-bit two's complement, scale 1000, truncating division).
"""

import json
import math
import os

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SCALE = 1000
WIDTH = 64
M128 = (1 << 128) - 1


def llround(x):
    # round half away from zero, like C llround
    return int(math.floor(x + 0.5)) if x >= 0 else int(math.ceil(x - 0.5))


def wrap(v, bits):
    v &= (1 << bits) - 1
    return v - (1 << bits) if v >> (bits - 1) else v


def sdiv_wrapped(v, d, bits):
    # truncate-toward-zero division on a two's-complement value, result wrapped
    mask = (1 << bits) - 1
    v &= mask
    if v >> (bits - 1):
        return (-(((-v) & mask) // d)) & mask
    return v // d


def enc(x):
    return llround(x * SCALE)


def ref_add(a, b):
    return wrap(a + b, WIDTH)


def ref_mul_full(a, b):
    return (a * b) & M128


def ref_divscale(v):
    return wrap(sdiv_wrapped(v, SCALE, 2 * WIDTH), WIDTH)


def ref_relu(a):
    return 0 if a < 0 else a


def ref_poly2_sigmoid(z):
    c0 = llround(0.5 * SCALE)
    c1 = llround(0.197 * SCALE)
    c2 = llround(0.004 * SCALE)
    ext = z & M128
    q1 = sdiv_wrapped((ext * c1) & M128, SCALE, 2 * WIDTH)
    zz = (ext * ext) & M128
    q2 = sdiv_wrapped((zz * c2) & M128, SCALE * SCALE, 2 * WIDTH)
    return wrap((c0 + q1 - q2) & M128, WIDTH)


def affine_hidden(m, x):
    z = []
    for r in range(m["h"]):
        acc = 0.0
        for c in range(3):
            acc += m["W1"][r][c] * x[c]
        z.append(acc + m["b1"][r])
    return z


def output_layer(m, hidden):
    acc = 0.0
    for r in range(m["h"]):
        acc += m["W2"][r] * hidden[r]
    return acc + m["b2"]


def infer_plain(m, x):
    z = [v if v > 0 else 0.0 for v in affine_hidden(m, x)]
    return 1.0 / (1.0 + math.exp(-output_layer(m, z)))


def infer_fhe_approx(m, x):
    z = [v * v for v in affine_hidden(m, x)]
    t = output_layer(m, z)
    return 0.5 + 0.197 * t - 0.004 * t * t


def infer_gc_fixed(m, x):
    xs = [enc(v) for v in x]
    hidden = []
    for r in range(m["h"]):
        acc = 0
        for c in range(3):
            term = ref_divscale(ref_mul_full(enc(m["W1"][r][c]), xs[c]))
            acc = term if c == 0 else ref_add(acc, term)
        acc = ref_add(acc, enc(m["b1"][r]))
        hidden.append(ref_relu(acc))
    out = 0
    for r in range(m["h"]):
        term = ref_divscale(ref_mul_full(enc(m["W2"][r]), hidden[r]))
        out = term if r == 0 else ref_add(out, term)
    out = ref_add(out, enc(m["b2"]))
    return ref_poly2_sigmoid(out) / float(SCALE)


def deviation(y_mode, y_plain):
    if y_plain == 0.0:
        return abs(y_mode), True
    return 100.0 * abs(y_mode - y_plain) / abs(y_plain), False


def main():
    with open(os.path.join(ROOT, "models", "canonical.json")) as f:
        m = json.load(f)
    with open(os.path.join(ROOT, "inputs", "stress.json")) as f:
        stress = json.load(f)

    def entry(x):
        yp = infer_plain(m, x)
        yf = infer_fhe_approx(m, x)
        yg = infer_gc_fixed(m, x)
        df, _ = deviation(yf, yp)
        dg, _ = deviation(yg, yp)
        return {"x": x, "plain": yp, "fhe": yf, "gc": yg, "dev_fhe": df, "dev_gc": dg}

    rows = [entry(x) for x in stress]
    out = {
        "probe": entry([1.0, -1.0, 0.5]),
        "stress": rows,
        "stress_worst": {
            "fhe": max(r["dev_fhe"] for r in rows),
            "gc": max(r["dev_gc"] for r in rows),
        },
    }
    path = os.path.join(ROOT, "tests", "golden", "model_refs.json")
    with open(path, "w") as f:
        json.dump(out, f, indent=1)
        f.write("\n")
    print("wrote", path)
    print("worst stress deviation: fixed-point %.4f%%  squared-approx %.2f%%"
          % (out["stress_worst"]["gc"], out["stress_worst"]["fhe"]))


if __name__ == "__main__":
    main()
