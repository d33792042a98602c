"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--entries 1500] [--repeat 3]

Both backends run the same workload: NED over word pairs, EM alignment
and n-best decoding with a trained transliteration model.
"""

import argparse
import random
import time
from types import SimpleNamespace

from dictanomaly import translit
from dictanomaly._ext import _fallback
from dictanomaly.corpus import extract_tied_pairs, parse_dictionary
from dictanomaly.synthetic import generate_dictionary

try:
    from dictanomaly._ext import _core
except ImportError:
    _core = None


def _namespace(mod):
    return SimpleNamespace(
        levenshtein=mod.levenshtein,
        forward_backward=mod.forward_backward,
        viterbi=mod.viterbi,
        beam_search=mod.beam_search,
        PackedLM=mod.PackedLM,
    )


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def run(entries: int, repeat: int) -> None:
    corpus = parse_dictionary(generate_dictionary(entries, 0.05, seed=0).to_xml(), "entry")
    pairs = [(p.first.text_value, p.second.text_value) for p in extract_tied_pairs(corpus, "orth", "pron")]
    rng = random.Random(1)
    words = [w for pair in pairs for w in pair]
    ned_pairs = [(rng.choice(words), rng.choice(words)) for _ in range(20000)]
    sources = [s for s, _ in pairs[:300]]

    backends = {"python": _fallback}
    if _core is not None:
        backends["cython"] = _core
    else:
        print("compiled extension not built; timing the fallback only")

    results = {}
    original = translit._ext
    try:
        for name, mod in backends.items():
            translit._ext = _namespace(mod)
            model = translit.train_translit(pairs)
            results[name] = {
                "ned x20000": _best(lambda: [translit.ned(a, b) for a, b in ned_pairs], repeat),
                f"em_align x{len(pairs)}": _best(lambda: translit.em_align(pairs, em_iterations=3), repeat),
                "nbest x300": _best(lambda: [model.nbest(s, 10) for s in sources], repeat),
            }
    finally:
        translit._ext = original

    print(f"{'kernel':<18}" + "".join(f"{n:>12}" for n in results) + ("     speedup" if len(results) > 1 else ""))
    for kernel in results["python"]:
        row = f"{kernel:<18}" + "".join(f"{r[kernel]:>11.3f}s" for r in results.values())
        if "cython" in results:
            row += f"{results['python'][kernel] / results['cython'][kernel]:>11.1f}x"
        print(row)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--entries", type=int, default=1500)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    run(args.entries, args.repeat)


if __name__ == "__main__":
    main()
