"""
Auditing occupation-form bias
=============================

The audit asks one question per occupation noun: do its masculine and
feminine forms associate equally strongly with male vs female attribute
words?  The per-pair score is the gap between the two association
magnitudes, the aggregate statistic sums each side first, and a paired
permutation test says whether the asymmetry could be chance.
"""

from gendebias import audit_bias
from gendebias.synthetic import planted_fixture

fixture = planted_fixture(seed=0, rotate_source=False)

report = audit_bias(fixture.lexicon, fixture.source, n_perm=2000, seed=0)

print(f"aggregate statistic = {report.statistic:.4f}")
print(f"permutation p-value = {report.p_value:.4f}  "
      f"({report.n_permutations} permutations, protocol {report.protocol})")

# the five most asymmetric pairs, masculine-leaning first
ranked = sorted(report.pairs, key=lambda p: -p.b_signed)
print("\nmost masculine-leaning occupation pairs (signed gap)")
for p in ranked[:5]:
    print(f"  {p.word_m}/{p.word_f}: s_m={p.s_m:+.3f} s_f={p.s_f:+.3f} "
          f"gap={p.b_signed:+.3f}")

lean_m = sum(1 for p in report.pairs if p.b_signed > 0)
print(f"\n{lean_m} of {len(report.pairs)} pairs lean masculine - the planted")
print("construction gives masculine forms the stronger attribute pull, which")
print("is exactly what the aggregate statistic picks up.")

# Inanimate nouns have no human referent, yet their raw association
# magnitudes below are far from zero: the attribute words are themselves
# grammatically marked, so grammatical gender leaks into the measure.
# That leakage is why the mitigation stage flattens inanimate projections
# on the semantic direction rather than trusting raw associations.
print("\ninanimate words (first 5, unsigned association magnitude)")
for w in report.inanimates[:5]:
    print(f"  {w.word}: b={w.b:+.4f}")
