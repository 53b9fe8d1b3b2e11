"""
From quote variants to a wildcard pattern
=========================================

A snowclone is a phrasal template: a well-known quote whose replaceable
words have been swapped so often that the frame itself becomes the
reference.  This script walks the pattern half of the library: tokenize
some variants, induce the template, and match new sentences against it.
"""

from snowclone import induce_pattern, match, matches, parse_pattern, tokenize

# The running example from the literature on the phenomenon.
seed = tokenize("Orange is the new black")
variants = [
    tokenize("Forty is the new thirty"),
    tokenize("Pink is the new black"),
    tokenize("Comedy is the new rock n roll"),
]

# Induction aligns each variant against the seed and keeps only the
# words every variant left untouched; the rest become wildcards.
pattern = induce_pattern(seed, variants)
print("seed:    ", " ".join(seed.tokens))
print("pattern: ", pattern)

# The same pattern can be written down directly.
assert str(parse_pattern("* is the new *")) == str(pattern)

# Wildcards each swallow one or more tokens, so the template matches
# variants of different lengths but not the frame alone.
for text in (
    "Sitting is the new smoking",
    "Staying in is the new going out",
    "is the new",
    "The quick brown fox",
):
    print(f"  {text!r:40} -> {matches(pattern, tokenize(text))}")

# match() also reports what each wildcard captured.
bindings = match(pattern, tokenize("Staying in is the new going out"))
print("bindings:", [" ".join(b) for b in bindings])
