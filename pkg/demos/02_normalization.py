"""Trace the text-normalization pipeline stage by stage on one message,
then show the raw (minimal) variant kept for sequence models.
"""

from ekmanlab.textnorm import (
    condense_repeats,
    emoji_to_text,
    expand_abbreviations,
    expand_contractions,
    lemmatize,
    load_default_resources,
    normalize_full,
    normalize_minimal,
    remove_stopwords,
    space_punctuation,
    tokenize,
    tokenize_raw,
)

res = load_default_resources()
text = "OMG I'm sooooo HAPPY!!! it's working \U0001F602\U0001F602"
print("input:", text)

s = normalize_minimal(text)
print("\nminimal:      ", s)
s = s.lower()
print("lowercase:    ", s)
s = emoji_to_text(s, res.emoji_lexicon)
print("emoji to text:", s)
s = expand_contractions(s, res.contractions)
print("contractions: ", s)
s = expand_abbreviations(s, res.abbreviations)
print("abbreviations:", s)
s = condense_repeats(s, 2)
print("condensed:    ", s)
s = space_punctuation(s)
print("punctuation:  ", s)
tokens = [lemmatize(t, res.lemma_exceptions) for t in tokenize(s)]
print("lemmatized:   ", tokens)
tokens = remove_stopwords(tokens, res.stopwords)
print("stopwords out:", tokens)

# The one-call form used by the pipeline:
doc = normalize_full(text, res)
assert list(doc.tokens) == tokens
print("\nnormalize_full:", doc.tokens)

# The raw variant only normalizes whitespace/Unicode and lowercases tokens.
print("raw variant:   ", tokenize_raw(text).tokens)

# A few lemmatizer examples:
for word in ("running", "was", "cities", "feelings", "stopped", "better"):
    print(f"  lemma({word}) = {lemmatize(word, res.lemma_exceptions)}")
