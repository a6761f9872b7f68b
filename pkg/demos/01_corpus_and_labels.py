"""Walk through corpus loading: the 28-label taxonomy, the Ekman mapping,
multi-label resolution, deduplication, and per-split class distributions.

Uses the real GoEmotions splits when EKMANLAB_DATA_DIR points at them;
otherwise builds a small synthetic corpus in the same file format.
"""

import json
import os
import tempfile
from pathlib import Path

from ekmanlab.corpus import (
    DEFAULT_TAXONOMY,
    CoarseLabel,
    build_corpus,
    class_distribution,
    default_mapping,
    distribution_report,
    resolve_single_label,
)

# ---------------------------------------------------------------------------
# The taxonomy and the fine-to-coarse mapping
# ---------------------------------------------------------------------------

print("fine labels:", len(DEFAULT_TAXONOMY))
mapping = default_mapping()
for name in ("joy", "amusement", "annoyance", "realization", "grief"):
    print(f"  {name:>12} -> {mapping.map_name(name).label_name}")

# ---------------------------------------------------------------------------
# Multi-label resolution: majority coarse family, priors break ties
# ---------------------------------------------------------------------------

priors = {label: 0 for label in CoarseLabel}
print("\n{amusement, joy, annoyance} ->",
      resolve_single_label({1, 17, 3}, mapping, priors).label_name)

priors[CoarseLabel.SADNESS] = 10
print("{anger, sadness} with sadness-heavy priors ->",
      resolve_single_label({2, 25}, mapping, priors).label_name)

# ---------------------------------------------------------------------------
# Building a corpus from split files
# ---------------------------------------------------------------------------

data_dir = os.environ.get("EKMANLAB_DATA_DIR")
if data_dir and (Path(data_dir) / "train.tsv").exists():
    base = Path(data_dir)
    print(f"\nusing real splits from {base}")
else:
    base = Path(tempfile.mkdtemp())
    lines = [
        "i love this so much\t17\ta1",
        "i love this so much\t17\ta2",          # duplicate: dropped
        "what a great surprise\t13,26\ta3",     # multi-label
        "this is gross\t11\ta4",
        "meeting at noon\t27\ta5",
    ]
    (base / "train.tsv").write_text("\n".join(lines) + "\n")
    (base / "dev.tsv").write_text("so scared right now\t14\tb1\n")
    (base / "test.tsv").write_text("wow unexpected\t26\tc1\n")
    print(f"\nusing synthetic splits in {base}")

corpus = build_corpus(base / "train.tsv", base / "dev.tsv", base / "test.tsv")
print("train examples after dedup:", len(corpus.train))

dist = class_distribution(corpus.train)
for label in CoarseLabel:
    if dist.counts[label]:
        print(f"  {label.label_name:>9}: {dist.counts[label]:6d}  "
              f"({100 * dist.proportions[label]:.1f}%)")

# The distribution report is the data behind the per-split bar figure.
print("\ndistribution report:")
print(json.dumps(distribution_report(corpus), indent=2))
