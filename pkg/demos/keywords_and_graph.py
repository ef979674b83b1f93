"""Harvest keywords from two excerpts and score a new one against the learned graphs."""

from __future__ import annotations

from surface_linker.entities import RuleEntityTagger
from surface_linker.excerpts import extract_window, find_name_matches
from surface_linker.graph import DisambiguationGraphPair, add_observation, kg_probability
from surface_linker.keywords import harvest_keywords, load_vocabulary
from surface_linker.text import tokenize

TRAINING = [
    ("planetary", "Kaiser crater on Mars has a large dune field, and gullies cut its southern rim."),
    ("planetary", "Barchan dunes cover the floor of Kaiser crater in the Martian highlands."),
    ("other", "The Kaiser Family Foundation surveyed health insurance costs across the country."),
]
QUERY = "Gullies on the rim of Kaiser crater were imaged by an orbiter over Mars."


def keywords_for(text: str, tagger, vocabulary) -> tuple[str, ...]:
    ts = tokenize(text)
    window = extract_window(ts, find_name_matches(ts, "Kaiser")[0], "Kaiser").window
    return harvest_keywords(window, tagger, vocabulary, exclude="Kaiser").keywords


def main() -> None:
    tagger, vocabulary = RuleEntityTagger(), load_vocabulary()
    pair = DisambiguationGraphPair("Kaiser", "Mars", "crater")
    for label, text in TRAINING:
        kws = keywords_for(text, tagger, vocabulary)
        add_observation(pair, kws, label)
        print(f"{label:9s} {', '.join(kws)}")
    kws = keywords_for(QUERY, tagger, vocabulary)
    print(f"\nquery     {', '.join(kws)}")
    print(f"kg score  {kg_probability(pair, kws):.3f}  (0.5 means the graphs know none of them)")


if __name__ == "__main__":
    main()
