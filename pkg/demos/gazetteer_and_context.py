"""Which crater names do the Moon and Mars share, and which body does a text talk about?"""

from __future__ import annotations

from surface_linker import _resources
from surface_linker.excerpts import body_context_probability, retain_by_threshold
from surface_linker.gazetteer import load_gazetteer, shared_names
from surface_linker.text import tokenize


def main() -> None:
    gaz = load_gazetteer(_resources.data_path("gazetteer.txt"), _resources.data_path("bodies.txt"))
    shared = shared_names(gaz, "Moon", "Mars", "crater")
    print(f"{len(shared)} crater names in the bundled sample exist on both the Moon and Mars:")
    print("  " + ", ".join(shared))

    text = " ".join(["Mars"] * 140 + ["Moon"])
    bodies = gaz.bodies_for("Kaiser")
    profile = body_context_probability(tokenize(text), bodies)
    print("\nA text with 140 Mars terms and one Moon term:")
    for body, p in sorted(profile.probabilities.items()):
        kept = retain_by_threshold(profile, body)
        print(f"  {body:5s} p={p:.4f}  {'kept' if kept else 'dropped'} (needs >= 1/{profile.n_bodies})")


if __name__ == "__main__":
    main()
