"""Run the whole cascade over the bundled 20-document corpus and score it against gold labels."""

from __future__ import annotations

from surface_linker import _resources
from surface_linker.cli import read_gold
from surface_linker.evaluation import confusion_and_metrics, render_stage_report
from surface_linker.fusion import Label
from surface_linker.pipeline import Pipeline, load_config


def main() -> None:
    root = _resources.data_path("minicorpus")
    out = Pipeline.from_config(load_config(root / "minicorpus.conf")).run("Kaiser", "Mars")
    for r in out.results:
        s = r.scores
        print(f"{r.record_id} @{r.char_start:<4d} kg={s.kg:.2f} rel={s.relevance:.1f} llm={s.llm} "
              f"-> {r.label.value} ({r.result.confidence:.2f})")

    gold = read_gold(root / "gold.tsv")
    predicted = {r.key: r.label for r in out.results}
    keys = sorted(set(gold) | set(predicted))
    cm, _ = confusion_and_metrics([gold.get(k, Label.NON_PLANETARY) for k in keys],
                                  [predicted.get(k, Label.NON_PLANETARY) for k in keys])
    print()
    print(render_stage_report(out.report.with_confusion(cm), headers=["Mars"]), end="")


if __name__ == "__main__":
    main()
