"""Train the linear fusion classifier on synthetic score vectors and inspect a few predictions."""

from __future__ import annotations

from surface_linker.fusion import (
    ScoreVector, accuracy, predict_label, synthetic_training_points, train_classifier)


def main() -> None:
    points = synthetic_training_points(2000, seed=0)
    model = train_classifier(points)
    w = ", ".join(f"{x:.3f}" for x in model.weights)
    print(f"weights (kg, relevance, llm) = ({w}), bias = {model.bias:.3f}")
    print(f"training accuracy {accuracy(model, points):.3f}; "
          f"loss {model.loss_history[0]:.3f} -> {model.loss_history[-1]:.3f}")
    for s in (ScoreVector(0.9, 0.8, 1), ScoreVector(0.2, 0.2, 0), ScoreVector(0.5, 0.4, 1)):
        r = predict_label(model, s)
        print(f"  kg={s.kg:.1f} relevance={s.relevance:.1f} llm={s.llm} -> "
              f"{r.label.value} ({r.confidence:.2f})")


if __name__ == "__main__":
    main()
