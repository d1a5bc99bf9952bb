"""Render a trained model as an interpretable fuzzy rule base.

Every rule becomes one IF/THEN block: per-feature linguistic terms ranked by
the Gaussian center values, and one affine expression per output taken from
the rule's block of the final consequent matrix.
"""

from __future__ import annotations

import numpy as np

_VOCAB = {2: ["Low", "High"], 3: ["Low", "Medium", "High"]}


def linguistic_terms(E: np.ndarray) -> list[list[str]]:
    """Per-rule, per-feature term labels from the ordering of the centers.

    Rules are ranked per feature by ascending center; H=2 uses Low/High, H=3
    Low/Medium/High, anything else ordinal Level-r. Tied centers share the
    lower rank's label.
    """
    E = np.asarray(E, dtype=float)
    H = E.shape[0]
    vocab = _VOCAB.get(H, [f"Level-{r + 1}" for r in range(H)])
    terms = [["" for _ in range(E.shape[1])] for _ in range(H)]
    for j in range(E.shape[1]):
        column = E[:, j]
        for h in range(H):
            rank = int(np.sum(column < column[h]))
            terms[h][j] = vocab[rank]
    return terms


def _affine_expression(coeffs: np.ndarray) -> str:
    """Format [intercept, c_1..c_d] as `a ± b·x1 ± c·x2 ...` with 3 decimals."""
    parts = [f"{coeffs[0]:.3f}"]
    for j, c in enumerate(coeffs[1:], start=1):
        sign = "-" if c < 0 else "+"
        parts.append(f" {sign} {abs(c):.3f}·x{j}")
    return "".join(parts)


def rule_coefficients(P_final: np.ndarray, H: int, d: int) -> np.ndarray:
    """Reshape the consequent matrix into per-rule blocks: (H, d+1, m)."""
    P = np.asarray(P_final, dtype=float)
    return P.reshape(H, d + 1, P.shape[1])


def render_rulebase(model, feature_names: list[str] | None = None) -> str:
    """Plain-text rule base: one IF/THEN block per rule.

    IF lines list the linguistic term of each feature; THEN lines give one
    affine output expression per output dimension.
    """
    E = model.antecedent.E
    H, d = E.shape
    terms = linguistic_terms(E)
    blocks = rule_coefficients(model.P_final, H, d)
    m = blocks.shape[2]

    lines = ["Fuzzy rule base ({} rules, {} features, {} outputs)".format(H, d, m)]
    if feature_names:
        legend = ", ".join(f"x{j + 1} = {name}" for j, name in enumerate(feature_names))
        lines.append(f"Features: {legend}")
    lines.append("")
    for h in range(H):
        lines.append(f"Rule {h + 1}:")
        conditions = " and ".join(
            f"the {j + 1}th feature is {terms[h][j]}" for j in range(d)
        )
        lines.append(f"IF: {conditions}.")
        for l in range(m):
            lines.append(f"Then: the {l + 1}th output is {_affine_expression(blocks[h, :, l])}")
        lines.append("")
    return "\n".join(lines)


def render_rulebase_markdown(model, feature_names: list[str] | None = None) -> str:
    """The same rule base as a light markup table (one row per rule)."""
    E = model.antecedent.E
    H, d = E.shape
    terms = linguistic_terms(E)
    blocks = rule_coefficients(model.P_final, H, d)
    m = blocks.shape[2]

    lines = ["| Rule | IF | THEN |", "| --- | --- | --- |"]
    for h in range(H):
        conditions = " and ".join(f"the {j + 1}th feature is {terms[h][j]}" for j in range(d))
        outputs = "; ".join(
            f"the {l + 1}th output is {_affine_expression(blocks[h, :, l])}" for l in range(m)
        )
        lines.append(f"| {h + 1} | {conditions}. | {outputs} |")
    if feature_names:
        legend = ", ".join(f"x{j + 1} = {name}" for j, name in enumerate(feature_names))
        lines.append("")
        lines.append(f"Features: {legend}")
    return "\n".join(lines)
