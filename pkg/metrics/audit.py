"""Triangle-inequality audit of distance / utility forms on 1-D triples.

quadratic:        d(x, y) = (x - y)^2
gaussian_utility: d(x, y) = -exp(-(x - y)^2 / 2)
euclidean:        d(x, y) = |x - y|
"""
import numpy as np
from core.errors import ContractViolation
from .schema import AuditForm, AuditResult

TOLERANCE = 1e-12

FORMS = {
    "euclidean": lambda a, b: np.abs(a - b),
    "quadratic": lambda a, b: (a - b) ** 2,
    "gaussian_utility": lambda a, b: -np.exp(-0.5 * (a - b) ** 2),
}

# fixed witnesses: (3, 3, 1) breaks the Gaussian utility, (0, 1, 2) the quadratic
WITNESSES = np.array([[3.0, 3.0, 1.0], [0.0, 1.0, 2.0]])

def violates(form: AuditForm, x, y, z) -> np.ndarray:
    d = FORMS[form]
    return d(x, y) + d(y, z) < d(x, z) - TOLERANCE

def metric_audit(form: AuditForm, n_triples: int, rng: np.random.Generator, low: float = -5.0, high: float = 5.0) -> AuditResult:
    if form not in FORMS:
        raise ContractViolation(f"unknown form '{form}'")
    if n_triples < 1:
        raise ContractViolation("n_triples must be at least 1")
    x, y, z = rng.uniform(low, high, size=(3, n_triples))
    bad = violates(form, x, y, z)
    witness_bad = violates(form, *WITNESSES.T)
    same_sign = None
    if bad.any():
        same_sign = float(np.mean((x[bad] - y[bad]) * (y[bad] - z[bad]) > 0))
    return AuditResult(
        form=form,
        n_triples=n_triples,
        violations=int(bad.sum() + witness_bad.sum()),
        witness_violations=int(witness_bad.sum()),
        same_sign_share=same_sign,
    )
