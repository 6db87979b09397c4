"""Published coefficient sets, the eta-dependent quintic fits, and target constants."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple

from .functional import (
    ETA,
    LOW_T,
    EvalConfig,
    FunctionalNotPositive,
    MollifierSet,
    ShiftPolynomialSpec,
    k_eta,
    k_low_t,
    proportion,
)
from .polynomial import Polynomial

# Theorem-level constants the presets must reproduce.
THEOREM1_TARGETS = {"simple": 0.6044, "critical": 0.6107}
THEOREM1_TOL = 5e-4

TABLE1 = {
    0.0: 0.6044,
    0.25: 0.5261,
    0.5: 0.4615,
    0.75: 0.4072,
    1.0: 0.3601,
    2.0: 0.2200,
    3.0: 0.1266,
    4.0: 0.0583,
    5.0: 0.0048,
}
TABLE1_TOL = 2e-3
SIGN_CHANGE_ETA = 5.074

# The P_3 coefficient of the simple-zeros set is printed as -0.332995; the
# constant term of the e(eta) quintic is -0.322995.
P3_PRINTED = -0.332995
P3_QUINTIC = -0.322995


@dataclass(frozen=True)
class Preset:
    name: str
    R: float
    mollifier: MollifierSet
    shift: ShiftPolynomialSpec
    target: float

    def config(self, **overrides) -> EvalConfig:
        return EvalConfig(R=self.R, **overrides)


def _x() -> Polynomial:
    return Polynomial([0.0, 1.0])


def simple_mollifier(p3: float = P3_PRINTED) -> MollifierSet:
    return MollifierSet(
        [
            [0.0, -0.144781, 2.33768, -1.1929],
            [0.0, 1.80598, 0.0466787],
            [0.0, p3],
        ]
    )


def omx_p1(c1: float, c2: float, c3: float) -> Polynomial:
    """``x + c1 x(1-x) + c2 x(1-x)^2 + c3 x(1-x)^3``."""
    x = _x()
    omx = Polynomial([1.0, -1.0])
    return x + c1 * (x * omx) + c2 * (x * omx * omx) + c3 * (x * omx * omx * omx)


# Readings of the printed critical-zeros Q.  "symmetric" uses the basis
# r_k * int_0^x (t(1-t))^(k-1) dt, whose x^4 coefficient is -r3/2 and whose
# derivative satisfies Q'(x) = Q'(1-x); "printed" takes the x^4/4 literally.
Q_READINGS = ("symmetric", "printed")


def critical_q(r1: float, r2: float, r3: float, reading: str = "symmetric") -> Polynomial:
    """``1 - r1 x - r2 (x^2/2 - x^3/3) - r3 (x^3/3 - x^4/c + x^5/5)``.

    ``c = 2`` for the symmetric reading, ``c = 4`` for the printed literal.
    """
    if reading not in Q_READINGS:
        raise ValueError(f"unknown Q reading {reading!r}")
    c4 = 2.0 if reading == "symmetric" else 4.0
    return Polynomial(
        [1.0, -r1, -r2 / 2.0, r2 / 3.0 - r3 / 3.0, r3 / c4, -r3 / 5.0]
    )


def theorem1_simple(p3: float = P3_PRINTED) -> Preset:
    return Preset(
        name="simple",
        R=0.7150,
        mollifier=simple_mollifier(p3),
        shift=ShiftPolynomialSpec(Polynomial([1.0, -0.955682]), LOW_T),
        target=THEOREM1_TARGETS["simple"],
    )


def theorem1_critical(reading: str = "symmetric") -> Preset:
    return Preset(
        name="critical",
        R=0.7721,
        mollifier=MollifierSet(
            [
                omx_p1(0.1560, -1.4045, -0.0662),
                [0.0, 2.0409, 0.2661],
                [0.0, -0.0734],
            ]
        ),
        shift=ShiftPolynomialSpec(critical_q(0.7721, 0.1901, 3.9627, reading), LOW_T),
        target=THEOREM1_TARGETS["critical"],
    )


THEOREM1_PRESETS = {"simple": theorem1_simple, "critical": theorem1_critical}


# --------------------------------------------------------------------------
# eta-dependent coefficient fits

ETA_QUINTICS = {
    "R": (0.7150, 0.632539, -0.142758, 0.0377946, -0.0062075, 0.000411417),
    "r": (0.955682, -0.690002, 0.344604, -0.102225, 0.0158217, -0.000975675),
    "a": (-0.144781, 0.889028, -0.410202, 0.0858293, -0.00602004, -0.00007205),
    "b": (2.33768, -1.65646, 0.633289, -0.068012, -0.0118499, 0.00206328),
    "c": (1.80598, -1.62246, 0.854232, -0.267006, 0.0478396, -0.00363412),
    "d": (0.0466787, 0.245593, -0.31053, 0.281681, -0.0946981, 0.00981632),
    "e": (-0.322995, 0.280121, 0.452439, -0.390328, 0.103507, -0.00919719),
}


class EtaCoefficients(NamedTuple):
    R: float
    r: float
    a: float
    b: float
    c: float
    d: float
    e: float


def eta_coefficients(eta: float) -> EtaCoefficients:
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    vals = {k: Polynomial(v)(eta) for k, v in ETA_QUINTICS.items()}
    return EtaCoefficients(**vals)


def eta_inputs(eta: float):
    """``(R, mollifier, P-spec)`` assembled from the quintic fits at ``eta``."""
    k = eta_coefficients(eta)
    mol = MollifierSet(
        [
            [0.0, k.a, k.b, 1.0 - k.a - k.b],
            [0.0, k.c, k.d],
            [0.0, k.e],
        ]
    )
    # P(x) = 1 + r (x - (1+eta)/2)
    p = Polynomial([1.0 - k.r * (1.0 + eta) / 2.0, k.r])
    return k.R, mol, ShiftPolynomialSpec(p, ETA)


def c_of_eta(eta: float, cfg: EvalConfig | None = None) -> float:
    """Proportion bound ``C(eta)`` from the quintic-fit inputs.

    ``cfg`` supplies quadrature and jet settings; its ``R`` and ``eta`` are
    replaced by the fitted ``R(eta)`` and ``eta``.  Raises
    :class:`FunctionalNotPositive` if ``K <= 0``.
    """
    C, K, R = c_of_eta_details(eta, cfg)
    if C is None:
        raise FunctionalNotPositive(f"functional not positive at eta={eta} (K={K})")
    return C


def c_of_eta_details(eta: float, cfg: EvalConfig | None = None):
    """``(C, K, R)`` at ``eta``; ``C`` is None when ``K <= 0``."""
    R, mol, spec = eta_inputs(eta)
    base = cfg or EvalConfig(R=R)
    run = replace(base, R=R, eta=float(eta))
    K = k_eta(spec, mol, run)
    C = proportion(K, R) if K > 0 else None
    return C, K, R


def adjudicate_p3(cfg: EvalConfig | None = None) -> dict:
    """Evaluate the simple-zeros set with both candidate ``P_3`` coefficients.

    The candidate whose bound lies closer to the published constant is
    adopted; both values and their distances to the target are returned.
    """
    target = THEOREM1_TARGETS["simple"]
    rows = {}
    for label, p3 in (("printed", P3_PRINTED), ("quintic", P3_QUINTIC)):
        pre = theorem1_simple(p3)
        run = cfg if cfg is not None else pre.config()
        K = k_low_t(pre.shift, pre.mollifier, replace(run, R=pre.R, eta=0.0))
        prop = proportion(K, pre.R)
        rows[label] = {
            "p3": p3,
            "K": K,
            "proportion": prop,
            "distance": abs(prop - target),
            "within_tolerance": abs(prop - target) <= THEOREM1_TOL,
        }
    chosen = min(rows, key=lambda k: (rows[k]["distance"], k != "printed"))
    return {"chosen": chosen, "p3": rows[chosen]["p3"], "candidates": rows}


def critical_readings(cfg: EvalConfig | None = None) -> dict:
    """Bound from the critical-zeros set under each reading of its ``Q``."""
    rows = {}
    for reading in Q_READINGS:
        pre = theorem1_critical(reading)
        run = replace(cfg, R=pre.R, eta=0.0) if cfg is not None else pre.config()
        K = k_low_t(pre.shift, pre.mollifier, run)
        prop = proportion(K, pre.R) if K > 0 else None
        rows[reading] = {
            "K": K,
            "proportion": prop,
            "distance": None if prop is None else abs(prop - THEOREM1_TARGETS["critical"]),
        }
    return rows


def preset_variant(name: str, cfg: EvalConfig | None = None, **choice) -> dict:
    """Audit tag for a built-in set: which coefficient reading was used and how
    the alternatives fare."""
    if name == "simple":
        adj = adjudicate_p3(cfg)
        p3 = choice.get("p3", adj["p3"])
        within = [k for k, v in adj["candidates"].items() if v["within_tolerance"]]
        return {
            "preset": "simple",
            "p3": p3,
            "p3_adopted": adj["chosen"],
            "p3_candidates": adj["candidates"],
            "p3_candidates_within_tolerance": within,
        }
    if name == "critical":
        return {
            "preset": "critical",
            "q_reading": choice.get("reading", "symmetric"),
            "q_readings": critical_readings(cfg),
        }
    raise ValueError(f"unknown preset {name!r}")


def _same_set(R, mol, spec, pre: Preset) -> bool:
    return (
        R == pre.R
        and spec.mode == pre.shift.mode
        and spec.poly == pre.shift.poly
        and mol.pieces == pre.mollifier.pieces
    )


def identify_preset(R: float, mol: MollifierSet, spec: ShiftPolynomialSpec):
    """``(name, choice)`` if the inputs are exactly a built-in set, else None."""
    for p3 in (P3_PRINTED, P3_QUINTIC):
        if _same_set(R, mol, spec, theorem1_simple(p3)):
            return "simple", {"p3": p3}
    for reading in Q_READINGS:
        if _same_set(R, mol, spec, theorem1_critical(reading)):
            return "critical", {"reading": reading}
    return None
