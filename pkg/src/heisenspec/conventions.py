"""Record of every normalisation choice, with a stable hash embedded in outputs."""
import copy
import hashlib
import json
from pathlib import Path
from typing import Optional

SCHEMA = "heisenspec/1"

LEDGER = {
    "heat_kernel_fourier": {
        "choice": "k_mu carries 1/(2 pi) from inverting the Fourier transform in x0",
        "consequence": "nu(mu) = k_mu(0, 0, 1) / (n+1)!; k_0(0, 0, 1) = 1/8 for n = 1",
    },
    "heat_kernel_gaussian": {
        "choice": "Gaussian factor exp(-(1/(2t)) (u/tanh u) |x'|^2)",
        "reason": "the 1/(2t) form solves the heat equation of -1/2 sum X_j^2 and integrates to 1",
    },
    "nu_normalisation": {
        "choice": "nu(mu) = (2 pi)^-(n+1) / (n+1)! * int exp(-mu x) (x/sinh x)^n dx",
    },
    "weyl_prefactor": {
        "candidates": {"plus_n": "2^n nu(mu) rk vol_theta", "minus_n": "2^-n nu(mu) rk vol_theta"},
        "adopted": "minus_n",
        "status": "adjudicated by the nilmanifold grid (see nilcheck)",
        "volume_relation": "on the Heisenberg nilmanifold vol_theta = 2^n vol_Haar for theta = dx0 - x2 dx1 + x1 dx2",
    },
    "form_constants": {
        "default": "plus_n weights (alpha 1/2, beta and gamma 2^n)",
        "minus_n": "alpha weight 2, beta and gamma 2^-n",
        "beta_argument": "(q - p) + 2(l - k)",
    },
    "plancherel": {
        "eigenvalue": "e_m(lam; mu) = 2 lam^2 (m + n/2 + (mu/2) sgn lam), multiplicity binom(m+n-1, n-1)",
        "weight": "|lam|^(2n+1)",
        "constant": "C_n calibrated on mu = 0 against the Mehler kernel (equals pi^-(n+1))",
        "singular_ladder": "e_m vanishes iff mu in +-(n + 2N)",
    },
    "gover_graham": {
        "factors": "mu_j = k - 1 - 2j, j = 0..k-1",
        "adopted": "2^-n K(0,1) / Gamma(1 + (n+1)/k)",
        "alternatives": ["2^n K(0,1) / Gamma(1 + (n+1)/k)", "2^n K(0,1) / Gamma(1 + (2n+2)/k)"],
    },
    "kohn_reduced_form": {
        "choice": "reduced values n + 2q - 2 kappa - 4k equal -mu_K; only |mu_K| enters",
    },
    "nilmanifold_grid": {
        "discretisation": "Fourier modes in x0; forward flow differences on an N x N grid in (x1, x2)",
        "trust_cutoff": "0.9 * pi * N (lowest level of the first missing Fourier mode)",
        "fit": "log N(lam) on log lam over [10, 65]; Richardson in N^-2 of the exponent-2 constant",
    },
}


def ledger() -> dict:
    return copy.deepcopy(LEDGER)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def ledger_hash(entries: Optional[dict] = None) -> str:
    """First 16 hex digits of the SHA-256 of the canonical ledger JSON."""
    data = LEDGER if entries is None else entries
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()[:16]


def calibration_values(n_max: int = 3) -> dict:
    """Calibrated Plancherel constants, computed on demand."""
    from math import pi

    from .plancherel import plancherel_constant

    return {str(n): {"C_n": plancherel_constant(n), "pi^-(n+1)": pi ** -(n + 1)} for n in range(1, n_max + 1)}


def full_ledger(with_calibration: bool = True) -> dict:
    out = {"schema": SCHEMA, "ledger_hash": ledger_hash(), "entries": ledger()}
    if with_calibration:
        out["calibration"] = calibration_values()
    return out


def record_adjudication(report, path) -> dict:
    """Write the ledger plus a nilmanifold adjudication result to ``path`` (JSON).

    An existing file at ``path`` is read first and its other keys are kept.
    """
    path = Path(path)
    data = json.loads(path.read_text(encoding="utf-8")) if path.exists() else {}
    data.update({"schema": SCHEMA, "ledger_hash": ledger_hash(), "entries": ledger()})
    summary = report.as_dict()
    data["adjudication"] = {
        "question": "Weyl prefactor 2^n versus 2^-n",
        "adopted": summary["adopted"],
        "extrapolated_constant": summary["extrapolated_constant"],
        "candidates": summary["candidates"],
        "relative_deviation": summary["relative_deviation"],
        "sizes": summary["sizes"],
    }
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return data
