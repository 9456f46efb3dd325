"""Table emission: Schur values and tau / wave coefficient tables."""

from __future__ import annotations

from fractions import Fraction

from .errors import ConfigError
from .partitions import enumerate_partitions
from .scalars import ParamEnv
from .schur import cvector, schur_at, schur_special_closed
from .tau import WaveData, h_weight, tau
from .tpoly import weight


def schur_table(family: str, max_size: int, env: ParamEnv | None) -> list:
    """Rows (partition, value[, closed]) for all |lambda| <= max_size."""
    if family in ("b", "c", "d", "gbin", "grr", "gbin_finite") and env is None:
        raise ConfigError(f"family {family!r} needs parameters")
    kc = max(max_size, 1)
    c = cvector(family, env, kc) if family != "a" else cvector("a", env, kc)
    rows = []
    for lam in enumerate_partitions(max_size):
        row = {"partition": list(lam.parts), "value": str(schur_at(lam, c))}
        if family in ("a", "c"):
            row["closed"] = str(schur_special_closed(lam, family, env))
        rows.append(row)
    return rows


def tau_table(case: str, s_values, cap: int, n_cut: int, env: ParamEnv, nvars=None) -> dict:
    """tau coefficients and wave amplitudes w_n per grid point."""
    nvars = nvars if nvars is not None else cap
    c = cvector(case, env, max(cap, n_cut))
    tau_rows = []
    weight_rows = []
    for s in s_values:
        series = tau(s, c, cap, env, nvars)
        for key in sorted(series.value.coeffs, key=lambda k: (weight(k), k)):
            tau_rows.append({
                "s": str(Fraction(s)),
                "monomial": _mono(key),
                "value": str(series.value.coeffs[key]),
            })
        for lam in enumerate_partitions(min(cap, 4)):
            weight_rows.append({
                "s": str(Fraction(s)),
                "partition": list(lam.parts),
                "h_weight": str(h_weight(lam, s, env)),
            })
    lo, hi = min(s_values), max(s_values)
    wave = WaveData(c, env, lo, hi, 1, cap, n_cut, nvars)
    wave_rows = []
    for s in s_values:
        pt = wave._point(Fraction(s))
        for n in range(1, n_cut + 1):
            poly = pt[n]
            if not poly:
                wave_rows.append({"s": str(Fraction(s)), "n": n, "monomial": "1", "value": "0"})
                continue
            for key in sorted(poly.coeffs, key=lambda k: (weight(k), k)):
                wave_rows.append({
                    "s": str(Fraction(s)),
                    "n": n,
                    "monomial": _mono(key),
                    "value": str(poly.coeffs[key]),
                })
    return {"tau": tau_rows, "weights": weight_rows, "wave": wave_rows}


def _mono(key) -> str:
    bits = [f"t{i+1}^{e}" if e > 1 else f"t{i+1}" for i, e in enumerate(key) if e]
    return "*".join(bits) if bits else "1"
