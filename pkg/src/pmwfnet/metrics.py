"""Enhancement quality metrics: SNR and scale-invariant SDR.

Both are energy-ratio measures in dB, capped at +/-100 so silent or exact
signals stay finite.  Lengths must already be aligned by the caller (the
engine output is latency-compensated, so no shifting happens here).
"""

import numpy as np

from .errors import LengthMismatch, ZeroReference

DB_CAP = 100.0


def _capped_ratio_db(num, den):
    if den <= 0.0:
        return DB_CAP
    if num <= 0.0:
        return -DB_CAP
    return float(np.clip(10.0 * np.log10(num / den), -DB_CAP, DB_CAP))


def snr(reference, estimate):
    """10 log10(||s||^2 / ||s - s_hat||^2), capped at +/-100 dB."""
    s = np.asarray(reference, dtype=np.float64)
    y = np.asarray(estimate, dtype=np.float64)
    if s.shape != y.shape:
        raise LengthMismatch(f"reference {s.shape} vs estimate {y.shape}")
    return _capped_ratio_db(float(s @ s), float((s - y) @ (s - y)))


def si_sdr(reference, estimate):
    """Scale-invariant SDR: project the estimate onto the reference first.

    Both signals are mean-removed before the projection; a zero reference is
    rejected since the optimal scale is then undefined.
    """
    s = np.asarray(reference, dtype=np.float64)
    y = np.asarray(estimate, dtype=np.float64)
    if s.shape != y.shape:
        raise LengthMismatch(f"reference {s.shape} vs estimate {y.shape}")
    s = s - s.mean()
    y = y - y.mean()
    s_energy = float(s @ s)
    if s_energy <= 0.0:
        raise ZeroReference("reference has no energy after mean removal")
    scale = float(y @ s) / s_energy
    target = scale * s
    err = y - target
    return _capped_ratio_db(float(target @ target), float(err @ err))
