"""LoS MIMO channel synthesis for discrete arrays.

Models
------
nusw          exact spherical wave: per-link amplitude and phase,
              h_nm = lambda/(4*pi*d_nm) * exp(-1j*2*pi*d_nm/lambda)
usw           spherical phase, uniform amplitude taken at the center distance
planar        far-field plane wave, rank-1 outer product by construction
iid_rayleigh  i.i.d. unit-variance circularly-symmetric Gaussian entries

Rows index receive elements, columns index transmit elements.  The phase sign
convention exp(-1j*2*pi*d/lambda) is fixed so serialized matrices are stable.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import SingularGeometryError
from .geometry import ArrayGeometry, CarrierConfig

MODELS = ("nusw", "usw", "planar", "iid_rayleigh")


@dataclass(frozen=True)
class ChannelMatrix:
    """Complex N_r x N_t gain matrix with model metadata.

    ``wavelength`` is in meters; it is None for the statistical i.i.d. model,
    which has no physical carrier.
    """

    entries: np.ndarray
    wavelength: float | None
    model: str

    def __post_init__(self):
        h = np.array(self.entries, dtype=complex, copy=True)
        if h.ndim != 2 or h.shape[0] < 1 or h.shape[1] < 1:
            raise ValueError(f"entries must be a 2D matrix, got shape {h.shape}")
        if not (np.all(np.isfinite(h.real)) and np.all(np.isfinite(h.imag))):
            raise ValueError("channel entries must be finite")
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}, expected one of {MODELS}")
        h.setflags(write=False)
        object.__setattr__(self, "entries", h)

    @property
    def n_r(self) -> int:
        return self.entries.shape[0]

    @property
    def n_t(self) -> int:
        return self.entries.shape[1]


def _discrete_pair(tx: ArrayGeometry, rx: ArrayGeometry):
    if tx.kind != "discrete" or rx.kind != "discrete":
        raise ValueError("channel synthesis requires discrete transmit and receive arrays")
    return tx.elements, rx.elements


def _pairwise_distances(tx_pts: np.ndarray, rx_pts: np.ndarray) -> np.ndarray:
    diff = rx_pts[:, None, :] - tx_pts[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def los_nusw_channel(tx: ArrayGeometry, rx: ArrayGeometry,
                     carrier: CarrierConfig) -> ChannelMatrix:
    """Non-uniform spherical-wave channel: exact per-link distance in both
    amplitude and phase."""
    tx_pts, rx_pts = _discrete_pair(tx, rx)
    d = _pairwise_distances(tx_pts, rx_pts)
    if np.any(d == 0.0):
        raise SingularGeometryError("transmit and receive elements coincide (d_nm = 0)")
    lam = carrier.wavelength
    h = lam / (4.0 * np.pi * d) * np.exp(-2j * np.pi * d / lam)
    return ChannelMatrix(entries=h, wavelength=lam, model="nusw")


def los_usw_channel(tx: ArrayGeometry, rx: ArrayGeometry,
                    carrier: CarrierConfig) -> ChannelMatrix:
    """Uniform spherical-wave channel: exact spherical phases, all amplitudes
    pinned to the center-to-center distance.

    A good stand-in for the per-link model once the link distance is several
    times the aperture extents; nothing here gates model choice, callers pick
    the model explicitly.
    """
    tx_pts, rx_pts = _discrete_pair(tx, rx)
    d_ref = float(np.linalg.norm(rx.center - tx.center))
    if d_ref == 0.0:
        raise SingularGeometryError("array centers coincide")
    d = _pairwise_distances(tx_pts, rx_pts)
    if np.any(d == 0.0):
        raise SingularGeometryError("transmit and receive elements coincide (d_nm = 0)")
    lam = carrier.wavelength
    h = lam / (4.0 * np.pi * d_ref) * np.exp(-2j * np.pi * d / lam)
    return ChannelMatrix(entries=h, wavelength=lam, model="usw")


def farfield_planar_channel(tx: ArrayGeometry, rx: ArrayGeometry,
                            carrier: CarrierConfig) -> ChannelMatrix:
    """Far-field planar-wave channel.

    Phases are first order in the element offsets along the boresight unit
    vector u from transmit center to receive center:

        h_nm = lam/(4*pi*d_ref) * exp(-1j*2*pi*(d_ref + u.(r_n - c_r) - u.(t_m - c_t))/lam)

    Built as an outer product of two unit-modulus phase vectors, so it is
    rank 1 by construction.
    """
    tx_pts, rx_pts = _discrete_pair(tx, rx)
    c_t, c_r = tx.center, rx.center
    d_ref = float(np.linalg.norm(c_r - c_t))
    if d_ref == 0.0:
        raise SingularGeometryError("array centers coincide")
    lam = carrier.wavelength
    u = (c_r - c_t) / d_ref
    rx_phase = np.exp(-2j * np.pi * ((rx_pts - c_r) @ u) / lam)
    tx_phase = np.exp(+2j * np.pi * ((tx_pts - c_t) @ u) / lam)
    amp = lam / (4.0 * np.pi * d_ref) * np.exp(-2j * np.pi * d_ref / lam)
    h = amp * np.outer(rx_phase, tx_phase)
    return ChannelMatrix(entries=h, wavelength=lam, model="planar")


def iid_rayleigh_channel(n_r: int, n_t: int, seed: int) -> ChannelMatrix:
    """i.i.d. circularly-symmetric complex Gaussian entries with unit variance,
    deterministic for a given seed.  Statistical stand-in for rich scattering."""
    if n_r < 1 or n_t < 1:
        raise ValueError(f"matrix dimensions must be >= 1, got {n_r}x{n_t}")
    rng = np.random.default_rng(seed)
    h = (rng.standard_normal((n_r, n_t)) + 1j * rng.standard_normal((n_r, n_t))) / np.sqrt(2.0)
    return ChannelMatrix(entries=h, wavelength=None, model="iid_rayleigh")


def frobenius_normalized(channel: ChannelMatrix) -> ChannelMatrix:
    """Rescale so that ||H||_F**2 = N_t * N_r.

    Used before capacity/EDoF-vs-SNR evaluation so the SNR axis is comparable
    across geometries; pass the raw matrix instead for physical link budgets.
    """
    h = channel.entries
    norm = np.linalg.norm(h)
    if norm == 0.0:
        raise ValueError("cannot normalize an all-zero channel")
    scale = np.sqrt(h.shape[0] * h.shape[1]) / norm
    return ChannelMatrix(entries=h * scale, wavelength=channel.wavelength,
                         model=channel.model)


# --- serialization ----------------------------------------------------------
#
# A channel is stored as a (re, im) CSV in column-major entry order plus a JSON
# envelope holding shape and model metadata.  Floats are written with repr(),
# which round-trips bit-exactly.


def save_channel(channel: ChannelMatrix, base_path) -> tuple[Path, Path]:
    """Write ``<base>.csv`` and ``<base>.json``; returns the two paths."""
    base = Path(base_path)
    csv_path = base.with_suffix(".csv")
    json_path = base.with_suffix(".json")
    flat = channel.entries.flatten(order="F")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["re", "im"])
        for z in flat:
            writer.writerow([repr(float(z.real)), repr(float(z.imag))])
    envelope = {
        "model": channel.model,
        "wavelength": channel.wavelength,
        "n_r": channel.n_r,
        "n_t": channel.n_t,
        "order": "column-major",
        "csv": csv_path.name,
    }
    with open(json_path, "w") as fh:
        json.dump(envelope, fh, indent=2)
        fh.write("\n")
    return csv_path, json_path


def load_channel(json_path) -> ChannelMatrix:
    """Load a channel written by :func:`save_channel`; bit-exact round trip."""
    json_path = Path(json_path)
    with open(json_path) as fh:
        envelope = json.load(fh)
    csv_path = json_path.parent / envelope["csv"]
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["re", "im"]:
            raise ValueError(f"unexpected channel CSV header {header}")
        values = [complex(float(re), float(im)) for re, im in reader]
    n_r, n_t = envelope["n_r"], envelope["n_t"]
    if len(values) != n_r * n_t:
        raise ValueError(f"expected {n_r * n_t} entries, found {len(values)}")
    h = np.array(values, dtype=complex).reshape((n_r, n_t), order="F")
    return ChannelMatrix(entries=h, wavelength=envelope["wavelength"],
                         model=envelope["model"])
