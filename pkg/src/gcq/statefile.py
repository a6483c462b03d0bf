"""JSON state files.

Schema: {"kind": ..., "dims": [...], "data": [[re, im], ...], "meta": {...}}
with complex entries serialized as two-element [re, im] arrays in decimal.
Kinds and their dims/data layout (all row-major, product basis i-major,
that is row index = i * dim_b + j):

  pure-bipartite   dims [d, d]          data d*d amplitudes
  pure-tripartite  dims [da, db, ns]    data da*db*ns amplitudes
  density-matrix   dims [da, db]        data (da*db)^2 matrix entries
  ensemble         dims [m, d, d]       data m*d*d member amplitudes

Norm/trace invariants are enforced on load within 1e-8; inputs inside that
tolerance but outside the stricter construction tolerances are cleaned up
(renormalized / symmetrized / clipped to positive) before construction.
"""

import json

import numpy as np

from .errors import StateFileError, GcqError
from .states import DensityMatrix, Ensemble, PureBipartite, PureTripartite

LOAD_TOL = 1e-8

KINDS = ("pure-bipartite", "pure-tripartite", "density-matrix", "ensemble")


def _complex_list(arr):
    flat = np.asarray(arr, dtype=np.complex128).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in flat]


def _parse_data(raw, expected):
    if not isinstance(raw, list) or len(raw) != expected:
        raise StateFileError(f"data must hold {expected} complex entries")
    out = np.empty(expected, dtype=np.complex128)
    for k, pair in enumerate(raw):
        if not isinstance(pair, list) or len(pair) != 2:
            raise StateFileError("complex entries must be [re, im] pairs")
        out[k] = complex(float(pair[0]), float(pair[1]))
    if not np.all(np.isfinite(out)):
        raise StateFileError("data contains non-finite entries")
    return out


def to_dict(obj, meta=None):
    """Serialize a state object to the schema dictionary."""
    base_meta = {"basis": "i-major"}
    if meta:
        base_meta.update({str(k): str(v) for k, v in meta.items()})
    if isinstance(obj, PureBipartite):
        return {"kind": "pure-bipartite", "dims": [obj.d, obj.d],
                "data": _complex_list(obj.amp), "meta": base_meta}
    if isinstance(obj, PureTripartite):
        return {"kind": "pure-tripartite", "dims": list(obj.dims),
                "data": _complex_list(obj.amp), "meta": base_meta}
    if isinstance(obj, DensityMatrix):
        return {"kind": "density-matrix", "dims": [obj.dim_a, obj.dim_b],
                "data": _complex_list(obj.mat), "meta": base_meta}
    if isinstance(obj, Ensemble):
        return {"kind": "ensemble",
                "dims": [obj.m, obj.d, obj.d],
                "data": _complex_list(obj.amps()), "meta": base_meta}
    raise StateFileError(f"cannot serialize object of type {type(obj).__name__}")


def dumps(obj, meta=None):
    return json.dumps(to_dict(obj, meta), sort_keys=True, indent=2) + "\n"


def save(obj, path, meta=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj, meta))


def _build_pure_bipartite(arr, dims):
    d = dims[0]
    amp = arr.reshape(d, d)
    norm2 = float(np.real(amp.conj().ravel() @ amp.ravel()))
    if norm2 > 1.0 + LOAD_TOL:
        raise StateFileError(f"squared norm {norm2} exceeds 1 beyond load tolerance")
    if norm2 > 1.0:
        amp = amp / np.sqrt(norm2)
    return PureBipartite(amp)


def _build_pure_tripartite(arr, dims):
    amp = arr.reshape(dims)
    norm = np.linalg.norm(amp)
    if abs(norm - 1.0) > LOAD_TOL:
        raise StateFileError(f"state norm {norm} deviates from 1 beyond load tolerance")
    return PureTripartite(amp / norm)


def _build_density(arr, dims):
    n = dims[0] * dims[1]
    mat = arr.reshape(n, n)
    if np.abs(mat - mat.conj().T).max() > LOAD_TOL:
        raise StateFileError("density matrix is not Hermitian within load tolerance")
    tr = np.trace(mat).real
    if abs(tr - 1.0) > LOAD_TOL:
        raise StateFileError(f"trace {tr} deviates from 1 beyond load tolerance")
    try:
        return DensityMatrix(mat, dims[0], dims[1])
    except GcqError:
        herm = (mat + mat.conj().T) / 2.0
        w, v = np.linalg.eigh(herm)
        if w.min() < -LOAD_TOL:
            raise StateFileError("density matrix has a negative eigenvalue beyond tolerance")
        w = np.maximum(w, 0.0)
        herm = (v * w) @ v.conj().T
        herm /= np.trace(herm).real
        return DensityMatrix(herm, dims[0], dims[1])


def _build_ensemble(arr, dims):
    m, d = dims[0], dims[1]
    amps = arr.reshape(m, d, d)
    total = float(np.real(np.sum(amps.conj() * amps)))
    if abs(total - 1.0) > LOAD_TOL:
        raise StateFileError(f"member weights sum to {total}, beyond load tolerance")
    amps = amps / np.sqrt(total)
    return Ensemble(tuple(PureBipartite(a) for a in amps))


_BUILDERS = {
    "pure-bipartite": (_build_pure_bipartite, 2, lambda d: d[0] * d[1]),
    "pure-tripartite": (_build_pure_tripartite, 3, lambda d: d[0] * d[1] * d[2]),
    "density-matrix": (_build_density, 2, lambda d: (d[0] * d[1]) ** 2),
    "ensemble": (_build_ensemble, 3, lambda d: d[0] * d[1] * d[2]),
}


def from_dict(doc):
    """Build the typed state object described by a schema dictionary."""
    if not isinstance(doc, dict):
        raise StateFileError("state file must hold a JSON object")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise StateFileError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    dims = doc.get("dims")
    builder, ndims, datalen = _BUILDERS[kind]
    if (not isinstance(dims, list) or len(dims) != ndims
            or not all(isinstance(x, int) and x >= 1 for x in dims)):
        raise StateFileError(f"dims for {kind} must be {ndims} positive integers")
    if kind == "pure-bipartite" and dims[0] != dims[1]:
        raise StateFileError("pure-bipartite dims must be equal")
    if kind == "ensemble" and dims[1] != dims[2]:
        raise StateFileError("ensemble member dims must be equal")
    arr = _parse_data(doc.get("data"), datalen(dims))
    try:
        return builder(arr, tuple(dims))
    except GcqError as exc:
        raise StateFileError(str(exc)) from exc


def loads(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"not valid JSON: {exc}") from exc
    return from_dict(doc)


def load(path):
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())
