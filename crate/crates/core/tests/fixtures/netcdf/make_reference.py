"""Regenerate the scipy-written NetCDF classic fixture and the frozen readbacks.

scipy.io.netcdf_file is an independent reader/writer of the classic format.
It writes scipy_reference.nc and reads both that file and writer_reference.nc
(produced by the Rust writer); the JSON readbacks are compared against the
Rust parser.
"""
import json

import numpy as np
from scipy.io import netcdf_file

PATH = "scipy_reference.nc"

with netcdf_file(PATH, "w", version=1) as f:
    f.title = b"reference fixture"
    f.nx = np.int32(64)
    f.ratio = np.float64(0.25)
    f.flags = np.array([1, -2, 3], dtype=np.int8)
    f.createDimension("time", None)
    f.createDimension("x", 3)
    f.createDimension("y", 2)
    u = f.createVariable("u", "d", ("x",))
    u.units = b"m/s"
    u[:] = [1.5, 2.5, -3.0]
    idx = f.createVariable("idx", "i", ("x",))
    idx[:] = [1, 2, 3]
    grid = f.createVariable("grid", "h", ("y", "x"))
    grid[:] = [[1, 2, 3], [4, 5, 6]]
    grid.scale = np.float32(0.5)
    t = f.createVariable("t", "d", ("time",))
    t[:] = [10.0, 20.0]

def readback(path):
    out = {}
    with netcdf_file(path, "r", mmap=False) as f:
        out["version"] = int(f.version_byte)
        out["dims"] = [[k, (v if v is not None else 0)] for k, v in f.dimensions.items()]
        out["gatts"] = {}
        for k, v in f._attributes.items():
            if isinstance(v, bytes):
                out["gatts"][k] = ["char", v.decode()]
            else:
                arr = np.atleast_1d(v)
                out["gatts"][k] = [arr.dtype.name, arr.tolist()]
        out["vars"] = {}
        for name, var in f.variables.items():
            entry = {"dims": list(var.dimensions), "dtype": var.data.dtype.name}
            entry["atts"] = {
                k: (v.decode() if isinstance(v, bytes) else np.atleast_1d(v).tolist())
                for k, v in var._attributes.items()
            }
            entry["data"] = np.asarray(var.data).ravel().tolist()
            out["vars"][name] = entry
        out["numrecs"] = int(f._recs)

    return out


def dump(out, path):
    with open(path, "w") as fh:
        json.dump(out, fh, indent=1, sort_keys=True)
        fh.write("\n")


dump(readback(PATH), "scipy_reference.json")
dump(readback("writer_reference.nc"), "writer_reference.json")
