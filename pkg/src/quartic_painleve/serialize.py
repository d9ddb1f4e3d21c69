"""Lossless serialization of extended-precision values plus deterministic
JSON/CSV emission.

Numbers are stored as decimal strings with enough digits to round-trip
the underlying binary value exactly at the producing precision; complex
values are [re, im] string pairs.  JSON output is key-sorted with fixed
separators and no timestamps, so identical runs produce identical bytes.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from mpmath import mp, mpc, mpf

from .precision import to_mpf


def mpf_to_str(x, dps=None):
    """Decimal string that reparses to the identical mpf at equal precision."""
    with mp.workdps((dps or mp.dps) + 12):
        return mp.nstr(mpf(x), (dps or mp.dps) + 10, strip_zeros=True)


def mpc_to_pair(z, dps=None):
    z = mpc(z)
    return [mpf_to_str(z.real, dps), mpf_to_str(z.imag, dps)]


def str_to_mpf(s):
    return mpf(s)


def pair_to_mpc(pair):
    return mpc(mpf(pair[0]), mpf(pair[1]))


def t_to_str(t):
    """Exact rationals keep their fraction form; mpf values full digits."""
    if isinstance(t, (Fraction, int)):
        return str(Fraction(t))
    if isinstance(t, str):
        return t
    return mpf_to_str(to_mpf(t))


def parse_t(s):
    """Inverse of t_to_str: rational and decimal strings parse to exact
    Fractions ('-1/12', '-0.0417'); anything else falls back to mpf."""
    s = str(s)
    try:
        return Fraction(s)
    except ValueError:
        return mpf(s)


def json_dumps(obj):
    """Deterministic JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, separators=(",", ": "), indent=1) + "\n"


def write_json(path, obj):
    data = json_dumps(obj)
    with open(path, "w") as fh:
        fh.write(data)
    return path


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def sha256_of_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_csv(path, header, rows):
    """Plain deterministic CSV (values already stringified)."""
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")
    return path


# --------------------------------------------------------------------------
# schema-level encoders
# --------------------------------------------------------------------------


def recurrence_to_json(spec, moments, table):
    """The JSON schema for a recurrence run.

    { "spec": {t, N, alpha: [re,im], beta: [re,im], digits},
      "moments": [[re,im],...], "a": [[re,im],...], "b": [[re,im],...],
      "h": [[re,im],...], "exists": [...] }
    a[0] is serialized as null (pi_(-1) = 0 convention).
    """
    dps = moments.digits

    def enc_seq(seq):
        return [None if v is None else mpc_to_pair(v, dps) for v in seq]

    return {
        "spec": {
            "t": t_to_str(spec.t),
            "N": spec.N,
            "alpha": mpc_to_pair(spec.alpha, dps),
            "beta": mpc_to_pair(spec.beta, dps),
            "digits": dps,
        },
        "moments": enc_seq(moments.m),
        "moment_errors": [mpf_to_str(e, dps) for e in moments.error_estimates],
        "a": enc_seq(table.a),
        "b": enc_seq(table.b),
        "h": enc_seq(table.h),
        "exists": list(table.exists),
    }


def recurrence_to_csv_rows(table, dps):
    rows = []
    for n in range(table.n_max + 1):
        a = table.a[n]
        b = table.b[n]
        rows.append(
            [
                n,
                "" if a is None else mpf_to_str(mpc(a).real, dps),
                "" if a is None else mpf_to_str(mpc(a).imag, dps),
                "" if b is None else mpf_to_str(mpc(b).real, dps),
                "" if b is None else mpf_to_str(mpc(b).imag, dps),
            ]
        )
    return ["n", "re_a", "im_a", "re_b", "im_b"], rows


def painleve_to_json(sol):
    dps = sol.digits

    def enc(seq):
        return [mpc_to_pair(v, dps) for v in seq]

    return {
        "alpha": mpc_to_pair(sol.alpha, dps),
        "x0": mpf_to_str(sol.x0, dps),
        "digits": dps,
        "grid": [mpf_to_str(x, dps) for x in sol.grid],
        "y": enc(sol.y),
        "yprime": enc(sol.yp),
        "H": enc(sol.H),
        "poles": [mpf_to_str(p, dps) for p in sol.poles],
        "seed": {
            "order": sol.seed.order,
            "series_dropped": mpf_to_str(sol.seed.series_dropped, dps),
            "correction_magnitude": mpf_to_str(sol.seed.correction_magnitude, dps),
            "seed_error": mpf_to_str(sol.seed.seed_error, dps),
        }
        if sol.seed
        else None,
    }


def painleve_to_csv_rows(sol):
    dps = sol.digits
    rows = []
    for x, y, yp, h in zip(sol.grid, sol.y, sol.yp, sol.H):
        rows.append(
            [
                mpf_to_str(x, dps),
                mpf_to_str(mpc(y).real, dps),
                mpf_to_str(mpc(y).imag, dps),
                mpf_to_str(mpc(yp).real, dps),
                mpf_to_str(mpc(yp).imag, dps),
                mpf_to_str(mpc(h).real, dps),
                mpf_to_str(mpc(h).imag, dps),
            ]
        )
    return ["x", "re_y", "im_y", "re_yprime", "im_yprime", "re_H", "im_H"], rows


def curve_to_csv_rows(curve, dps):
    rows = []
    for s, z, phi in zip(curve.arc, curve.points, curve.phi_values):
        rows.append(
            [
                mpf_to_str(s, dps),
                mpf_to_str(mpc(z).real, dps),
                mpf_to_str(mpc(z).imag, dps),
                mpf_to_str(mpc(phi).real, dps),
                mpf_to_str(mpc(phi).imag, dps),
            ]
        )
    return ["s", "re_z", "im_z", "re_phi", "im_phi"], rows
