"""Flat key=value configuration files.

One `key = value` pair per line; blank lines and #-comments are ignored.
Values stay strings; consumers coerce. Stream recipes use indexed key groups
(regimes.<i>.mean / .std / .duration) on top of the scalar StreamSpec keys.
"""

import numpy as np

from driftmap.stream import Regime, StreamSpec


def parse_kv_file(path):
    values = {}
    with open(path, "r") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


def parse_bool(text):
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_float_list(text):
    return [float(tok) for tok in text.split(",") if tok.strip()]


def parse_value_range(text):
    """Comma list (`2,4,6`) or inclusive range (`2:28:2`)."""
    text = text.strip()
    if ":" in text:
        parts = [float(tok) for tok in text.split(":")]
        if len(parts) == 2:
            start, stop, step = parts[0], parts[1], 1.0
        elif len(parts) == 3:
            start, stop, step = parts
        else:
            raise ValueError(f"bad range {text!r}")
        if step <= 0:
            raise ValueError("range step must be positive")
        out = []
        v = start
        while v <= stop + 1e-9:
            out.append(v)
            v += step
        return out
    return parse_float_list(text)


def parse_stream_spec(path):
    """Build a StreamSpec from a flat key=value recipe file."""
    values = parse_kv_file(path)
    try:
        n_features = int(values["n_features"])
        chunk_size = int(values["chunk_size"])
    except KeyError as missing:
        raise ValueError(f"{path}: missing stream key {missing}") from None

    regimes = []
    i = 0
    while f"regimes.{i}.duration" in values:
        mean = np.array(parse_float_list(values.get(f"regimes.{i}.mean", "0")))
        std = np.array(parse_float_list(values.get(f"regimes.{i}.std", "1")))
        duration = int(values[f"regimes.{i}.duration"])
        regimes.append(Regime(mean, std, duration))
        i += 1
    if not regimes:
        raise ValueError(f"{path}: no regimes.<i>.duration entries found")

    spec = StreamSpec(
        n_features=n_features,
        chunk_size=chunk_size,
        regimes=regimes,
        transition=values.get("transition", "sudden"),
        blend_chunks=int(values.get("blend_chunks", "1")),
        seed=int(values.get("seed", "0")),
    )
    if "n_chunks" in values and int(values["n_chunks"]) != spec.n_chunks:
        raise ValueError(
            f"{path}: n_chunks={values['n_chunks']} but regime durations sum to {spec.n_chunks}"
        )
    return spec
