"""Plain-text formats for graphs, pairings, distributions and couplings.

Multigraph      ``n m`` then ``m`` lines ``u v mult`` (one per vertex pair)
Pairing         ``n d`` then ``dn/2`` lines ``u su v sv``
Distribution    ``# dist n N`` then ``N`` lines ``key num den`` (exact) or ``key prob`` (float)
Coupling        ``# coupling n X Y W`` then X lines ``x key``, Y lines ``y key``,
                X lines ``b 0110..`` (row i of the failure relation) and
                W lines ``w i j num den`` (or ``w i j prob``)

Distribution keys are multigraphs on ``n`` vertices written ``u,v,m;u,v,m``
(``-`` for the empty graph) or integers written ``=k``.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import numpy as np

from .coupling.flow import JointCoupling
from .distributions import FiniteDistribution
from .graphs import Digraph, Multigraph, Pairing


class ParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def graph_to_record(G: Multigraph | Digraph) -> dict:
    """JSON-friendly record; multigraphs also carry their text form inline."""
    if isinstance(G, Digraph):
        return {"type": "digraph", "n": G.n, "arcs": G.arcs.tolist()}
    return {"type": "multigraph", "n": G.n, "edges": [list(t) for t in G.key()], "text": dumps_multigraph(G)}


def graph_from_record(rec: dict) -> Multigraph | Digraph:
    if rec["type"] == "digraph":
        return Digraph(rec["n"], [tuple(a) for a in rec["arcs"]])
    return Multigraph(rec["n"], {(u, v): m for u, v, m in rec["edges"]})


# -- low-level helpers -----------------------------------------------------


def _lines(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for i, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if s:
            out.append((i, s.split()))
    return out


def _ints(lineno: int, toks: list[str], count: int) -> list[int]:
    if len(toks) != count:
        raise ParseError(lineno, f"expected {count} fields, got {len(toks)}")
    try:
        return [int(t) for t in toks]
    except ValueError:
        raise ParseError(lineno, f"non-integer field in {' '.join(toks)!r}") from None


def _prob_str(p) -> list[str]:
    if isinstance(p, (int, Fraction)):
        p = Fraction(p)
        return [str(p.numerator), str(p.denominator)]
    return [repr(float(p))]


def _parse_prob(lineno: int, toks: list[str]):
    try:
        if len(toks) == 2:
            den = int(toks[1])
            if den <= 0:
                raise ParseError(lineno, "denominator must be positive")
            return Fraction(int(toks[0]), den)
        if len(toks) == 1:
            return float(toks[0])
    except ValueError:
        raise ParseError(lineno, f"bad probability {' '.join(toks)!r}") from None
    raise ParseError(lineno, "expected 'num den' or a float probability")


def _key_str(key) -> str:
    if isinstance(key, Multigraph):
        t = key.key()
        return ";".join(f"{u},{v},{m}" for u, v, m in t) if t else "-"
    if isinstance(key, (int, np.integer)) and not isinstance(key, bool):
        return f"={int(key)}"
    raise TypeError(f"cannot serialize outcome key of type {type(key).__name__}")


def _parse_key(lineno: int, s: str, n: int):
    if s.startswith("="):
        try:
            return int(s[1:])
        except ValueError:
            raise ParseError(lineno, f"bad integer key {s!r}") from None
    if s == "-":
        return Multigraph(n)
    edges = {}
    for part in s.split(";"):
        bits = part.split(",")
        if len(bits) != 3:
            raise ParseError(lineno, f"bad edge {part!r} in key")
        try:
            u, v, m = map(int, bits)
        except ValueError:
            raise ParseError(lineno, f"bad edge {part!r} in key") from None
        if not (1 <= u <= n and 1 <= v <= n) or m < 1:
            raise ParseError(lineno, f"edge {part!r} out of range")
        edges[(u, v)] = edges.get((u, v), 0) + m
    return Multigraph(n, edges)


def _key_n(keys) -> int:
    ns = {k.n for k in keys if isinstance(k, Multigraph)}
    if len(ns) > 1:
        raise ValueError("outcome graphs have different vertex counts")
    return ns.pop() if ns else 0


# -- multigraph ------------------------------------------------------------


def dumps_multigraph(G: Multigraph) -> str:
    rows = [f"{G.n} {G.num_pairs}"] + [f"{u} {v} {m}" for u, v, m in G.key()]
    return "\n".join(rows) + "\n"


def loads_multigraph(text: str) -> Multigraph:
    lines = _lines(text)
    if not lines:
        raise ParseError(1, "empty input")
    ln, toks = lines[0]
    n, m = _ints(ln, toks, 2)
    if n < 0 or m < 0:
        raise ParseError(ln, "negative header value")
    if len(lines) - 1 != m:
        raise ParseError(lines[-1][0], f"header announces {m} edge lines, found {len(lines) - 1}")
    edges: dict[tuple[int, int], int] = {}
    for ln, toks in lines[1:]:
        u, v, mult = _ints(ln, toks, 3)
        if not (1 <= u <= n and 1 <= v <= n):
            raise ParseError(ln, f"vertex out of range 1..{n}")
        if mult < 1:
            raise ParseError(ln, "multiplicity must be positive")
        key = (min(u, v), max(u, v))
        if key in edges:
            raise ParseError(ln, f"repeated pair {key}")
        edges[key] = mult
    return Multigraph(n, edges)


# -- pairing ---------------------------------------------------------------


def dumps_pairing(P: Pairing) -> str:
    rows = [f"{P.n} {P.d}"] + [" ".join(map(str, t)) for t in P.as_tuples()]
    return "\n".join(rows) + "\n"


def loads_pairing(text: str) -> Pairing:
    lines = _lines(text)
    if not lines:
        raise ParseError(1, "empty input")
    ln, toks = lines[0]
    n, d = _ints(ln, toks, 2)
    rows = []
    for ln, toks in lines[1:]:
        u, su, v, sv = _ints(ln, toks, 4)
        if not (1 <= u <= n and 1 <= v <= n and 1 <= su <= d and 1 <= sv <= d):
            raise ParseError(ln, "point out of range")
        rows.append((u, su, v, sv))
    try:
        return Pairing.from_tuples(n, d, rows)
    except ValueError as exc:
        raise ParseError(lines[-1][0], str(exc)) from None


# -- distribution ----------------------------------------------------------


def dumps_distribution(D: FiniteDistribution, n: int | None = None) -> str:
    n = _key_n(D.outcomes) if n is None else n
    rows = [f"# dist {n} {len(D)}"]
    rows += [" ".join([_key_str(k), *_prob_str(p)]) for k, p in zip(D.outcomes, D.probs)]
    return "\n".join(rows) + "\n"


def loads_distribution(text: str) -> FiniteDistribution:
    lines = _lines(text)
    if not lines or lines[0][1][:2] != ["#", "dist"]:
        raise ParseError(lines[0][0] if lines else 1, "expected '# dist n N' header")
    ln, toks = lines[0]
    n, N = _ints(ln, toks[2:], 2)
    if len(lines) - 1 != N:
        raise ParseError(lines[-1][0], f"header announces {N} outcomes, found {len(lines) - 1}")
    outs, probs = [], []
    for ln, toks in lines[1:]:
        if len(toks) not in (2, 3):
            raise ParseError(ln, "expected 'key num den' or 'key prob'")
        outs.append(_parse_key(ln, toks[0], n))
        probs.append(_parse_prob(ln, toks[1:]))
    try:
        return FiniteDistribution(tuple(outs), tuple(probs))
    except ValueError as exc:
        raise ParseError(lines[-1][0], str(exc)) from None


# -- coupling --------------------------------------------------------------


def dumps_coupling(J: JointCoupling, n: int | None = None) -> str:
    n = _key_n(list(J.xs) + list(J.ys)) if n is None else n
    items = sorted(J.weights.items())
    rows = [f"# coupling {n} {len(J.xs)} {len(J.ys)} {len(items)}"]
    rows += [f"x {_key_str(k)}" for k in J.xs]
    rows += [f"y {_key_str(k)}" for k in J.ys]
    rows += ["b " + ("".join("1" if b else "0" for b in row) or "-") for row in np.asarray(J.bad, dtype=bool)]
    rows += [" ".join(["w", str(i), str(j), *_prob_str(w)]) for (i, j), w in items]
    return "\n".join(rows) + "\n"


def coupling_triples_text(J: JointCoupling) -> str:
    """Flat export: one ``x-key y-key num den`` line per positive-weight pair."""
    return "".join(" ".join([_key_str(x), _key_str(y), *_prob_str(w)]) + "\n" for x, y, w in J.triples())


def loads_coupling(text: str) -> JointCoupling:
    lines = _lines(text)
    if not lines or lines[0][1][:2] != ["#", "coupling"]:
        raise ParseError(lines[0][0] if lines else 1, "expected '# coupling n X Y W' header")
    ln, toks = lines[0]
    n, nx_, ny_, nw = _ints(ln, toks[2:], 4)
    body = lines[1:]
    if len(body) != 2 * nx_ + ny_ + nw:
        raise ParseError(lines[-1][0], "line count does not match header")
    xs, ys, weights, bad_rows = [], [], {}, []
    for k, (ln, toks) in enumerate(body):
        tag = "x" if k < nx_ else "y" if k < nx_ + ny_ else "b" if k < 2 * nx_ + ny_ else "w"
        if toks[0] != tag:
            raise ParseError(ln, f"expected a '{tag}' line")
        if tag in "xy":
            if len(toks) != 2:
                raise ParseError(ln, "expected 'x key' or 'y key'")
            (xs if tag == "x" else ys).append(_parse_key(ln, toks[1], n))
        elif tag == "b":
            row = toks[1] if len(toks) == 2 else ""
            row = "" if row == "-" else row
            if len(row) != ny_ or set(row) - {"0", "1"}:
                raise ParseError(ln, f"expected a 0/1 row of length {ny_}")
            bad_rows.append([c == "1" for c in row])
        else:
            if len(toks) not in (4, 5):
                raise ParseError(ln, "expected 'w i j num den' or 'w i j prob'")
            i, j = _ints(ln, toks[1:3], 2)
            if not (0 <= i < nx_ and 0 <= j < ny_):
                raise ParseError(ln, "index out of range")
            weights[(i, j)] = _parse_prob(ln, toks[3:])
    bad = np.array(bad_rows, dtype=bool).reshape(nx_, ny_)
    return JointCoupling(tuple(xs), tuple(ys), weights, bad)


# -- dispatch --------------------------------------------------------------


def serialize(obj) -> str:
    if isinstance(obj, Multigraph):
        return dumps_multigraph(obj)
    if isinstance(obj, Pairing):
        return dumps_pairing(obj)
    if isinstance(obj, FiniteDistribution):
        return dumps_distribution(obj)
    if isinstance(obj, JointCoupling):
        return dumps_coupling(obj)
    raise TypeError(f"no text format for {type(obj).__name__}")


_LOADERS = {
    "multigraph": loads_multigraph,
    "pairing": loads_pairing,
    "distribution": loads_distribution,
    "coupling": loads_coupling,
}


def deserialize(text: str, kind: str):
    try:
        return _LOADERS[kind](text)
    except KeyError:
        raise ValueError(f"unknown kind {kind!r}; choose from {', '.join(_LOADERS)}") from None


def save(obj, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize(obj))
    return path


def load(path: str | Path, kind: str):
    return deserialize(Path(path).read_text(), kind)
