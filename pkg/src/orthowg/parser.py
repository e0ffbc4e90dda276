"""Surface syntax for products of traces of words.

Tokens are separated by whitespace: ``o`` and ``o^-1`` for a Haar matrix
and its inverse (``o2``, ``o2^-1`` for a second independent one), symbol
names such as ``a1`` or ``a1^t``, ``I`` for the identity, and ``;`` between
traces of a product::

    o a1 o^-1 a2 ; o a3 o^-1 a4
"""

import re
from collections import namedtuple

from .combinatorics import Permutation
from .trace_calculus import Symbol, WordSpec, merge

__all__ = [
    "HaarFactor",
    "SymbolFactor",
    "WordAst",
    "WordSyntaxError",
    "parse_word",
    "format_word",
    "to_wordspec",
    "word_to_spec",
]

HaarFactor = namedtuple("HaarFactor", ["label", "inverse"])
SymbolFactor = namedtuple("SymbolFactor", ["id", "transpose"])


class WordAst(namedtuple("WordAst", ["traces"])):
    """A product of traces; each trace is a tuple of factors."""

    __slots__ = ()

    def __str__(self):
        return format_word(self)


class WordSyntaxError(ValueError):
    def __init__(self, message, position, text):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.position = position
        self.text = text


_TOKEN = re.compile(r";|[^\s;]+")
_HAAR = re.compile(r"o(\d*)(\^-1)?$")
_SYMBOL = re.compile(r"([A-Za-z][A-Za-z0-9_]*)(\^t)?$")


def parse_word(text):
    traces = []
    current = []
    for match in _TOKEN.finditer(text):
        tok = match.group()
        pos = match.start()
        if tok == ";":
            if not current:
                raise WordSyntaxError("empty trace", pos, text)
            traces.append(tuple(current))
            current = []
            continue
        haar = _HAAR.match(tok)
        if haar:
            label = int(haar.group(1)) if haar.group(1) else 1
            if label < 1:
                raise WordSyntaxError("Haar labels start at 1", pos, text)
            current.append(HaarFactor(label, bool(haar.group(2))))
            continue
        sym = _SYMBOL.match(tok)
        if sym and not re.fullmatch(r"o\d*", sym.group(1)):
            current.append(SymbolFactor(sym.group(1), bool(sym.group(2))))
            continue
        raise WordSyntaxError(f"unexpected token {tok!r}", pos, text)
    if not current:
        raise WordSyntaxError("empty trace", len(text), text)
    traces.append(tuple(current))
    return WordAst(tuple(traces))


def _format_factor(f):
    if isinstance(f, HaarFactor):
        return ("o" if f.label == 1 else f"o{f.label}") + ("^-1" if f.inverse else "")
    return f.id + ("^t" if f.transpose else "")


def format_word(ast):
    return " ; ".join(" ".join(_format_factor(f) for f in trace) for trace in ast.traces)


def _trace_spec(trace):
    start = next((i for i, f in enumerate(trace) if isinstance(f, HaarFactor)), None)
    if start is None:
        word = tuple(Symbol(f.id, f.transpose) for f in trace)
        return WordSpec.plain(word)
    trace = trace[start:] + trace[:start]
    eps, labels, slots = [], [], []
    for f in trace:
        if isinstance(f, HaarFactor):
            eps.append(-1 if f.inverse else 1)
            labels.append(f.label)
            slots.append([])
        else:
            slots[-1].append(Symbol(f.id, f.transpose))
    n = len(eps)
    return WordSpec(Permutation.cycle_type([n]), tuple(eps), tuple(tuple(s) for s in slots), tuple(labels))


def to_wordspec(ast):
    """One WordSpec for the product of all traces in ``ast``."""
    return merge(*(_trace_spec(t) for t in ast.traces))


def word_to_spec(text):
    return to_wordspec(parse_word(text))
