"""Newick parsing and canonical serialization for rooted trees and forests.

Input tolerates branch lengths and internal labels (dropped with a warning);
multifurcations are rejected.  Quoted labels ('...' with doubled-quote
escape) are supported so composite labels can round-trip.  Serialization is
canonical: children are ordered by smallest descendant label and components
by their smallest label, so isomorphic forests serialize identically.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .errors import ParseError
from .forest import Forest

logger = logging.getLogger(__name__)

_SPECIALS = set("(),;:'[]\t\n\r ")


@dataclass
class NewickDocument:
    """An ordered list of Newick tree strings plus their origin."""

    trees: list[str]
    source: str = "<inline>"


def split_document(text: str, source: str = "<inline>") -> NewickDocument:
    """Split input into ';'-terminated tree records, ignoring '#' comment
    lines and respecting quoted labels."""
    records: list[str] = []
    buf: list[str] = []
    for line in text.splitlines():
        if line.lstrip().startswith("#"):
            continue
        buf.append(line)
    joined = "\n".join(buf)
    cur: list[str] = []
    in_quote = False
    i = 0
    while i < len(joined):
        ch = joined[i]
        if in_quote:
            cur.append(ch)
            if ch == "'":
                if i + 1 < len(joined) and joined[i + 1] == "'":
                    cur.append("'")
                    i += 1
                else:
                    in_quote = False
        elif ch == "'":
            in_quote = True
            cur.append(ch)
        elif ch == ";":
            rec = "".join(cur).strip()
            if rec:
                records.append(rec + ";")
            cur = []
        else:
            cur.append(ch)
        i += 1
    if "".join(cur).strip():
        raise ParseError("trailing content without terminating ';'", len(joined))
    return NewickDocument(records, source)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.dropped_lengths = 0
        self.dropped_inner_labels = 0

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.pos)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t\n\r":
            self.pos += 1

    def parse_label(self) -> str:
        self.skip_ws()
        if self.peek() == "'":
            self.pos += 1
            out: list[str] = []
            while True:
                if self.pos >= len(self.text):
                    raise self.error("unterminated quoted label")
                ch = self.text[self.pos]
                self.pos += 1
                if ch == "'":
                    if self.peek() == "'":
                        out.append("'")
                        self.pos += 1
                    else:
                        return "".join(out)
                else:
                    out.append(ch)
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in _SPECIALS:
            self.pos += 1
        return self.text[start:self.pos]

    def skip_length(self) -> None:
        self.skip_ws()
        if self.peek() == ":":
            self.pos += 1
            self.skip_ws()
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos] not in _SPECIALS:
                self.pos += 1
            if self.pos == start:
                raise self.error("':' without a branch length")
            try:
                float(self.text[start:self.pos])
            except ValueError:
                raise self.error(f"bad branch length {self.text[start:self.pos]!r}")
            self.dropped_lengths += 1

    def parse_record(self, forest: Forest, seen: dict[str, int]) -> int:
        """Iterative Newick subtree parse (no recursion, so caterpillar
        trees of any depth are fine)."""
        stack: list[list[int]] = []
        done: int | None = None
        while True:
            self.skip_ws()
            ch = self.peek()
            if ch == "(":
                self.pos += 1
                stack.append([])
                continue
            # A node: leaf label here, or close out a finished group.
            if ch == ")":
                raise self.error("empty group")
            label = self.parse_label()
            if not label:
                raise self.error("expected a leaf label")
            if label in seen:
                raise self.error(f"duplicate leaf label {label!r}")
            v = forest.add_leaf(label)
            seen[label] = v
            self.skip_length()
            done = v
            # Attach the finished node, closing groups as they complete.
            while True:
                self.skip_ws()
                ch = self.peek()
                if not stack:
                    return done
                if ch == ",":
                    self.pos += 1
                    stack[-1].append(done)
                    break
                if ch == ")":
                    self.pos += 1
                    kids = stack.pop()
                    kids.append(done)
                    if len(kids) != 2:
                        raise self.error(
                            f"multifurcation ({len(kids)} children); "
                            "trees must be binary"
                        )
                    inner = self.parse_label()
                    if inner:
                        self.dropped_inner_labels += 1
                    self.skip_length()
                    done = forest.add_internal(kids)
                    continue
                raise self.error("expected ',' or ')'")


def _parse_into(forest: Forest, record: str, seen: dict[str, int]) -> int:
    body = record.strip()
    if body.endswith(";"):
        body = body[:-1]
    if not body.strip():
        raise ParseError("empty tree")
    p = _Parser(body)
    root = p.parse_record(forest, seen)
    p.skip_ws()
    if p.pos != len(body):
        raise p.error("unexpected trailing characters")
    if p.dropped_lengths or p.dropped_inner_labels:
        logger.warning(
            "dropped %d branch length(s) and %d internal label(s); "
            "the distance is purely topological",
            p.dropped_lengths,
            p.dropped_inner_labels,
        )
    return root


def parse_tree(text: str) -> Forest:
    """Parse a single Newick tree into a one-component Forest."""
    doc = split_document(text)
    if len(doc.trees) != 1:
        raise ParseError(f"expected exactly one tree, found {len(doc.trees)}")
    forest = Forest()
    _parse_into(forest, doc.trees[0], {})
    return forest


def parse_forest(text: str) -> Forest:
    """Parse ';'-separated trees as the components of one forest; labels
    must be distinct across components."""
    doc = split_document(text)
    if not doc.trees:
        raise ParseError("no trees found")
    forest = Forest()
    seen: dict[str, int] = {}
    for rec in doc.trees:
        _parse_into(forest, rec, seen)
    return forest


def _quote_if_needed(label: str) -> str:
    if label and not (set(label) & _SPECIALS):
        return label
    return "'" + label.replace("'", "''") + "'"


def serialize(forest: Forest) -> str:
    """Canonical Newick text: one ';'-terminated record per component."""
    min_label: dict[int, str] = {}
    for v in forest.postorder():
        vert = forest.vertices[v]
        if not vert.children:
            min_label[v] = vert.label if vert.label is not None else ""
        else:
            min_label[v] = min(min_label[c] for c in vert.children)

    text: dict[int, str] = {}
    for v in forest.postorder():
        vert = forest.vertices[v]
        if not vert.children:
            text[v] = _quote_if_needed(vert.label or "")
        else:
            kids = sorted(vert.children, key=lambda c: min_label[c])
            text[v] = "(" + ",".join(text[c] for c in kids) + ")"

    roots = sorted(forest.roots, key=lambda r: min_label[r])
    return "".join(text[r] + ";" for r in roots)
