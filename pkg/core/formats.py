"""
Edge-list ingest and emit.

Accepted input:
  - plain "u v" lines, 0-based, '#' comments (our own emit format carries a
    "# spannerweave edgelist n=<n> m=<m>" header so isolated top vertices survive);
  - DIMACS / PACE style: 'c' comment lines, one "p <fmt> <n> <m>" problem line, edges
    as "e u v" or bare "u v", all 1-based once a 'p' line has been seen.
"""
import logging
import re
import sys
from pathlib import Path
from typing import List, Optional, TextIO, Tuple, Union

from .exceptions import GraphFormatError
from .graph import Edge, Graph

logger = logging.getLogger(__name__)

HEADER_RE = re.compile(r"^#\s*spannerweave\s+edgelist\s+n=(\d+)(?:\s+m=(\d+))?")


def _ints(tokens: List[str], line_no: int) -> List[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise GraphFormatError(f"expected integers, got {' '.join(tokens)!r}", line_no) from None


def parse_graph(text: str) -> Graph:
    declared_n: Optional[int] = None
    declared_m: Optional[int] = None
    one_based = False
    edges: List[Tuple[Edge, int]] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith('#'):
            header = HEADER_RE.match(line)
            if header:
                declared_n = int(header.group(1))
                declared_m = int(header.group(2)) if header.group(2) else None
            continue
        line = line.split('#', 1)[0].strip()
        tokens = line.split()
        head = tokens[0]
        if head == 'c':
            continue
        if head == 'p':
            if one_based:
                raise GraphFormatError("duplicate problem line", line_no)
            if len(tokens) < 3:
                raise GraphFormatError("problem line needs 'p <format> <n> [<m>]'", line_no)
            counts = _ints(tokens[2:4], line_no)
            declared_n = counts[0]
            declared_m = counts[1] if len(counts) > 1 else None
            one_based = True
            continue
        if head == 'e':
            tokens = tokens[1:]
            if not one_based:
                # DIMACS edge lines are 1-based even without a problem line
                one_based = True
        if len(tokens) != 2:
            raise GraphFormatError(f"expected an edge 'u v', got {raw.strip()!r}", line_no)
        u, v = _ints(tokens, line_no)
        if one_based:
            u, v = u - 1, v - 1
        if u < 0 or v < 0:
            raise GraphFormatError("vertex ids must be non-negative", line_no)
        if u == v:
            raise GraphFormatError(f"self-loop at vertex {u}", line_no)
        edges.append(((u, v), line_no))

    top = max((max(u, v) for (u, v), _ in edges), default=-1)
    n = declared_n if declared_n is not None else top + 1
    if top >= n:
        bad = next(line_no for (u, v), line_no in edges if max(u, v) >= n)
        raise GraphFormatError(f"vertex id exceeds declared n={n}", bad)
    if n <= 0:
        raise GraphFormatError("graph has no vertices")

    g = Graph.from_edges(n, (e for e, _ in edges))
    if declared_m is not None and declared_m != g.m:
        logger.warning(f"declared m={declared_m} but read {g.m} distinct edges")
    logger.debug(f"parsed graph n={g.n} m={g.m}")
    return g


def read_text(source: Union[str, Path, TextIO]) -> str:
    """Read a whole input; '-' means stdin"""
    if hasattr(source, 'read'):
        return source.read()
    if str(source) == '-':
        return sys.stdin.read()
    try:
        return Path(source).read_text(encoding='utf-8')
    except OSError as e:
        raise GraphFormatError(f"cannot read {source}: {e}") from e


def read_graph(source: Union[str, Path, TextIO]) -> Graph:
    return parse_graph(read_text(source))


def parse_tree_blocks(text: str, n: int) -> List[Graph]:
    """Split a '# tree <i> ...' multi-block edge file into graphs on n vertices.

    A file without tree headers is a single block; lines before the first header are ignored.
    """
    lines = text.splitlines()
    if not any(line.strip().startswith('# tree') for line in lines):
        return [parse_graph(f"# spannerweave edgelist n={n}\n{text}")]
    blocks: List[List[str]] = []
    for raw in lines:
        if raw.strip().startswith('# tree'):
            blocks.append([])
        elif blocks:
            blocks[-1].append(raw)
    return [parse_graph(f"# spannerweave edgelist n={n}\n" + "\n".join(block)) for block in blocks]


def format_edgelist(g: Graph, edges: Optional[List[Edge]] = None) -> str:
    """0-based edge list with the n/m header; `edges` defaults to all of g"""
    edges = g.edges() if edges is None else sorted(edges)
    lines = [f"# spannerweave edgelist n={g.n} m={len(edges)}"]
    lines.extend(f"{u} {v}" for u, v in edges)
    return "\n".join(lines) + "\n"
