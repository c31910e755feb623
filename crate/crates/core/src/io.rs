//! Readers and writers for hMetis hypergraphs, Matrix Market graphs and
//! plain capacity files.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::ParseError;
use crate::hypergraph::{CapacityMap, Hypergraph, VertexId, Weight};

/// Non-blank, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('%'))
}

fn number<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, ParseError> {
    tok.parse()
        .map_err(|_| ParseError::new(line, format!("invalid {what} '{tok}'")))
}

/// Parses the hMetis hypergraph format: a header `m n [fmt]` followed by one
/// line per edge with 1-based vertex ids. `fmt` 1 and 11 prefix each edge
/// with its weight; 10 and 11 append `n` vertex-weight lines, which are
/// read and discarded.
pub fn parse_hmetis(text: &str) -> Result<Hypergraph, ParseError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| ParseError::new(1, "missing header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() < 2 || toks.len() > 3 {
        return Err(ParseError::new(hline, "header must be 'm n' or 'm n fmt'"));
    }
    let m: usize = number(toks[0], hline, "edge count")?;
    let n: usize = number(toks[1], hline, "vertex count")?;
    let fmt = match toks.get(2) {
        None => 0,
        Some(t) => match *t {
            "1" => 1,
            "10" => 10,
            "11" => 11,
            other => return Err(ParseError::new(hline, format!("unsupported fmt '{other}'"))),
        },
    };
    let edge_weights = fmt == 1 || fmt == 11;
    let vertex_weights = fmt == 10 || fmt == 11;

    let mut pins = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for e in 0..m {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| ParseError::new(text.lines().count(), format!("expected {m} edges, found {e}")))?;
        let mut toks = line.split_whitespace();
        let w: Weight = if edge_weights {
            let w = number(toks.next().unwrap_or(""), ln, "edge weight")?;
            if w < 1 {
                return Err(ParseError::new(ln, "edge weight must be at least 1"));
            }
            w
        } else {
            1
        };
        let mut p = Vec::new();
        for t in toks {
            let id: usize = number(t, ln, "vertex id")?;
            if id == 0 || id > n {
                return Err(ParseError::new(ln, format!("vertex id {id} outside 1..={n}")));
            }
            p.push(id - 1);
        }
        if p.is_empty() {
            return Err(ParseError::new(ln, "edge without vertices"));
        }
        p.sort_unstable();
        p.dedup();
        pins.push(p);
        weights.push(w);
    }
    if vertex_weights {
        for v in 0..n {
            let (ln, line) = lines.next().ok_or_else(|| {
                ParseError::new(text.lines().count(), format!("expected {n} vertex weights, found {v}"))
            })?;
            let _: u64 = number(line, ln, "vertex weight")?;
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(ParseError::new(ln, "unexpected trailing data"));
    }
    Ok(Hypergraph::from_parts(n, pins, weights))
}

/// Writes `h` as hMetis with edge weights (fmt 1).
pub fn write_hmetis(h: &Hypergraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} 1", h.num_edges(), h.num_vertices());
    for (pins, w) in h.edges() {
        let _ = write!(out, "{w}");
        for &v in pins {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
    out
}

/// Reads a coordinate Matrix Market file as a graph: every off-diagonal
/// nonzero becomes a unit-weight 2-pin edge, duplicates merged, diagonal
/// dropped. Edges are ordered by `(min, max)` endpoint.
pub fn parse_matrix_market(text: &str) -> Result<Hypergraph, ParseError> {
    let mut raw = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, banner) = raw.next().ok_or_else(|| ParseError::new(1, "empty file"))?;
    let fields: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if fields.len() < 4 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(ParseError::new(1, "missing '%%MatrixMarket matrix' banner"));
    }
    if fields[2] != "coordinate" {
        return Err(ParseError::new(1, format!("unsupported format '{}', need coordinate", fields[2])));
    }
    let mut lines = raw.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (sl, size) = lines.next().ok_or_else(|| ParseError::new(1, "missing size line"))?;
    let toks: Vec<&str> = size.split_whitespace().collect();
    if toks.len() != 3 {
        return Err(ParseError::new(sl, "size line must be 'rows cols nnz'"));
    }
    let rows: usize = number(toks[0], sl, "row count")?;
    let cols: usize = number(toks[1], sl, "column count")?;
    let nnz: usize = number(toks[2], sl, "nonzero count")?;
    let n = rows.max(cols);

    let mut edges = BTreeSet::new();
    let mut read = 0;
    for (ln, line) in lines {
        let mut t = line.split_whitespace();
        let i: usize = number(t.next().unwrap_or(""), ln, "row index")?;
        let j: usize = number(t.next().unwrap_or(""), ln, "column index")?;
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(ParseError::new(ln, format!("entry ({i}, {j}) outside {rows}x{cols}")));
        }
        read += 1;
        if i != j {
            edges.insert((i.min(j) - 1, i.max(j) - 1));
        }
    }
    if read != nnz {
        return Err(ParseError::new(sl, format!("declared {nnz} entries, found {read}")));
    }
    let (pins, weights): (Vec<Vec<VertexId>>, Vec<Weight>) =
        edges.into_iter().map(|(u, v)| (vec![u, v], 1)).unzip();
    Ok(Hypergraph::from_parts(n, pins, weights))
}

/// One positive integer per line, `n` lines.
pub fn parse_capacities(text: &str, n: usize) -> Result<CapacityMap, ParseError> {
    let mut b = Vec::with_capacity(n);
    for (ln, line) in content_lines(text) {
        let c: usize = number(line, ln, "capacity")?;
        if c < 1 {
            return Err(ParseError::new(ln, "capacity must be at least 1"));
        }
        b.push(c);
    }
    if b.len() != n {
        return Err(ParseError::new(text.lines().count(), format!("expected {n} capacities, found {}", b.len())));
    }
    CapacityMap::new(b).map_err(|e| ParseError::new(0, e.to_string()))
}

pub fn write_capacities(b: &CapacityMap) -> String {
    b.as_slice().iter().map(|c| format!("{c}\n")).collect()
}
