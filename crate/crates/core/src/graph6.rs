//! The graph6 one-line text encoding.
//!
//! A record is `N(n) R(x)`: the vertex count in one, four or eight printable
//! bytes, followed by the upper triangle of the adjacency matrix read column by
//! column (`x(0,1) x(0,2) x(1,2) x(0,3) ...`), packed six bits per byte with the
//! most significant bit first and each byte offset by 63. Unused bits in the
//! final byte are zero.

use thiserror::Error;

use crate::graph::{Graph, GraphError};

const HEADER: &str = ">>graph6<<";
const BIAS: u8 = 63;
const MAX_SMALL: usize = 62;
const MAX_MEDIUM: usize = 258_047;
const MAX_LARGE: usize = 68_719_476_735;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Graph6Error {
    #[error("empty graph6 record")]
    Empty,
    #[error("byte {byte:#04x} at offset {offset} is outside the printable range 63..=126")]
    CharOutOfRange { offset: usize, byte: u8 },
    #[error("malformed vertex-count header")]
    BadLengthHeader,
    #[error("record ends after {found} adjacency bytes, expected {expected}")]
    Truncated { expected: usize, found: usize },
    #[error("{extra} unexpected trailing byte(s)")]
    TrailingGarbage { extra: usize },
    #[error("padding bits in the last byte are not zero")]
    NonZeroPadding,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn encode_size(n: usize, out: &mut Vec<u8>) {
    if n <= MAX_SMALL {
        out.push(n as u8 + BIAS);
    } else if n <= MAX_MEDIUM {
        out.push(126);
        for shift in [12, 6, 0] {
            out.push(((n >> shift) & 0x3f) as u8 + BIAS);
        }
    } else {
        assert!(n <= MAX_LARGE, "graph6 cannot encode {n} vertices");
        out.extend([126, 126]);
        for shift in [30, 24, 18, 12, 6, 0] {
            out.push(((n >> shift) & 0x3f) as u8 + BIAS);
        }
    }
}

/// Returns the vertex count and the number of header bytes consumed.
fn decode_size(bytes: &[u8]) -> Result<(usize, usize), Graph6Error> {
    let value = |slice: &[u8]| slice.iter().fold(0usize, |acc, &b| (acc << 6) | (b - BIAS) as usize);
    match bytes {
        [] => Err(Graph6Error::Empty),
        [126, 126, rest @ ..] => {
            let digits = rest.get(..6).ok_or(Graph6Error::BadLengthHeader)?;
            let n = value(digits);
            if n <= MAX_MEDIUM {
                return Err(Graph6Error::BadLengthHeader);
            }
            Ok((n, 8))
        }
        [126, rest @ ..] => {
            let digits = rest.get(..3).ok_or(Graph6Error::BadLengthHeader)?;
            let n = value(digits);
            if n <= MAX_SMALL {
                return Err(Graph6Error::BadLengthHeader);
            }
            Ok((n, 4))
        }
        [b, ..] => Ok(((b - BIAS) as usize, 1)),
    }
}

/// Encodes the labeled adjacency of `g` (no header, no newline).
pub fn emit_graph6(g: &Graph) -> String {
    let n = g.p();
    let mut out = Vec::with_capacity(1 + (n * n.saturating_sub(1) / 2).div_ceil(6));
    encode_size(n, &mut out);

    let bits = n * n.saturating_sub(1) / 2;
    let mut body = vec![0u8; bits.div_ceil(6)];
    for &(u, v) in g.edges() {
        let k = v * (v - 1) / 2 + u;
        body[k / 6] |= 1 << (5 - k % 6);
    }
    out.extend(body.into_iter().map(|b| b + BIAS));
    String::from_utf8(out).expect("graph6 bytes are ASCII")
}

/// Decodes one graph6 record. An optional `>>graph6<<` header and a single
/// trailing line terminator are accepted.
pub fn parse_graph6(text: &str) -> Result<Graph, Graph6Error> {
    let text = text
        .strip_suffix('\n')
        .map(|t| t.strip_suffix('\r').unwrap_or(t))
        .unwrap_or(text);
    let text = text.strip_prefix(HEADER).unwrap_or(text);
    let bytes = text.as_bytes();
    if bytes.is_empty() {
        return Err(Graph6Error::Empty);
    }
    if let Some(offset) = bytes.iter().position(|b| !(63..=126).contains(b)) {
        return Err(Graph6Error::CharOutOfRange {
            offset,
            byte: bytes[offset],
        });
    }

    let (n, header_len) = decode_size(bytes)?;
    let bits = n * n.saturating_sub(1) / 2;
    let expected = bits.div_ceil(6);
    let body = &bytes[header_len..];
    if body.len() < expected {
        return Err(Graph6Error::Truncated {
            expected,
            found: body.len(),
        });
    }
    if body.len() > expected {
        return Err(Graph6Error::TrailingGarbage {
            extra: body.len() - expected,
        });
    }
    if bits % 6 != 0 {
        let last = body[expected - 1] - BIAS;
        let pad = 6 - bits % 6;
        if last & ((1 << pad) - 1) != 0 {
            return Err(Graph6Error::NonZeroPadding);
        }
    }

    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if ((body[k / 6] - BIAS) >> (5 - k % 6)) & 1 == 1 {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    Ok(Graph::from_edges(n, &edges)?)
}
