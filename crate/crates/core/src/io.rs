//! Line-delimited frame interchange format.
//!
//! ```text
//! {"schema":"hsframe/1","dim_h":2,"dim_k":3,"count":2}
//! {"index":0,"columns":[[[[re,im],...],...],...]}
//! {"index":1,"columns":[...]}
//! ```
//!
//! The first line is a header. Each following line holds one frame element
//! as `dim_h` operators (the images of the canonical basis vectors), each a
//! `dim_k × dim_k` array of rows, each entry a `[re, im]` pair. Numbers are
//! written with 17 significant digits so every double round-trips exactly.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{HsError, Result};
use crate::frame::HsFrame;
use crate::hs::HsMap;

pub const SCHEMA: &str = "hsframe/1";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    schema: String,
    dim_h: usize,
    dim_k: usize,
    count: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementLine {
    index: usize,
    columns: Vec<Vec<Vec<[f64; 2]>>>,
}

/// A double with 17 significant digits, valid as a JSON number.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn push_complex(out: &mut String, z: Complex64) {
    let _ = write!(out, "[{},{}]", fmt_f64(z.re), fmt_f64(z.im));
}

pub fn serialize_frame(frame: &HsFrame) -> String {
    let (n, m) = (frame.dim_h(), frame.dim_k());
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{{\"schema\":\"{SCHEMA}\",\"dim_h\":{n},\"dim_k\":{m},\"count\":{}}}",
        frame.len()
    );
    for (i, e) in frame.elements().iter().enumerate() {
        let _ = write!(out, "{{\"index\":{i},\"columns\":[");
        for j in 0..n {
            if j > 0 {
                out.push(',');
            }
            out.push('[');
            for r in 0..m {
                if r > 0 {
                    out.push(',');
                }
                out.push('[');
                for c in 0..m {
                    if c > 0 {
                        out.push(',');
                    }
                    push_complex(&mut out, e.flat()[(r * m + c, j)]);
                }
                out.push(']');
            }
            out.push(']');
        }
        out.push_str("]}\n");
    }
    out
}

fn perr(line: usize, msg: impl Into<String>) -> HsError {
    HsError::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn parse_frame(text: &str) -> Result<HsFrame> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, htext) = lines.next().ok_or_else(|| perr(1, "empty document"))?;
    let header: Header =
        serde_json::from_str(htext).map_err(|e| perr(hline, format!("header: {e}")))?;
    if header.schema != SCHEMA {
        return Err(perr(
            hline,
            format!("schema: expected \"{SCHEMA}\", got \"{}\"", header.schema),
        ));
    }
    if header.dim_h == 0 || header.dim_k == 0 {
        return Err(perr(hline, "dim_h and dim_k must be positive"));
    }
    if header.count == 0 {
        return Err(perr(hline, "count: element list is empty"));
    }
    let (n, m) = (header.dim_h, header.dim_k);

    let mut elements = Vec::with_capacity(header.count);
    for (line, body) in lines.by_ref() {
        let el: ElementLine =
            serde_json::from_str(body).map_err(|e| perr(line, format!("element: {e}")))?;
        let expected = elements.len();
        if expected >= header.count {
            return Err(perr(
                line,
                format!("more elements than the declared count {}", header.count),
            ));
        }
        if el.index != expected {
            return Err(perr(
                line,
                format!("index: expected {expected}, got {}", el.index),
            ));
        }
        if el.columns.len() != n {
            return Err(perr(
                line,
                format!("columns: expected {n} operators, got {}", el.columns.len()),
            ));
        }
        let mut flat = DMatrix::<Complex64>::zeros(m * m, n);
        for (j, op) in el.columns.iter().enumerate() {
            if op.len() != m {
                return Err(perr(
                    line,
                    format!("columns[{j}]: expected {m} rows, got {}", op.len()),
                ));
            }
            for (r, row) in op.iter().enumerate() {
                if row.len() != m {
                    return Err(perr(
                        line,
                        format!("columns[{j}][{r}]: expected {m} entries, got {}", row.len()),
                    ));
                }
                for (c, [re, im]) in row.iter().enumerate() {
                    if !re.is_finite() || !im.is_finite() {
                        return Err(perr(
                            line,
                            format!("columns[{j}][{r}][{c}]: non-finite entry"),
                        ));
                    }
                    flat[(r * m + c, j)] = Complex64::new(*re, *im);
                }
            }
        }
        elements.push(HsMap::from_flat(m, flat).map_err(|e| perr(line, e.to_string()))?);
    }
    if elements.len() != header.count {
        return Err(perr(
            hline,
            format!(
                "count: header declares {} elements, found {}",
                header.count,
                elements.len()
            ),
        ));
    }
    HsFrame::new(elements)
}

pub fn read_frame(path: impl AsRef<Path>) -> Result<HsFrame> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| HsError::Io(format!("{}: {e}", path.display())))?;
    parse_frame(&text)
}

pub fn write_frame(path: impl AsRef<Path>, frame: &HsFrame) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, serialize_frame(frame))
        .map_err(|e| HsError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{random_frame, GenMode};
    use crate::models::{shift_frame, ShiftFrameParams};

    #[test]
    fn formats_seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.0), "-2.0000000000000000e0");
        let v: f64 = serde_json::from_str(&fmt_f64(std::f64::consts::PI)).unwrap();
        assert_eq!(v.to_bits(), std::f64::consts::PI.to_bits());
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let f = random_frame(5, 3, 2, 4, GenMode::Parseval).unwrap();
        let text = serialize_frame(&f);
        assert_eq!(text.lines().count(), 5);
        let back = parse_frame(&text).unwrap();
        assert_eq!(back, f);
        assert_eq!(serialize_frame(&back), text);
    }

    #[test]
    fn shift_frame_layout() {
        let g = shift_frame(&ShiftFrameParams::new(2).unwrap());
        let text = serialize_frame(&g);
        let first = text.lines().next().unwrap();
        assert_eq!(
            first,
            r#"{"schema":"hsframe/1","dim_h":2,"dim_k":3,"count":2}"#
        );
    }

    fn line_of(err: HsError) -> usize {
        match err {
            HsError::Parse { line, .. } => line,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_documents() {
        assert_eq!(line_of(parse_frame("").unwrap_err()), 1);
        let empty = r#"{"schema":"hsframe/1","dim_h":1,"dim_k":1,"count":0}"#;
        assert_eq!(line_of(parse_frame(empty).unwrap_err()), 1);
        let bad_schema = r#"{"schema":"other","dim_h":1,"dim_k":1,"count":1}"#;
        assert_eq!(line_of(parse_frame(bad_schema).unwrap_err()), 1);

        let short = "{\"schema\":\"hsframe/1\",\"dim_h\":1,\"dim_k\":2,\"count\":1}\n\
                     {\"index\":0,\"columns\":[[[[1,0],[0,0]]]]}\n";
        let err = parse_frame(short).unwrap_err();
        assert_eq!(line_of(err.clone()), 2);
        assert!(err.to_string().contains("columns[0]"));

        let missing = "{\"schema\":\"hsframe/1\",\"dim_h\":1,\"dim_k\":1,\"count\":2}\n\
                       {\"index\":0,\"columns\":[[[[1,0]]]]}\n";
        assert_eq!(line_of(parse_frame(missing).unwrap_err()), 1);

        let wrong_index = "{\"schema\":\"hsframe/1\",\"dim_h\":1,\"dim_k\":1,\"count\":1}\n\
                           {\"index\":3,\"columns\":[[[[1,0]]]]}\n";
        assert_eq!(line_of(parse_frame(wrong_index).unwrap_err()), 2);

        let garbage =
            "{\"schema\":\"hsframe/1\",\"dim_h\":1,\"dim_k\":1,\"count\":1}\n\nnot json\n";
        assert_eq!(line_of(parse_frame(garbage).unwrap_err()), 3);
    }
}
