//! Halfspace text format read by common vertex-enumeration tools.
//!
//! Each row `b a_1 … a_m` encodes `b + a·x ≥ 0`; a constraint `Σ_{k∈K} Q_k ≥ C_K` becomes
//! `−C_K` followed by the indicator of `K`.

use crate::error::{Error, Result};
use crate::region::{sorted_subsets, RegionConstants, SubsetKey};

/// Offsets keep 15 significant digits, well inside the round-trip tolerance of `1e-12`.
const OFFSET_DIGITS: usize = 15;

fn offset_text(c: f64) -> String {
    let b: f64 = format!("{:.*e}", OFFSET_DIGITS - 1, -c).parse().expect("formatted float parses");
    if b == 0.0 { "0".to_string() } else { b.to_string() }
}

/// Rows in (size, lexicographic) subset order.
pub fn export_h_representation(rc: &RegionConstants) -> String {
    let m = rc.num_senders();
    let subsets = sorted_subsets(m);
    let mut out = format!("H-representation\nbegin\n{} {} real\n", subsets.len(), m + 1);
    for k in subsets {
        let mut row = offset_text(rc.get(k));
        for i in 0..m {
            row.push_str(if k >> i & 1 == 1 { " 1" } else { " 0" });
        }
        out.push_str(&row);
        out.push('\n');
    }
    out.push_str("end\n");
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Reads constants back from [`export_h_representation`] output. Sender and reference labels
/// are not part of the format and must be supplied; rows may come in any order but every
/// nonempty subset must appear exactly once.
pub fn parse_h_representation(text: &str, senders: Vec<String>, reference: String) -> Result<RegionConstants> {
    let m = senders.len();
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('*'));

    lines
        .by_ref()
        .find(|(_, l)| *l == "H-representation")
        .ok_or_else(|| parse_err(1, "missing `H-representation` header"))?;
    match lines.next() {
        Some((_, "begin")) => {}
        Some((n, l)) => return Err(parse_err(n, format!("expected `begin`, found `{l}`"))),
        None => return Err(parse_err(text.lines().count(), "missing `begin`")),
    }
    let (n, size) = lines.next().ok_or_else(|| parse_err(text.lines().count(), "missing size line"))?;
    let parts: Vec<&str> = size.split_whitespace().collect();
    let [rows, cols, kind] = parts.as_slice() else {
        return Err(parse_err(n, "size line must be `<rows> <cols> real`"));
    };
    if *kind != "real" {
        return Err(parse_err(n, format!("number type `{kind}` is not supported")));
    }
    let rows: usize = rows.parse().map_err(|_| parse_err(n, format!("bad row count `{rows}`")))?;
    let cols: usize = cols.parse().map_err(|_| parse_err(n, format!("bad column count `{cols}`")))?;
    if cols != m + 1 {
        return Err(parse_err(n, format!("{cols} columns for {m} senders")));
    }
    if rows != (1 << m) - 1 {
        return Err(parse_err(n, format!("{rows} rows, expected {}", (1usize << m) - 1)));
    }

    let mut values: Vec<Option<f64>> = vec![None; 1 << m];
    values[0] = Some(0.0);
    for _ in 0..rows {
        let (n, row) = lines.next().ok_or_else(|| parse_err(text.lines().count(), "fewer rows than declared"))?;
        let fields: Vec<&str> = row.split_whitespace().collect();
        if fields.len() != cols {
            return Err(parse_err(n, format!("{} entries, expected {cols}", fields.len())));
        }
        let b: f64 = fields[0].parse().map_err(|_| parse_err(n, format!("bad offset `{}`", fields[0])))?;
        let mut k: SubsetKey = 0;
        for (i, f) in fields[1..].iter().enumerate() {
            match f.parse::<f64>() {
                Ok(1.0) => k |= 1 << i,
                Ok(0.0) => {}
                _ => return Err(parse_err(n, format!("coefficient `{f}` is not 0 or 1"))),
            }
        }
        if k == 0 {
            return Err(parse_err(n, "row has no sender"));
        }
        if values[k].is_some() {
            return Err(parse_err(n, "subset appears twice"));
        }
        values[k] = Some(if b == 0.0 { 0.0 } else { -b });
    }
    match lines.next() {
        Some((_, "end")) => {}
        Some((n, l)) => return Err(parse_err(n, format!("expected `end`, found `{l}`"))),
        None => return Err(parse_err(text.lines().count(), "missing `end`")),
    }
    let values = values.into_iter().map(|v| v.expect("all rows present")).collect();
    RegionConstants::new(senders, reference, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ghz() -> RegionConstants {
        RegionConstants::new(vec!["A1".into(), "A2".into()], "R".into(), vec![0.0, 0.5, 0.5, 1.5]).unwrap()
    }

    #[test]
    fn ghz_rows() {
        let text = export_h_representation(&ghz());
        assert_eq!(text, "H-representation\nbegin\n3 3 real\n-0.5 1 0\n-0.5 0 1\n-1.5 1 1\nend\n");
    }

    #[test]
    fn zero_offsets_print_as_zero() {
        let rc = RegionConstants::new(vec!["A".into(), "B".into()], "R".into(), vec![0.0; 4]).unwrap();
        let text = export_h_representation(&rc);
        assert!(text.lines().skip(3).take(3).all(|l| l.starts_with("0 ")));
    }

    #[test]
    fn round_trip_within_tolerance() {
        let values = vec![0.0, 1.0 / 3.0, 0.1 + 0.2, 1.4999999999999998, 2.0 / 7.0, 0.0, 1e-17, 123.456_789_012_345_67];
        let senders: Vec<String> = ["A", "B", "C"].iter().map(|s| s.to_string()).collect();
        let rc = RegionConstants::new(senders.clone(), "R".into(), values).unwrap();
        let back = parse_h_representation(&export_h_representation(&rc), senders, "R".into()).unwrap();
        for k in 0..8 {
            assert!((back.get(k) - rc.get(k)).abs() <= 1e-12);
        }
    }

    #[test]
    fn round_trip() {
        let rc = ghz();
        let back = parse_h_representation(&export_h_representation(&rc), rc.senders().to_vec(), "R".into()).unwrap();
        assert_eq!(back, rc);
    }

    #[test]
    fn malformed_input() {
        let s = || vec!["A1".to_string(), "A2".to_string()];
        let bad = [
            "begin\n3 3 real\nend\n",
            "H-representation\nbegin\n3 4 real\n",
            "H-representation\nbegin\n3 3 real\n-0.5 1 0\n-0.5 1 0\n-1.5 1 1\nend\n",
            "H-representation\nbegin\n3 3 real\n-0.5 1 0\n-0.5 0 2\n-1.5 1 1\nend\n",
            "H-representation\nbegin\n3 3 real\n-0.5 1 0\n-0.5 0 1\n-1.5 1 1\n",
        ];
        for text in bad {
            assert!(parse_h_representation(text, s(), "R".into()).is_err(), "{text}");
        }
    }
}
