//! Text formats.
//!
//! Signing file: line 1 is `n`, then `n` lines of `n` characters from
//! `{+,-}`; row `i` is `x_i`, column `j` is `y_j`.
//!
//! Factorization file: line 1 is `n`, then `n` lines of `n` space-separated
//! 0-based integers; line `t` is matching `t` (`x_i -> y_{value_i}`).
//!
//! Crown cache file: line 1 is `n`, then one 2-factor of `K_n` per line,
//! cycles separated by `;`, vertices within a cycle separated by spaces.
//!
//! Every file ends with a newline. Parsers accept a missing final newline
//! and nothing else.

use crate::error::{Error, Result};
use crate::signing::{OneFactorization, SignMatrix};

fn lines(text: &str) -> Vec<&str> {
    let mut lines: Vec<&str> = text.split('\n').collect();
    if lines.last() == Some(&"") {
        lines.pop();
    }
    lines
}

fn parse_header(lines: &[&str]) -> Result<usize> {
    let first = lines
        .first()
        .ok_or_else(|| Error::parse(1, 1, "empty input, expected n on the first line"))?;
    if first.is_empty() || !first.bytes().all(|b| b.is_ascii_digit()) {
        let col = first.bytes().position(|b| !b.is_ascii_digit()).unwrap_or(0) + 1;
        return Err(Error::parse(1, col, format!("expected a positive integer, found {first:?}")));
    }
    let n: usize = first
        .parse()
        .map_err(|_| Error::parse(1, 1, format!("integer {first:?} is too large")))?;
    if n == 0 {
        return Err(Error::parse(1, 1, "n must be at least 1"));
    }
    Ok(n)
}

fn check_line_count(lines: &[&str], n: usize) -> Result<()> {
    if lines.len() != n + 1 {
        let line = lines.len().min(n + 1) + 1;
        return Err(Error::parse(
            line,
            1,
            format!("expected {} data lines, found {}", n, lines.len().saturating_sub(1)),
        ));
    }
    Ok(())
}

pub fn parse_signing(text: &str) -> Result<SignMatrix> {
    let lines = lines(text);
    let n = parse_header(&lines)?;
    check_line_count(&lines, n)?;
    let mut entries = Vec::with_capacity(n * n);
    for (i, row) in lines[1..].iter().enumerate() {
        let line = i + 2;
        for (j, b) in row.bytes().enumerate() {
            match b {
                b'+' => entries.push(1),
                b'-' => entries.push(-1),
                _ => {
                    return Err(Error::parse(
                        line,
                        j + 1,
                        format!("unexpected character {:?}, expected '+' or '-'", b as char),
                    ))
                }
            }
            if j >= n {
                return Err(Error::parse(line, j + 1, format!("row longer than n = {n}")));
            }
        }
        if row.len() != n {
            return Err(Error::parse(
                line,
                row.len() + 1,
                format!("row has {} entries, expected {n}", row.len()),
            ));
        }
    }
    SignMatrix::new(n, entries)
}

pub fn write_signing(m: &SignMatrix) -> String {
    let n = m.n();
    let mut out = String::with_capacity((n + 1) * (n + 1) + 8);
    out.push_str(&n.to_string());
    out.push('\n');
    for i in 0..n {
        out.extend(m.row(i).iter().map(|&e| if e > 0 { '+' } else { '-' }));
        out.push('\n');
    }
    out
}

/// Raw contents of a factorization file, not yet checked for the Latin
/// property so that `verify` can report where it breaks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizationFile {
    pub n: usize,
    pub rows: Vec<Vec<usize>>,
}

pub fn parse_factorization(text: &str) -> Result<FactorizationFile> {
    let lines = lines(text);
    let n = parse_header(&lines)?;
    check_line_count(&lines, n)?;
    let mut rows = Vec::with_capacity(n);
    for (t, row) in lines[1..].iter().enumerate() {
        let line = t + 2;
        let mut values = Vec::with_capacity(n);
        let mut col = 1;
        for token in row.split(' ') {
            if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::parse(
                    line,
                    col,
                    format!("expected a non-negative integer, found {token:?}"),
                ));
            }
            let v: usize = token
                .parse()
                .map_err(|_| Error::parse(line, col, "integer too large"))?;
            values.push(v);
            col += token.len() + 1;
        }
        if values.len() != n {
            return Err(Error::parse(
                line,
                1,
                format!("matching has {} entries, expected {n}", values.len()),
            ));
        }
        rows.push(values);
    }
    Ok(FactorizationFile { n, rows })
}

pub fn write_factorization(f: &OneFactorization) -> String {
    write_rows(f.n(), &f.rows())
}

pub fn write_rows(n: usize, rows: &[Vec<usize>]) -> String {
    let mut out = format!("{n}\n");
    for row in rows {
        let line: Vec<String> = row.iter().map(usize::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// A 2-factorization of `K_n` as factor -> cycle -> vertices.
pub type CompleteFactorization = Vec<Vec<Vec<usize>>>;

pub fn parse_crown_cache(text: &str) -> Result<(usize, CompleteFactorization)> {
    let lines = lines(text);
    let n = parse_header(&lines)?;
    let mut factors = Vec::with_capacity(lines.len().saturating_sub(1));
    for (fi, row) in lines[1..].iter().enumerate() {
        let line = fi + 2;
        let mut cycles = Vec::new();
        for part in row.split(';') {
            let cycle = part
                .split(' ')
                .map(|tok| {
                    tok.parse::<usize>()
                        .map_err(|_| Error::parse(line, 1, format!("bad vertex {tok:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            cycles.push(cycle);
        }
        factors.push(cycles);
    }
    Ok((n, factors))
}

pub fn write_crown_cache(n: usize, factors: &CompleteFactorization) -> String {
    let mut out = format!("{n}\n");
    for factor in factors {
        let cycles: Vec<String> = factor
            .iter()
            .map(|c| c.iter().map(usize::to_string).collect::<Vec<_>>().join(" "))
            .collect();
        out.push_str(&cycles.join(";"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signing::cyclic_factorization;
    use proptest::prelude::*;

    #[test]
    fn signing_round_trip_bytes() {
        let text = "3\n+-+\n---\n++-\n";
        let m = parse_signing(text).unwrap();
        assert_eq!(m.get(0, 1), -1);
        assert_eq!(m.get(2, 0), 1);
        assert_eq!(write_signing(&m), text);
        assert_eq!(parse_signing("1\n+").unwrap(), SignMatrix::all_plus(1));
    }

    #[test]
    fn signing_parse_errors_have_positions() {
        let cases = [
            ("", 1, 1),
            ("x\n", 1, 1),
            ("2\n++\n+a\n", 3, 2),
            ("2\n++\n+\n", 3, 2),
            ("2\n++\n+++\n", 3, 3),
            ("2\n++\n", 3, 1),
            ("2\n++\n--\n++\n", 4, 1),
            ("0\n", 1, 1),
            ("2\r\n++\r\n--\r\n", 1, 2),
        ];
        for (text, line, column) in cases {
            match parse_signing(text) {
                Err(Error::Parse {
                    line: l, column: c, ..
                }) => assert_eq!((l, c), (line, column), "{text:?}"),
                other => panic!("{text:?}: expected parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn factorization_round_trip_bytes() {
        let f = cyclic_factorization(3);
        let text = write_factorization(&f);
        assert_eq!(text, "3\n0 1 2\n1 2 0\n2 0 1\n");
        let parsed = parse_factorization(&text).unwrap();
        assert_eq!(parsed.rows, f.rows());
    }

    #[test]
    fn factorization_parse_errors() {
        assert!(matches!(
            parse_factorization("2\n0 1\n1  0\n"),
            Err(Error::Parse { line: 3, column: 3, .. })
        ));
        assert!(matches!(
            parse_factorization("2\n0 1\n1\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_factorization("2\n0 -1\n1 0\n"),
            Err(Error::Parse { line: 2, column: 3, .. })
        ));
        // Structural problems are left for validation.
        assert!(parse_factorization("2\n0 0\n1 1\n").is_ok());
    }

    #[test]
    fn crown_cache_round_trip() {
        let factors = vec![
            vec![vec![0, 1, 2, 3], vec![4, 5, 6]],
            vec![vec![0, 2, 4, 6], vec![1, 3, 5]],
        ];
        let text = write_crown_cache(7, &factors);
        assert_eq!(text, "7\n0 1 2 3;4 5 6\n0 2 4 6;1 3 5\n");
        assert_eq!(parse_crown_cache(&text).unwrap(), (7, factors));
    }

    proptest! {
        #[test]
        fn parse_inverts_write(n in 1usize..12, bits in proptest::collection::vec(any::<bool>(), 144)) {
            let m = SignMatrix::from_fn(n, |i, j| bits[i * 12 + j]);
            prop_assert_eq!(parse_signing(&write_signing(&m)).unwrap(), m);
        }
    }
}
