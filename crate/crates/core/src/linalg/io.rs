//! Text formats. Floats use 17 significant digits so values round-trip
//! bit-exactly.
//!
//! ```text
//! MAT1 <rows> <cols>
//! <cols values>            (rows lines)
//!
//! CSR1 <rows> <cols> <nnz>
//! <row_ptr>                (rows+1 values)
//! <col_idx>                (nnz values)
//! <values>                 (nnz values)
//! ```

use std::fmt::Write as _;

use super::{DenseMatrix, SparseMatrix};
use crate::error::{Error, Result};

pub fn write_dense(m: &DenseMatrix, out: &mut String) {
    let _ = writeln!(out, "MAT1 {} {}", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:.16e}")).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
}

pub fn dense_to_string(m: &DenseMatrix) -> String {
    let mut s = String::new();
    write_dense(m, &mut s);
    s
}

pub fn write_sparse(m: &SparseMatrix, out: &mut String) {
    let _ = writeln!(out, "CSR1 {} {} {}", m.nrows(), m.ncols(), m.nnz());
    let join = |it: Vec<String>| it.join(" ");
    let _ = writeln!(out, "{}", join(m.row_ptr().iter().map(|v| v.to_string()).collect()));
    let _ = writeln!(out, "{}", join(m.col_idx().iter().map(|v| v.to_string()).collect()));
    let _ = writeln!(out, "{}", join(m.values().iter().map(|v| format!("{v:.16e}")).collect()));
}

pub fn sparse_to_string(m: &SparseMatrix) -> String {
    let mut s = String::new();
    write_sparse(m, &mut s);
    s
}

/// Line cursor that skips blank lines and remembers 1-based line numbers.
pub(crate) struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)> + 'a> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty()),
        );
        Lines { inner: it.peekable(), last: 0 }
    }

    pub(crate) fn next_line(&mut self, what: &str) -> Result<(usize, &'a str)> {
        match self.inner.next() {
            Some((n, l)) => {
                self.last = n;
                Ok((n, l))
            }
            None => Err(Error::parse(self.last + 1, format!("unexpected end of input, expected {what}"))),
        }
    }

    pub(crate) fn is_done(&mut self) -> bool {
        self.inner.peek().is_none()
    }

    pub(crate) fn peek_line(&mut self) -> Option<(usize, &'a str)> {
        self.inner.peek().copied()
    }
}

fn parse_values<T: std::str::FromStr>(line: &str, n: usize, ln: usize, what: &str) -> Result<Vec<T>> {
    let v = line
        .split_whitespace()
        .map(|t| t.parse::<T>().map_err(|_| Error::parse(ln, format!("malformed {what} value"))))
        .collect::<Result<Vec<T>>>()?;
    if v.len() != n {
        return Err(Error::parse(ln, format!("expected {n} {what} values, found {}", v.len())));
    }
    Ok(v)
}

pub(crate) fn read_dense_from(lines: &mut Lines<'_>) -> Result<DenseMatrix> {
    let (hl, header) = lines.next_line("MAT1 header")?;
    let mut t = header.split_whitespace();
    if t.next() != Some("MAT1") {
        return Err(Error::parse(hl, "malformed header, expected MAT1"));
    }
    let dims = parse_values::<usize>(&t.collect::<Vec<_>>().join(" "), 2, hl, "dimension")?;
    let (r, c) = (dims[0], dims[1]);
    let mut data = Vec::with_capacity(r * c);
    for _ in 0..r {
        if c == 0 {
            break;
        }
        let (ln, l) = lines.next_line("matrix row")?;
        data.extend(parse_values::<f64>(l, c, ln, "matrix")?);
    }
    DenseMatrix::from_row_major(r, c, data)
}

pub fn parse_dense(text: &str) -> Result<DenseMatrix> {
    let mut lines = Lines::new(text);
    let m = read_dense_from(&mut lines)?;
    if let Some((ln, _)) = lines.peek_line() {
        return Err(Error::parse(ln, "trailing content after matrix"));
    }
    Ok(m)
}

/// Consecutive MAT1 blocks.
pub fn parse_dense_blocks(text: &str) -> Result<Vec<DenseMatrix>> {
    let mut lines = Lines::new(text);
    let mut out = Vec::new();
    while !lines.is_done() {
        out.push(read_dense_from(&mut lines)?);
    }
    Ok(out)
}

pub fn parse_sparse(text: &str) -> Result<SparseMatrix> {
    let mut lines = Lines::new(text);
    let (hl, header) = lines.next_line("CSR1 header")?;
    let mut t = header.split_whitespace();
    if t.next() != Some("CSR1") {
        return Err(Error::parse(hl, "malformed header, expected CSR1"));
    }
    let dims = parse_values::<usize>(&t.collect::<Vec<_>>().join(" "), 3, hl, "dimension")?;
    let (r, c, nnz) = (dims[0], dims[1], dims[2]);
    let (l1, rp) = lines.next_line("row pointers")?;
    let row_ptr = parse_values::<usize>(rp, r + 1, l1, "row pointer")?;
    let (col_idx, values) = if nnz == 0 {
        (Vec::new(), Vec::new())
    } else {
        let (l2, ci) = lines.next_line("column indices")?;
        let (l3, vs) = lines.next_line("values")?;
        (
            parse_values::<usize>(ci, nnz, l2, "column index")?,
            parse_values::<f64>(vs, nnz, l3, "value")?,
        )
    };
    if let Some((ln, _)) = lines.peek_line() {
        return Err(Error::parse(ln, "trailing content after matrix"));
    }
    SparseMatrix::from_csr(r, c, row_ptr, col_idx, values).map_err(|e| Error::parse(hl, e.to_string()))
}

/// `index,sigma` CSV, one row per singular value.
pub fn singular_values_csv(sigma: &[f64]) -> String {
    let mut s = String::from("index,sigma\n");
    for (i, v) in sigma.iter().enumerate() {
        let _ = writeln!(s, "{},{v:.16e}", i + 1);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Triplets;
    use proptest::prelude::*;

    #[test]
    fn dense_round_trip_and_errors() {
        let m = DenseMatrix::from_fn(3, 2, |i, j| (i as f64 + 0.1) / (j as f64 + 3.0));
        let text = dense_to_string(&m);
        assert_eq!(parse_dense(&text).unwrap(), m);
        assert!(parse_dense("MAT1 2 2\n1 2\n3\n").unwrap_err().to_string().ends_with("line 3"));
        let two = format!("{text}{text}");
        assert_eq!(parse_dense_blocks(&two).unwrap().len(), 2);
        assert!(parse_dense(&two).is_err());
    }

    #[test]
    fn sparse_round_trip() {
        let mut t = Triplets::new(3, 4);
        t.push(0, 3, 1.0 / 3.0);
        t.push(2, 1, -7.25);
        let m = t.to_csr();
        assert_eq!(parse_sparse(&sparse_to_string(&m)).unwrap(), m);
        let z = SparseMatrix::zeros(2, 2);
        assert_eq!(parse_sparse(&sparse_to_string(&z)).unwrap(), z);
    }

    proptest! {
        #[test]
        fn floats_round_trip_bit_exactly(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let m = DenseMatrix::from_row_major(1, 1, vec![v]).unwrap();
            let back = parse_dense(&dense_to_string(&m)).unwrap();
            prop_assert_eq!(back[(0, 0)].to_bits(), v.to_bits());
        }
    }
}
