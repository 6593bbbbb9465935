//! Sinusoidal positional encoding.
//!
//! The frequency for column pair `i` is `10^(-2i / (dim · ln 10000))`,
//! with `ln` the natural logarithm.

use crate::error::{Error, Result};
use crate::nncore::Matrix;
use crate::scenegen::PixelPoint;

#[derive(Debug, Clone, PartialEq)]
pub struct PositionalEncodingTable {
    dim: usize,
    max_len: usize,
    table: Matrix,
}

/// Angular frequency of column pair `i` for an encoding of width `dim`.
pub fn frequency(i: usize, dim: usize) -> f64 {
    10f64.powf(-(2.0 * i as f64) / (dim as f64 * 10000f64.ln()))
}

pub fn positional_encoding(dim: usize, max_len: usize) -> Result<PositionalEncodingTable> {
    if dim < 2 || !dim.is_multiple_of(2) {
        return Err(Error::Config(format!(
            "positional encoding dim must be even and >= 2, got {dim}"
        )));
    }
    if max_len == 0 {
        return Err(Error::Config(
            "positional encoding max_len must be >= 1".into(),
        ));
    }
    let freqs: Vec<f64> = (0..dim / 2).map(|i| frequency(i, dim)).collect();
    let mut table = Matrix::zeros(max_len, dim);
    for pos in 0..max_len {
        let row = table.row_mut(pos);
        for (i, &w) in freqs.iter().enumerate() {
            let arg = pos as f64 * w;
            row[2 * i] = arg.sin();
            row[2 * i + 1] = arg.cos();
        }
    }
    Ok(PositionalEncodingTable {
        dim,
        max_len,
        table,
    })
}

impl PositionalEncodingTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn table(&self) -> &Matrix {
        &self.table
    }

    pub fn row(&self, pos: usize) -> &[f64] {
        self.table.row(pos)
    }

    fn index_of(&self, coord: f64, axis: &str) -> Result<usize> {
        let q = coord.round();
        if !q.is_finite() || q < 0.0 || q >= self.max_len as f64 {
            return Err(Error::OutOfRange(format!(
                "{axis} = {coord} quantizes outside positional table of length {}",
                self.max_len
            )));
        }
        Ok(q as usize)
    }
}

/// Code for a 2-D centre: `row(round(x)) + row(round(y))`.
pub fn encode_node_position(center: PixelPoint, pe: &PositionalEncodingTable) -> Result<Vec<f64>> {
    let ix = pe.index_of(center.x, "x")?;
    let iy = pe.index_of(center.y, "y")?;
    Ok(pe
        .row(ix)
        .iter()
        .zip(pe.row(iy))
        .map(|(a, b)| a + b)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_row_alternates() {
        let pe = positional_encoding(8, 4).unwrap();
        assert_eq!(pe.row(0), &[0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn second_row_leading_pair() {
        let pe = positional_encoding(64, 4).unwrap();
        assert!((pe.row(1)[0] - 0.841471).abs() < 1e-6);
        assert!((pe.row(1)[1] - 0.540302).abs() < 1e-6);
    }

    #[test]
    fn bounded_entries() {
        let pe = positional_encoding(64, 1000).unwrap();
        assert!(pe
            .table()
            .as_slice()
            .iter()
            .all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn odd_dim_rejected() {
        assert!(matches!(positional_encoding(7, 10), Err(Error::Config(_))));
        assert!(positional_encoding(0, 10).is_err());
        assert!(positional_encoding(4, 0).is_err());
    }

    #[test]
    fn node_codes() {
        let pe = positional_encoding(6, 900).unwrap();
        let origin = encode_node_position(PixelPoint::new(0.0, 0.0), &pe).unwrap();
        assert_eq!(origin, vec![0.0, 2.0, 0.0, 2.0, 0.0, 2.0]);
        let one = encode_node_position(PixelPoint::new(1.0, 0.0), &pe).unwrap();
        assert!((one[0] - 0.841471).abs() < 1e-6);
        assert_eq!(one.len(), 6);
        let c = encode_node_position(PixelPoint::new(799.4, 599.6), &pe).unwrap();
        assert_eq!(c.len(), 6);
    }

    #[test]
    fn quantized_index_out_of_range() {
        let pe = positional_encoding(4, 100).unwrap();
        assert!(matches!(
            encode_node_position(PixelPoint::new(99.6, 3.0), &pe),
            Err(Error::OutOfRange(_))
        ));
    }
}
