//! Two-column tabulated functions loaded from CSV, with linear interpolation.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Table<T: Real> {
    xs: Vec<T>,
    ys: Vec<T>,
}

impl<T: Real> Table<T> {
    /// Points must have strictly increasing, finite abscissae.
    pub fn new(points: Vec<(T, T)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidParameter("a table needs at least two points".into()));
        }
        for (i, w) in points.windows(2).enumerate() {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidParameter(format!(
                    "table abscissae must increase strictly (row {})",
                    i + 2
                )));
            }
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidParameter("table contains non-finite values".into()));
        }
        let (xs, ys) = points.into_iter().unzip();
        Ok(Table { xs, ys })
    }

    /// Reads `x, y` rows. A non-numeric first row is treated as a header.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut points = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 1;
            let rec = rec.map_err(|e| Error::Csv { line, message: e.to_string() })?;
            if rec.len() < 2 {
                return Err(Error::Csv { line, message: "expected two columns".into() });
            }
            let parsed = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
            match parsed {
                (Ok(x), Ok(y)) => points.push((T::lit(x), T::lit(y))),
                _ if i == 0 => continue,
                _ => return Err(Error::Csv { line, message: format!("non-numeric row {:?}", rec) }),
            }
        }
        Self::new(points)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_csv(file)
    }

    pub fn xs(&self) -> &[T] {
        &self.xs
    }

    pub fn ys(&self) -> &[T] {
        &self.ys
    }

    /// Linear interpolation; `None` outside `[x_first, x_last]`.
    pub fn interpolate(&self, x: T) -> Option<T> {
        let (first, last) = (self.xs[0], *self.xs.last().unwrap());
        if x < first || x > last {
            return None;
        }
        let idx = self.xs.partition_point(|&v| v <= x);
        if idx == self.xs.len() {
            return Some(*self.ys.last().unwrap());
        }
        let (x0, x1) = (self.xs[idx - 1], self.xs[idx]);
        let (y0, y1) = (self.ys[idx - 1], self.ys[idx]);
        let w = (x - x0) / (x1 - x0);
        Some(y0 + w * (y1 - y0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_header_and_interpolates() {
        let text = "x,u\n0,0\n1,2\n3,6\n";
        let t = Table::<f64>::from_csv(text.as_bytes()).unwrap();
        assert_eq!(t.interpolate(0.5), Some(1.0));
        assert_eq!(t.interpolate(2.0), Some(4.0));
        assert_eq!(t.interpolate(3.0), Some(6.0));
        assert_eq!(t.interpolate(3.5), None);
    }

    #[test]
    fn rejects_garbage() {
        assert!(Table::<f64>::from_csv("0,1\nfoo,2\n".as_bytes()).is_err());
        assert!(Table::<f64>::from_csv("0,1\n0,2\n".as_bytes()).is_err());
        assert!(Table::<f64>::from_csv("0,1\n".as_bytes()).is_err());
    }
}
