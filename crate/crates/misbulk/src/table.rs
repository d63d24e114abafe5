//! Monotone cubic interpolation (Fritsch-Carlson) for tabulated
//! constitutive inputs.
//!
//! Tables are plain text: whitespace-separated columns, `#` starts a
//! comment. Two columns give (x, f); an optional third column supplies
//! derivative values df/dx that override the Fritsch-Carlson slopes.

#[derive(Debug, Clone, PartialEq)]
pub enum TableError {
    Empty,
    TooFewRows,
    NotIncreasing { row: usize },
    Parse { line: usize, message: String },
}

impl std::fmt::Display for TableError {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TableError::Empty => write!(out, "table has no data rows"),
            TableError::TooFewRows => write!(out, "table needs at least two rows"),
            TableError::NotIncreasing { row } => {
                write!(out, "abscissae must strictly increase (row {row})")
            }
            TableError::Parse { line, message } => write!(out, "line {line}: {message}"),
        }
    }
}

impl std::error::Error for TableError {}

/// Cubic Hermite interpolant with Fritsch-Carlson limited slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneTable {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Nodal derivatives, either supplied or limited secant-based.
    ds: Vec<f64>,
    /// What to do outside [xs[0], xs[last]].
    extrapolation: Extrapolation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extrapolation {
    /// Continue with the boundary value and zero slope.
    ClampValue,
    /// Continue linearly with the boundary slope.
    Linear,
    /// Zero outside the table (used for compactly supported transport data).
    Zero,
}

impl MonotoneTable {
    pub fn new(
        xs: Vec<f64>,
        ys: Vec<f64>,
        derivs: Option<Vec<f64>>,
        extrapolation: Extrapolation,
    ) -> Result<Self, TableError> {
        if xs.is_empty() {
            return Err(TableError::Empty);
        }
        if xs.len() < 2 {
            return Err(TableError::TooFewRows);
        }
        assert_eq!(xs.len(), ys.len());
        for i in 1..xs.len() {
            if xs[i] <= xs[i - 1] {
                return Err(TableError::NotIncreasing { row: i });
            }
        }
        let ds = match derivs {
            Some(d) => {
                assert_eq!(d.len(), xs.len());
                d
            }
            None => fritsch_carlson_slopes(&xs, &ys),
        };
        Ok(MonotoneTable { xs, ys, ds, extrapolation })
    }

    /// Parses the text format described in the module docs.
    pub fn parse(text: &str, extrapolation: Extrapolation) -> Result<Self, TableError> {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut ds = Vec::new();
        let mut n_cols = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 && fields.len() != 3 {
                return Err(TableError::Parse {
                    line: idx + 1,
                    message: format!("expected 2 or 3 columns, found {}", fields.len()),
                });
            }
            match n_cols {
                None => n_cols = Some(fields.len()),
                Some(n) if n != fields.len() => {
                    return Err(TableError::Parse {
                        line: idx + 1,
                        message: "inconsistent column count".to_string(),
                    })
                }
                _ => {}
            }
            let mut vals = [0.0f64; 3];
            for (j, field) in fields.iter().enumerate() {
                vals[j] = field.parse().map_err(|_| TableError::Parse {
                    line: idx + 1,
                    message: format!("cannot parse '{field}' as a number"),
                })?;
            }
            xs.push(vals[0]);
            ys.push(vals[1]);
            if fields.len() == 3 {
                ds.push(vals[2]);
            }
        }
        let derivs = if n_cols == Some(3) { Some(ds) } else { None };
        MonotoneTable::new(xs, ys, derivs, extrapolation)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    fn segment(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.xs.len() - 2),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        let (lo, hi) = self.range();
        if x < lo || x > hi {
            return match self.extrapolation {
                Extrapolation::ClampValue => {
                    if x < lo {
                        self.ys[0]
                    } else {
                        *self.ys.last().unwrap()
                    }
                }
                Extrapolation::Linear => {
                    if x < lo {
                        self.ys[0] + self.ds[0] * (x - lo)
                    } else {
                        self.ys.last().unwrap() + self.ds.last().unwrap() * (x - hi)
                    }
                }
                Extrapolation::Zero => 0.0,
            };
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (h00, h10, h01, h11) = hermite_basis(t);
        h00 * self.ys[i] + h10 * h * self.ds[i] + h01 * self.ys[i + 1] + h11 * h * self.ds[i + 1]
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let (lo, hi) = self.range();
        if x < lo || x > hi {
            return match self.extrapolation {
                Extrapolation::ClampValue | Extrapolation::Zero => 0.0,
                Extrapolation::Linear => {
                    if x < lo {
                        self.ds[0]
                    } else {
                        *self.ds.last().unwrap()
                    }
                }
            };
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (d00, d10, d01, d11) = hermite_basis_deriv(t);
        (d00 * self.ys[i] + d01 * self.ys[i + 1]) / h + d10 * self.ds[i] + d11 * self.ds[i + 1]
    }
}

fn hermite_basis(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (
        2.0 * t3 - 3.0 * t2 + 1.0,
        t3 - 2.0 * t2 + t,
        -2.0 * t3 + 3.0 * t2,
        t3 - t2,
    )
}

fn hermite_basis_deriv(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    (
        6.0 * t2 - 6.0 * t,
        3.0 * t2 - 4.0 * t + 1.0,
        -6.0 * t2 + 6.0 * t,
        3.0 * t2 - 2.0 * t,
    )
}

fn fritsch_carlson_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut secants = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        secants.push((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]));
    }
    let mut d = vec![0.0; n];
    d[0] = secants[0];
    d[n - 1] = secants[n - 2];
    for i in 1..n - 1 {
        if secants[i - 1] * secants[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            // Weighted harmonic mean keeps the interpolant monotone.
            let w1 = 2.0 * (xs[i + 1] - xs[i]) + (xs[i] - xs[i - 1]);
            let w2 = (xs[i + 1] - xs[i]) + 2.0 * (xs[i] - xs[i - 1]);
            d[i] = (w1 + w2) / (w1 / secants[i - 1] + w2 / secants[i]);
        }
    }
    // Limit the endpoint slopes as well.
    for (i, s) in [(0usize, secants[0]), (n - 1, secants[n - 2])] {
        if s == 0.0 || d[i] / s < 0.0 {
            d[i] = 0.0;
        } else if (d[i] / s).abs() > 3.0 {
            d[i] = 3.0 * s;
        }
    }
    d
}
