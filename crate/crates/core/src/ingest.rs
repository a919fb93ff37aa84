//! Externally sampled paths on b-adic grids.

use std::borrow::Cow;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::numeric::checked_pow;
use crate::variation::{grid_level, pth_variation, CurveLevel, GridSource, VariationCurve};

/// Values at `k b^{-n}`, `k = 0..=b^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    values: Vec<f64>,
    b: u32,
    n: u32,
    pub label: String,
}

impl SampledPath {
    pub fn new(values: Vec<f64>, b: u32, label: impl Into<String>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "value {} at index {i} is not finite",
                values[i]
            )));
        }
        let n = grid_level(values.len(), b).map_err(|e| match e {
            Error::Shape(_) => shape_error(values.len(), b),
            e => e,
        })?;
        Ok(SampledPath {
            values,
            b,
            n,
            label: label.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Every `b^{n−m}`-th value: the path on the level-`m` grid.
    pub fn coarsen(&self, m: u32) -> Result<Vec<f64>> {
        if m > self.n {
            return Err(Error::Domain(format!(
                "level {m} exceeds path level {}",
                self.n
            )));
        }
        let stride = checked_pow(self.b, self.n - m)? as usize;
        Ok(self.values.iter().step_by(stride).copied().collect())
    }
}

fn shape_error(len: usize, b: u32) -> Error {
    let mut below = None;
    let mut above = None;
    let mut pow = 1usize;
    loop {
        let valid = pow.saturating_add(1);
        if valid <= len {
            below = Some(valid);
        } else {
            above = Some(valid);
            break;
        }
        match pow.checked_mul(b as usize) {
            Some(p) => pow = p,
            None => break,
        }
    }
    let options: Vec<String> = below
        .into_iter()
        .filter(|&v| v >= 2)
        .chain(above)
        .map(|v| v.to_string())
        .collect();
    Error::Shape(format!(
        "{len} values is not of the form {b}^n + 1; nearest valid lengths: {}",
        options.join(" or ")
    ))
}

/// Parses one value per row. Accepts an optional `value` header, or the
/// `k,n,t,f` grid format, whose `f` column is read.
pub fn read_csv<R: Read>(reader: R, b: u32, label: impl Into<String>) -> Result<SampledPath> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut column = None;
    let mut values = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Format {
            line: e.position().map_or(i + 1, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let col = match column {
            Some(c) => c,
            None => {
                let fields: Vec<&str> = record.iter().collect();
                let c = match fields.as_slice() {
                    ["value"] => {
                        column = Some(0);
                        continue;
                    }
                    ["k", "n", "t", "f"] => {
                        column = Some(3);
                        continue;
                    }
                    [_] => 0,
                    _ => {
                        return Err(Error::Format {
                            line,
                            message: format!(
                                "expected a single column or a `k,n,t,f` header, found {} fields",
                                fields.len()
                            ),
                        })
                    }
                };
                column = Some(c);
                c
            }
        };
        if record.len() != col + 1 {
            return Err(Error::Format {
                line,
                message: format!("expected {} field(s), found {}", col + 1, record.len()),
            });
        }
        let field = &record[col];
        let v: f64 = field.parse().map_err(|_| Error::Format {
            line,
            message: format!("`{field}` is not a number"),
        })?;
        if !v.is_finite() {
            return Err(Error::Format {
                line,
                message: format!("`{field}` is not finite"),
            });
        }
        values.push(v);
    }
    SampledPath::new(values, b, label)
}

pub fn load_csv(path: impl AsRef<Path>, b: u32) -> Result<SampledPath> {
    let path = path.as_ref();
    let file =
        std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_csv(std::io::BufReader::new(file), b, path.display().to_string())
}

/// Writes the single-column format read by [`read_csv`].
pub fn write_values_csv<W: Write>(mut out: W, values: &[f64]) -> Result<()> {
    writeln!(out, "value")?;
    for v in values {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

/// `V^{p,1}_m` for `m = n − levels + 1 ..= n` from the coarsened path.
pub fn multiscale_variation(path: &SampledPath, p: f64, levels: u32) -> Result<VariationCurve> {
    if levels == 0 || levels > path.n {
        return Err(Error::Domain(format!(
            "levels = {levels} must lie in 1..={}",
            path.n
        )));
    }
    let mut out = Vec::with_capacity(levels as usize);
    for m in path.n - levels + 1..=path.n {
        let grid = path.coarsen(m)?;
        out.push(CurveLevel {
            n: m,
            value: pth_variation(&grid, path.b, p, 1.0)?,
            normalized: None,
        });
    }
    Ok(VariationCurve::from_levels(p, 1.0, path.b, out))
}

impl GridSource for SampledPath {
    fn base(&self) -> u32 {
        self.b
    }

    fn grid(&self, n: u32) -> Result<Cow<'_, [f64]>> {
        if n == self.n {
            return Ok(Cow::Borrowed(&self.values));
        }
        self.coarsen(n).map(Cow::Owned)
    }
}
