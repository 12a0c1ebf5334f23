//! Field CSV interchange.
//!
//! The header is `t1,…,tp,u1,…,un`, followed by one row per node in
//! lexicographic node order (last axis fastest). Numbers are written with 17
//! significant digits, so a write/read cycle reproduces every value bit for bit.
//!
//! The closed form repeats the wrap faces: `Nᵅ + 1` rows per axis, with the last
//! layer at `tᵅ = Tᵅ` equal to the first. It is the format external producers
//! hand to [`crate::verify::boundary_check`].

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};

/// Node coordinates are accepted when within this fraction of the spacing.
const COORD_TOL: f64 = 1e-9;

fn header(p: usize, n: usize) -> Vec<String> {
    (1..=p)
        .map(|a| format!("t{a}"))
        .chain((1..=n).map(|i| format!("u{i}")))
        .collect()
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// A field sampled on the closed box, `Nᵅ + 1` nodes per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl ClosedField {
    /// Duplicates the wrap faces of `u`.
    pub fn from_field(u: &Field) -> Self {
        let grid = u.grid().clone();
        let dims: Vec<usize> = grid.nodes().iter().map(|n| n + 1).collect();
        let mut values = Vec::with_capacity(dims.iter().product::<usize>() * grid.components());
        for idx in closed_indices(&dims) {
            let wrapped: Vec<usize> = idx.iter().zip(grid.nodes()).map(|(k, n)| k % n).collect();
            values.extend_from_slice(u.at(grid.flat_index(&wrapped)));
        }
        Self { grid, values }
    }

    /// Builds a closed field from raw values in lexicographic closed-node order.
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        let expected: usize =
            grid.nodes().iter().map(|n| n + 1).product::<usize>() * grid.components();
        if values.len() != expected {
            return Err(Error::Format(format!(
                "closed grid needs {expected} values, got {}",
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// The periodic grid this closed field extends.
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Closed node counts `Nᵅ + 1`.
    pub fn closed_nodes(&self) -> Vec<usize> {
        self.grid.nodes().iter().map(|n| n + 1).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Values at the closed multi-index `idx` (each `kᵅ ∈ 0..=Nᵅ`).
    pub fn at(&self, idx: &[usize]) -> &[f64] {
        let n = self.grid.components();
        let node = idx
            .iter()
            .zip(self.grid.nodes())
            .fold(0, |acc, (k, nodes)| acc * (nodes + 1) + k);
        &self.values[node * n..(node + 1) * n]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Every multi-index of a box with `dims` entries per axis, last axis fastest.
pub(crate) fn closed_indices(dims: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = dims.iter().product();
    (0..total).map(move |mut flat| {
        let mut idx = vec![0; dims.len()];
        for a in (0..dims.len()).rev() {
            idx[a] = flat % dims[a];
            flat /= dims[a];
        }
        idx
    })
}

fn write_rows<W: Write>(
    w: W,
    grid: &GridSpec,
    rows: impl Iterator<Item = (Vec<f64>, Vec<f64>)>,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let map = |e: csv::Error| Error::Format(e.to_string());
    out.write_record(header(grid.dims(), grid.components()))
        .map_err(map)?;
    for (t, u) in rows {
        out.write_record(t.iter().chain(&u).map(|v| fmt(*v)))
            .map_err(map)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_field_csv<W: Write>(u: &Field, w: W) -> Result<()> {
    let grid = u.grid();
    let rows = (0..grid.node_count()).map(|node| (grid.coords(node), u.at(node).to_vec()));
    write_rows(w, grid, rows)
}

pub fn write_closed_csv<W: Write>(c: &ClosedField, w: W) -> Result<()> {
    let grid = c.grid();
    let dims = c.closed_nodes();
    let spacings = grid.spacings();
    let rows = closed_indices(&dims).map(|idx| {
        let t = idx
            .iter()
            .zip(&spacings)
            .map(|(k, h)| *k as f64 * h)
            .collect();
        (t, c.at(&idx).to_vec())
    });
    write_rows(w, grid, rows)
}

/// Reads rows for the box with `dims` nodes per axis and checks their coordinates.
fn read_rows<R: Read>(r: R, grid: &GridSpec, dims: &[usize]) -> Result<Vec<f64>> {
    let (p, n) = (grid.dims(), grid.components());
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(r);
    let map = |e: csv::Error| Error::Format(e.to_string());
    let found: Vec<String> = reader
        .headers()
        .map_err(map)?
        .iter()
        .map(String::from)
        .collect();
    let expected = header(p, n);
    if found != expected {
        return Err(Error::Format(format!(
            "header {:?} does not match expected {:?}",
            found.join(","),
            expected.join(",")
        )));
    }
    let spacings = grid.spacings();
    let mut indices = closed_indices(dims);
    let mut values = Vec::new();
    let mut rows = 0;
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(map)?;
        let row = line + 2;
        let Some(idx) = indices.next() else {
            return Err(Error::Format(format!(
                "too many rows: expected {}",
                dims.iter().product::<usize>()
            )));
        };
        let nums = rec
            .iter()
            .enumerate()
            .map(|(col, s)| {
                s.parse::<f64>().map_err(|_| {
                    Error::Format(format!("row {row}, column {}: cannot parse {s:?}", col + 1))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        for (a, (k, h)) in idx.iter().zip(&spacings).enumerate() {
            let t = *k as f64 * h;
            if (nums[a] - t).abs() > COORD_TOL * h {
                return Err(Error::Format(format!(
                    "row {row}: t{} = {} but node {k} of axis {} sits at {t}",
                    a + 1,
                    nums[a],
                    a + 1
                )));
            }
        }
        if let Some(col) = nums[p..].iter().position(|v| !v.is_finite()) {
            return Err(Error::Format(format!(
                "row {row}, column {}: non-finite value",
                p + col + 1
            )));
        }
        values.extend_from_slice(&nums[p..]);
        rows += 1;
    }
    let expected_rows: usize = dims.iter().product();
    if rows != expected_rows {
        return Err(Error::Format(format!(
            "expected {expected_rows} rows, got {rows}"
        )));
    }
    Ok(values)
}

/// Reads a field in the open form on `grid`.
pub fn read_field_csv<R: Read>(r: R, grid: &GridSpec) -> Result<Field> {
    let values = read_rows(r, grid, grid.nodes())?;
    Field::new(grid.clone(), values)
}

/// Reads a closed-form export whose periodic grid is `grid`.
pub fn read_closed_csv<R: Read>(r: R, grid: &GridSpec) -> Result<ClosedField> {
    let dims: Vec<usize> = grid.nodes().iter().map(|n| n + 1).collect();
    let values = read_rows(r, grid, &dims)?;
    ClosedField::new(grid.clone(), values)
}
