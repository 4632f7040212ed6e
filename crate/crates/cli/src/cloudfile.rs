//! CSV point files: header `f0,…,f{D−1}` with an optional trailing `label`.

use std::io::{Read, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use ndarray::{Array2, ArrayView2};

/// A parsed point file. Labels keep their original integer values.
#[derive(Debug, Clone, PartialEq)]
pub struct CloudFile {
    pub points: Array2<f64>,
    pub labels: Option<Vec<u64>>,
}

impl CloudFile {
    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }
}

fn check_header(header: &csv::StringRecord) -> Result<(usize, bool)> {
    let fields: Vec<&str> = header.iter().map(str::trim).collect();
    let has_label = fields.last() == Some(&"label");
    let dim = fields.len() - usize::from(has_label);
    if dim == 0 {
        bail!("line 1: header needs at least one feature column f0");
    }
    for (j, name) in fields[..dim].iter().enumerate() {
        if *name != format!("f{j}") {
            bail!("line 1: expected column 'f{j}', found '{name}'");
        }
    }
    Ok((dim, has_label))
}

/// Parses a point file from any reader, rejecting more than `max_points`
/// rows.
pub fn parse_cloud<R: Read>(reader: R, max_points: usize) -> Result<CloudFile> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers().map_err(|e| anyhow!("line 1: {e}"))?.clone();
    let (dim, has_label) = check_header(&header)?;
    let width = dim + usize::from(has_label);

    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut n = 0usize;
    for record in rdr.records() {
        let record = record.map_err(|e| match e.position() {
            Some(p) => anyhow!("line {}: {e}", p.line()),
            None => anyhow!("{e}"),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            bail!("line {line}: expected {width} fields, found {}", record.len());
        }
        n += 1;
        if n > max_points {
            bail!("line {line}: more than {max_points} points (raise --max-points to allow more)");
        }
        for (j, field) in record.iter().take(dim).enumerate() {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| anyhow!("line {line}: column f{j}: '{field}' is not a number"))?;
            if !v.is_finite() {
                bail!("line {line}: column f{j}: value {field} is not finite");
            }
            values.push(v);
        }
        if has_label {
            let field = record[dim].trim();
            let l: u64 = field
                .parse()
                .map_err(|_| anyhow!("line {line}: label '{field}' is not a nonnegative integer"))?;
            labels.push(l);
        }
    }
    if n == 0 {
        bail!("no data rows");
    }
    let points = Array2::from_shape_vec((n, dim), values).expect("row lengths checked");
    Ok(CloudFile {
        points,
        labels: has_label.then_some(labels),
    })
}

pub fn read_cloud(path: &Path, max_points: usize) -> Result<CloudFile> {
    let file = std::fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    parse_cloud(file, max_points).with_context(|| format!("in {}", path.display()))
}

/// Maps arbitrary label values to dense ids `0..C` in increasing value
/// order. Returns the ids and the original value of each id.
pub fn densify(labels: &[u64]) -> (Vec<usize>, Vec<u64>) {
    let mut values = labels.to_vec();
    values.sort_unstable();
    values.dedup();
    let ids = labels
        .iter()
        .map(|l| values.binary_search(l).expect("value present"))
        .collect();
    (ids, values)
}

/// Writes a point file. Values use Rust's shortest round-trip formatting.
pub fn write_cloud<W: Write>(
    out: W,
    points: ArrayView2<'_, f64>,
    labels: Option<&[usize]>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (0..points.ncols()).map(|j| format!("f{j}")).collect();
    if labels.is_some() {
        header.push("label".into());
    }
    w.write_record(&header)?;
    for (i, row) in points.rows().into_iter().enumerate() {
        let mut fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        if let Some(l) = labels {
            fields.push(l[i].to_string());
        }
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}
