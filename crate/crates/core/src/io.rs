//! Plain-text file formats.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), so values
//! survive a write → read cycle exactly; grid coordinates go through a
//! degree conversion. Blank lines and lines starting with `#` are ignored
//! by the readers unless noted.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernel::{KernelKind, KernelMatrix};
use crate::region::{Mask, Ring};
use crate::spectral::SlepianBasis;
use crate::vsh::{Block, CoeffVector, Part, TangentVector3, VectorGrid};

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn field<T: FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} '{tok}'")))
}

fn finite(x: f64, line: usize) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::parse(line, format!("non-finite value {x}")))
    }
}

fn no_trailing<'a>(mut it: impl Iterator<Item = &'a str>, line: usize) -> Result<()> {
    match it.next() {
        Some(t) => Err(Error::parse(line, format!("unexpected token '{t}'"))),
        None => Ok(()),
    }
}

/// Which blocks a coefficient file carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffKind {
    ScalarU,
    FullUvw,
}

impl CoeffKind {
    fn as_str(&self) -> &'static str {
        match self {
            CoeffKind::ScalarU => "scalar-U",
            CoeffKind::FullUvw => "full-UVW",
        }
    }
}

/// `COEFF 1 <L> <scalar-U|full-UVW>` then `TAG l m value` records.
pub fn write_coeffs(c: &CoeffVector, kind: CoeffKind) -> Result<String> {
    if kind == CoeffKind::ScalarU && c.has_tangential() {
        return Err(Error::domain("scalar-U file cannot hold V/W coefficients"));
    }
    let mut s = format!("COEFF 1 {} {}\n", c.l_max(), kind.as_str());
    for (block, l, m, x) in c.entries() {
        if kind == CoeffKind::ScalarU && block != Block::U {
            break;
        }
        let _ = writeln!(s, "{} {l} {m} {}", block.as_str(), num(x));
    }
    Ok(s)
}

pub fn read_coeffs(text: &str) -> Result<(CoeffVector, CoeffKind)> {
    let mut lines = content_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "empty coefficient file"))?;
    let mut t = header.split_whitespace();
    if t.next() != Some("COEFF") {
        return Err(Error::parse(ln, "expected 'COEFF' header"));
    }
    let version: u32 = field(t.next(), ln, "format version")?;
    if version != 1 {
        return Err(Error::parse(ln, format!("unsupported format version {version}")));
    }
    let l_max: usize = field(t.next(), ln, "bandlimit")?;
    let kind = match t.next() {
        Some("scalar-U") => CoeffKind::ScalarU,
        Some("full-UVW") => CoeffKind::FullUvw,
        other => return Err(Error::parse(ln, format!("unknown kind {other:?}"))),
    };
    no_trailing(t, ln)?;
    let mut c = CoeffVector::zeros(l_max);
    let mut seen = HashSet::new();
    for (ln, line) in lines {
        let mut t = line.split_whitespace();
        let block = match t.next() {
            Some("U") => Block::U,
            Some("V") => Block::V,
            Some("W") => Block::W,
            other => return Err(Error::parse(ln, format!("unknown tag {other:?}"))),
        };
        if kind == CoeffKind::ScalarU && block != Block::U {
            return Err(Error::parse(ln, "V/W record in a scalar-U file"));
        }
        let l: usize = field(t.next(), ln, "degree")?;
        let m: i32 = field(t.next(), ln, "order")?;
        let x = finite(field(t.next(), ln, "value")?, ln)?;
        no_trailing(t, ln)?;
        if !seen.insert((block, l, m)) {
            return Err(Error::parse(ln, format!("duplicate record {} {l} {m}", block.as_str())));
        }
        c.set(block, l, m, x).map_err(|e| Error::parse(ln, e.to_string()))?;
    }
    Ok((c, kind))
}

/// `GRID 1 nlat nlon r theta phi` then `lat lon vr vt vp` rows, north to
/// south and west to east.
pub fn write_grid(g: &VectorGrid) -> String {
    let mut s = format!("GRID 1 {} {} r theta phi\n", g.thetas.len(), g.phis.len());
    for (i, th) in g.thetas.iter().enumerate() {
        let lat = 90.0 - th.to_degrees();
        for (j, ph) in g.phis.iter().enumerate() {
            let v = g.at(i, j);
            let _ = writeln!(
                s,
                "{} {} {} {} {}",
                num(lat),
                num(ph.to_degrees()),
                num(v.r),
                num(v.t),
                num(v.p)
            );
        }
    }
    s
}

pub fn read_grid(text: &str) -> Result<VectorGrid> {
    let mut lines = content_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "empty grid file"))?;
    let t: Vec<&str> = header.split_whitespace().collect();
    if t.len() != 7 || t[0] != "GRID" || t[1] != "1" || t[4..] != ["r", "theta", "phi"] {
        return Err(Error::parse(ln, "expected 'GRID 1 nlat nlon r theta phi'"));
    }
    let nlat: usize = field(Some(t[2]), ln, "nlat")?;
    let nlon: usize = field(Some(t[3]), ln, "nlon")?;
    let mut lats = Vec::with_capacity(nlat);
    let mut lons = Vec::with_capacity(nlon);
    let mut samples = Vec::with_capacity(nlat * nlon);
    let mut last = ln;
    for (k, (ln, line)) in lines.enumerate() {
        last = ln;
        if k >= nlat * nlon {
            return Err(Error::parse(ln, "more rows than nlat·nlon"));
        }
        let mut t = line.split_whitespace();
        let mut v = [0.0; 5];
        for (x, name) in v.iter_mut().zip(["lat", "lon", "vr", "vt", "vp"]) {
            *x = finite(field(t.next(), ln, name)?, ln)?;
        }
        no_trailing(t, ln)?;
        let (i, j) = (k / nlon, k % nlon);
        if j == 0 {
            lats.push(v[0]);
        } else if v[0] != lats[i] {
            return Err(Error::parse(ln, "latitude changes within a row"));
        }
        if i == 0 {
            lons.push(v[1]);
        } else if v[1] != lons[j] {
            return Err(Error::parse(ln, "longitude does not match the first row"));
        }
        samples.push(TangentVector3::new(v[2], v[3], v[4]));
    }
    if samples.len() != nlat * nlon {
        return Err(Error::parse(last, format!("{} rows, expected {}", samples.len(), nlat * nlon)));
    }
    VectorGrid::new(
        lats.iter().map(|lat| (90.0 - lat).to_radians()).collect(),
        lons.iter().map(|lon| lon.to_radians()).collect(),
        samples,
    )
}

/// Polygon file: one ring per block of `lon_deg lat_deg` lines, blocks
/// separated by blank lines.
pub fn read_polygons(text: &str) -> Result<Vec<Ring>> {
    let mut rings = Vec::new();
    let mut current: Vec<(f64, f64)> = Vec::new();
    let mut start = 1;
    let flush = |current: &mut Vec<(f64, f64)>, rings: &mut Vec<Ring>, start: usize| -> Result<()> {
        if !current.is_empty() {
            rings.push(Ring::from_degrees(current).map_err(|e| Error::parse(start, e.to_string()))?);
            current.clear();
        }
        Ok(())
    };
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            flush(&mut current, &mut rings, start)?;
            continue;
        }
        if current.is_empty() {
            start = ln;
        }
        let mut t = line.split_whitespace();
        let lon = finite(field(t.next(), ln, "longitude")?, ln)?;
        let lat = finite(field(t.next(), ln, "latitude")?, ln)?;
        no_trailing(t, ln)?;
        if !(-90.0..=90.0).contains(&lat) {
            return Err(Error::parse(ln, format!("latitude {lat} outside [-90, 90]")));
        }
        current.push((lon, lat));
    }
    flush(&mut current, &mut rings, start)?;
    if rings.is_empty() {
        return Err(Error::parse(1, "no polygons in file"));
    }
    Ok(rings)
}

pub fn write_polygons(rings: &[Ring]) -> String {
    let blocks: Vec<String> = rings
        .iter()
        .map(|r| {
            r.vertices()
                .iter()
                .map(|(lon, lat)| format!("{} {}\n", num(lon.to_degrees()), num(lat.to_degrees())))
                .collect()
        })
        .collect();
    blocks.join("\n")
}

/// `MASK nlat nlon` then `nlat` rows of 0/1, north to south. A row is
/// either `nlon` separate tokens or one token of `nlon` digits.
pub fn read_mask(text: &str) -> Result<Mask> {
    let mut lines = content_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "empty mask file"))?;
    let mut t = header.split_whitespace();
    if t.next() != Some("MASK") {
        return Err(Error::parse(ln, "expected 'MASK nlat nlon' header"));
    }
    let nlat: usize = field(t.next(), ln, "nlat")?;
    let nlon: usize = field(t.next(), ln, "nlon")?;
    no_trailing(t, ln)?;
    let mut cells = Vec::with_capacity(nlat * nlon);
    let mut rows = 0;
    let mut last = ln;
    for (ln, line) in lines {
        last = ln;
        let toks: Vec<&str> = line.split_whitespace().collect();
        let digits: Vec<char> = if toks.len() == 1 {
            toks[0].chars().collect()
        } else {
            toks.iter()
                .map(|t| if t.len() == 1 { t.chars().next().unwrap() } else { '?' })
                .collect()
        };
        if digits.len() != nlon {
            return Err(Error::parse(ln, format!("{} cells, expected {nlon}", digits.len())));
        }
        for d in digits {
            cells.push(match d {
                '0' => false,
                '1' => true,
                _ => return Err(Error::parse(ln, "mask cells must be 0 or 1")),
            });
        }
        rows += 1;
        if rows > nlat {
            return Err(Error::parse(ln, "more rows than nlat"));
        }
    }
    if rows != nlat {
        return Err(Error::parse(last, format!("{rows} rows, expected {nlat}")));
    }
    Mask::new(nlat, nlon, cells)
}

pub fn write_mask(m: &Mask) -> String {
    let mut s = format!("MASK {} {}\n", m.nlat(), m.nlon());
    for i in 0..m.nlat() {
        s.extend((0..m.nlon()).map(|j| if m.cell(i, j) { '1' } else { '0' }));
        s.push('\n');
    }
    s
}

/// `KERNEL kind L n` then `n` rows of `n` values.
pub fn write_kernel(k: &KernelMatrix) -> String {
    let n = k.dim();
    let mut s = format!("KERNEL {} {} {n}\n# region {}\n", k.kind.name(), k.l_max, k.region);
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| num(k.matrix[(i, j)])).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

pub fn read_kernel(text: &str) -> Result<KernelMatrix> {
    let region = text
        .lines()
        .find_map(|l| l.trim().strip_prefix("# region ").map(|r| r.trim().to_string()))
        .unwrap_or_else(|| "unknown".into());
    let mut lines = content_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "empty kernel file"))?;
    let mut t = header.split_whitespace();
    if t.next() != Some("KERNEL") {
        return Err(Error::parse(ln, "expected 'KERNEL kind L n' header"));
    }
    let kind: KernelKind = t
        .next()
        .ok_or_else(|| Error::parse(ln, "missing kind"))?
        .parse()
        .map_err(|e: Error| Error::parse(ln, e.to_string()))?;
    let l_max: usize = field(t.next(), ln, "bandlimit")?;
    let n: usize = field(t.next(), ln, "size")?;
    no_trailing(t, ln)?;
    if n != kind.dim(l_max) {
        return Err(Error::parse(ln, format!("size {n} does not match {} at L = {l_max}", kind.name())));
    }
    let mut data = Vec::with_capacity(n * n);
    let mut rows = 0;
    let mut last = ln;
    for (ln, line) in lines {
        last = ln;
        let before = data.len();
        for tok in line.split_whitespace() {
            data.push(finite(field(Some(tok), ln, "matrix entry")?, ln)?);
        }
        if data.len() - before != n {
            return Err(Error::parse(ln, format!("row has {} entries, expected {n}", data.len() - before)));
        }
        rows += 1;
    }
    if rows != n {
        return Err(Error::parse(last, format!("{rows} rows, expected {n}")));
    }
    let matrix = DMatrix::from_row_slice(n, n, &data);
    KernelMatrix::new(kind, l_max, matrix, region)
}

/// `alpha m lambda` rows, `alpha` starting at 1.
pub fn write_eigenvalues(basis: &SlepianBasis) -> String {
    let mut s = String::from("# alpha m lambda\n");
    for (a, (m, l)) in basis.orders.iter().zip(&basis.lambdas).enumerate() {
        let _ = writeln!(s, "{} {m} {}", a + 1, num(*l));
    }
    s
}

pub fn read_eigenvalues(text: &str) -> Result<Vec<(usize, i32, f64)>> {
    content_lines(text)
        .map(|(ln, line)| {
            let mut t = line.split_whitespace();
            let a: usize = field(t.next(), ln, "alpha")?;
            let m: i32 = field(t.next(), ln, "order")?;
            let l: f64 = finite(field(t.next(), ln, "lambda")?, ln)?;
            no_trailing(t, ln)?;
            Ok((a, m, l))
        })
        .collect()
}

/// `BASIS 1 L kind count region`, then per column a `COLUMN alpha m lambda`
/// line followed by one line of coefficients in the canonical layout of `kind`.
pub fn write_basis(basis: &SlepianBasis) -> Result<String> {
    if basis.kernel.order().is_some() {
        return Err(Error::domain("only merged or dense bases can be written"));
    }
    let mut s = format!(
        "BASIS 1 {} {} {} {}\n",
        basis.l_max,
        basis.kind().as_str(),
        basis.len(),
        basis.region
    );
    for a in 0..basis.len() {
        let _ = writeln!(s, "COLUMN {} {} {}", a + 1, basis.orders[a], num(basis.lambdas[a]));
        let row: Vec<String> = basis.column(a)?.iter().map(|&x| num(x)).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    Ok(s)
}

pub fn read_basis(text: &str) -> Result<SlepianBasis> {
    let mut lines = content_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "empty basis file"))?;
    let t: Vec<&str> = header.split_whitespace().collect();
    if t.len() != 6 || t[0] != "BASIS" || t[1] != "1" {
        return Err(Error::parse(ln, "expected 'BASIS 1 L kind count region'"));
    }
    let l_max: usize = field(Some(t[2]), ln, "bandlimit")?;
    let part: Part = t[3].parse().map_err(|e: Error| Error::parse(ln, e.to_string()))?;
    let count: usize = field(Some(t[4]), ln, "count")?;
    let region = t[5].to_string();
    let dim = part.dim(l_max);
    if count > dim {
        return Err(Error::parse(ln, format!("{count} columns exceed dimension {dim}")));
    }
    let mut lambdas = Vec::with_capacity(count);
    let mut orders = Vec::with_capacity(count);
    let mut data = Vec::with_capacity(count * dim);
    let mut last = ln;
    while let Some((ln, line)) = lines.next() {
        let mut t = line.split_whitespace();
        if t.next() != Some("COLUMN") {
            return Err(Error::parse(ln, "expected 'COLUMN alpha m lambda'"));
        }
        let a: usize = field(t.next(), ln, "alpha")?;
        if a != lambdas.len() + 1 {
            return Err(Error::parse(ln, format!("column {a} out of sequence")));
        }
        orders.push(field(t.next(), ln, "order")?);
        lambdas.push(finite(field(t.next(), ln, "lambda")?, ln)?);
        no_trailing(t, ln)?;
        let (ln, row) = lines
            .next()
            .ok_or_else(|| Error::parse(ln, "missing coefficient row"))?;
        last = ln;
        let before = data.len();
        for tok in row.split_whitespace() {
            data.push(finite(field(Some(tok), ln, "coefficient")?, ln)?);
        }
        if data.len() - before != dim {
            return Err(Error::parse(ln, format!("{} coefficients, expected {dim}", data.len() - before)));
        }
    }
    if lambdas.len() != count {
        return Err(Error::parse(last, format!("{} columns, expected {count}", lambdas.len())));
    }
    Ok(SlepianBasis {
        l_max,
        region,
        kernel: KernelKind::for_part(part),
        lambdas,
        orders,
        vectors: DMatrix::from_column_slice(dim, count, &data),
    })
}

pub fn read_file(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    Ok(fs::write(path, text)?)
}
