//! Datasets: synthetic Gaussian mixtures, CSV files and directories of
//! binary PGM images.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::{self, Domain};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub points: Matrix,
    /// Class of each point, values in `0..k_true`.
    pub labels: Option<Vec<usize>>,
    /// Where the points came from, echoed into reports.
    pub source: String,
}

impl Dataset {
    pub fn new(points: Matrix, labels: Option<Vec<usize>>, source: impl Into<String>) -> Result<Self> {
        if let Some(l) = &labels {
            if l.len() != points.n_rows() {
                return Err(Error::param(format!("{} labels for {} points", l.len(), points.n_rows())));
            }
            check_contiguous(l)?;
        }
        Ok(Dataset { points, labels, source: source.into() })
    }

    pub fn n_classes(&self) -> Option<usize> {
        self.labels.as_ref().map(|l| l.iter().max().map_or(0, |m| m + 1))
    }

    /// Pixel values divided by 255.
    pub fn normalized_pixels(&self) -> Dataset {
        Dataset {
            points: self.points.scaled(1.0 / 255.0),
            labels: self.labels.clone(),
            source: format!("{} (pixels/255)", self.source),
        }
    }
}

fn check_contiguous(labels: &[usize]) -> Result<()> {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut seen = vec![false; k];
    for &l in labels {
        seen[l] = true;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::param(format!("labels skip class {missing}; expected 0..{k}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub center_scale: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

/// `k` Gaussian centers scaled by `center_scale`; point `i` belongs to
/// cluster `i mod k` and is its center plus `noise_sigma` Gaussian noise.
pub fn generate_mixture(spec: &MixtureSpec) -> Result<Dataset> {
    let MixtureSpec { n, d, k, center_scale, noise_sigma, seed } = *spec;
    if k == 0 || n < k || d == 0 {
        return Err(Error::param(format!("mixture needs n >= k >= 1 and d >= 1 (n={n}, d={d}, k={k})")));
    }
    if noise_sigma.is_nan() || noise_sigma < 0.0 || !center_scale.is_finite() || !noise_sigma.is_finite() {
        return Err(Error::param("mixture needs finite center_scale and noise_sigma >= 0"));
    }
    let mut center_rng = rng::stream(seed, Domain::Mixture, 0);
    let centers: Vec<f64> = (0..k * d)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut center_rng);
            center_scale * z
        })
        .collect();
    let mut noise_rng = rng::stream(seed, Domain::Mixture, 1);
    let mut data = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % k;
        labels.push(c);
        for j in 0..d {
            let z: f64 = StandardNormal.sample(&mut noise_rng);
            data.push(centers[c * d + j] + noise_sigma * z);
        }
    }
    Dataset::new(
        Matrix::new(n, d, data)?,
        Some(labels),
        format!("mixture(n={n}, d={d}, k={k}, center_scale={center_scale}, noise_sigma={noise_sigma}, seed={seed})"),
    )
}

/// Reads comma-separated numbers. Lines starting with `#` are skipped. A
/// first row that does not parse as numbers is a header; a header whose last column is `label` marks that column as
/// class labels.
pub fn read_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text, &path.display().to_string())
}

/// [`read_csv`] over an in-memory string; `origin` names it in errors.
pub fn parse_csv(text: &str, origin: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let parse_err =
        |row: usize, column: usize, message: String| Error::Parse { path: origin.to_string(), row, column, message };

    let mut records = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| parse_err(i + 1, 0, e.to_string()))?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        let line = rec.position().map_or(i as u64 + 1, csv::Position::line) as usize;
        records.push((line, rec));
    }
    if records.is_empty() {
        return Err(parse_err(1, 0, "no data rows".into()));
    }

    let first_is_header = records[0].1.iter().any(|f| f.parse::<f64>().is_err());
    let mut has_labels = false;
    if first_is_header {
        let (_, header) = records.remove(0);
        has_labels = header.iter().next_back() == Some("label");
        if records.is_empty() {
            return Err(parse_err(2, 0, "header without data rows".into()));
        }
    }
    let width = records[0].1.len();
    let d = if has_labels { width - 1 } else { width };
    if d == 0 {
        return Err(parse_err(records[0].0, 1, "no feature columns".into()));
    }

    let mut values = Vec::with_capacity(records.len() * d);
    let mut labels = Vec::new();
    for (row, rec) in &records {
        if rec.len() != width {
            return Err(parse_err(
                *row,
                rec.len().min(width) + 1,
                format!("row has {} fields, expected {width}", rec.len()),
            ));
        }
        for (j, field) in rec.iter().enumerate() {
            if has_labels && j == d {
                let l = field
                    .parse::<usize>()
                    .map_err(|_| parse_err(*row, j + 1, format!("label '{field}' is not a class index")))?;
                labels.push(l);
            } else {
                let v = field
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(*row, j + 1, format!("'{field}' is not a finite number")))?;
                values.push(v);
            }
        }
    }
    let points = Matrix::new(records.len(), d, values)?;
    let labels = has_labels.then_some(labels);
    if let Some(l) = &labels {
        check_contiguous(l).map_err(|e| parse_err(0, d + 1, e.to_string()))?;
    }
    Dataset::new(points, labels, origin)
}

/// Writes a header (`x0,…,x{d-1}[,label]`) and one row per point. Values use
/// the shortest decimal form that parses back to the same double.
pub fn write_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, csv_string(dataset)).map_err(|e| Error::io(path, e))
}

pub fn csv_string(dataset: &Dataset) -> String {
    let d = dataset.points.n_cols();
    let mut out = String::new();
    let mut header: Vec<String> = (0..d).map(|j| format!("x{j}")).collect();
    if dataset.labels.is_some() {
        header.push("label".into());
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for (i, row) in dataset.points.row_iter().enumerate() {
        let mut fields: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        if let Some(l) = &dataset.labels {
            fields.push(l[i].to_string());
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Grayscale image as read from a binary PGM file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    /// Row-major pixels.
    pub pixels: Vec<u8>,
}

/// Parses a binary (`P5`) PGM with maxval at most 255.
pub fn parse_pgm(bytes: &[u8], origin: &Path) -> Result<GrayImage> {
    let fmt_err = |message: String| Error::Format { path: origin.to_path_buf(), message };
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        let magic = String::from_utf8_lossy(&bytes[..bytes.len().min(2)]).into_owned();
        return Err(fmt_err(format!("unsupported magic number '{magic}', expected P5")));
    }
    let mut pos = 2;
    let mut header = [0usize; 3];
    for field in header.iter_mut() {
        // Whitespace and '#' comments may precede each header number.
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(fmt_err("truncated or malformed header".into()));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| fmt_err("header number out of range".into()))?;
    }
    let [width, height, maxval] = header;
    if width == 0 || height == 0 {
        return Err(fmt_err(format!("empty image {width}x{height}")));
    }
    if maxval == 0 || maxval > 255 {
        return Err(fmt_err(format!("maxval {maxval} unsupported; need 1..=255")));
    }
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(fmt_err("missing whitespace after maxval".into()));
    }
    pos += 1;
    let len = width * height;
    let pixels = bytes
        .get(pos..pos + len)
        .ok_or_else(|| fmt_err(format!("expected {len} pixel bytes, found {}", bytes.len() - pos)))?;
    Ok(GrayImage { width, height, pixels: pixels.to_vec() })
}

pub fn encode_pgm(image: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend_from_slice(&image.pixels);
    out
}

pub fn write_pgm(image: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&encode_pgm(image)).map_err(|e| Error::io(path, e))
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut entries = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|e| e.map(|e| e.path()).map_err(|err| Error::io(dir, err)))
        .collect::<Result<Vec<_>>>()?;
    entries.sort();
    Ok(entries)
}

fn is_pgm(path: &Path) -> bool {
    path.is_file() && path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
}

/// Loads every `.pgm` under `path`, one row per image (pixels flattened
/// row-major). Each subdirectory is a class, numbered in lexicographic
/// order; files are read in lexicographic order too. A directory with no
/// subdirectories yields an unlabelled dataset of its own images.
pub fn load_image_dir(path: impl AsRef<Path>, expected_size: Option<(usize, usize)>) -> Result<Dataset> {
    let root = path.as_ref();
    let entries = sorted_entries(root)?;
    let class_dirs: Vec<&PathBuf> = entries.iter().filter(|p| p.is_dir()).collect();

    let mut files: Vec<(PathBuf, Option<usize>)> = Vec::new();
    if class_dirs.is_empty() {
        files.extend(entries.iter().filter(|p| is_pgm(p)).map(|p| (p.clone(), None)));
    } else {
        for (class, dir) in class_dirs.iter().enumerate() {
            let images: Vec<PathBuf> = sorted_entries(dir)?.into_iter().filter(|p| is_pgm(p)).collect();
            if images.is_empty() {
                return Err(Error::Format {
                    path: dir.to_path_buf(),
                    message: "class directory holds no .pgm images".into(),
                });
            }
            files.extend(images.into_iter().map(|p| (p, Some(class))));
        }
    }
    if files.is_empty() {
        return Err(Error::Format { path: root.to_path_buf(), message: "no .pgm images found".into() });
    }

    let mut shape = expected_size;
    let mut data = Vec::new();
    let mut labels = Vec::new();
    for (file, label) in &files {
        let bytes = fs::read(file).map_err(|e| Error::io(file, e))?;
        let img = parse_pgm(&bytes, file)?;
        let (h, w) = *shape.get_or_insert((img.height, img.width));
        if (img.height, img.width) != (h, w) {
            return Err(Error::Format {
                path: file.clone(),
                message: format!("image is {}x{}, expected {h}x{w} (height x width)", img.height, img.width),
            });
        }
        data.extend(img.pixels.iter().map(|&p| f64::from(p)));
        if let Some(l) = label {
            labels.push(*l);
        }
    }
    let (h, w) = shape.expect("at least one image");
    let points = Matrix::new(files.len(), h * w, data)?;
    let labels = (!labels.is_empty()).then_some(labels);
    Dataset::new(points, labels, format!("pgm-dir({})", root.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_without_header() {
        let ds = parse_csv("1,2\n3,4\n", "mem").unwrap();
        assert_eq!(ds.points, Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap());
        assert_eq!(ds.labels, None);
    }

    #[test]
    fn csv_with_labels() {
        let ds = parse_csv("x0,x1,label\n1,2,0\n3,4,1\n", "mem").unwrap();
        assert_eq!(ds.points.shape(), (2, 2));
        assert_eq!(ds.labels, Some(vec![0, 1]));
        // A header without a trailing "label" column keeps every column numeric.
        let ds = parse_csv("a,b\n1,2\n", "mem").unwrap();
        assert_eq!(ds.points.shape(), (1, 2));
        assert_eq!(ds.labels, None);
    }

    #[test]
    fn csv_errors_locate_the_problem() {
        match parse_csv("1,2\n3\n", "mem") {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 2),
            other => panic!("{other:?}"),
        }
        match parse_csv("1,2\n3,abc\n", "mem") {
            Err(Error::Parse { row, column, .. }) => assert_eq!((row, column), (2, 2)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_csv("x,label\n1,0\n2,2\n", "mem"), Err(Error::Parse { .. })));
        assert!(matches!(parse_csv("", "mem"), Err(Error::Parse { .. })));
        assert!(matches!(read_csv("/nonexistent/file.csv"), Err(Error::Io { .. })));
    }

    #[test]
    fn mixture_is_balanced_and_deterministic() {
        let spec = MixtureSpec { n: 23, d: 4, k: 5, center_scale: 3.0, noise_sigma: 0.5, seed: 1 };
        let a = generate_mixture(&spec).unwrap();
        assert_eq!(a, generate_mixture(&spec).unwrap());
        let mut sizes = [0; 5];
        for &l in a.labels.as_ref().unwrap() {
            sizes[l] += 1;
        }
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn noiseless_mixture_has_k_distinct_points() {
        let spec = MixtureSpec { n: 10, d: 3, k: 2, center_scale: 1.0, noise_sigma: 0.0, seed: 4 };
        let ds = generate_mixture(&spec).unwrap();
        let mut rows: Vec<Vec<u64>> = ds.points.row_iter().map(|r| r.iter().map(|v| v.to_bits()).collect()).collect();
        rows.sort();
        rows.dedup();
        assert_eq!(rows.len(), 2);
    }

    #[test]
    fn pgm_round_trip_and_errors() {
        let img = GrayImage { width: 3, height: 2, pixels: vec![0, 1, 2, 253, 254, 255] };
        let bytes = encode_pgm(&img);
        assert_eq!(parse_pgm(&bytes, Path::new("x")).unwrap(), img);
        let commented = b"P5\n# made by hand\n3 2\n255\n\x00\x01\x02\xfd\xfe\xff";
        assert_eq!(parse_pgm(commented, Path::new("x")).unwrap(), img);
        assert!(parse_pgm(b"P2\n1 1\n255\n0", Path::new("x")).is_err());
        assert!(parse_pgm(b"P5\n2 2\n255\n\x00", Path::new("x")).is_err());
        assert!(parse_pgm(b"P5\n1 1\n65535\n\x00\x00", Path::new("x")).is_err());
    }
}
