use std::io::Write;
use std::path::{Path, PathBuf};

use log::warn;

use super::global::FeatureSource;
use crate::error::{Error, Result};
use crate::geometry::{BinaryMask, Point2, PoseVariant};

const MAGIC: &[u8; 4] = b"FMAP";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 24;

/// A `rows × cols` grid of `dim`-vectors, row-major with the descriptor
/// index varying fastest. `cell_size` is the number of canvas pixels per
/// cell along each axis.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    rows: usize,
    cols: usize,
    dim: usize,
    cell_size: f32,
    values: Vec<f32>,
}

impl FeatureMap {
    pub fn new(rows: usize, cols: usize, dim: usize, cell_size: f32, values: Vec<f32>) -> Result<Self> {
        if rows < 4 || cols < 4 {
            return Err(Error::Format(format!("grid {rows}x{cols} is smaller than 4x4")));
        }
        if dim == 0 {
            return Err(Error::Format("descriptor dimension must be at least 1".into()));
        }
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(Error::Format(format!("cell size {cell_size} must be positive")));
        }
        let expected = rows * cols * dim;
        if values.len() != expected {
            return Err(Error::Dimension { expected, actual: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Format("non-finite descriptor component".into()));
        }
        Ok(Self { rows, cols, dim, cell_size, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size as f64
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn cell(&self, row: usize, col: usize) -> &[f32] {
        let i = (row * self.cols + col) * self.dim;
        &self.values[i..i + self.dim]
    }

    /// Cell containing canvas point `p`; may lie outside the grid.
    pub fn cell_of(&self, p: Point2) -> (i64, i64) {
        let cs = self.cell_size();
        (((p.y + 0.5) / cs).floor() as i64, ((p.x + 0.5) / cs).floor() as i64)
    }

    /// Canvas position of a cell centre.
    pub fn cell_center(&self, row: usize, col: usize) -> Point2 {
        let cs = self.cell_size();
        Point2::new((col as f64 + 0.5) * cs - 0.5, (row as f64 + 0.5) * cs - 0.5)
    }

    pub fn scaled(&self, factor: f32) -> FeatureMap {
        FeatureMap { values: self.values.iter().map(|v| v * factor).collect(), ..self.clone() }
    }
}

/// Parses an FMAP file: `"FMAP"`, u32 version (1), u32 rows, u32 cols,
/// u32 dim, f32 cell size, then `rows·cols·dim` f32 values, all little-endian.
pub fn load_feature_map(path: impl AsRef<Path>) -> Result<FeatureMap> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse(&bytes).map_err(|e| match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn parse(bytes: &[u8]) -> Result<FeatureMap> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format("truncated header".into()));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let (rows, cols, dim) = (u32_at(8) as usize, u32_at(12) as usize, u32_at(16) as usize);
    let cell_size = f32::from_le_bytes(bytes[20..24].try_into().unwrap());
    let payload = &bytes[HEADER_LEN..];
    let expected = rows * cols * dim;
    if payload.len() != expected * 4 {
        return Err(Error::Dimension { expected, actual: payload.len() / 4 });
    }
    let values = payload.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect();
    FeatureMap::new(rows, cols, dim, cell_size, values)
}

pub fn write_feature_map(map: &FeatureMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::with_capacity(HEADER_LEN + map.values.len() * 4);
    buf.extend_from_slice(MAGIC);
    for v in [VERSION, map.rows as u32, map.cols as u32, map.dim as u32] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf.extend_from_slice(&map.cell_size.to_le_bytes());
    for v in &map.values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&buf).map_err(|e| Error::io(path, e))
}

/// `<stem>.v<NN>.fmap`
pub fn variant_path(stem: &Path, variant: PoseVariant) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(format!(".v{:02}.fmap", variant.index()));
    PathBuf::from(s)
}

/// Per-variant FMAP files sharing a stem. Variant 00 must exist; missing
/// variants are skipped with a warning.
#[derive(Debug, Clone)]
pub struct FileFeatures {
    pub stem: PathBuf,
}

impl FeatureSource for FileFeatures {
    fn variant_map(&self, _mask: &BinaryMask, variant: PoseVariant) -> Result<Option<FeatureMap>> {
        let path = variant_path(&self.stem, variant);
        if variant != PoseVariant::IDENTITY && !path.exists() {
            warn!("feature map {} missing; variant skipped", path.display());
            return Ok(None);
        }
        load_feature_map(path).map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn header(rows: u32, cols: u32, dim: u32, cs: f32) -> Vec<u8> {
        let mut b = b"FMAP".to_vec();
        for v in [1, rows, cols, dim] {
            b.extend_from_slice(&v.to_le_bytes());
        }
        b.extend_from_slice(&cs.to_le_bytes());
        b
    }

    #[test]
    fn parses_header_and_payload() {
        let mut b = header(4, 4, 2, 3.0);
        for i in 0..32 {
            b.extend_from_slice(&(i as f32).to_le_bytes());
        }
        let m = parse(&b).unwrap();
        assert_eq!((m.rows(), m.cols(), m.dim()), (4, 4, 2));
        assert_eq!(m.cell(1, 2), &[12.0, 13.0]);
        assert_eq!(m.cell_size(), 3.0);
    }

    #[test]
    fn truncated_payload_is_a_dimension_error() {
        let mut b = header(4, 4, 2, 1.0);
        b.extend_from_slice(&[0u8; 31 * 4]);
        assert!(matches!(parse(&b), Err(Error::Dimension { expected: 32, actual: 31 })));
    }

    #[test]
    fn bad_magic_and_version() {
        let mut b = header(4, 4, 1, 1.0);
        b.extend_from_slice(&[0u8; 64]);
        let mut bad = b.clone();
        bad[0] = b'X';
        assert!(matches!(parse(&bad), Err(Error::Format(_))));
        let mut bad = b.clone();
        bad[4] = 2;
        assert!(matches!(parse(&bad), Err(Error::Format(_))));
    }

    #[test]
    fn variant_file_names() {
        let p = variant_path(Path::new("/tmp/tool"), PoseVariant::new(7).unwrap());
        assert_eq!(p, PathBuf::from("/tmp/tool.v07.fmap"));
    }

    #[test]
    fn missing_variants_are_skipped_but_identity_is_required() {
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("obj");
        let mask = BinaryMask::empty(8, 8).unwrap();
        let src = FileFeatures { stem: stem.clone() };
        assert!(src.variant_map(&mask, PoseVariant::IDENTITY).is_err());
        let m = FeatureMap::new(4, 4, 1, 1.0, vec![0.5; 16]).unwrap();
        write_feature_map(&m, variant_path(&stem, PoseVariant::IDENTITY)).unwrap();
        assert_eq!(src.variant_map(&mask, PoseVariant::IDENTITY).unwrap(), Some(m));
        assert_eq!(src.variant_map(&mask, PoseVariant::new(3).unwrap()).unwrap(), None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn write_then_read_is_exact(rows in 4usize..9, cols in 4usize..9, dim in 1usize..5, cs in 0.1f32..20.0, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let values = (0..rows * cols * dim).map(|_| rng.random_range(-1e3f32..1e3)).collect();
            let m = FeatureMap::new(rows, cols, dim, cs, values).unwrap();
            let dir = tempfile::tempdir().unwrap();
            let p = dir.path().join("m.fmap");
            write_feature_map(&m, &p).unwrap();
            prop_assert_eq!(load_feature_map(&p).unwrap(), m);
        }
    }
}
