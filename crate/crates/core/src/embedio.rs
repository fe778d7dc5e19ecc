//! Loading and preprocessing of embedding matrices.
//!
//! Input is the word2vec text format: a header line `n d`, followed by `n`
//! lines of `token v_1 ... v_d`. Files ending in `.gz` are decompressed on
//! the fly. Row order in the file is taken as frequency order, so limiting
//! the number of rows keeps the most frequent words.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use flate2::read::MultiGzDecoder;
use ndarray::{Array2, ArrayView1, ArrayView2, Axis};

use crate::{Error, Exec, Result};

/// Tolerance on unit norms and zero column means reported by the
/// invariant checks.
pub const INVARIANT_TOL: f64 = 1e-9;

/// A preprocessing step applied to a space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preprocessing {
    LengthNormalized,
    MeanCentered,
}

/// An n×d embedding matrix together with its vocabulary.
///
/// Row `i` is the vector of `vocab()[i]`. The space is immutable once built;
/// preprocessing consumes it and returns a new one.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingSpace {
    lang: String,
    vocab: Vec<String>,
    matrix: Array2<f64>,
    steps: Vec<Preprocessing>,
}

impl EmbeddingSpace {
    /// Builds a space, checking shape, finiteness and vocabulary uniqueness.
    pub fn new(lang: impl Into<String>, vocab: Vec<String>, matrix: Array2<f64>) -> Result<Self> {
        let (n, d) = matrix.dim();
        if n == 0 || d == 0 {
            return Err(Error::invalid(format!("empty embedding matrix ({n}x{d})")));
        }
        if vocab.len() != n {
            return Err(Error::invalid(format!(
                "vocabulary has {} tokens but matrix has {n} rows",
                vocab.len()
            )));
        }
        let mut seen = HashSet::with_capacity(n);
        for tok in &vocab {
            if !seen.insert(tok.as_str()) {
                return Err(Error::invalid(format!("duplicate token {tok:?}")));
            }
        }
        if let Some(((i, j), v)) = matrix.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite value {v} at row {i} ({:?}), column {j}",
                vocab[i]
            )));
        }
        Ok(EmbeddingSpace {
            lang: lang.into(),
            vocab,
            matrix: matrix.as_standard_layout().into_owned(),
            steps: Vec::new(),
        })
    }

    /// Builds a space with synthetic tokens `w0, w1, ...`.
    pub fn from_matrix(lang: impl Into<String>, matrix: Array2<f64>) -> Result<Self> {
        let vocab = (0..matrix.nrows()).map(|i| format!("w{i}")).collect();
        Self::new(lang, vocab, matrix)
    }

    pub fn lang(&self) -> &str {
        &self.lang
    }

    pub fn with_lang(mut self, lang: impl Into<String>) -> Self {
        self.lang = lang.into();
        self
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn matrix(&self) -> ArrayView2<'_, f64> {
        self.matrix.view()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.matrix.row(i)
    }

    /// Number of rows.
    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    /// Dimensionality.
    pub fn d(&self) -> usize {
        self.matrix.ncols()
    }

    /// Preprocessing steps applied so far, in order.
    pub fn steps(&self) -> &[Preprocessing] {
        &self.steps
    }

    pub fn is_length_normalized(&self) -> bool {
        self.steps.contains(&Preprocessing::LengthNormalized)
    }

    pub fn is_mean_centered(&self) -> bool {
        self.steps.contains(&Preprocessing::MeanCentered)
    }

    /// Keeps only the first `n` rows (no-op when `n >= self.n()`).
    pub fn truncate(mut self, n: usize) -> Self {
        if n >= 1 && n < self.n() {
            self.matrix = self.matrix.slice_move(ndarray::s![..n, ..]);
            self.vocab.truncate(n);
        }
        self
    }

    /// Divides every row by its Euclidean norm.
    pub fn length_normalize(self) -> Result<Self> {
        self.length_normalize_with(Exec::default())
    }

    pub fn length_normalize_with(mut self, exec: Exec) -> Result<Self> {
        let d = self.d();
        let norms = {
            let m = &self.matrix;
            exec.map_range(self.n(), |i| m.row(i).dot(&m.row(i)).sqrt())
        };
        if let Some(i) = norms.iter().position(|&x| x == 0.0) {
            return Err(Error::ZeroNorm {
                token: self.vocab[i].clone(),
            });
        }
        let data = self.matrix.as_slice_mut().expect("standard layout");
        exec.for_each_chunk_mut(data, d, |i, row| {
            let nrm = norms[i];
            row.iter_mut().for_each(|x| *x /= nrm);
        });
        self.steps.push(Preprocessing::LengthNormalized);
        Ok(self)
    }

    /// Subtracts the column means.
    pub fn mean_center(mut self) -> Self {
        // second pass removes the rounding residue of the first
        for _ in 0..2 {
            let means = self.column_means();
            self.matrix -= &means;
        }
        self.steps.push(Preprocessing::MeanCentered);
        self
    }

    pub fn column_means(&self) -> ndarray::Array1<f64> {
        self.matrix
            .mean_axis(Axis(0))
            .expect("space has at least one row")
    }

    /// Applies the canonical preprocessing: length normalization, then mean
    /// centering, each optional.
    pub fn preprocess(self, normalize: bool, center: bool) -> Result<Self> {
        let s = if normalize { self.length_normalize()? } else { self };
        Ok(if center { s.mean_center() } else { s })
    }

    /// Writes the space in word2vec text format. `precision` fixes the
    /// number of decimals; `None` writes the shortest exact representation.
    pub fn write_word2vec<W: Write>(&self, mut w: W, precision: Option<usize>) -> std::io::Result<()> {
        writeln!(w, "{} {}", self.n(), self.d())?;
        for (tok, row) in self.vocab.iter().zip(self.matrix.rows()) {
            w.write_all(tok.as_bytes())?;
            for v in row {
                match precision {
                    Some(p) => write!(w, " {v:.p$}")?,
                    None => write!(w, " {v}")?,
                }
            }
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Options for [`load_embeddings`].
#[derive(Clone, Debug, Default)]
pub struct LoadOptions {
    /// Keep at most this many rows.
    pub limit: Option<usize>,
    /// Fail unless the header declares this dimensionality.
    pub expect_dim: Option<usize>,
    /// Language tag; derived from the file name when absent.
    pub lang: Option<String>,
}

/// Result of loading a file.
#[derive(Debug)]
pub struct Loaded {
    pub space: EmbeddingSpace,
    /// Rows dropped because their token was already seen.
    pub duplicates: usize,
}

/// Language tag derived from a path: the file name without `.gz`, `.vec`,
/// `.txt` suffixes.
pub fn lang_from_path(path: &Path) -> String {
    let mut name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    for ext in [".gz", ".vec", ".txt"] {
        if let Some(stripped) = name.strip_suffix(ext) {
            name = stripped.to_string();
        }
    }
    name
}

/// Loads a word2vec text file (optionally gzip-compressed).
pub fn load_embeddings(path: &Path, opts: &LoadOptions) -> Result<Loaded> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(io_err)?;
    let reader: Box<dyn Read> = if path.extension().is_some_and(|e| e == "gz") {
        Box::new(MultiGzDecoder::new(file))
    } else {
        Box::new(file)
    };
    let reader = BufReader::with_capacity(1 << 20, reader);
    let mut opts = opts.clone();
    if opts.lang.is_none() {
        opts.lang = Some(lang_from_path(path));
    }
    read_embeddings(reader, path, &opts)
}

/// Parses word2vec text from any buffered reader. `path` is only used in
/// error messages.
pub fn read_embeddings<R: BufRead>(mut reader: R, path: &Path, opts: &LoadOptions) -> Result<Loaded> {
    let path_buf = PathBuf::from(path);
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path_buf.clone(),
        line,
        msg,
    };
    let mut buf = Vec::new();
    let mut read_line = |buf: &mut Vec<u8>| -> Result<usize> {
        buf.clear();
        reader.read_until(b'\n', buf).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    };

    if read_line(&mut buf)? == 0 {
        return Err(parse_err(1, "missing header".into()));
    }
    let header = std::str::from_utf8(&buf).map_err(|_| parse_err(1, "header is not UTF-8".into()))?;
    let fields: Vec<&str> = header.split_ascii_whitespace().collect();
    let (rows, dim) = match fields.as_slice() {
        [a, b] => match (a.parse::<usize>(), b.parse::<usize>()) {
            (Ok(a), Ok(b)) if a > 0 && b > 0 => (a, b),
            _ => return Err(parse_err(1, format!("garbled header {:?}", header.trim_end()))),
        },
        _ => {
            return Err(parse_err(
                1,
                format!("header must be \"n d\", found {:?}", header.trim_end()),
            ))
        }
    };
    if let Some(expected) = opts.expect_dim {
        if expected != dim {
            return Err(Error::DimMismatch { expected, found: dim });
        }
    }
    let keep = opts.limit.map_or(rows, |l| l.min(rows));
    if keep == 0 {
        return Err(Error::invalid("row limit must be positive"));
    }

    let mut vocab = Vec::with_capacity(keep);
    let mut seen = HashSet::with_capacity(keep);
    let mut data = Vec::with_capacity(keep * dim);
    let mut duplicates = 0;
    let mut line_no = 1;
    for _ in 0..rows {
        if vocab.len() == keep {
            break;
        }
        line_no += 1;
        if read_line(&mut buf)? == 0 {
            return Err(parse_err(
                line_no,
                format!("header declares {rows} rows but the file ends after {} rows", line_no - 2),
            ));
        }
        let line = std::str::from_utf8(&buf).map_err(|_| parse_err(line_no, "line is not UTF-8".into()))?;
        let mut fields = line.split_ascii_whitespace();
        let token = fields.next().unwrap_or("");
        let start = data.len();
        let mut found = usize::from(!token.is_empty());
        for (col, field) in fields.enumerate() {
            found += 1;
            if col >= dim {
                continue;
            }
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(line_no, format!("column {}: cannot parse {field:?}", col + 1)))?;
            if !v.is_finite() {
                return Err(parse_err(line_no, format!("column {}: non-finite value {field:?}", col + 1)));
            }
            data.push(v);
        }
        if found != dim + 1 {
            return Err(Error::FieldCount {
                path: path_buf.clone(),
                line: line_no,
                expected: dim + 1,
                found,
            });
        }
        if seen.contains(token) {
            data.truncate(start);
            duplicates += 1;
            continue;
        }
        seen.insert(token.to_string());
        vocab.push(token.to_string());
    }
    if duplicates > 0 {
        log::warn!("{}: skipped {duplicates} duplicate tokens", path.display());
    }
    let n = vocab.len();
    let matrix = Array2::from_shape_vec((n, dim), data).expect("row lengths checked");
    let lang = opts
        .lang
        .clone()
        .unwrap_or_else(|| lang_from_path(path));
    Ok(Loaded {
        space: EmbeddingSpace {
            lang,
            vocab,
            matrix,
            steps: Vec::new(),
        },
        duplicates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    fn parse(text: &str, limit: Option<usize>) -> Result<Loaded> {
        let opts = LoadOptions {
            limit,
            ..Default::default()
        };
        read_embeddings(text.as_bytes(), Path::new("mem.vec"), &opts)
    }

    #[test]
    fn prefix_truncation() {
        let l = parse("3 2\na 1 0\nb 0 1\nc 1 1\n", Some(2)).unwrap();
        assert_eq!(l.space.n(), 2);
        assert_eq!(l.space.d(), 2);
        assert_eq!(l.space.vocab(), ["a", "b"]);
        assert!(l.space.steps().is_empty());
    }

    #[test]
    fn field_count_error_names_line() {
        let err = parse("2 2\na 1 0\nb 0.1\n", None).unwrap_err();
        match err {
            Error::FieldCount { line, expected, found, .. } => {
                assert_eq!((line, expected, found), (3, 3, 2));
            }
            e => panic!("unexpected {e}"),
        }
        assert!(parse("2 2\na 1 0\nb 0.1\n", None)
            .unwrap_err()
            .to_string()
            .contains(":3:"));
    }

    #[test]
    fn too_many_fields() {
        assert!(matches!(
            parse("1 2\na 1 0 3\n", None),
            Err(Error::FieldCount { found: 4, .. })
        ));
    }

    #[test]
    fn garbled_header() {
        assert!(matches!(parse("x y\n", None), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("3\n", None), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("", None), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("0 3\n", None), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn non_finite_values_rejected() {
        assert!(matches!(parse("1 2\na 1 inf\n", None), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse("1 2\na NaN 1\n", None), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse("1 2\na 1 zz\n", None), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn truncated_file() {
        assert!(matches!(parse("3 1\na 1\nb 2\n", None), Err(Error::Parse { line: 4, .. })));
        // the missing row is beyond the limit, so it is never read
        assert_eq!(parse("3 1\na 1\nb 2\n", Some(2)).unwrap().space.n(), 2);
    }

    #[test]
    fn duplicates_are_skipped_and_counted() {
        let l = parse("4 1\na 1\nb 2\na 3\nc 4\n", None).unwrap();
        assert_eq!(l.duplicates, 1);
        assert_eq!(l.space.vocab(), ["a", "b", "c"]);
        assert_eq!(l.space.matrix().column(0).to_vec(), vec![1.0, 2.0, 4.0]);
    }

    #[test]
    fn expect_dim_mismatch() {
        let opts = LoadOptions {
            expect_dim: Some(300),
            ..Default::default()
        };
        let r = read_embeddings("1 2\na 1 0\n".as_bytes(), Path::new("x"), &opts);
        assert!(matches!(r, Err(Error::DimMismatch { expected: 300, found: 2 })));
    }

    #[test]
    fn fasttext_trailing_space_and_crlf() {
        let l = parse("2 2\r\nde 0.5 -0.25 \r\n, 1e-3 2 \r\n", None).unwrap();
        assert_eq!(l.space.vocab(), ["de", ","]);
        assert_eq!(l.space.row(1).to_vec(), vec![1e-3, 2.0]);
    }

    #[test]
    fn gzip_input() {
        use flate2::write::GzEncoder;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("en.vec.gz");
        let mut enc = GzEncoder::new(File::create(&path).unwrap(), flate2::Compression::fast());
        enc.write_all(b"2 2\na 1 0\nb 0 1\n").unwrap();
        enc.finish().unwrap();
        let l = load_embeddings(&path, &LoadOptions::default()).unwrap();
        assert_eq!(l.space.lang(), "en");
        assert_eq!(l.space.n(), 2);
    }

    #[test]
    fn missing_file_names_path() {
        let err = load_embeddings(Path::new("/nonexistent/xx.vec"), &LoadOptions::default()).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/xx.vec"));
    }

    #[test]
    fn lang_tags() {
        assert_eq!(lang_from_path(Path::new("/a/wiki.en.vec")), "wiki.en");
        assert_eq!(lang_from_path(Path::new("fi.vec.gz")), "fi");
        assert_eq!(lang_from_path(Path::new("de")), "de");
    }

    #[test]
    fn normalize_three_four_five() {
        let s = EmbeddingSpace::from_matrix("x", array![[3.0, 4.0], [1.0, 0.0]]).unwrap();
        let s = s.length_normalize().unwrap();
        assert_eq!(s.row(0).to_vec(), vec![0.6, 0.8]);
        assert_eq!(s.row(1).to_vec(), vec![1.0, 0.0]);
        assert!(s.is_length_normalized());
    }

    #[test]
    fn normalize_zero_row_names_token() {
        let s = EmbeddingSpace::new("x", vec!["a".into(), "zero".into()], array![[1.0, 0.0], [0.0, 0.0]]).unwrap();
        match s.length_normalize() {
            Err(Error::ZeroNorm { token }) => assert_eq!(token, "zero"),
            r => panic!("unexpected {r:?}"),
        }
    }

    #[test]
    fn center_examples() {
        let s = EmbeddingSpace::from_matrix("x", array![[1.0, 0.0], [3.0, 0.0]]).unwrap();
        let c = s.mean_center();
        assert_eq!(c.matrix(), array![[-1.0, 0.0], [1.0, 0.0]]);
        assert!(c.is_mean_centered());

        let one = EmbeddingSpace::from_matrix("x", array![[0.3, -7.0, 2.5]]).unwrap().mean_center();
        assert!(one.matrix().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn new_rejects_bad_input() {
        assert!(EmbeddingSpace::new("x", vec!["a".into(), "a".into()], array![[1.0], [2.0]]).is_err());
        assert!(EmbeddingSpace::new("x", vec!["a".into()], array![[f64::NAN]]).is_err());
        assert!(EmbeddingSpace::new("x", vec![], Array2::zeros((0, 3))).is_err());
        assert!(EmbeddingSpace::new("x", vec!["a".into()], array![[1.0], [2.0]]).is_err());
    }

    #[test]
    fn write_then_read_is_identity() {
        let s = crate::synth::gaussian_space("t", 20, 7, 3);
        let mut buf = Vec::new();
        s.write_word2vec(&mut buf, None).unwrap();
        let back = read_embeddings(&buf[..], Path::new("t"), &LoadOptions::default()).unwrap();
        assert_eq!(back.space.matrix(), s.matrix());
        assert_eq!(back.space.vocab(), s.vocab());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn centering_zeroes_column_means(seed in any::<u64>(), n in 1usize..60, d in 1usize..12, shift in -100.0f64..100.0) {
            let s = crate::synth::gaussian_space("p", n, d, seed);
            let m = s.matrix().mapv(|v| v * 3.0 + shift);
            let c = EmbeddingSpace::from_matrix("p", m).unwrap().mean_center();
            prop_assert!(c.column_means().iter().all(|m| m.abs() <= INVARIANT_TOL));
            let again = c.clone().mean_center();
            let diff = (&again.matrix() - &c.matrix()).iter().fold(0.0f64, |a, v| a.max(v.abs()));
            prop_assert!(diff <= 1e-12);
        }

        #[test]
        fn normalized_rows_have_unit_norm(seed in any::<u64>(), n in 1usize..60, d in 1usize..12) {
            let s = crate::synth::gaussian_space("p", n, d, seed).length_normalize().unwrap();
            for row in s.matrix().rows() {
                prop_assert!((row.dot(&row).sqrt() - 1.0).abs() <= INVARIANT_TOL);
            }
            let twice = s.clone().length_normalize().unwrap();
            let diff = (&twice.matrix() - &s.matrix()).iter().fold(0.0f64, |a, v| a.max(v.abs()));
            prop_assert!(diff <= 1e-15);
        }

        #[test]
        fn pipeline_is_deterministic(seed in any::<u64>()) {
            let s = crate::synth::gaussian_space("p", 30, 5, seed);
            let mut buf = Vec::new();
            s.write_word2vec(&mut buf, Some(4)).unwrap();
            let run = || read_embeddings(&buf[..], Path::new("p"), &LoadOptions::default())
                .unwrap().space.preprocess(true, true).unwrap();
            prop_assert_eq!(run(), run());
        }
    }
}
