//! Spectra cached on disk, keyed by a SHA-256 of the embedding file's
//! bytes and the preprocessing that produced the spectrum.

use std::fs::File;
use std::io::{self, BufReader};
use std::path::{Path, PathBuf};

use isospec::Spectrum;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Entry {
    version: u32,
    key: String,
    n: usize,
    spectrum: Spectrum,
}

/// A cached spectrum and the row count it was computed from.
#[derive(Clone, Debug, PartialEq)]
pub struct Cached {
    pub n: usize,
    pub spectrum: Spectrum,
}

#[derive(Clone, Debug)]
pub struct SpectrumCache {
    dir: Option<PathBuf>,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl SpectrumCache {
    /// Entries go to `dir` when given, otherwise next to each input as
    /// `<file>.spectrum.json`.
    pub fn new(dir: Option<PathBuf>) -> Self {
        SpectrumCache { dir }
    }

    /// Content hash of `path` combined with the preprocessing parameters.
    pub fn key(path: &Path, params: &str) -> io::Result<String> {
        let mut h = Sha256::new();
        io::copy(&mut BufReader::with_capacity(1 << 20, File::open(path)?), &mut h)?;
        h.update(b"\n");
        h.update(params.as_bytes());
        Ok(hex(&h.finalize()))
    }

    fn location(&self, path: &Path, key: &str) -> PathBuf {
        match &self.dir {
            Some(d) => d.join(format!("{key}.spectrum.json")),
            None => {
                let mut name = path.file_name().unwrap_or_default().to_os_string();
                name.push(".spectrum.json");
                path.with_file_name(name)
            }
        }
    }

    /// The cached entry for `path`, relabelled with `lang`.
    pub fn get(&self, path: &Path, key: &str, lang: &str) -> Option<Cached> {
        let loc = self.location(path, key);
        let text = std::fs::read_to_string(&loc).ok()?;
        match serde_json::from_str::<Entry>(&text) {
            Ok(e) if e.version == VERSION && e.key == key => {
                let spectrum = Spectrum::new(lang, e.spectrum.sigma().to_vec()).ok()?;
                log::info!("using cached spectrum {}", loc.display());
                Some(Cached { n: e.n, spectrum })
            }
            Ok(_) => None,
            Err(e) => {
                log::warn!("ignoring unreadable cache entry {}: {e}", loc.display());
                None
            }
        }
    }

    /// Stores an entry; failures are logged, not fatal.
    pub fn put(&self, path: &Path, key: &str, n: usize, spectrum: &Spectrum) {
        let loc = self.location(path, key);
        let entry = Entry {
            version: VERSION,
            key: key.to_string(),
            n,
            spectrum: spectrum.clone(),
        };
        let tmp = loc.with_extension("json.tmp");
        let res = serde_json::to_string(&entry)
            .map_err(io::Error::other)
            .and_then(|text| {
                if let Some(d) = &self.dir {
                    std::fs::create_dir_all(d)?;
                }
                std::fs::write(&tmp, text)?;
                std::fs::rename(&tmp, &loc)
            });
        if let Err(e) = res {
            log::warn!("could not write spectrum cache {}: {e}", loc.display());
        }
    }
}
