//! Output files and the run manifest.
//!
//! Data files contain no timestamps, so a rerun with the same configuration
//! reproduces them byte for byte. Timestamps live only in the manifest.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use flate2::write::GzEncoder;
use flate2::Compression;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST_NAME: &str = "manifest.json";
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Identifies the run in every data file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileHeader {
    pub subcommand: String,
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
}

impl FileHeader {
    fn lines(&self) -> String {
        format!(
            "# fishery {}\n# subcommand: {}\n# config_sha256: {}\n# seed: {}\n",
            self.version, self.subcommand, self.config_hash, self.seed
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Path relative to the output directory, with `/` separators.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub subcommand: String,
    pub seed: u64,
    pub config_hash: String,
    /// Resolved configuration as TOML text.
    pub config: String,
    pub started_at: String,
    pub finished_at: String,
    pub files: Vec<FileEntry>,
}

impl RunManifest {
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_NAME);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Recomputes every listed digest and reports the first mismatch.
    pub fn verify(&self, dir: &Path) -> Result<()> {
        for f in &self.files {
            let bytes = std::fs::read(dir.join(&f.path))
                .map_err(|e| Error::io(format!("reading {}", f.path), e))?;
            if sha256_hex(&bytes) != f.sha256 {
                return Err(Error::InvalidArgument(format!("digest mismatch for {}", f.path)));
            }
        }
        Ok(())
    }
}

/// Collects the files written by one run.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    header: FileHeader,
    files: Vec<String>,
}

/// Formats a float the way every CSV in this crate does (shortest
/// round-trip representation).
pub fn cell(v: f64) -> String {
    format!("{v}")
}

impl OutputDir {
    pub fn create(root: &Path, header: FileHeader) -> Result<Self> {
        std::fs::create_dir_all(root)
            .map_err(|e| Error::io(format!("creating {}", root.display()), e))?;
        Ok(Self {
            root: root.to_path_buf(),
            header,
            files: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn header(&self) -> &FileHeader {
        &self.header
    }

    fn open(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Error::io(format!("creating {}", parent.display()), e))?;
        }
        let f = File::create(&path).map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
        if !self.files.iter().any(|n| n == name) {
            self.files.push(name.to_string());
        }
        Ok(BufWriter::new(f))
    }

    /// Writes a CSV table preceded by the `#` metadata lines.
    pub fn write_csv<I>(&mut self, name: &str, headers: &[String], rows: I) -> Result<()>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let header = self.header.lines();
        let mut w = self.open(name)?;
        w.write_all(header.as_bytes())
            .map_err(|e| Error::io(format!("writing {name}"), e))?;
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(headers)?;
        for row in rows {
            csv.write_record(&row)?;
        }
        csv.flush().map_err(|e| Error::io(format!("writing {name}"), e))?;
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(value)?;
        self.write_text(name, &text)
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        let mut w = self.open(name)?;
        w.write_all(text.as_bytes())
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(format!("writing {name}"), e))
    }

    /// Gzip-compressed JSON lines, one record per item. The gzip header
    /// carries no timestamp.
    pub fn write_jsonl_gz<T, I>(&mut self, name: &str, records: I) -> Result<()>
    where
        T: Serialize,
        I: IntoIterator<Item = T>,
    {
        let w = self.open(name)?;
        let mut gz = GzEncoder::new(w, Compression::default());
        for r in records {
            serde_json::to_writer(&mut gz, &r)?;
            gz.write_all(b"\n").map_err(|e| Error::io(format!("writing {name}"), e))?;
        }
        gz.finish()
            .and_then(|mut w| w.flush())
            .map_err(|e| Error::io(format!("writing {name}"), e))
    }

    /// Registers a file written by someone else (e.g. a policy save).
    pub fn register(&mut self, name: &str) {
        if !self.files.iter().any(|n| n == name) {
            self.files.push(name.to_string());
        }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Digests every file and writes the manifest.
    pub fn finish(self, config_toml: &str, started_at: String) -> Result<RunManifest> {
        let mut files = Vec::with_capacity(self.files.len());
        for name in &self.files {
            let bytes = std::fs::read(self.root.join(name))
                .map_err(|e| Error::io(format!("reading {name}"), e))?;
            files.push(FileEntry {
                path: name.clone(),
                sha256: sha256_hex(&bytes),
                bytes: bytes.len() as u64,
            });
        }
        files.sort_by(|a, b| a.path.cmp(&b.path));
        let manifest = RunManifest {
            version: self.header.version.clone(),
            subcommand: self.header.subcommand.clone(),
            seed: self.header.seed,
            config_hash: self.header.config_hash.clone(),
            config: config_toml.to_string(),
            started_at,
            finished_at: now_rfc3339(),
            files,
        };
        let text = serde_json::to_string_pretty(&manifest)?;
        std::fs::write(self.root.join(MANIFEST_NAME), text)
            .map_err(|e| Error::io("writing manifest", e))?;
        Ok(manifest)
    }
}

pub fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339()
}

/// Reads a CSV written by [`OutputDir::write_csv`], skipping the metadata
/// lines. Returns the header and the records.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let headers = rdr.headers()?.iter().map(str::to_string).collect();
    let rows = rdr
        .records()
        .map(|r| r.map(|r| r.iter().map(str::to_string).collect()))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok((headers, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header() -> FileHeader {
        FileHeader {
            subcommand: "evaluate".into(),
            config_hash: "abc".into(),
            seed: 3,
            version: CODE_VERSION.into(),
        }
    }

    #[test]
    fn csv_has_metadata_and_roundtrips() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path(), header()).unwrap();
        let headers = vec!["a".to_string(), "b".to_string()];
        out.write_csv("t.csv", &headers, vec![vec![cell(0.1), cell(2.0)]]).unwrap();
        let text = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
        assert!(text.starts_with("# fishery "));
        assert!(text.contains("# config_sha256: abc"));
        assert!(text.contains("# seed: 3"));
        let (h, rows) = read_csv(&dir.path().join("t.csv")).unwrap();
        assert_eq!(h, headers);
        assert_eq!(rows, vec![vec!["0.1".to_string(), "2".to_string()]]);
    }

    #[test]
    fn manifest_lists_every_file_with_digest() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path(), header()).unwrap();
        out.write_text("sub/a.txt", "hello").unwrap();
        out.write_jsonl_gz("t.jsonl.gz", [1, 2, 3]).unwrap();
        let m = out.finish("model = 1\n", now_rfc3339()).unwrap();
        assert_eq!(m.files.len(), 2);
        assert_eq!(m.files[0].path, "sub/a.txt");
        assert_eq!(m.files[0].sha256, sha256_hex(b"hello"));
        let loaded = RunManifest::load(dir.path()).unwrap();
        assert_eq!(loaded, m);
        loaded.verify(dir.path()).unwrap();
        std::fs::write(dir.path().join("sub/a.txt"), "changed").unwrap();
        assert!(loaded.verify(dir.path()).is_err());
    }

    #[test]
    fn gzip_output_is_deterministic() {
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        for d in [&d1, &d2] {
            let mut out = OutputDir::create(d.path(), header()).unwrap();
            out.write_jsonl_gz("t.jsonl.gz", ["x", "y"]).unwrap();
        }
        let a = std::fs::read(d1.path().join("t.jsonl.gz")).unwrap();
        let b = std::fs::read(d2.path().join("t.jsonl.gz")).unwrap();
        assert_eq!(a, b);
        let mut text = String::new();
        use std::io::Read;
        flate2::read::GzDecoder::new(&a[..]).read_to_string(&mut text).unwrap();
        assert_eq!(text, "\"x\"\n\"y\"\n");
    }
}
